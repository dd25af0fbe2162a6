"""Acceptance suite: one test per criterion, verdicts summarized at the end of the run."""

import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import run_cli
from logistic_grn import (
    HillSpec,
    IntegratorConfig,
    LogisticSpec,
    Orientation,
    basal_rate,
    hill_alpha_crit,
    hopf_critical_delay,
    logistic_saddle_nodes,
    simulate_dde,
)
from logistic_grn.analysis import characteristic_residual
from logistic_grn.calibration import LinearActivationReference
from logistic_grn.models import PositiveAutoregulation, hematopoiesis, hill_twin, oscillator, two_node_lipschitz
from logistic_grn.presets import PRESETS, simulate_model
from logistic_grn.sigmoid import (
    hill_derivative,
    hill_eval,
    hill_inverse,
    log_input_equivalence,
    logistic_derivative,
    logistic_eval,
    logistic_inverse,
    logit,
    standard_logistic,
)

DEC = Orientation.DECREASING


def _best_time(fn, repeats=20):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_criterion_01_hill_alpha_crit(criterion):
    _, alpha = hill_alpha_crit(3, 1)
    exact = 3.0 / 2.0 ** (2.0 / 3.0)
    criterion(
        1,
        {"closed form 1e-9": abs(alpha - exact) <= 1e-9, "printed 1.89": round(alpha, 2) == 1.89},
        f"alpha_crit = {alpha:.9f}",
    )


def test_criterion_02_logistic_saddle_nodes(criterion):
    report = logistic_saddle_nodes(3.0, 1.0)
    z_lo, z_hi = sorted(n.z for n in report.saddle_nodes)
    oracle_lo = brentq(lambda z: math.exp(z) - z - 2.0, -10, 0, xtol=1e-14)
    oracle_hi = brentq(lambda z: math.exp(z) - z - 2.0, 0, 10, xtol=1e-14)
    elapsed = _best_time(lambda: logistic_saddle_nodes(3.0, 1.0))
    criterion(
        2,
        {
            "z_lo": abs(z_lo + 1.8414) <= 1e-3 and abs(z_lo - oracle_lo) <= 1e-12,
            "z_hi": abs(z_hi - 1.1462) <= 1e-3 and abs(z_hi - oracle_hi) <= 1e-12,
            "alpha upper": abs(report.alpha_crit_upper - 2.823) <= 5e-3,
            "alpha lower": abs(report.alpha_crit_lower - 1.821) <= 5e-3,
            "runtime < 1 ms": elapsed < 1e-3,
        },
        f"z = ({z_lo:.5f}, {z_hi:.5f}), alpha = ({report.alpha_crit_lower:.4f}, {report.alpha_crit_upper:.4f}), {elapsed * 1e6:.0f} us",
    )


def test_criterion_03_bistable_band_table(criterion):
    table = {2.0: (2.00, 4.00), 4.0: (1.56, 2.28), 5.0: (1.41, 1.96)}
    checks, parts = {}, []
    t0 = time.perf_counter()
    for lam, (lo, hi) in table.items():
        band = logistic_saddle_nodes(lam, 1.0)
        got = (band.alpha_crit_lower, band.alpha_crit_upper)
        checks[f"lambda={lam:g}"] = abs(got[0] - lo) <= 0.01 and abs(got[1] - hi) <= 0.01
        parts.append(f"lambda={lam:g}: ({got[0]:.4f}, {got[1]:.4f}) vs ({lo}, {hi})")
    checks["runtime < 10 ms"] = time.perf_counter() - t0 < 1e-2
    criterion(3, checks, "; ".join(parts))


def test_criterion_04_lipschitz_example(criterion):
    code, report, _ = run_cli("analyze", "--preset", "two-node-lipschitz", "--mode", "lipschitz")
    assert code == 0
    criterion(
        4,
        {"bound_F == 5.5": report["bound_F"] == 5.5, "bound_DF 11.05 +- 0.01": abs(report["bound_DF"] - 11.05) <= 0.01},
        f"bound_F = {report['bound_F']}, bound_DF = {report['bound_DF']:.4f}",
    )


def test_criterion_05_oscillator_equilibrium(criterion):
    code_eq, eq, _ = run_cli("analyze", "--preset", "oscillator", "--mode", "equilibria")
    code_sim, sim, _ = run_cli("simulate", "--preset", "oscillator", "--t-end", "60")
    assert code_eq == code_sim == 0
    target = np.array([3.87, 3.25])
    state = np.array(eq["state"])
    final = np.array([sim["terminal_state"]["x1"], sim["terminal_state"]["x2"]])
    net = oscillator()
    elapsed = _best_time(lambda: simulate_model(net, (1.0, 1.0), IntegratorConfig(t_end=60.0)), repeats=3)
    criterion(
        5,
        {
            "equilibrium": bool(np.all(np.abs(state - target) <= 0.02)),
            "StableSpiral": eq["classification"] == "StableSpiral",
            "trajectory reaches it": bool(np.all(np.abs(final - state) <= 0.02)),
            "runtime < 0.1 s": elapsed < 0.1,
        },
        f"x* = ({state[0]:.4f}, {state[1]:.4f}) {eq['classification']}, x(60) = ({final[0]:.4f}, {final[1]:.4f}), {elapsed * 1e3:.0f} ms",
    )


def test_criterion_06_autoregulation_escape_and_trap(criterion):
    code_l, logi, _ = run_cli("simulate", "--preset", "autoreg-logistic", "--t-end", "10000")
    code_h, hill, _ = run_cli("simulate", "--preset", "autoreg-hill", "--t-end", "10000")
    assert code_l == code_h == 0
    model = PositiveAutoregulation()
    t0 = time.perf_counter()
    model.simulate()
    hill_traj = model.hill_twin().simulate()
    elapsed = time.perf_counter() - t0
    x_hill = hill_traj.component("x")
    escape = logi["escape_time"]
    x_end = logi["terminal_state"]["x"]
    plateau = hill["terminal_state"]["x"]
    criterion(
        6,
        {
            "alpha = 600": model.alpha == pytest.approx(600.0),
            "escape 2650 +- 10%": escape is not None and abs(escape - 2650) <= 265,
            "x(1e4) 38 +- 15%": abs(x_end - 38) <= 0.15 * 38,
            "Hill plateau 0.028 +- 10%": abs(plateau - 0.028) <= 0.0028,
            "Hill never crosses 1": hill["escape_time"] is None and float(x_hill.max()) < 1.0,
            "runtime < 2 s": elapsed < 2.0,
        },
        f"escape = {escape:.1f} s, x(1e4) = {x_end:.3f}, Hill plateau = {plateau:.5f}, {elapsed:.2f} s",
    )


def test_criterion_07_basal_values(criterion):
    model = PositiveAutoregulation()
    rate = basal_rate(LogisticSpec(3.0, 1.0))
    mrna = model.basal_mrna()
    criterion(
        7,
        {"basal rate": abs(rate - 0.04743) <= 1e-5, "basal mRNA": abs(mrna - 0.142) <= 1e-3},
        f"basal rate = {rate:.6f}, basal mRNA = {mrna:.6f}",
    )


def test_criterion_08_calibration_formulas(criterion):
    _, bio, _ = run_cli("calibrate", "--g", "50", "--g-cross", "2.5")
    _, wtd, _ = run_cli("calibrate", "--g", "50", "--weighted")
    criterion(
        8,
        {
            "biological": bio["kappa"] == 200.0 and abs(bio["lambda"] - 0.054931) <= 1e-6 and bio["theta"] == 20.0,
            "weighted": (wtd["kappa"], wtd["lambda"], wtd["theta"]) == (200.0, math.log(3.0) / 50.0, 50.0),
        },
        f"biological = ({bio['kappa']}, {bio['lambda']:.7f}, {bio['theta']}), weighted = ({wtd['kappa']}, {wtd['lambda']:.7f}, {wtd['theta']})",
    )


def _monotone(x: np.ndarray) -> bool:
    return bool(np.all(np.diff(x) >= -1e-9 * np.max(np.abs(x))))


def test_criterion_09_calibrated_vs_reference(criterion):
    ref = LinearActivationReference()
    cfg = IntegratorConfig(t_end=50.0, dense_output=True)
    t0 = time.perf_counter()
    reference = simulate_model(ref, (10.0, 10.0), cfg)
    calibrated = simulate_model(ref.logistic_network(), (10.0, 10.0), cfg)
    elapsed = time.perf_counter() - t0
    grid = np.linspace(0.0, 50.0, 1001)
    xr, xc = reference.sample(grid), calibrated.sample(grid)
    rel = np.max(np.abs(xc - xr), axis=0) / np.max(np.abs(xr), axis=0)
    criterion(
        9,
        {
            "sup-norm within 5%": bool(np.all(rel <= 0.05)),
            "monotone convergence": all(_monotone(x) for x in (*xr.T, *xc.T)),
            "runtime < 1 s": elapsed < 1.0,
        },
        f"relative sup difference A = {rel[0]:.2%}, B = {rel[1]:.2%}, {elapsed * 1e3:.0f} ms",
    )


def _draw_hopf_case(rng):
    while True:
        gamma = rng.uniform(0.5, 2.0)
        theta = rng.uniform(0.5, 2.0)
        lam = 2.0 * rng.uniform(2.0, 6.0) / theta
        kappa = 2.0 * gamma * theta * rng.uniform(0.7, 1.4)
        spec = LogisticSpec(lam, theta, DEC)
        report = hopf_critical_delay(kappa, gamma, spec, k_max=0)
        if report.beta >= 2.0 * gamma:
            return kappa, gamma, spec, report


def _complex_newton(beta, gamma, tau, s):
    for _ in range(50):
        f = s + gamma + beta * np.exp(-s * tau)
        s = s - f / (1.0 - tau * beta * np.exp(-s * tau))
    return s


def _amplitude_ratio(net, n_star, period, cycles=14):
    cfg = IntegratorConfig(t_end=cycles * period, rel_tol=1e-9, abs_tol=1e-12, dense_output=True)
    traj = simulate_dde(net, [1.02 * n_star], cfg)
    x = traj.sample(np.linspace((cycles - 2) * period, cycles * period, 2001))[:, 0]
    return np.ptp(x[1000:]) / np.ptp(x[:1001])


def test_criterion_10_hopf_properties(criterion):
    rng = np.random.default_rng(20240610)
    worst_identity = worst_residual = worst_root = 0.0
    decaying, sustained = [], []
    t0 = time.perf_counter()
    for _ in range(20):
        kappa, gamma, spec, rep = _draw_hopf_case(rng)
        beta, omega, tau_c = rep.beta, rep.omega, rep.critical_delays[0]
        worst_identity = max(worst_identity, abs(omega**2 + gamma**2 - beta**2))
        worst_residual = max(worst_residual, abs(characteristic_residual(1j * omega, beta, gamma, tau_c)))
        root = _complex_newton(beta, gamma, tau_c, 1j * omega * 1.01 + 0.01)
        worst_root = max(worst_root, abs(root - 1j * omega))
        period = 2.0 * math.pi / omega
        decaying.append(_amplitude_ratio(hematopoiesis(kappa, gamma, spec, 0.9 * tau_c), rep.equilibrium, period))
        sustained.append(_amplitude_ratio(hematopoiesis(kappa, gamma, spec, 1.1 * tau_c), rep.equilibrium, period))
    elapsed = time.perf_counter() - t0
    criterion(
        10,
        {
            "omega identity": worst_identity <= 1e-12,
            "characteristic residual": worst_residual < 1e-10,
            "independent root": worst_root < 1e-9,
            "decays at 0.9 tau_c": max(decaying) < 0.9,
            "sustains at 1.1 tau_c": min(sustained) > 0.98,
            "runtime < 30 s": elapsed < 30.0,
        },
        f"max |w^2+g^2-b^2| = {worst_identity:.1e}, max residual = {worst_residual:.1e}, "
        f"ratios 0.9tc <= {max(decaying):.3f}, 1.1tc >= {min(sustained):.3f}, {elapsed:.1f} s",
    )


def _invariant_checks() -> dict[str, bool]:
    rng = np.random.default_rng(7)
    checks = {}

    specs = [LogisticSpec(lam, th, o) for lam, th, o in zip(rng.uniform(0.2, 8, 25), rng.uniform(0.2, 5, 25), [Orientation.INCREASING, DEC] * 13)]
    x = rng.uniform(-5, 10, 200)
    ok_d = ok_sym = ok_inv = True
    for s in specs:
        f = np.asarray(logistic_eval(s, x))
        ok_d &= np.allclose(logistic_derivative(s, x), s.orientation.sign * s.steepness * f * (1 - f), rtol=1e-12, atol=1e-14 * s.steepness)
        h = 1e-6
        fd = (np.asarray(logistic_eval(s, x + h)) - np.asarray(logistic_eval(s, x - h))) / (2 * h)
        ok_d &= np.allclose(logistic_derivative(s, x), fd, atol=1e-7)
        twin = LogisticSpec(s.steepness, s.threshold, s.orientation.flipped())
        ok_sym &= np.allclose(f + np.asarray(logistic_eval(twin, x)), 1.0, rtol=0, atol=1e-14)
        mid = s.threshold + np.linspace(-10, 10, 41) / s.steepness
        ok_inv &= np.allclose(logistic_inverse(s, logistic_eval(s, mid)), mid, rtol=1e-9, atol=1e-9)
    # beyond |z| ~ 10 the logistic saturates and z is no longer recoverable to 1e-9
    z = np.linspace(-10, 10, 121)
    ok_inv &= np.allclose(logit(standard_logistic(z)), z, rtol=0, atol=1e-9)
    y = rng.uniform(1e-12, 1 - 1e-12, 500)
    ok_inv &= np.allclose(standard_logistic(logit(y)), y, rtol=1e-12, atol=0)
    for n, th in zip(rng.uniform(0.5, 6, 15), rng.uniform(0.2, 5, 15)):
        for o in Orientation:
            hs = HillSpec(n, th, o)
            xs = th * np.geomspace(1e-2, 1e2, 50)
            ok_inv &= np.allclose(hill_inverse(hs, hill_eval(hs, xs)), xs, rtol=1e-8)
    checks["derivative identity"] = bool(ok_d)
    checks["symmetry"] = bool(ok_sym)
    checks["inverse round trips"] = bool(ok_inv)

    worst_log = 0.0
    for n, th in zip(rng.uniform(0.5, 8, 20), rng.uniform(0.1, 10, 20)):
        for o in Orientation:
            worst_log = max(worst_log, float(np.max(log_input_equivalence(HillSpec(n, th, o), th * np.geomspace(1e-3, 1e3, 200)))))
    checks["log-input identity <= 1e-12"] = worst_log <= 1e-12

    ref = LinearActivationReference()
    worst_jac = 0.0
    for net in (oscillator(), oscillator(scaled=True), two_node_lipschitz(), hill_twin(oscillator()), ref.logistic_network()):
        box = np.array([hi for _, hi in net.invariant_box()])
        for _ in range(20):
            y = rng.uniform(0.05, 1.0, net.size) * box
            jac = net.jacobian(y)
            fd = np.empty_like(jac)
            for j in range(net.size):
                h = 1e-6 * max(1.0, abs(y[j]))
                e = np.zeros(net.size)
                e[j] = h
                fd[:, j] = (net.vector_field(y + e) - net.vector_field(y - e)) / (2 * h)
            worst_jac = max(worst_jac, float(np.max(np.abs(jac - fd))))
    checks["Jacobian vs finite differences <= 1e-5"] = worst_jac <= 1e-5

    positive = True
    for name, preset in PRESETS.items():
        model = preset.build()
        traj = simulate_model(model, preset.x0, preset.config)
        positive &= bool(np.all(traj.states >= 0.0))
        if hasattr(model, "invariant_box"):
            upper = np.array([hi for _, hi in model.invariant_box()])
            positive &= bool(np.all(traj.states <= upper * (1 + 1e-9)))
    checks["positive invariance of golden trajectories"] = positive

    worst_tan = 0.0
    for lam in (2.5, 3.0, 4.0, 5.0, 8.0):
        for th in (0.5, 1.0, 2.0):
            if lam * th < 2:
                continue
            spec = LogisticSpec(lam, th)
            for node in logistic_saddle_nodes(lam, th).saddle_nodes:
                worst_tan = max(
                    worst_tan,
                    abs(node.x - node.alpha * float(logistic_eval(spec, node.x))) / max(1.0, node.x),
                    abs(node.alpha * float(logistic_derivative(spec, node.x)) - 1.0),
                )
    for n in (1.5, 2.0, 3.0, 4.0):
        hs = HillSpec(n, 1.0)
        xc, ac = hill_alpha_crit(n, 1.0)
        worst_tan = max(worst_tan, abs(xc - ac * float(hill_eval(hs, xc))), abs(ac * float(hill_derivative(hs, xc)) - 1.0))
    checks["tangency residuals <= 1e-8"] = worst_tan <= 1e-8
    checks["_details"] = (worst_log, worst_jac, worst_tan)
    return checks


def test_criterion_11_invariant_suites(criterion):
    t0 = time.perf_counter()
    checks = _invariant_checks()
    worst_log, worst_jac, worst_tan = checks.pop("_details")
    elapsed = time.perf_counter() - t0
    checks["runtime < 60 s"] = elapsed < 60.0
    criterion(
        11,
        checks,
        f"log-input {worst_log:.1e}, Jacobian {worst_jac:.1e}, tangency {worst_tan:.1e}, {elapsed:.1f} s",
    )
