"""Equilibria, linear stability, autoregulation bistability and delay-induced Hopf points."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    DomainError,
    NoBistableBandError,
    OrientationError,
    SingularJacobianError,
    UnsupportedEdgeError,
)
from .network import Network
from .sigmoid import (
    HillSpec,
    LogisticSpec,
    Orientation,
    SigmoidSpec,
    hill_derivative,
    hill_eval,
    logistic_derivative,
    logistic_eval,
    standard_logistic,
)

__all__ = [
    "Stability",
    "Regime",
    "EquilibriumReport",
    "FixedPoint",
    "SaddleNode",
    "BistabilityReport",
    "HopfReport",
    "newton_solve",
    "find_equilibrium",
    "classify_2x2",
    "classify_eigenvalues",
    "autoreg_fixed_points",
    "hill_alpha_crit",
    "logistic_saddle_nodes",
    "scalar_dde_equilibrium",
    "hopf_critical_delay",
    "characteristic_residual",
]


class Stability(Enum):
    STABLE_NODE = "StableNode"
    STABLE_SPIRAL = "StableSpiral"
    SADDLE = "Saddle"
    UNSTABLE = "Unstable"
    UNDETERMINED = "Undetermined"


class Regime(Enum):
    MONOSTABLE_LOW = "MonostableLow"
    BISTABLE = "Bistable"
    MONOSTABLE_HIGH = "MonostableHigh"


def _jsonable(v):
    if isinstance(v, Enum):
        return v.value
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if hasattr(v, "to_dict"):
        return v.to_dict()
    return v


@dataclass(frozen=True)
class EquilibriumReport:
    """Steady state with its linear stability.

    ``trace``, ``determinant`` and ``discriminant`` are set for two-gene
    networks only; ``eigenvalues`` is always filled.
    """

    state: np.ndarray
    residual_norm: float
    classification: Stability
    trace: float | None = None
    determinant: float | None = None
    discriminant: float | None = None
    eigenvalues: tuple[complex, ...] = ()
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "state": _jsonable(self.state),
            "residual_norm": self.residual_norm,
            "trace": self.trace,
            "determinant": self.determinant,
            "discriminant": self.discriminant,
            "classification": self.classification.value,
            "eigenvalues": _jsonable(list(self.eigenvalues)),
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class FixedPoint:
    x: float
    stable: bool

    def to_dict(self) -> dict:
        return {"x": self.x, "stable": self.stable}


@dataclass(frozen=True)
class SaddleNode:
    """Tangency point of ``x = alpha h(x)``: ``z = lambda (x - theta)``, ``y = h(x)``."""

    z: float
    y: float
    x: float
    alpha: float

    def to_dict(self) -> dict:
        return {"z": self.z, "y": self.y, "x": self.x, "alpha": self.alpha}


@dataclass(frozen=True)
class BistabilityReport:
    """Fixed points and/or saddle-node bounds of the reduced autoregulation map."""

    alpha: float | None = None
    fixed_points: tuple[FixedPoint, ...] = ()
    alpha_crit_lower: float | None = None
    alpha_crit_upper: float | None = None
    regime: Regime | None = None
    saddle_nodes: tuple[SaddleNode, ...] = ()

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "fixed_points": [p.to_dict() for p in self.fixed_points],
            "alpha_crit_lower": self.alpha_crit_lower,
            "alpha_crit_upper": self.alpha_crit_upper,
            "regime": self.regime.value if self.regime else None,
            "saddle_nodes": [s.to_dict() for s in self.saddle_nodes],
        }


@dataclass(frozen=True)
class HopfReport:
    """Linearization of ``N' = -gamma N + kappa f(N(t - tau))`` about ``N*``.

    ``omega`` is ``None`` and ``critical_delays`` empty when ``beta <= gamma``.
    """

    equilibrium: float
    beta: float
    gamma: float
    omega: float | None = None
    critical_delays: tuple[float, ...] = field(default=())

    @property
    def has_hopf(self) -> bool:
        return self.omega is not None

    def to_dict(self) -> dict:
        return {
            "equilibrium": self.equilibrium,
            "beta": self.beta,
            "gamma": self.gamma,
            "omega": self.omega,
            "critical_delays": list(self.critical_delays),
        }


# ---------------------------------------------------------------------------
# equilibria
# ---------------------------------------------------------------------------


def newton_solve(
    func: Callable[[np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray], np.ndarray],
    guess,
    tol: float = 1e-10,
    lower=None,
    upper=None,
    max_iter: int = 100,
) -> tuple[np.ndarray, float, int]:
    """Damped Newton iteration with projection onto a box.

    Returns
    -------
    x, residual, iterations
        ``residual`` is ``max |func(x)|``.

    Raises
    ------
    SingularJacobianError
        If the Jacobian is numerically singular at an iterate.
    ConvergenceError
        If ``max_iter`` iterations do not reach ``tol``.
    """
    x = np.array(guess, dtype=float)
    lo = np.full_like(x, -np.inf) if lower is None else np.asarray(lower, dtype=float)
    hi = np.full_like(x, np.inf) if upper is None else np.asarray(upper, dtype=float)
    x = np.clip(x, lo, hi)
    F = np.asarray(func(x), dtype=float)
    res = float(np.max(np.abs(F)))
    for it in range(max_iter + 1):
        if res <= tol:
            return x, res, it
        if it == max_iter:
            break
        J = np.asarray(jac(x), dtype=float)
        if not np.all(np.isfinite(J)) or np.linalg.cond(J) > 1e13:
            raise SingularJacobianError(f"singular Jacobian at iterate {it}: x = {x.tolist()}")
        step = np.linalg.solve(J, -F)
        t = 1.0
        while True:
            x_new = np.clip(x + t * step, lo, hi)
            F_new = np.asarray(func(x_new), dtype=float)
            res_new = float(np.max(np.abs(F_new)))
            if res_new < (1.0 - 1e-4 * t) * res or t < 1e-6:
                break
            t *= 0.5
        x, F, res = x_new, F_new, res_new
    raise ConvergenceError(f"Newton did not reach {tol:g} in {max_iter} iterations (residual {res:g})")


def classify_2x2(trace: float, det: float) -> Stability:
    """Trace-determinant classification of a planar linearization."""
    if det < 0:
        return Stability.SADDLE
    if det == 0 or trace == 0:
        return Stability.UNDETERMINED
    if trace > 0:
        return Stability.UNSTABLE
    return Stability.STABLE_SPIRAL if trace * trace - 4.0 * det < 0 else Stability.STABLE_NODE


def classify_eigenvalues(eigenvalues: Sequence[complex], tol: float = 0.0) -> Stability:
    """Classification from eigenvalue real parts; ``|Re| <= tol`` is undecided."""
    ev = np.asarray(eigenvalues, dtype=complex)
    re = ev.real
    if np.any(np.abs(re) <= tol):
        return Stability.UNDETERMINED
    if np.all(re < 0):
        return Stability.STABLE_SPIRAL if np.any(ev.imag != 0) else Stability.STABLE_NODE
    if np.any(re < 0):
        return Stability.SADDLE
    return Stability.UNSTABLE


def find_equilibrium(network: Network, guess, tol: float = 1e-10, max_iter: int = 100) -> EquilibriumReport:
    """Newton steady state of a delay-free network, projected into its invariant box."""
    box = network.invariant_box()
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    x, res, it = newton_solve(network.vector_field, network.jacobian, guess, tol, lo, hi, max_iter)
    J = network.jacobian(x)
    ev = tuple(complex(v) for v in np.linalg.eigvals(J))
    if network.size == 2:
        tr = float(np.trace(J))
        det = float(np.linalg.det(J))
        return EquilibriumReport(x, res, classify_2x2(tr, det), tr, det, tr * tr - 4 * det, ev, it)
    return EquilibriumReport(x, res, classify_eigenvalues(ev, 10 * tol), eigenvalues=ev, iterations=it)


# ---------------------------------------------------------------------------
# positive autoregulation
# ---------------------------------------------------------------------------


def _response(spec: SigmoidSpec):
    if isinstance(spec, LogisticSpec):
        return (lambda x: logistic_eval(spec, x)), (lambda x: logistic_derivative(spec, x))
    if isinstance(spec, HillSpec):
        return (lambda x: hill_eval(spec, np.maximum(x, 0.0))), None
    raise UnsupportedEdgeError(f"unsupported response {type(spec).__name__}")


def _bisect(f: Callable[[float], float], a: float, b: float, fa: float, xtol: float) -> float:
    """Plain bisection on a sign-changing bracket, run to ``xtol`` or float resolution."""
    for _ in range(200):
        m = 0.5 * (a + b)
        if b - a <= xtol or m == a or m == b:
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def hill_alpha_crit(n: float, c: float) -> tuple[float, float]:
    """Saddle-node of ``x = alpha h(x)`` for an increasing Hill response.

    Returns
    -------
    x_crit, alpha_crit
        ``c (n-1)**(1/n)`` and ``n c / (n-1)**((n-1)/n)``.
    """
    if not (n > 1):
        raise DomainError(f"no tangency for Hill coefficient n = {n!r} <= 1")
    if not (c > 0):
        raise DomainError("Hill threshold must be positive")
    return c * (n - 1.0) ** (1.0 / n), n * c / (n - 1.0) ** ((n - 1.0) / n)


def _hill_zero_stable(spec: HillSpec, alpha: float) -> bool:
    n = spec.coefficient
    if n > 1:
        return True
    if n == 1:
        return 1.0 - alpha / spec.threshold > 0
    return False


def autoreg_fixed_points(response: SigmoidSpec, alpha: float) -> BistabilityReport:
    """All fixed points of ``x = alpha h(x)`` on ``[0, alpha]``.

    Sign changes of ``x - alpha h(x)`` are bracketed on a uniform grid of 10^4
    points joined with a geometric grid reaching down to ``1e-9 alpha`` (which
    resolves roots hugging the origin), then refined by bisection to 1e-10.
    A fixed point is stable when ``1 - alpha h'(x*) > 0``.
    """
    alpha = float(alpha)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise DomainError("alpha must be finite and positive")
    if response.orientation is not Orientation.INCREASING:
        raise OrientationError("autoregulation fixed points need an increasing response")
    h, _ = _response(response)

    def g(x):
        return x - alpha * h(x)

    top = alpha * (1.0 + 1e-6)
    grid = np.union1d(np.linspace(0.0, top, 10_000), np.geomspace(alpha * 1e-9, top, 4_000))
    vals = np.asarray(g(grid), dtype=float)
    roots: list[float] = [float(x) for x, v in zip(grid, vals) if v == 0.0]
    sgn = np.sign(vals)
    for k in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
        a, b = float(grid[k]), float(grid[k + 1])
        roots.append(_bisect(lambda x: float(g(x)), a, b, float(vals[k]), 1e-10))
    roots.sort()

    points = []
    for x in roots:
        if isinstance(response, HillSpec) and x == 0.0:
            points.append(FixedPoint(0.0, _hill_zero_stable(response, alpha)))
            continue
        slope = (
            logistic_derivative(response, x)
            if isinstance(response, LogisticSpec)
            else hill_derivative(response, x)
        )
        points.append(FixedPoint(x, bool(1.0 - alpha * slope > 0)))

    pattern = [p.stable for p in points]
    if pattern == [True, False, True]:
        regime = Regime.BISTABLE
    else:
        stable = [p.x for p in points if p.stable] or [points[-1].x]
        regime = Regime.MONOSTABLE_HIGH if max(stable) >= response.threshold else Regime.MONOSTABLE_LOW

    lower = upper = None
    nodes: tuple[SaddleNode, ...] = ()
    if isinstance(response, LogisticSpec):
        try:
            band = logistic_saddle_nodes(response.steepness, response.threshold)
            lower, upper, nodes = band.alpha_crit_lower, band.alpha_crit_upper, band.saddle_nodes
        except NoBistableBandError:
            pass
    elif response.coefficient > 1:
        lower = hill_alpha_crit(response.coefficient, response.threshold)[1]
    return BistabilityReport(alpha, tuple(points), lower, upper, regime, nodes)


def _root_tangency(c: float, a: float, b: float) -> float:
    """Root of ``e^z - z - c`` in a sign-changing bracket by safeguarded Newton."""

    def g(z):
        return math.exp(z) - z - c

    ga = g(a)
    z = 0.5 * (a + b)
    for _ in range(200):
        gz = g(z)
        if gz == 0.0:
            return z
        if (gz < 0) == (ga < 0):
            a, ga = z, gz
        else:
            b = z
        d = math.exp(z) - 1.0
        z_new = z - gz / d if d != 0.0 else 0.5 * (a + b)
        if not (min(a, b) < z_new < max(a, b)):
            z_new = 0.5 * (a + b)
        if abs(z_new - z) <= 1e-15 * max(1.0, abs(z)) or abs(b - a) <= 1e-15 * max(1.0, abs(z)):
            return z_new
        z = z_new
    return z


def logistic_saddle_nodes(lam: float, theta: float) -> BistabilityReport:
    """Saddle-node bounds of the bistable band for an increasing logistic.

    Tangency of ``x = alpha f(x)`` reduces, with ``z = lambda (x - theta)``, to
    ``e^z - z = lambda theta - 1``.  Each root gives ``y = s(z)`` and
    ``alpha = 1 / (lambda y (1 - y))``; the lower bound comes from the
    larger-``y`` root.  Roots exist iff ``lambda theta >= 2``; at equality
    they merge at ``z = 0`` with ``alpha = 4 / lambda``.
    """
    lam, theta = float(lam), float(theta)
    if not (lam > 0 and theta > 0):
        raise DomainError("lambda and theta must be positive")
    c = lam * theta - 1.0
    gap = 1.0 - c  # minimum of e^z - z - c, attained at z = 0
    if gap > 1e-12:
        raise NoBistableBandError(
            f"lambda*theta = {lam * theta:g} < 2: the saddle-node equation has no real roots"
        )
    if gap >= -1e-12:
        zs = [0.0]
    else:
        lo = -50.0 if (math.exp(-50.0) + 50.0 - c) > 0 else -(c + 1.0)
        hi = 50.0
        while math.exp(hi) - hi - c <= 0:
            hi *= 2.0
        zs = [_root_tangency(c, lo, 0.0), _root_tangency(c, 0.0, hi)]
    nodes = []
    for z in zs:
        y = float(standard_logistic(z))
        var = math.exp(-abs(z)) / (1.0 + math.exp(-abs(z))) ** 2
        nodes.append(SaddleNode(z, y, theta + z / lam, 1.0 / (lam * var)))
    by_y = sorted(nodes, key=lambda n: n.y)
    return BistabilityReport(
        alpha_crit_lower=by_y[-1].alpha,
        alpha_crit_upper=by_y[0].alpha,
        saddle_nodes=tuple(nodes),
    )


# ---------------------------------------------------------------------------
# scalar delayed feedback
# ---------------------------------------------------------------------------


def _decreasing_logistic(response) -> LogisticSpec:
    if not isinstance(response, LogisticSpec):
        raise UnsupportedEdgeError("a logistic response is required")
    if response.orientation is not Orientation.DECREASING:
        raise OrientationError("delayed negative feedback needs a decreasing response")
    return response


def scalar_dde_equilibrium(kappa: float, gamma: float, response: LogisticSpec) -> float:
    """Unique root of ``kappa f(N) - gamma N`` on ``[0, kappa / gamma]``."""
    spec = _decreasing_logistic(response)
    kappa, gamma = float(kappa), float(gamma)
    if kappa < 0 or not gamma > 0:
        raise DomainError("kappa must be >= 0 and gamma > 0")
    if kappa == 0:
        return 0.0

    def phi(n):
        return kappa * float(logistic_eval(spec, n)) - gamma * n

    return _bisect(phi, 0.0, kappa / gamma, phi(0.0), 0.0)


def characteristic_residual(s: complex, beta: float, gamma: float, tau: float) -> complex:
    """``s + gamma + beta exp(-s tau)``; vanishes at characteristic roots."""
    return s + gamma + beta * np.exp(-s * tau)


def hopf_critical_delay(
    kappa: float,
    gamma: float,
    response: LogisticSpec,
    k_max: int = 3,
    beta_override: float | None = None,
) -> HopfReport:
    """Critical delays of ``N' = -gamma N + kappa f(N(t - tau))``.

    Parameters
    ----------
    kappa, gamma : float
    response : LogisticSpec
        Decreasing logistic feedback.
    k_max : int
        Highest branch index ``k`` of ``tau_c(k)``.
    beta_override : float, optional
        Replace the computed feedback gain ``beta`` (testing hook).

    Notes
    -----
    With ``beta = kappa lambda f(N*) (1 - f(N*))`` and ``beta > gamma``,
    ``omega = sqrt(beta**2 - gamma**2)`` and
    ``tau_c(k) = (arccos(-gamma/beta) + 2 pi k) / omega``.
    """
    spec = _decreasing_logistic(response)
    if int(k_max) != k_max or k_max < 0:
        raise DomainError("k_max must be a nonnegative integer")
    n_star = scalar_dde_equilibrium(kappa, gamma, spec)
    if beta_override is None:
        z = spec.steepness * (n_star - spec.threshold)
        var = math.exp(-abs(z)) / (1.0 + math.exp(-abs(z))) ** 2
        beta = kappa * spec.steepness * var
    else:
        beta = float(beta_override)
    if not beta > gamma:
        return HopfReport(n_star, beta, float(gamma))
    omega = math.sqrt((beta - gamma) * (beta + gamma))
    base = math.acos(-gamma / beta)
    delays = tuple((base + 2.0 * math.pi * k) / omega for k in range(int(k_max) + 1))
    return HopfReport(n_star, beta, float(gamma), omega, delays)
