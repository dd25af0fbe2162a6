"""Logistic parameters from linear-activation source models, and trajectory fitting.

A linear activation ``g + g_cross * u`` is replaced by ``kappa * f+(u)``.
Matching slope and value at the midpoint ``u = theta`` gives::

    kappa  = 2 (g + g_cross theta)
    lambda = log(1 + 2 g_cross theta / g) / theta

and the threshold choice ``theta = g / g_cross`` reduces this to
``kappa = 4 g``, ``lambda = (g_cross / g) log 3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np

from .analysis import newton_solve
from .dynamics import (
    ConstantHistory,
    IntegratorConfig,
    Trajectory,
    integrate_delayed,
    simulate_dde,
    simulate_ode,
)
from .errors import DomainError, FitDivergenceError, GRNError
from .models import mutual_activation
from .network import GeneNode, Network, RegulationEdge
from .sigmoid import HillSpec, LogisticSpec, Orientation

__all__ = [
    "Strategy",
    "LinearActivationSpec",
    "CalibrationResult",
    "derive_activation_params",
    "derive_activation_params_general",
    "derive_weighted_params",
    "LinearActivationReference",
    "FreeParameter",
    "FitProblem",
    "FitConfig",
    "FitResult",
    "fit_least_squares",
    "fit_residuals",
]

LN3 = math.log(3.0)


class Strategy(Enum):
    BIOLOGICAL_THRESHOLD = "BiologicalThreshold"
    GENERAL_THETA = "GeneralTheta"
    WEIGHTED_FORM = "WeightedForm"


@dataclass(frozen=True)
class LinearActivationSpec:
    """Production ``basal + cross * u`` driven linearly by a regulator ``u``."""

    basal: float
    cross: float

    def __post_init__(self):
        for name in ("basal", "cross"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and positive, got {getattr(self, name)!r}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class CalibrationResult:
    """Logistic activation ``kappa * f+(u; lambda, theta)``.

    ``lambda_`` is serialized as ``lambda``.
    """

    kappa: float
    lambda_: float
    theta: float
    strategy: Strategy

    def to_logistic_spec(self) -> LogisticSpec:
        return LogisticSpec(self.lambda_, self.theta, Orientation.INCREASING)

    def to_dict(self) -> dict:
        d = {"kappa": self.kappa, "lambda": self.lambda_, "theta": self.theta, "strategy": self.strategy.value}
        if self.strategy is Strategy.GENERAL_THETA:
            d["general_theta"] = self.theta
        return d


def derive_activation_params(spec: LinearActivationSpec) -> CalibrationResult:
    """Threshold at ``g / g_cross``: ``kappa = 4 g``, ``lambda = (g_cross / g) ln 3``."""
    return CalibrationResult(4.0 * spec.basal, spec.cross / spec.basal * LN3, spec.basal / spec.cross, Strategy.BIOLOGICAL_THRESHOLD)


def derive_activation_params_general(spec: LinearActivationSpec, theta: float) -> CalibrationResult:
    """Midpoint slope and value matching at an arbitrary threshold ``theta > 0``."""
    theta = float(theta)
    if not (math.isfinite(theta) and theta > 0):
        raise DomainError("theta must be finite and positive")
    kappa = 2.0 * (spec.basal + spec.cross * theta)
    lam = math.log1p(2.0 * spec.cross * theta / spec.basal) / theta
    return CalibrationResult(kappa, lam, theta, Strategy.GENERAL_THETA)


def derive_weighted_params(spec: LinearActivationSpec) -> CalibrationResult:
    """Parameters for the weighted input ``g_cross * u``: ``(4 g, ln 3 / g, g)``.

    Rescaling with weight ``g_cross`` recovers :func:`derive_activation_params`.
    """
    return CalibrationResult(4.0 * spec.basal, LN3 / spec.basal, spec.basal, Strategy.WEIGHTED_FORM)


# ---------------------------------------------------------------------------
# reference system with linear activation
# ---------------------------------------------------------------------------


def _decr(u: float, lam: float, theta: float) -> float:
    z = lam * (u - theta)
    if z >= 0:
        e = math.exp(-z)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(z))


@dataclass(frozen=True)
class LinearActivationReference:
    """Mutual linear activation with logistic self-repression.

    ``A' = (g_A + g_AB B(t - tau_12)) f-(A(t - tau_1); A0, lambda_3) - gamma_A A``
    and symmetrically for ``B``.
    """

    activation_a: LinearActivationSpec = LinearActivationSpec(50.0, 2.5)
    activation_b: LinearActivationSpec = LinearActivationSpec(50.0, 2.5)
    gamma: tuple[float, float] = (0.20, 0.24)
    repression_threshold: tuple[float, float] = (70.0, 70.0)
    repression_steepness: tuple[float, float] = (0.057, 0.057)
    delays: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    names = ("A", "B")

    def field(self, y: np.ndarray, lagged: dict) -> np.ndarray:
        t1, t2, t12, t21 = self.delays
        a, b = y
        la, lb = self.activation_a, self.activation_b
        prod_a = (la.basal + la.cross * lagged.get(t12, y)[1]) * _decr(
            lagged.get(t1, y)[0], self.repression_steepness[0], self.repression_threshold[0]
        )
        prod_b = (lb.basal + lb.cross * lagged.get(t21, y)[0]) * _decr(
            lagged.get(t2, y)[1], self.repression_steepness[1], self.repression_threshold[1]
        )
        return np.array([prod_a - self.gamma[0] * a, prod_b - self.gamma[1] * b])

    def vector_field(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return self.field(y, {})

    def jacobian(self, y) -> np.ndarray:
        a, b = np.asarray(y, dtype=float)
        la, lb = self.activation_a, self.activation_b
        (l3, l4), (a0, b0) = self.repression_steepness, self.repression_threshold
        fa, fb = _decr(a, l3, a0), _decr(b, l4, b0)
        return np.array(
            [
                [-(la.basal + la.cross * b) * l3 * fa * (1 - fa) - self.gamma[0], la.cross * fa],
                [lb.cross * fb, -(lb.basal + lb.cross * a) * l4 * fb * (1 - fb) - self.gamma[1]],
            ]
        )

    def simulate(self, x0=(10.0, 10.0), config: IntegratorConfig | None = None) -> Trajectory:
        cfg = config or IntegratorConfig(t_end=50.0)
        return integrate_delayed(self.field, self.delays, ConstantHistory(tuple(x0)), cfg, self.names, 2)

    def steady_state(self, guess=None, tol: float = 1e-10) -> np.ndarray:
        """Delay-free steady state by damped Newton (delays do not move it)."""
        if guess is None:
            guess = [self.activation_a.basal / self.gamma[0], self.activation_b.basal / self.gamma[1]]
        x, _, _ = newton_solve(self.vector_field, self.jacobian, guess, tol, lower=[0.0, 0.0])
        return x

    def calibrate(self, strategy: Strategy | str = Strategy.BIOLOGICAL_THRESHOLD) -> tuple[CalibrationResult, CalibrationResult]:
        """Activation parameters for ``(A, B)``.

        ``GENERAL_THETA`` places each threshold at the regulator's steady state.
        """
        strategy = Strategy(strategy) if not isinstance(strategy, Strategy) else strategy
        if strategy is Strategy.BIOLOGICAL_THRESHOLD:
            return derive_activation_params(self.activation_a), derive_activation_params(self.activation_b)
        if strategy is Strategy.GENERAL_THETA:
            a_star, b_star = self.steady_state()
            return (
                derive_activation_params_general(self.activation_a, b_star),
                derive_activation_params_general(self.activation_b, a_star),
            )
        raise DomainError("the weighted form calibrates a weighted-input model; use derive_weighted_params")

    def logistic_network(self, strategy: Strategy | str = Strategy.BIOLOGICAL_THRESHOLD) -> Network:
        """Fully logistic counterpart with the self-repression kept as is."""
        ca, cb = self.calibrate(strategy)
        return mutual_activation(
            kappa=(ca.kappa, cb.kappa),
            activation_steepness=(ca.lambda_, cb.lambda_),
            activation_threshold=(cb.theta, ca.theta),
            repression_steepness=self.repression_steepness,
            repression_threshold=self.repression_threshold,
            gamma=self.gamma,
            delays=self.delays,
        )


# ---------------------------------------------------------------------------
# least-squares fitting
# ---------------------------------------------------------------------------

_KINDS = ("kappa", "gamma", "lambda", "theta")


@dataclass(frozen=True)
class FreeParameter:
    """A fitted quantity, optionally shared by several locations.

    Parameters
    ----------
    kind : {"kappa", "gamma", "lambda", "theta"}
        ``lambda`` means Hill coefficient on Hill edges.
    targets : tuple
        ``(gene,)`` for kappa/gamma, ``(gene, edge)`` for lambda/theta.
    """

    kind: str
    targets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown parameter kind {self.kind!r}")
        tg = tuple(tuple(int(v) for v in np.atleast_1d(t)) for t in self.targets)
        if not tg:
            raise DomainError("a free parameter needs at least one target")
        need = 1 if self.kind in ("kappa", "gamma") else 2
        if any(len(t) != need for t in tg):
            raise DomainError(f"{self.kind} targets need {need} indices")
        object.__setattr__(self, "targets", tg)

    @property
    def name(self) -> str:
        return f"{self.kind}[" + ";".join(",".join(map(str, t)) for t in self.targets) + "]"

    def read(self, net: Network) -> float:
        t = self.targets[0]
        g = net.genes[t[0]]
        if self.kind == "kappa":
            return g.production
        if self.kind == "gamma":
            return g.degradation
        r = g.edges[t[1]].response
        if self.kind == "lambda":
            return r.steepness if isinstance(r, LogisticSpec) else r.coefficient
        return r.threshold

    def positive(self, net: Network) -> bool:
        if self.kind in ("kappa", "gamma", "lambda"):
            return True
        t = self.targets[0]
        return isinstance(net.genes[t[0]].edges[t[1]].response, HillSpec)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "targets": [list(t) for t in self.targets]}


def _apply(template: Network, free: Sequence[FreeParameter], values: Sequence[float]) -> Network:
    kappa = [g.production for g in template.genes]
    gamma = [g.degradation for g in template.genes]
    edges = [list(g.edges) for g in template.genes]
    for p, v in zip(free, values):
        for t in p.targets:
            if p.kind == "kappa":
                kappa[t[0]] = v
            elif p.kind == "gamma":
                gamma[t[0]] = v
            else:
                e = edges[t[0]][t[1]]
                r = e.response
                if p.kind == "lambda":
                    r = replace(r, steepness=v) if isinstance(r, LogisticSpec) else replace(r, coefficient=v)
                else:
                    r = replace(r, threshold=v)
                edges[t[0]][t[1]] = RegulationEdge(e.source, r, e.delay, e.scaled)
    genes = [GeneNode(k, g, tuple(es)) for k, g, es in zip(kappa, gamma, edges)]
    return Network(tuple(genes), template.names)


@dataclass(frozen=True)
class FitProblem:
    """Template network, parameters to fit and the trajectory to match.

    The simulated model starts from ``data.states[0]`` (constant history for
    delayed templates) and is sampled at ``data.times``.
    """

    template: Network
    free: tuple[FreeParameter, ...]
    data: Trajectory
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "free", tuple(self.free))
        if self.data.dimension != self.template.size:
            raise DomainError("data and template dimensions differ")
        if len(self.free) > self.data.states.size:
            raise DomainError("more free parameters than data points")
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if len(w) != self.template.size or any(not (v >= 0 and math.isfinite(v)) for v in w):
                raise DomainError("weights need one finite nonnegative value per component")
            object.__setattr__(self, "weights", w)
        for p in self.free:
            for t in p.targets:
                if not 0 <= t[0] < self.template.size:
                    raise DomainError(f"{p.name}: gene index out of range")
                if len(t) == 2 and not 0 <= t[1] < len(self.template.genes[t[0]].edges):
                    raise DomainError(f"{p.name}: edge index out of range")


@dataclass(frozen=True)
class FitConfig:
    """Damped Gauss-Newton settings."""

    max_iter: int = 100
    rel_sse_tol: float = 1e-8
    grad_tol: float = 1e-8
    fd_step: float = 1e-4
    initial_damping: float = 1e-3
    max_damping: float = 1e10
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12


@dataclass(frozen=True)
class FitResult:
    names: tuple[str, ...]
    values: tuple[float, ...]
    sse: float
    initial_sse: float
    iterations: int
    converged: bool
    network: Network = field(repr=False, compare=False)

    @property
    def parameters(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))

    def to_dict(self) -> dict:
        return {
            "parameters": self.parameters,
            "sse": self.sse,
            "initial_sse": self.initial_sse,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _simulate(net: Network, data: Trajectory, cfg: FitConfig) -> np.ndarray:
    icfg = IntegratorConfig(
        t_end=float(data.times[-1]),
        t_start=float(data.times[0]),
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        dense_output=True,
    )
    x0 = data.states[0]
    traj = simulate_dde(net, ConstantHistory(tuple(x0)), icfg) if net.is_delayed else simulate_ode(net, x0, icfg)
    return traj.sample(data.times)


def fit_residuals(problem: FitProblem, values: Sequence[float], config: FitConfig | None = None) -> np.ndarray:
    """Weighted residual vector ``sqrt(w) * (model - data)`` at the data times."""
    cfg = config or FitConfig()
    net = _apply(problem.template, problem.free, values)
    r = _simulate(net, problem.data, cfg) - problem.data.states
    if problem.weights is not None:
        r = r * np.sqrt(np.asarray(problem.weights))[None, :]
    return r.ravel()


def fit_least_squares(problem: FitProblem, config: FitConfig | None = None) -> FitResult:
    """Levenberg-Marquardt fit of the free parameters to the data trajectory.

    Positive quantities are fitted in log space; thresholds of logistic edges
    are fitted directly.  Jacobians use central differences with step
    ``fd_step`` in the fitted coordinates (a relative step for log-fitted
    parameters).
    """
    cfg = config or FitConfig()
    free = problem.free
    v0 = np.array([p.read(problem.template) for p in free], dtype=float)
    logp = np.array([p.positive(problem.template) for p in free], dtype=bool)
    if np.any(logp & ~(v0 > 0)):
        bad = [p.name for p, ok in zip(free, v0 > 0) if not ok]
        raise DomainError(f"initial values must be positive for {bad}")

    def to_v(u):
        return np.where(logp, np.exp(u), u)

    def residual(u):
        try:
            r = fit_residuals(problem, to_v(u), cfg)
        except GRNError:
            return None
        return r if np.all(np.isfinite(r)) else None

    u = np.where(logp, np.log(np.where(logp, v0, 1.0)), v0)
    r = residual(u)
    if r is None:
        raise FitDivergenceError("simulation fails at the initial parameters")
    sse = float(r @ r)
    sse0 = sse
    names = tuple(p.name for p in free)
    if len(free) == 0:
        return FitResult(names, (), sse, sse0, 0, True, problem.template)

    mu = cfg.initial_damping
    it = 0
    converged = False
    improved = False
    while it < cfg.max_iter:
        it += 1
        steps = cfg.fd_step * np.where(logp, 1.0, np.maximum(np.abs(u), 1.0))
        J = np.empty((r.size, len(u)))
        for k in range(len(u)):
            e = np.zeros_like(u)
            e[k] = steps[k]
            rp, rm = residual(u + e), residual(u - e)
            if rp is None or rm is None:
                raise FitDivergenceError(f"simulation fails near {names[k]}")
            J[:, k] = (rp - rm) / (2 * steps[k])
        grad = J.T @ r
        if sse == 0.0 or np.max(np.abs(grad)) < cfg.grad_tol:
            converged = True
            break
        A = J.T @ J
        diag = np.maximum(np.diag(A), 1e-12 * max(np.max(np.diag(A)), 1e-300))
        while True:
            try:
                delta = np.linalg.solve(A + mu * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                delta = None
            r_new = residual(u + delta) if delta is not None else None
            sse_new = float(r_new @ r_new) if r_new is not None else math.inf
            if sse_new < sse:
                break
            mu *= 10.0
            if mu > cfg.max_damping:
                scale = float(np.sum(problem.data.states**2))
                if improved or sse <= 1e-16 * scale:
                    return FitResult(names, tuple(to_v(u)), sse, sse0, it, True, _apply(problem.template, free, to_v(u)))
                raise FitDivergenceError("objective does not decrease even at maximal damping")
        improved = True
        rel = (sse - sse_new) / sse
        u, r, sse = u + delta, r_new, sse_new
        mu = max(mu / 3.0, 1e-12)
        if rel < cfg.rel_sse_tol:
            converged = True
            break
    values = to_v(u)
    return FitResult(names, tuple(float(v) for v in values), sse, sse0, it, converged, _apply(problem.template, free, values))
