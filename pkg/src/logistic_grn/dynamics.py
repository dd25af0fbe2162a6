"""Time integration of network models.

``integrate`` is a Dormand-Prince 5(4) stepper with PI step-size control and
cubic Hermite dense output.  ``simulate_ode`` drives it for delay-free
networks and ``simulate_dde`` for delayed ones by the method of steps: steps
never exceed the smallest positive delay and land on every multiple of it,
so each delayed lookup falls inside already accepted steps.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateDelayError,
    DelayedNetworkError,
    DomainError,
    HistoryError,
    IntegrationError,
)
from .network import Network

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "ConstantHistory",
    "TrajectoryHistory",
    "integrate",
    "simulate_ode",
    "simulate_dde",
    "integrate_delayed",
    "measure_escape_time",
    "hermite",
]

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 10.0
_BETA = 0.04
_EXPO = 0.2 - 0.75 * _BETA


@dataclass(frozen=True)
class IntegratorConfig:
    """Settings for one integration run.

    Parameters
    ----------
    t_end : float
        Final time.
    rel_tol, abs_tol : float
        Per-component local error tolerances.
    max_step : float
        Upper bound on the step size.
    initial_step : float, optional
        First trial step; estimated automatically when omitted.
    dense_output : bool
        Keep derivatives at every step so ``Trajectory.sample`` can use cubic
        Hermite interpolation.
    t_start : float
        Initial time.
    max_steps : int
        Hard cap on attempted steps.
    """

    t_end: float
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float = math.inf
    initial_step: float | None = None
    dense_output: bool = False
    t_start: float = 0.0
    max_steps: int = 2_000_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if not (math.isfinite(self.t_end) and math.isfinite(self.t_start)):
            raise DomainError("integration bounds must be finite")
        if not self.t_end > self.t_start:
            raise DomainError("t_end must exceed t_start")
        if not self.max_step > 0:
            raise DomainError("max_step must be positive")
        if self.initial_step is not None and not self.initial_step > 0:
            raise DomainError("initial_step must be positive")


def hermite(t, t0, y0, f0, t1, y1, f1):
    """Cubic Hermite interpolant on ``[t0, t1]`` from values and slopes."""
    h = t1 - t0
    s = (t - t0) / h
    s2 = s * s
    s3 = s2 * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


@dataclass(frozen=True)
class Trajectory:
    """Accepted integration steps.

    Attributes
    ----------
    times : ndarray, shape (N,)
        Strictly increasing sample times.
    states : ndarray, shape (N, n)
    accepted_steps, rejected_steps : int
    names : tuple of str
    derivatives : ndarray or None
        Right-hand side at each sample; enables Hermite sampling.
    """

    times: np.ndarray
    states: np.ndarray
    accepted_steps: int = 0
    rejected_steps: int = 0
    names: tuple[str, ...] = ()
    derivatives: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        x = np.asarray(self.states, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if t.ndim != 1 or len(t) == 0 or x.shape[0] != len(t):
            raise DomainError("times and states must be non-empty and aligned")
        if np.any(np.diff(t) <= 0):
            raise DomainError("times must be strictly increasing")
        if not np.all(np.isfinite(x)):
            raise DomainError("states must be finite")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", x)
        names = tuple(self.names) or tuple(f"x{i + 1}" for i in range(x.shape[1]))
        if len(names) != x.shape[1]:
            raise DomainError("one name per state component is required")
        object.__setattr__(self, "names", names)
        if self.derivatives is not None:
            d = np.asarray(self.derivatives, dtype=float)
            if d.shape != x.shape:
                raise DomainError("derivatives must match states")
            object.__setattr__(self, "derivatives", d)

    @property
    def dimension(self) -> int:
        return self.states.shape[1]

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1].copy()

    def component(self, key: int | str) -> np.ndarray:
        idx = self.names.index(key) if isinstance(key, str) else int(key)
        return self.states[:, idx]

    def sample(self, t) -> np.ndarray:
        """States at times ``t`` (Hermite with derivatives, else linear).

        Returns shape ``(n,)`` for scalar ``t`` and ``(len(t), n)`` otherwise.
        """
        tq = np.atleast_1d(np.asarray(t, dtype=float))
        ts = self.times
        if np.any(tq < ts[0] - 1e-12 * max(1.0, abs(ts[0]))) or np.any(
            tq > ts[-1] + 1e-12 * max(1.0, abs(ts[-1]))
        ):
            raise DomainError("sample time outside the trajectory span")
        if len(ts) == 1:
            out = np.repeat(self.states[:1], len(tq), axis=0)
        else:
            k = np.clip(np.searchsorted(ts, tq, side="right") - 1, 0, len(ts) - 2)
            t0, t1 = ts[k][:, None], ts[k + 1][:, None]
            y0, y1 = self.states[k], self.states[k + 1]
            if self.derivatives is not None:
                out = hermite(tq[:, None], t0, y0, self.derivatives[k], t1, y1, self.derivatives[k + 1])
            else:
                w = (tq[:, None] - t0) / (t1 - t0)
                out = (1 - w) * y0 + w * y1
        return out[0] if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class ConstantHistory:
    """State held constant for all times before the start."""

    state: tuple[float, ...]

    def __post_init__(self):
        v = tuple(float(s) for s in np.atleast_1d(self.state))
        if not all(math.isfinite(s) for s in v):
            raise DomainError("history must be finite")
        object.__setattr__(self, "state", v)

    def check(self, dim: int, t_start: float, lookback: float):
        if len(self.state) != dim:
            raise HistoryError(f"history has dimension {len(self.state)}, network has {dim}")

    def at(self, t: float) -> np.ndarray:
        return np.array(self.state)


@dataclass(frozen=True)
class TrajectoryHistory:
    """History read from a previously computed trajectory."""

    trajectory: Trajectory

    def check(self, dim: int, t_start: float, lookback: float):
        tr = self.trajectory
        if tr.dimension != dim:
            raise HistoryError(f"history has dimension {tr.dimension}, network has {dim}")
        tol = 1e-12 * max(1.0, abs(t_start))
        if tr.times[0] > t_start - lookback + tol or tr.times[-1] < t_start - tol:
            raise HistoryError(
                f"history covers [{tr.times[0]}, {tr.times[-1]}] but "
                f"[{t_start - lookback}, {t_start}] is required"
            )

    def at(self, t: float) -> np.ndarray:
        tr = self.trajectory
        return tr.sample(min(max(t, tr.times[0]), tr.times[-1]))


class _Stepper:
    """Dormand-Prince stepper that records every accepted step."""

    def __init__(self, rhs, t0: float, y0: np.ndarray, config: IntegratorConfig):
        self.rhs = rhs
        self.cfg = config
        self.ts = [t0]
        self.ys = [np.array(y0, dtype=float)]
        self.fs: list[np.ndarray] = []
        self.accepted = 0
        self.rejected = 0

    def dense(self, t: float) -> np.ndarray:
        """Hermite lookup inside accepted steps (``t`` within the recorded span)."""
        ts = self.ts
        if t >= ts[-1]:
            return self.ys[-1]
        k = bisect.bisect_right(ts, t) - 1
        if k < 0:
            k = 0
        if ts[k] == t:
            return self.ys[k]
        return hermite(t, ts[k], self.ys[k], self.fs[k], ts[k + 1], self.ys[k + 1], self.fs[k + 1])

    def _norm(self, v: np.ndarray, scale: np.ndarray) -> float:
        return float(np.sqrt(np.mean((v / scale) ** 2)))

    def _initial_step(self, t, y, f, h_cap) -> float:
        cfg = self.cfg
        scale = cfg.abs_tol + cfg.rel_tol * np.abs(y)
        d0, d1 = self._norm(y, scale), self._norm(f, scale)
        h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        h0 = min(h0, h_cap)
        f1 = self.rhs(t + h0, y + h0 * f)
        d2 = self._norm(f1 - f, scale) / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
        return min(100 * h0, h1, h_cap)

    def run(self, t_end: float, h_cap: float, breakpoints: Sequence[float] = ()) -> None:
        cfg = self.cfg
        t, y = self.ts[-1], self.ys[-1]
        f = self.rhs(t, y)
        if not np.all(np.isfinite(f)):
            raise IntegrationError(f"non-finite derivative at t = {t}")
        self.fs.append(f)
        h_cap = min(h_cap, cfg.max_step)
        h = cfg.initial_step if cfg.initial_step is not None else self._initial_step(t, y, f, h_cap)
        # tiny states with large slopes push the heuristic below the underflow floor
        h = min(max(h, 1e-12 * max(1.0, abs(t))), h_cap, t_end - t)
        bps =sorted(b for b in breakpoints if t < b < t_end)
        bp_idx = 0
        err_old = 1e-4
        last_rejected = False
        attempts = 0
        span = t_end - t
        while t < t_end:
            attempts += 1
            if attempts > cfg.max_steps:
                raise IntegrationError(f"exceeded {cfg.max_steps} steps before t_end")
            while bp_idx < len(bps) and bps[bp_idx] <= t:
                bp_idx += 1
            target = bps[bp_idx] if bp_idx < len(bps) else t_end
            if h >= target - t or (target - t - h) < 1e-10 * span:
                h = target - t
                t_new = target
            else:
                t_new = t + h
            if h <= 1e-14 * max(1.0, abs(t)):
                raise IntegrationError(f"step size underflow at t = {t}")

            k = [f]
            for s in range(1, 7):
                acc = y.copy()
                for a, kk in zip(_A[s], k):
                    if a != 0.0:
                        acc += (h * a) * kk
                if s == 6:
                    y_new = acc
                k.append(self.rhs(t + _C[s] * h, acc) if s < 6 else self.rhs(t_new, acc))
            err_vec = sum(e * kk for e, kk in zip(_E, k) if e != 0.0) * h
            scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            err = self._norm(err_vec, scale)

            if not math.isfinite(err) or not np.all(np.isfinite(y_new)):
                self.rejected += 1
                last_rejected = True
                h *= 0.25
                continue
            fac11 = err**_EXPO if err > 0 else 0.0
            if err <= 1.0:
                fac = fac11 / err_old**_BETA
                fac = max(1.0 / _FAC_MAX, min(1.0 / _FAC_MIN, fac / _SAFETY))
                h_new = h / fac
                if last_rejected:
                    h_new = min(h_new, h)
                err_old = max(err, 1e-4)
                t, y, f = t_new, y_new, k[6]
                self.ts.append(t)
                self.ys.append(y)
                self.fs.append(f)
                self.accepted += 1
                last_rejected = False
                h = min(h_new, h_cap)
            else:
                self.rejected += 1
                last_rejected = True
                h = h / min(1.0 / _FAC_MIN, fac11 / _SAFETY)

    def trajectory(self, names, keep_derivatives: bool) -> Trajectory:
        return Trajectory(
            np.array(self.ts),
            np.array(self.ys),
            self.accepted,
            self.rejected,
            tuple(names) if names else (),
            np.array(self.fs) if keep_derivatives else None,
        )


def _initial_state(x0, dim: int | None = None) -> np.ndarray:
    x = np.asarray(x0, dtype=float)
    if x.ndim != 1 or len(x) == 0:
        raise DomainError("initial state must be a non-empty vector")
    if dim is not None and len(x) != dim:
        raise DomainError(f"initial state has length {len(x)}, expected {dim}")
    if not np.all(np.isfinite(x)):
        raise DomainError("initial state must be finite")
    return x


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    x0,
    config: IntegratorConfig,
    names: Sequence[str] | None = None,
) -> Trajectory:
    """Integrate ``dx/dt = rhs(t, x)`` from ``config.t_start`` to ``config.t_end``."""
    x = _initial_state(x0)
    st = _Stepper(rhs, config.t_start, x, config)
    st.run(config.t_end, math.inf)
    return st.trajectory(names, config.dense_output)


def _require_network(network: Network):
    if network.size == 0:
        raise DomainError("network has no genes; nothing to integrate")


def simulate_ode(network: Network, x0, config: IntegratorConfig) -> Trajectory:
    """Integrate a delay-free network from a nonnegative initial state."""
    _require_network(network)
    if network.is_delayed:
        raise DelayedNetworkError("network has delayed edges; use simulate_dde")
    x = _initial_state(x0, network.size)
    if np.any(x < 0):
        raise DomainError("initial state must be componentwise nonnegative")
    empty: dict = {}
    return integrate(lambda t, y: network.delayed_field(y, empty), x, config, network.names)


def integrate_delayed(
    field: Callable[[np.ndarray, dict], np.ndarray],
    delays: Sequence[float],
    history,
    config: IntegratorConfig,
    names: Sequence[str] | None = None,
    dim: int | None = None,
) -> Trajectory:
    """Method-of-steps integration of ``dx/dt = field(x, lagged)``.

    ``lagged`` maps each delay ``d`` to the state at ``t - d`` (``0.0`` maps
    to the current state).  History before ``config.t_start`` is served by
    ``history``; later lookups use Hermite interpolation of accepted steps.
    """
    if not isinstance(history, (ConstantHistory, TrajectoryHistory)):
        history = ConstantHistory(tuple(np.atleast_1d(np.asarray(history, dtype=float))))
    pos = sorted({float(d) for d in delays if d > 0.0})
    t0, t_end = config.t_start, config.t_end
    if dim is None:
        dim = len(history.state) if isinstance(history, ConstantHistory) else history.trajectory.dimension
    history.check(dim, t0, max(pos, default=0.0))
    if pos and pos[0] < 1e-12 * (t_end - t0):
        raise DegenerateDelayError(
            f"delay {pos[0]!r} is below 1e-12 of the horizon; set it to 0 instead"
        )
    x0 = history.at(t0)
    holder: dict = {}

    def rhs(t, y):
        st = holder["stepper"]
        lagged = {0.0: y}
        for d in pos:
            s = t - d
            lagged[d] = history.at(s) if s <= t0 else st.dense(s)
        return field(y, lagged)

    st = _Stepper(rhs, t0, x0, config)
    holder["stepper"] = st
    if pos:
        tau = pos[0]
        n_seg = int(math.floor((t_end - t0) / tau))
        st.run(t_end, tau, [t0 + k * tau for k in range(1, n_seg + 1)])
    else:
        st.run(t_end, math.inf)
    return st.trajectory(names, config.dense_output)


def simulate_dde(network: Network, history, config: IntegratorConfig) -> Trajectory:
    """Integrate a network with delayed edges by the method of steps.

    Parameters
    ----------
    network : Network
    history : ConstantHistory, TrajectoryHistory or array_like
        State before ``config.t_start``; a plain vector means constant history.
    config : IntegratorConfig

    Notes
    -----
    With every delay equal to zero the same stepper runs without a step cap,
    reading each edge from the current state.
    """
    _require_network(network)
    if not isinstance(history, (ConstantHistory, TrajectoryHistory)):
        history = ConstantHistory(tuple(np.atleast_1d(np.asarray(history, dtype=float))))
    history.check(network.size, config.t_start, max(network.delays, default=0.0))
    if np.any(history.at(config.t_start) < 0):
        raise DomainError("initial state must be componentwise nonnegative")
    return integrate_delayed(
        network.delayed_field, network.delays, history, config, network.names, network.size
    )


def measure_escape_time(traj: Trajectory, component: int | str, level: float) -> float | None:
    """First time the linearly interpolated component rises through ``level``.

    Returns ``None`` if the component never crosses from below.
    """
    x = traj.component(component)
    t = traj.times
    below = x[:-1] < level
    above = x[1:] >= level
    hits = np.nonzero(below & above)[0]
    if len(hits) == 0:
        return None
    k = int(hits[0])
    w = (level - x[k]) / (x[k + 1] - x[k])
    return float(t[k] + w * (t[k + 1] - t[k]))
