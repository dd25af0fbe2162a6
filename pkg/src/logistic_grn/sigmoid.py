"""Scalar logistic and Hill response functions.

All evaluators accept a float or an array-like and return a float for scalar
input and an ``ndarray`` otherwise.  Logistic evaluation goes through
``exp(-|z|)`` only, so arguments of any magnitude stay finite.

The logistic family is parameterized by a steepness ``lambda`` and a threshold
``theta``::

    increasing:  f+(x) = 1 / (1 + exp(-lambda (x - theta)))
    decreasing:  f-(x) = 1 / (1 + exp(+lambda (x - theta)))

and the Hill family by a coefficient ``n`` and threshold ``theta``::

    increasing:  h+(x) = x**n / (x**n + theta**n)
    decreasing:  h-(x) = theta**n / (x**n + theta**n)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np
from numpy.typing import ArrayLike

from .errors import (
    DomainError,
    HillSingularityError,
    OrientationError,
    UnsupportedCoefficientError,
)

__all__ = [
    "Orientation",
    "LogisticSpec",
    "HillSpec",
    "SamuilikSpec",
    "SigmoidSpec",
    "standard_logistic",
    "logit",
    "softplus",
    "logistic_eval",
    "logistic_derivative",
    "logistic_second_derivative",
    "logistic_inverse",
    "logistic_antiderivative",
    "logistic_taylor_midpoint",
    "logistic_linear_origin",
    "scaled_logistic_factor",
    "scaled_logistic_eval",
    "basal_rate",
    "hill_eval",
    "hill_derivative",
    "hill_inverse",
    "hill_antiderivative_closed",
    "match_steepness",
    "log_input_equivalence",
    "samuilik_repression_eval",
    "samuilik_critical_point",
    "SECOND_DERIVATIVE_BOUND",
]

#: max over s of |f(1 - f)(1 - 2f)| for the standard logistic
SECOND_DERIVATIVE_BOUND = math.sqrt(3.0) / 18.0

Real = Union[float, np.ndarray]


class Orientation(Enum):
    """Direction of a regulatory response; values match the model-file tokens."""

    INCREASING = "activation"
    DECREASING = "repression"

    @property
    def sign(self) -> int:
        return 1 if self is Orientation.INCREASING else -1

    def flipped(self) -> "Orientation":
        return Orientation.DECREASING if self is Orientation.INCREASING else Orientation.INCREASING

    @classmethod
    def parse(cls, token: "str | Orientation") -> "Orientation":
        """Accept ``activation``/``repression`` or ``increasing``/``decreasing``."""
        if isinstance(token, Orientation):
            return token
        key = str(token).strip().lower()
        if key in ("activation", "increasing", "incr", "+"):
            return cls.INCREASING
        if key in ("repression", "decreasing", "decr", "-"):
            return cls.DECREASING
        raise DomainError(f"unknown orientation {token!r}")


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    return value


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class LogisticSpec:
    """Logistic response with steepness ``lambda > 0`` and threshold ``theta``."""

    steepness: float
    threshold: float
    orientation: Orientation = Orientation.INCREASING

    def __post_init__(self):
        object.__setattr__(self, "steepness", _check_positive("steepness", self.steepness))
        object.__setattr__(self, "threshold", _check_finite("threshold", self.threshold))
        object.__setattr__(self, "orientation", Orientation.parse(self.orientation))

    @property
    def sign(self) -> int:
        return self.orientation.sign


@dataclass(frozen=True)
class HillSpec:
    """Hill response with coefficient ``n > 0`` and threshold ``theta > 0``."""

    coefficient: float
    threshold: float
    orientation: Orientation = Orientation.INCREASING

    def __post_init__(self):
        object.__setattr__(self, "coefficient", _check_positive("coefficient", self.coefficient))
        object.__setattr__(self, "threshold", _check_positive("threshold", self.threshold))
        object.__setattr__(self, "orientation", Orientation.parse(self.orientation))

    @property
    def sign(self) -> int:
        return self.orientation.sign


@dataclass(frozen=True)
class SamuilikSpec:
    """Weighted-sum comparison response ``1 / (1 + exp(-mu (w x - theta)))``."""

    steepness: float
    weight: float
    threshold: float

    def __post_init__(self):
        object.__setattr__(self, "steepness", _check_positive("steepness", self.steepness))
        object.__setattr__(self, "weight", _check_finite("weight", self.weight))
        object.__setattr__(self, "threshold", _check_finite("threshold", self.threshold))


SigmoidSpec = Union[LogisticSpec, HillSpec]


def _ret(value: np.ndarray) -> Real:
    return float(value) if np.ndim(value) == 0 else value


# ---------------------------------------------------------------------------
# standard logistic building blocks
# ---------------------------------------------------------------------------


def standard_logistic(z: ArrayLike) -> Real:
    """``1 / (1 + exp(-z))`` evaluated without overflow."""
    z = np.asarray(z, dtype=float)
    e = np.exp(-np.abs(z))
    return _ret(np.where(z >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e)))


def _logistic_variance(z: np.ndarray) -> np.ndarray:
    """``s(z) (1 - s(z))`` computed as ``e / (1 + e)**2`` with ``e = exp(-|z|)``."""
    e = np.exp(-np.abs(z))
    return e / (1.0 + e) ** 2


def softplus(z: ArrayLike) -> Real:
    """``log(1 + exp(z))`` evaluated without overflow."""
    z = np.asarray(z, dtype=float)
    return _ret(np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z))))


def logit(y: ArrayLike) -> Real:
    """Inverse of the standard logistic, ``log(y / (1 - y))`` on ``(0, 1)``."""
    y = np.asarray(y, dtype=float)
    if np.any(~((y > 0.0) & (y < 1.0))):
        raise DomainError("logit requires 0 < y < 1")
    return _ret(np.log(y) - np.log1p(-y))


def _argument(spec: LogisticSpec, x: ArrayLike) -> np.ndarray:
    return spec.sign * spec.steepness * (np.asarray(x, dtype=float) - spec.threshold)


# ---------------------------------------------------------------------------
# logistic family
# ---------------------------------------------------------------------------


def logistic_eval(spec: LogisticSpec, x: ArrayLike) -> Real:
    """Evaluate the logistic response; the value at ``x = theta`` is exactly 1/2."""
    return standard_logistic(_argument(spec, x))


def logistic_derivative(spec: LogisticSpec, x: ArrayLike) -> Real:
    """First derivative ``sign * lambda * f (1 - f)``; bounded by ``lambda / 4``."""
    return _ret(spec.sign * spec.steepness * _logistic_variance(_argument(spec, x)))


def logistic_second_derivative(spec: LogisticSpec, x: ArrayLike) -> Real:
    """Second derivative ``lambda**2 f (1 - f)(1 - 2 f)``.

    Written in terms of the response value ``f`` the expression already carries
    the right sign for both orientations.  ``1 - 2f`` is evaluated as
    ``-tanh(z / 2)`` which is exactly zero at the threshold.
    """
    z = _argument(spec, x)
    return _ret(spec.steepness**2 * _logistic_variance(z) * -np.tanh(0.5 * z))


def logistic_inverse(spec: LogisticSpec, y: ArrayLike) -> Real:
    """Input level at which the response equals ``y``; requires ``0 < y < 1``."""
    return _ret(spec.threshold + spec.sign * np.asarray(logit(y)) / spec.steepness)


def logistic_antiderivative(spec: LogisticSpec, x: ArrayLike) -> Real:
    """Closed-form antiderivative.

    Increasing responses use ``softplus(lambda (x - theta)) / lambda`` which
    tends to 0 as ``x -> -inf``.  Decreasing responses use the mirrored anchor,
    ``-softplus(-lambda (x - theta)) / lambda``, which tends to 0 as
    ``x -> +inf`` (the integral from ``-inf`` diverges).
    """
    z = _argument(spec, x)
    return _ret(spec.sign * np.asarray(softplus(z)) / spec.steepness)


_TAYLOR_COEFFS = {1: (0.25,), 3: (0.25, -1.0 / 48.0), 5: (0.25, -1.0 / 48.0, 1.0 / 480.0)}


def logistic_taylor_midpoint(spec: LogisticSpec, x: ArrayLike, order: int) -> Real:
    """Odd Taylor polynomial of the response about its threshold.

    Parameters
    ----------
    spec : LogisticSpec
    x : array_like
    order : {1, 3, 5}
        Highest power retained.
    """
    if order not in _TAYLOR_COEFFS:
        raise DomainError(f"Taylor order must be one of 1, 3, 5; got {order!r}")
    s = _argument(spec, x)
    total = np.full_like(s, 0.5)
    for k, c in enumerate(_TAYLOR_COEFFS[order]):
        total = total + c * s ** (2 * k + 1)
    return _ret(total)


def logistic_linear_origin(spec: LogisticSpec, x: ArrayLike) -> Real:
    """First-order expansion of an increasing logistic about ``x = 0``.

    The intercept is the basal rate ``1 / (1 + exp(lambda theta))`` and the
    slope is ``lambda * exp(lambda theta) / (1 + exp(lambda theta))**2``.
    """
    if spec.orientation is not Orientation.INCREASING:
        raise OrientationError("linear approximation at the origin needs an increasing response")
    z0 = -spec.steepness * spec.threshold
    intercept = standard_logistic(z0)
    slope = spec.steepness * float(_logistic_variance(np.asarray(z0)))
    return _ret(intercept + slope * np.asarray(x, dtype=float))


def scaled_logistic_factor(spec: LogisticSpec) -> float:
    """Normalization ``1 + exp(-lambda theta)`` of a decreasing response."""
    return 1.0 + math.exp(-spec.steepness * spec.threshold)


def scaled_logistic_eval(spec: LogisticSpec, x: ArrayLike) -> Real:
    """Decreasing logistic rescaled to equal exactly 1 at ``x = 0``.

    Evaluated as ``(1 + exp(-lambda theta)) / (1 + exp(lambda (x - theta)))``;
    at ``x = 0`` numerator and denominator are the same float.
    """
    if spec.orientation is not Orientation.DECREASING:
        raise OrientationError("scaled logistic is defined for decreasing responses")
    u = spec.steepness * (np.asarray(x, dtype=float) - spec.threshold)
    num = 1.0 + math.exp(-spec.steepness * spec.threshold)
    small = u <= 700.0
    safe = np.where(small, u, 0.0)
    ratio = num / (1.0 + np.exp(safe))
    tail = num * np.exp(-np.where(small, 701.0, u))
    return _ret(np.where(small, ratio, tail))


def basal_rate(spec: LogisticSpec) -> float:
    """Response value at zero input."""
    return float(logistic_eval(spec, 0.0))


# ---------------------------------------------------------------------------
# Hill family
# ---------------------------------------------------------------------------


def _nonnegative(x: ArrayLike) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~(x >= 0.0)):
        raise DomainError("Hill functions are defined for x >= 0")
    return x


def hill_eval(spec: HillSpec, x: ArrayLike) -> Real:
    """Evaluate the Hill response; exact 0 or 1 at the origin and 1/2 at theta."""
    x = _nonnegative(x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        r = (x / spec.threshold) ** spec.coefficient
        up = np.where(r <= 1.0, r / (1.0 + r), 1.0 / (1.0 + 1.0 / r))
        down = np.where(r <= 1.0, 1.0 / (1.0 + r), (1.0 / r) / (1.0 + 1.0 / r))
    return _ret(up if spec.orientation is Orientation.INCREASING else down)


def _is_integer(v: float) -> bool:
    return float(v).is_integer()


def hill_derivative(spec: HillSpec, x: ArrayLike) -> Real:
    """Closed-form derivative ``n theta**n x**(n-1) / (theta**n + x**n)**2``.

    At ``x = 0`` the exact limit is returned for integer ``n`` (0 for ``n > 1``,
    ``1/theta`` for ``n = 1``); non-integer ``n`` raises
    :class:`HillSingularityError`.
    """
    x = _nonnegative(x)
    n, th = spec.coefficient, spec.threshold
    at_zero = x == 0.0
    if np.any(at_zero) and not _is_integer(n):
        raise HillSingularityError(n)
    xs = np.where(at_zero, 1.0, x)
    r = (xs / th) ** n
    with np.errstate(over="ignore", invalid="ignore"):
        # r / (1 + r)**2 rewritten to stay finite for huge r
        core = np.where(r <= 1.0, r / (1.0 + r) ** 2, (1.0 / r) / (1.0 + 1.0 / r) ** 2)
    val = n * core / xs
    limit = 1.0 / th if n == 1.0 else 0.0
    val = np.where(at_zero, limit, val)
    return _ret(spec.sign * val)


def hill_inverse(spec: HillSpec, y: ArrayLike) -> Real:
    """Input level at which the Hill response equals ``y``; requires ``0 < y < 1``."""
    y = np.asarray(y, dtype=float)
    if np.any(~((y > 0.0) & (y < 1.0))):
        raise DomainError("Hill inverse requires 0 < y < 1")
    odds = y / (1.0 - y) if spec.orientation is Orientation.INCREASING else (1.0 - y) / y
    return _ret(spec.threshold * odds ** (1.0 / spec.coefficient))


def hill_antiderivative_closed(spec: HillSpec, x: ArrayLike) -> Real:
    """Antiderivative of an increasing Hill response for ``n`` in {1, 2}.

    ``n = 1``: ``x - theta log(1 + x/theta)``; ``n = 2``: ``x - theta arctan(x/theta)``.
    Both vanish at ``x = 0``.
    """
    if spec.orientation is not Orientation.INCREASING:
        raise OrientationError("closed-form Hill antiderivative is provided for increasing responses")
    x = _nonnegative(x)
    th = spec.threshold
    if spec.coefficient == 1.0:
        return _ret(x - th * np.log1p(x / th))
    if spec.coefficient == 2.0:
        return _ret(x - th * np.arctan(x / th))
    raise UnsupportedCoefficientError(
        f"closed-form antiderivative only for n in {{1, 2}}, got n = {spec.coefficient!r}"
    )


def match_steepness(hill: HillSpec) -> LogisticSpec:
    """Logistic with ``lambda = n / theta``; slopes agree at the shared threshold."""
    return LogisticSpec(hill.coefficient / hill.threshold, hill.threshold, hill.orientation)


def log_input_equivalence(hill: HillSpec, x: ArrayLike) -> Real:
    """Residual ``|s(sign n log(x/theta)) - h(x)|``, which is zero analytically."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0.0)):
        raise DomainError("log-input identity requires x > 0")
    lhs = np.asarray(standard_logistic(hill.sign * hill.coefficient * np.log(x / hill.threshold)))
    return _ret(np.abs(lhs - np.asarray(hill_eval(hill, x))))


# ---------------------------------------------------------------------------
# weighted-sum comparison response
# ---------------------------------------------------------------------------


def samuilik_repression_eval(spec: SamuilikSpec, x: ArrayLike) -> Real:
    """``1 / (1 + exp(-mu (w x - theta)))``; repression arises from ``w < 0``."""
    x = np.asarray(x, dtype=float)
    return standard_logistic(spec.steepness * (spec.weight * x - spec.threshold))


def samuilik_critical_point(spec: SamuilikSpec) -> float:
    """Inflection point ``theta / w``."""
    if spec.weight == 0.0:
        raise DomainError("critical point is undefined for zero weight")
    return spec.threshold / spec.weight
