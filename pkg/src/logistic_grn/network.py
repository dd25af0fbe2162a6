"""Product-of-sigmoids gene regulatory network.

Gene ``i`` evolves as::

    dx_i/dt = kappa_i * prod_m g_{i,m}(x_{j(i,m)}) - gamma_i * x_i

where each factor ``g_{i,m}`` is the response of one regulation edge.  A gene
with no edges is constitutive (empty product equals 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DelayedNetworkError, DomainError, UnsupportedEdgeError
from .sigmoid import (
    SECOND_DERIVATIVE_BOUND,
    HillSpec,
    LogisticSpec,
    Orientation,
    SigmoidSpec,
    hill_derivative,
    scaled_logistic_factor,
)

__all__ = [
    "response_value",
    "response_slope",
    "RegulationEdge",
    "GeneNode",
    "Network",
    "LipschitzReport",
    "lipschitz_report",
    "lipschitz_bound_F",
    "lipschitz_bound_DF",
]


def _sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def response_value(r: SigmoidSpec, u: float) -> float:
    """Scalar response evaluation on plain floats (hot path of the integrators)."""
    if isinstance(r, LogisticSpec):
        return _sigmoid(r.sign * r.steepness * (u - r.threshold))
    u = max(u, 0.0)  # integrator round-off can dip below zero
    q = (u / r.threshold) ** r.coefficient
    if r.sign < 0:
        q = 1.0 / q if q > 0.0 else math.inf
    return q / (1.0 + q) if q <= 1.0 else 1.0 / (1.0 + 1.0 / q)


def response_slope(r: SigmoidSpec, u: float) -> float:
    """Scalar response derivative; Hill inputs are clamped at 0."""
    if isinstance(r, LogisticSpec):
        g = response_value(r, u)
        return r.sign * r.steepness * g * (1.0 - g)
    return float(hill_derivative(r, max(u, 0.0)))


@dataclass(frozen=True)
class RegulationEdge:
    """One regulatory input.

    Parameters
    ----------
    source : int
        Index of the regulating gene.
    response : LogisticSpec or HillSpec
    delay : float
        Lag applied to the source state; 0 for instantaneous regulation.
    scaled : bool
        Multiply a decreasing logistic by ``1 + exp(-lambda theta)`` so that it
        equals 1 at zero repressor.
    """

    source: int
    response: SigmoidSpec
    delay: float = 0.0
    scaled: bool = False

    def __post_init__(self):
        if not isinstance(self.response, (LogisticSpec, HillSpec)):
            raise DomainError(f"unsupported response type {type(self.response).__name__}")
        if int(self.source) != self.source or self.source < 0:
            raise DomainError(f"edge source must be a nonnegative index, got {self.source!r}")
        object.__setattr__(self, "source", int(self.source))
        delay = float(self.delay)
        if not (math.isfinite(delay) and delay >= 0.0):
            raise DomainError(f"delay must be finite and >= 0, got {self.delay!r}")
        object.__setattr__(self, "delay", delay)
        if self.scaled and not (
            isinstance(self.response, LogisticSpec)
            and self.response.orientation is Orientation.DECREASING
        ):
            raise DomainError("only decreasing logistic edges can be scaled")

    @property
    def is_logistic(self) -> bool:
        return isinstance(self.response, LogisticSpec)

    @property
    def scale(self) -> float:
        """Constant multiplier applied to the response (1 unless scaled)."""
        return scaled_logistic_factor(self.response) if self.scaled else 1.0

    def value(self, u: float) -> float:
        """Unscaled response at input ``u``."""
        return response_value(self.response, u)

    def slope(self, u: float) -> float:
        """Derivative of the unscaled response at ``u``."""
        return response_slope(self.response, u)


@dataclass(frozen=True)
class GeneNode:
    """Production rate ``kappa >= 0``, degradation rate ``gamma > 0`` and inputs."""

    production: float
    degradation: float
    edges: tuple[RegulationEdge, ...] = ()

    def __post_init__(self):
        kappa, gamma = float(self.production), float(self.degradation)
        if not (math.isfinite(kappa) and kappa >= 0.0):
            raise DomainError(f"production must be finite and >= 0, got {self.production!r}")
        if not (math.isfinite(gamma) and gamma > 0.0):
            raise DomainError(f"degradation must be finite and > 0, got {self.degradation!r}")
        object.__setattr__(self, "production", kappa)
        object.__setattr__(self, "degradation", gamma)
        object.__setattr__(self, "edges", tuple(self.edges))

    @property
    def effective_production(self) -> float:
        """``kappa`` times the constant factors of scaled edges."""
        k = self.production
        for e in self.edges:
            k *= e.scale
        return k


@dataclass(frozen=True)
class LipschitzReport:
    """Closed-form global bounds on ``F`` and its derivative.

    Attributes
    ----------
    per_gene_row_sums : tuple of float
        ``sum_j L_i^j`` with ``L_i^j`` the summed ``lambda/4`` of edges from ``j``.
    bound_F : float
        ``M = max_i (kappa_i sum_j L_i^j + gamma_i)``.
    bound_DF : float
        ``K = kappa_max max_i (M_i**2 Lambda_i**2 / 16 + M_i Lambda_i**2 rho)``
        with ``rho = sqrt(3)/18``.
    entry_bounds : ndarray
        Per-entry bound ``kappa_i L_i^j + gamma_i delta_ij`` on ``|dF_i/dx_j|``.
    """

    per_gene_row_sums: tuple[float, ...]
    bound_F: float
    bound_DF: float
    entry_bounds: np.ndarray = field(repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "per_gene_row_sums": list(self.per_gene_row_sums),
            "bound_F": self.bound_F,
            "bound_DF": self.bound_DF,
        }


@dataclass(frozen=True)
class Network:
    """Ordered collection of genes; immutable after construction."""

    genes: tuple[GeneNode, ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        genes = tuple(self.genes)
        object.__setattr__(self, "genes", genes)
        n = len(genes)
        names = tuple(self.names) if self.names is not None else tuple(f"x{i + 1}" for i in range(n))
        if len(names) != n:
            raise DomainError(f"expected {n} names, got {len(names)}")
        if len(set(names)) != n:
            raise DomainError("gene names must be unique")
        object.__setattr__(self, "names", names)
        for i, g in enumerate(genes):
            for e in g.edges:
                if e.source >= n:
                    raise DomainError(f"gene {i} has edge from missing gene {e.source}")

    # -- structure ---------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.genes)

    @property
    def delays(self) -> tuple[float, ...]:
        """Sorted distinct delays over all edges."""
        return tuple(sorted({e.delay for g in self.genes for e in g.edges}))

    @property
    def is_delayed(self) -> bool:
        return any(d > 0.0 for d in self.delays)

    @property
    def all_logistic(self) -> bool:
        return all(e.is_logistic for g in self.genes for e in g.edges)

    @property
    def production(self) -> np.ndarray:
        return np.array([g.production for g in self.genes])

    @property
    def degradation(self) -> np.ndarray:
        return np.array([g.degradation for g in self.genes])

    def _state(self, state) -> np.ndarray:
        x = np.asarray(state, dtype=float)
        if x.shape != (self.size,):
            raise DomainError(f"state must have shape ({self.size},), got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise DomainError("state must be finite")
        return x

    def _require_undelayed(self):
        if self.is_delayed:
            raise DelayedNetworkError(
                "network has delayed edges; integrate it with simulate_dde instead"
            )

    # -- evaluation ----------------------------------------------------------

    def regulatory_product(self, gene: int, inputs) -> float:
        """Product of the edge responses of ``gene`` (1.0 for no edges).

        Delays are ignored; ``inputs`` is read as the current state.
        """
        x = self._state(inputs)
        p = 1.0
        for e in self.genes[gene].edges:
            p *= e.scale * e.value(x[e.source])
        return p

    def delayed_field(self, x: np.ndarray, lagged: Mapping[float, np.ndarray]) -> np.ndarray:
        """Right-hand side with edge inputs read from ``lagged[edge.delay]``.

        Edges with zero delay read ``x`` unless ``lagged`` supplies an entry
        for 0.0.
        """
        out = np.empty(self.size)
        for i, g in enumerate(self.genes):
            p = g.production
            for e in g.edges:
                src = lagged[e.delay] if e.delay in lagged else x
                p *= e.scale * e.value(src[e.source])
            out[i] = p - g.degradation * x[i]
        return out

    def vector_field(self, state) -> np.ndarray:
        """``F(x)`` for a network without delays."""
        self._require_undelayed()
        x = self._state(state)
        return self.delayed_field(x, {})

    def jacobian(self, state) -> np.ndarray:
        """Analytic Jacobian ``dF_i/dx_j`` of a network without delays."""
        self._require_undelayed()
        x = self._state(state)
        n = self.size
        J = np.zeros((n, n))
        for i, g in enumerate(self.genes):
            vals = [e.scale * e.value(x[e.source]) for e in g.edges]
            for m, e in enumerate(g.edges):
                others = 1.0
                for q, v in enumerate(vals):
                    if q != m:
                        others *= v
                J[i, e.source] += g.production * e.scale * e.slope(x[e.source]) * others
            J[i, i] -= g.degradation
        return J

    def invariant_box(self) -> list[tuple[float, float]]:
        """Per-gene intervals ``[0, kappa_i / gamma_i]`` (scaled edges fold into kappa)."""
        return [(0.0, g.effective_production / g.degradation) for g in self.genes]

    def standard_form_arguments(self, state) -> list[list[float]]:
        """Per-edge ``z = sign * lambda * (x_source - theta)``.

        ``standard_logistic(z)`` reproduces each (unscaled) edge response.
        """
        x = self._state(state)
        out = []
        for g in self.genes:
            row = []
            for e in g.edges:
                r = e.response
                if not isinstance(r, LogisticSpec):
                    raise UnsupportedEdgeError("standard form needs logistic edges")
                row.append(r.sign * r.steepness * (x[e.source] - r.threshold))
            out.append(row)
        return out

    # -- transformations -----------------------------------------------------

    def rescale_weights(self, weights: Sequence[Sequence[float]]) -> "Network":
        """Fold input weights into steepness and threshold.

        The weighted response ``s(sign * lambda * (w x - theta))`` equals
        ``s(sign' * lambda |w| * (x - theta / w))`` with ``sign' = sign * sign(w)``.

        Parameters
        ----------
        weights : sequence of sequences
            ``weights[i][m]`` scales the input of edge ``m`` of gene ``i``.
        """
        if len(weights) != self.size:
            raise DomainError("weights must list one sequence per gene")
        genes = []
        for g, ws in zip(self.genes, weights):
            if len(ws) != len(g.edges):
                raise DomainError("one weight per edge is required")
            edges = []
            for e, w in zip(g.edges, ws):
                w = float(w)
                if w == 0.0 or not math.isfinite(w):
                    raise DomainError("edge weights must be finite and nonzero")
                r = e.response
                if not isinstance(r, LogisticSpec):
                    raise UnsupportedEdgeError("weight rescaling needs logistic edges")
                orient = r.orientation if w > 0 else r.orientation.flipped()
                spec = LogisticSpec(r.steepness * abs(w), r.threshold / w, orient)
                if e.scaled and orient is not Orientation.DECREASING:
                    raise DomainError("negative weight on a scaled edge is not supported")
                edges.append(RegulationEdge(e.source, spec, e.delay, e.scaled))
            genes.append(GeneNode(g.production, g.degradation, tuple(edges)))
        return Network(tuple(genes), self.names)

    def weighted_vector_field(self, weights: Sequence[Sequence[float]], state) -> np.ndarray:
        """Vector field with each edge reading ``w * x_source`` (reference form)."""
        self._require_undelayed()
        x = self._state(state)
        out = np.empty(self.size)
        for i, (g, ws) in enumerate(zip(self.genes, weights)):
            p = g.production
            for e, w in zip(g.edges, ws):
                r = e.response
                p *= e.scale * _sigmoid(r.sign * r.steepness * (w * x[e.source] - r.threshold))
            out[i] = p - g.degradation * x[i]
        return out

    def with_responses(self, mapping) -> "Network":
        """Copy with every edge response replaced by ``mapping(response)``."""
        genes = [
            GeneNode(
                g.production,
                g.degradation,
                tuple(RegulationEdge(e.source, mapping(e.response), e.delay, e.scaled) for e in g.edges),
            )
            for g in self.genes
        ]
        return Network(tuple(genes), self.names)


# ---------------------------------------------------------------------------
# global Lipschitz bounds
# ---------------------------------------------------------------------------


def lipschitz_report(network: Network) -> LipschitzReport:
    """Closed-form bounds on ``|F|_Lip`` and ``|DF|_Lip`` over the whole space.

    Scaled edges contribute their constant factor to an effective ``kappa``.
    """
    if not network.all_logistic:
        raise UnsupportedEdgeError("Lipschitz bounds require logistic edges only")
    n = network.size
    L = np.zeros((n, n))
    for i, g in enumerate(network.genes):
        for e in g.edges:
            L[i, e.source] += e.response.steepness / 4.0
    kappa = np.array([g.effective_production for g in network.genes])
    gamma = network.degradation
    row_sums = L.sum(axis=1)
    entry = kappa[:, None] * L + np.diag(gamma)
    bound_F = float(np.max(kappa * row_sums + gamma)) if n else 0.0

    rho = SECOND_DERIVATIVE_BOUND
    terms = []
    for g in network.genes:
        m = len(g.edges)
        lam = max((e.response.steepness for e in g.edges), default=0.0)
        terms.append(m * m * lam * lam / 16.0 + m * lam * lam * rho)
    kappa_max = float(kappa.max()) if n else 0.0
    bound_DF = kappa_max * max(terms, default=0.0)
    return LipschitzReport(tuple(float(v) for v in row_sums), bound_F, float(bound_DF), entry)


def lipschitz_bound_F(network: Network) -> float:
    """``M = max_i (kappa_i sum_j L_i^j + gamma_i)``."""
    return lipschitz_report(network).bound_F


def lipschitz_bound_DF(network: Network) -> float:
    """``K = kappa_max max_i (M_i**2 Lambda_i**2 / 16 + M_i Lambda_i**2 sqrt(3)/18)``."""
    return lipschitz_report(network).bound_DF
