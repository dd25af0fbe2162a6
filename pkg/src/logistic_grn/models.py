"""Ready-made models: oscillator, autoregulation, mutual activation, delayed feedback."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import IntegratorConfig, Trajectory, integrate
from .errors import DomainError
from .network import GeneNode, Network, RegulationEdge, response_value
from .sigmoid import HillSpec, LogisticSpec, Orientation, SigmoidSpec

__all__ = [
    "oscillator",
    "hill_twin",
    "two_node_lipschitz",
    "PositiveAutoregulation",
    "mutual_activation",
    "hematopoiesis",
]

INC = Orientation.INCREASING
DEC = Orientation.DECREASING


def oscillator(
    kappa=(3.0, 4.0),
    gamma=(0.25, 0.5),
    steepness: float = 3.0,
    theta=(4.0, 3.0),
    scaled: bool = False,
) -> Network:
    """Two-gene negative feedback loop: gene 1 activates gene 2, gene 2 represses gene 1.

    ``theta = (theta_1, theta_2)`` are the thresholds on ``x1`` and ``x2``.
    With ``scaled`` the repression of gene 1 equals 1 at ``x2 = 0``.
    """
    th1, th2 = theta
    g1 = GeneNode(kappa[0], gamma[0], (RegulationEdge(1, LogisticSpec(steepness, th2, DEC), scaled=scaled),))
    g2 = GeneNode(kappa[1], gamma[1], (RegulationEdge(0, LogisticSpec(steepness, th1, INC)),))
    return Network((g1, g2), ("x1", "x2"))


def hill_twin(network: Network, coefficient: float | None = None) -> Network:
    """Replace every logistic edge by a Hill edge with the same threshold.

    ``coefficient`` defaults to ``lambda * theta`` (the steepness match).
    """

    def swap(r: SigmoidSpec) -> SigmoidSpec:
        if isinstance(r, HillSpec):
            return r
        n = coefficient if coefficient is not None else r.steepness * r.threshold
        return HillSpec(n, r.threshold, r.orientation)

    genes = [
        GeneNode(g.production, g.degradation, tuple(RegulationEdge(e.source, swap(e.response), e.delay) for e in g.edges))
        for g in network.genes
    ]
    return Network(tuple(genes), network.names)


def two_node_lipschitz(steepness: float = 2.5, kappa=(3.0, 4.0), gamma=(0.25, 0.5), theta=(4.0, 3.0)) -> Network:
    """Two genes with two logistic inputs each (cross activation, self repression)."""
    th1, th2 = theta
    g1 = GeneNode(
        kappa[0],
        gamma[0],
        (RegulationEdge(1, LogisticSpec(steepness, th2, INC)), RegulationEdge(0, LogisticSpec(steepness, th1, DEC))),
    )
    g2 = GeneNode(
        kappa[1],
        gamma[1],
        (RegulationEdge(0, LogisticSpec(steepness, th1, INC)), RegulationEdge(1, LogisticSpec(steepness, th2, DEC))),
    )
    return Network((g1, g2), ("x1", "x2"))


@dataclass(frozen=True)
class PositiveAutoregulation:
    """mRNA ``m`` and protein ``x`` with the protein activating its own transcription.

    ``m' = k_m h(x) - k_dm m`` and ``x' = k_p m - k_dp x``; the reduced
    fixed-point map is ``x = alpha h(x)`` with loop gain
    ``alpha = k_m k_p / (k_dm k_dp)``.
    """

    k_m: float = 0.003
    k_dm: float = 0.001
    k_p: float = 0.002
    k_dp: float = 1e-5
    response: SigmoidSpec = LogisticSpec(3.0, 1.0)

    def __post_init__(self):
        for name in ("k_m", "k_dm", "k_p", "k_dp"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.response.orientation is not INC:
            raise DomainError("autoregulation needs an increasing response")

    @property
    def alpha(self) -> float:
        return self.k_m * self.k_p / (self.k_dm * self.k_dp)

    @property
    def names(self) -> tuple[str, str]:
        return ("m", "x")

    def _h(self, x: float) -> float:
        return response_value(self.response, x)

    def basal_mrna(self) -> float:
        """Steady mRNA level sustained by the response at zero protein."""
        return self.k_m * self._h(0.0) / self.k_dm

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        m, x = y
        return np.array([self.k_m * self._h(x) - self.k_dm * m, self.k_p * m - self.k_dp * x])

    def invariant_box(self) -> list[tuple[float, float]]:
        m_max = self.k_m / self.k_dm
        return [(0.0, m_max), (0.0, self.k_p * m_max / self.k_dp)]

    def simulate(self, x0=(0.01, 0.01), config: IntegratorConfig | None = None) -> Trajectory:
        cfg = config or IntegratorConfig(t_end=1e4, rel_tol=1e-10, abs_tol=1e-12, max_step=10.0)
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (2,) or np.any(x0 < 0):
            raise DomainError("initial state must be two nonnegative numbers")
        return integrate(self.rhs, x0, cfg, self.names)

    def hill_twin(self, coefficient: float | None = None) -> "PositiveAutoregulation":
        r = self.response
        if isinstance(r, HillSpec):
            return self
        n = coefficient if coefficient is not None else r.steepness * r.threshold
        return PositiveAutoregulation(self.k_m, self.k_dm, self.k_p, self.k_dp, HillSpec(n, r.threshold, INC))


def mutual_activation(
    kappa=(200.0, 200.0),
    activation_steepness=(0.05 * np.log(3.0), 0.05 * np.log(3.0)),
    activation_threshold=(20.0, 20.0),
    repression_steepness=(0.057, 0.057),
    repression_threshold=(70.0, 70.0),
    gamma=(0.20, 0.24),
    delays=(0.0, 0.0, 0.0, 0.0),
) -> Network:
    """Two genes, each activated by the other and repressing itself.

    Parameters
    ----------
    delays : tuple of 4 floats
        ``(tau_1, tau_2, tau_12, tau_21)``: self-repression lags of A and B,
        then the lag of B acting on A and of A acting on B.
    """
    t1, t2, t12, t21 = delays
    a = GeneNode(
        kappa[0],
        gamma[0],
        (
            RegulationEdge(1, LogisticSpec(activation_steepness[0], activation_threshold[1], INC), t12),
            RegulationEdge(0, LogisticSpec(repression_steepness[0], repression_threshold[0], DEC), t1),
        ),
    )
    b = GeneNode(
        kappa[1],
        gamma[1],
        (
            RegulationEdge(0, LogisticSpec(activation_steepness[1], activation_threshold[0], INC), t21),
            RegulationEdge(1, LogisticSpec(repression_steepness[1], repression_threshold[1], DEC), t2),
        ),
    )
    return Network((a, b), ("A", "B"))


def hematopoiesis(kappa: float = 2.0, gamma: float = 1.0, response: LogisticSpec | None = None, delay: float = 1.5) -> Network:
    """Scalar population ``N' = -gamma N + kappa f(N(t - tau))`` with decreasing ``f``."""
    response = response or LogisticSpec(4.0, 1.0, DEC)
    return Network((GeneNode(kappa, gamma, (RegulationEdge(0, response, delay),)),), ("N",))
