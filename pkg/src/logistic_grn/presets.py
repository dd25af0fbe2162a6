"""Named built-in scenarios and a uniform simulation entry point."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

from .calibration import LinearActivationReference
from .dynamics import IntegratorConfig, Trajectory, simulate_dde, simulate_ode
from .errors import DomainError
from .models import PositiveAutoregulation, hematopoiesis, hill_twin, oscillator, two_node_lipschitz
from .network import Network

__all__ = ["Preset", "PRESETS", "get_preset", "simulate_model", "with_overrides"]


@dataclass(frozen=True)
class Preset:
    """A model factory plus its default initial state and integrator settings.

    ``escape`` names a ``(component, level)`` pair whose first upward
    crossing is reported after a simulation.
    """

    name: str
    description: str
    build: Callable[[], object]
    x0: tuple[float, ...]
    config: IntegratorConfig
    escape: tuple[str, float] | None = None


def _trap() -> Network:
    return oscillator(kappa=(0.5, 0.5), gamma=(8.0, 5.0), steepness=3.0, theta=(1.0, 1.0))


_AUTOREG_CFG = IntegratorConfig(t_end=1e4, rel_tol=1e-10, abs_tol=1e-12, max_step=10.0)

PRESETS: dict[str, Preset] = {
    p.name: p
    for p in (
        Preset("oscillator", "two-gene negative feedback loop", oscillator, (1.0, 1.0), IntegratorConfig(t_end=60.0)),
        Preset(
            "scaled-oscillator",
            "oscillator with the repression normalized to 1 at zero",
            lambda: oscillator(scaled=True),
            (1.0, 1.0),
            IntegratorConfig(t_end=60.0),
        ),
        Preset("trap", "low-expression loop, logistic responses", _trap, (0.02, 0.02), IntegratorConfig(t_end=20.0)),
        Preset(
            "trap-hill", "low-expression loop, Hill twin", lambda: hill_twin(_trap()), (0.02, 0.02), IntegratorConfig(t_end=20.0)
        ),
        Preset(
            "autoreg-logistic",
            "positive autoregulation with a logistic response",
            PositiveAutoregulation,
            (0.01, 0.01),
            _AUTOREG_CFG,
            ("x", 1.0),
        ),
        Preset(
            "autoreg-hill",
            "positive autoregulation with the matched Hill response",
            lambda: PositiveAutoregulation().hill_twin(),
            (0.01, 0.01),
            _AUTOREG_CFG,
            ("x", 1.0),
        ),
        Preset(
            "vinoth-calibrated",
            "fully logistic mutual activation calibrated from the linear reference",
            lambda: LinearActivationReference().logistic_network(),
            (10.0, 10.0),
            IntegratorConfig(t_end=50.0),
        ),
        Preset(
            "vinoth-reference",
            "mutual linear activation with logistic self-repression",
            LinearActivationReference,
            (10.0, 10.0),
            IntegratorConfig(t_end=50.0),
        ),
        Preset(
            "two-node-lipschitz",
            "two genes with two logistic inputs each",
            two_node_lipschitz,
            (1.0, 1.0),
            IntegratorConfig(t_end=60.0),
        ),
        Preset(
            "hematopoiesis",
            "scalar delayed negative feedback",
            hematopoiesis,
            (0.5,),
            IntegratorConfig(t_end=60.0),
        ),
    )
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def simulate_model(model, x0, config: IntegratorConfig) -> Trajectory:
    """Simulate any built-in model type from ``x0`` (constant history if delayed)."""
    if isinstance(model, Network):
        if model.is_delayed:
            return simulate_dde(model, x0, config)
        return simulate_ode(model, x0, config)
    if isinstance(model, (PositiveAutoregulation, LinearActivationReference)):
        return model.simulate(tuple(x0), config)
    raise DomainError(f"cannot simulate {type(model).__name__}")


def with_overrides(config: IntegratorConfig, **overrides) -> IntegratorConfig:
    """``config`` with the non-``None`` overrides applied."""
    return replace(config, **{k: v for k, v in overrides.items() if v is not None})
