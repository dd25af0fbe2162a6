"""Command-line front end.

Subcommands: ``simulate``, ``analyze``, ``calibrate`` and ``convert``.
Reports go to stdout as JSON (or to ``--out``).

Exit codes: 0 ok, 2 input error, 3 numeric failure, 4 mode/model mismatch.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analysis
from .calibration import (
    LinearActivationSpec,
    derive_activation_params,
    derive_activation_params_general,
    derive_weighted_params,
    fit_least_squares,
)
from .dynamics import IntegratorConfig, measure_escape_time
from .errors import (
    ConvergenceError,
    DelayedNetworkError,
    DomainError,
    FitDivergenceError,
    GRNError,
    HillSingularityError,
    IntegrationError,
    ModelFileError,
    UnsupportedEdgeError,
)
from .modelfile import load_fit_problem, load_model, write_trajectory_csv
from .models import PositiveAutoregulation
from .network import Network, lipschitz_report
from .presets import PRESETS, get_preset, simulate_model, with_overrides
from .sigmoid import HillSpec, LogisticSpec, Orientation, hill_eval, logistic_eval, match_steepness

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_INPUT", "EXIT_NUMERIC", "EXIT_MISMATCH"]

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_MISMATCH = 4


class ModeMismatch(GRNError):
    """The chosen analysis does not apply to the given model."""


class _InputError(GRNError):
    pass


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _floats(text: str, what: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise _InputError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise _InputError(f"{what}: values must be finite")
    return vals


def _spec_dict(spec) -> dict:
    if isinstance(spec, LogisticSpec):
        return {
            "family": "logistic",
            "steepness": spec.steepness,
            "threshold": spec.threshold,
            "orientation": spec.orientation.value,
        }
    return {
        "family": "hill",
        "coefficient": spec.coefficient,
        "threshold": spec.threshold,
        "orientation": spec.orientation.value,
    }


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _load(args):
    """Model object, default initial state and default config."""
    if args.preset and args.model:
        raise _InputError("give either a model file or --preset, not both")
    if args.preset:
        p = get_preset(args.preset)
        return p.build(), p.x0, p.config, p.escape
    if not args.model:
        raise _InputError("a model file or --preset is required")
    net = load_model(args.model)
    return net, None, IntegratorConfig(t_end=60.0), None


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("model", nargs="?", help="JSON model file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="built-in scenario")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    model, x0, cfg, escape = _load(args)
    if args.x0 is not None:
        x0 = _floats(args.x0, "--x0")
    if x0 is None:
        raise _InputError("--x0 is required for model files")
    cfg = with_overrides(cfg, t_end=args.t_end, rel_tol=args.rtol, abs_tol=args.atol, max_step=args.max_step)
    traj = simulate_model(model, x0, cfg)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_trajectory_csv(traj, fh)
    if args.escape_level is not None:
        escape = (args.escape_component or traj.names[-1], args.escape_level)
    report = {
        "t_end": float(traj.times[-1]),
        "terminal_state": dict(zip(traj.names, map(float, traj.final_state))),
        "accepted_steps": traj.accepted_steps,
        "rejected_steps": traj.rejected_steps,
    }
    if escape is not None:
        comp, level = escape
        report["escape_component"] = comp
        report["escape_level"] = level
        report["escape_time"] = measure_escape_time(traj, comp, level)
    print(json.dumps(report, indent=2))
    return EXIT_OK


def _bistability(args) -> dict:
    if args.preset or args.model:
        model, _, _, _ = _load(args)
        if not isinstance(model, PositiveAutoregulation):
            raise ModeMismatch("bistability analysis needs an autoregulation model or --family flags")
        response, alpha = model.response, (args.alpha if args.alpha is not None else model.alpha)
    else:
        if args.family is None or args.theta is None:
            raise _InputError("bistability mode needs --family and --theta (or an autoregulation preset)")
        if args.family == "logistic":
            if args.lam is None:
                raise _InputError("--lambda is required for the logistic family")
            response = LogisticSpec(args.lam, args.theta)
        else:
            if args.n is None:
                raise _InputError("--n is required for the hill family")
            response = HillSpec(args.n, args.theta)
        alpha = args.alpha
    if alpha is not None:
        return analysis.autoreg_fixed_points(response, alpha).to_dict()
    if isinstance(response, LogisticSpec):
        try:
            return analysis.logistic_saddle_nodes(response.steepness, response.threshold).to_dict()
        except analysis.NoBistableBandError as exc:
            return {"alpha_crit_lower": None, "alpha_crit_upper": None, "saddle_nodes": [], "note": str(exc)}
    x_crit, a_crit = analysis.hill_alpha_crit(response.coefficient, response.threshold)
    return {"x_crit": x_crit, "alpha_crit_lower": a_crit, "alpha_crit_upper": None}


def _hopf(args) -> dict:
    model, _, _, _ = _load(args)
    if not isinstance(model, Network) or not model.is_delayed:
        raise ModeMismatch("hopf mode needs a delayed model")
    if model.size != 1 or len(model.genes[0].edges) != 1:
        raise ModeMismatch("hopf mode needs a scalar model with a single delayed self-edge")
    g = model.genes[0]
    edge = g.edges[0]
    if not (edge.is_logistic and edge.response.orientation is Orientation.DECREASING):
        raise ModeMismatch("hopf mode needs decreasing logistic feedback")
    report = analysis.hopf_critical_delay(g.effective_production, g.degradation, edge.response, args.k_max).to_dict()
    report["delay"] = edge.delay
    crit = report.get("critical_delays") or []
    report["beyond_first_critical_delay"] = bool(crit) and edge.delay > crit[0]
    return report


def cmd_analyze(args) -> int:
    if args.mode == "bistability":
        report = _bistability(args)
    elif args.mode == "hopf":
        report = _hopf(args)
    else:
        model, _, _, _ = _load(args)
        if not isinstance(model, Network):
            raise ModeMismatch(f"{args.mode} mode needs a network model")
        if args.mode == "lipschitz":
            report = lipschitz_report(model).to_dict()
        else:
            if model.is_delayed:
                raise ModeMismatch("equilibria mode needs a model without delays")
            if args.guess is not None:
                guess = _floats(args.guess, "--guess")
            else:
                guess = [0.5 * hi for _, hi in model.invariant_box()]
            report = analysis.find_equilibrium(model, guess, tol=args.tol).to_dict()
            report["names"] = list(model.names)
    _emit(report, args.out)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    if args.fit:
        if args.g is not None or args.g_cross is not None:
            raise _InputError("--fit cannot be combined with --g/--g-cross")
        problem, cfg = load_fit_problem(args.fit)
        _emit(fit_least_squares(problem, cfg).to_dict(), args.out)
        return EXIT_OK
    if args.g is None:
        raise _InputError("--g is required")
    if args.weighted:
        if args.theta is not None:
            raise _InputError("--weighted fixes the threshold; drop --theta")
        spec = LinearActivationSpec(args.g, args.g_cross if args.g_cross is not None else 1.0)
        result = derive_weighted_params(spec)
    else:
        if args.g_cross is None:
            raise _InputError("--g-cross is required")
        spec = LinearActivationSpec(args.g, args.g_cross)
        if args.theta is None:
            result = derive_activation_params(spec)
        else:
            result = derive_activation_params_general(spec, args.theta)
    _emit(result.to_dict(), args.out)
    return EXIT_OK


def cmd_convert(args) -> int:
    parts = [s.strip() for s in args.hill.split(",")]
    if len(parts) != 3:
        raise _InputError("--hill expects n,theta,orientation")
    n, theta = _floats(",".join(parts[:2]), "--hill")
    hill = HillSpec(n, theta, Orientation.parse(parts[2]))
    logistic = match_steepness(hill)
    x = np.linspace(0.0, 4.0 * theta, 1000)
    dev = np.abs(np.asarray(hill_eval(hill, x)) - np.asarray(logistic_eval(logistic, x)))
    k = int(np.argmax(dev))
    report = {
        "hill": _spec_dict(hill),
        "logistic": _spec_dict(logistic),
        "max_abs_deviation": float(dev[k]),
        "argmax": float(x[k]),
        "interval": [0.0, 4.0 * theta],
        "samples": 1000,
    }
    _emit(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _InputError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="logistic-grn", description="Logistic gene regulatory network toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="integrate a model and print its terminal state")
    _add_model_args(sim)
    sim.add_argument("--x0", help="initial state (constant history if delayed), comma-separated")
    sim.add_argument("--t-end", type=float)
    sim.add_argument("--rtol", type=float)
    sim.add_argument("--atol", type=float)
    sim.add_argument("--max-step", type=float)
    sim.add_argument("--out", help="trajectory CSV path")
    sim.add_argument("--escape-level", type=float, help="report the first upward crossing of this level")
    sim.add_argument("--escape-component", help="component for --escape-level (default: last)")
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="equilibria, Lipschitz bounds, bistability or Hopf analysis")
    _add_model_args(ana)
    ana.add_argument("--mode", required=True, choices=("equilibria", "lipschitz", "bistability", "hopf"))
    ana.add_argument("--guess", help="Newton starting point (equilibria)")
    ana.add_argument("--tol", type=float, default=1e-10)
    ana.add_argument("--family", choices=("logistic", "hill"))
    ana.add_argument("--lambda", dest="lam", type=float)
    ana.add_argument("--n", type=float)
    ana.add_argument("--theta", type=float)
    ana.add_argument("--alpha", type=float)
    ana.add_argument("--k-max", type=int, default=3)
    ana.add_argument("--out")
    ana.set_defaults(func=cmd_analyze)

    cal = sub.add_parser("calibrate", help="logistic parameters from a linear activation, or a trajectory fit")
    cal.add_argument("--g", type=float, help="basal production rate")
    cal.add_argument("--g-cross", type=float, help="cross-activation coefficient")
    cal.add_argument("--theta", type=float, help="threshold for the general strategy")
    cal.add_argument("--weighted", action="store_true", help="weighted-input form")
    cal.add_argument("--fit", help="fit-problem JSON")
    cal.add_argument("--out")
    cal.set_defaults(func=cmd_calibrate)

    conv = sub.add_parser("convert", help="steepness-matched logistic for a Hill response")
    conv.add_argument("--hill", required=True, help="n,theta,orientation")
    conv.add_argument("--out")
    conv.set_defaults(func=cmd_convert)
    return parser


def _fail(code: int, exc: BaseException) -> int:
    print(f"error: {exc}", file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (ModeMismatch, DelayedNetworkError, UnsupportedEdgeError) as exc:
        return _fail(EXIT_MISMATCH, exc)
    except (IntegrationError, ConvergenceError, FitDivergenceError, HillSingularityError) as exc:
        return _fail(EXIT_NUMERIC, exc)
    except (_InputError, ModelFileError, DomainError) as exc:
        return _fail(EXIT_INPUT, exc)
    except GRNError as exc:
        return _fail(EXIT_NUMERIC, exc)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
