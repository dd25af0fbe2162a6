"""JSON model files, fit-problem files and trajectory CSV.

Model file layout::

    {
      "units": {"time": "min", "concentration": "nM"},      # optional
      "genes": [
        {"name": "A", "kappa": 200, "gamma": 0.2,
         "edges": [{"source": "B", "family": "logistic", "steepness_or_n": 0.055,
                    "theta": 20, "orientation": "activation", "delay": 0,
                    "scaled": false}]}
      ]
    }

``source`` is a gene name or a zero-based index; ``delay`` and ``scaled`` are
optional.  Unknown keys are rejected.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, TextIO

import numpy as np

from .dynamics import Trajectory
from .errors import GRNError, ModelFileError
from .network import GeneNode, Network, RegulationEdge
from .sigmoid import HillSpec, LogisticSpec, Orientation

__all__ = [
    "parse_json",
    "network_from_dict",
    "network_to_dict",
    "load_model",
    "save_model",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "trajectory_csv_text",
    "load_fit_problem",
    "fit_problem_to_dict",
]

_TOP_KEYS = {"genes", "units"}
_UNIT_KEYS = {"time", "concentration"}
_GENE_KEYS = {"name", "kappa", "gamma", "edges"}
_EDGE_KEYS = {"source", "family", "steepness_or_n", "theta", "orientation", "delay", "scaled"}
_EDGE_REQUIRED = {"source", "family", "steepness_or_n", "theta", "orientation"}


def parse_json(text: str) -> Any:
    """``json.loads`` with decode errors mapped to :class:`ModelFileError`."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno) from None


def _keys(obj: Any, allowed: set, required: set, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ModelFileError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ModelFileError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ModelFileError(f"{where}: missing field(s) {sorted(missing)}")
    return obj


def _number(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ModelFileError(f"{where}: expected a finite number, got {v!r}")
    return float(v)


def network_from_dict(doc: Any) -> Network:
    """Build a :class:`Network` from a parsed model document."""
    _keys(doc, _TOP_KEYS, {"genes"}, "model")
    if "units" in doc:
        _keys(doc["units"], _UNIT_KEYS, set(), "units")
    genes_doc = doc["genes"]
    if not isinstance(genes_doc, list) or not genes_doc:
        raise ModelFileError("genes: expected a non-empty list")
    names = []
    for i, g in enumerate(genes_doc):
        _keys(g, _GENE_KEYS, {"kappa", "gamma"}, f"genes[{i}]")
        name = g.get("name", f"x{i + 1}")
        if not isinstance(name, str) or not name:
            raise ModelFileError(f"genes[{i}].name: expected a non-empty string")
        names.append(name)
    genes = []
    for i, g in enumerate(genes_doc):
        edges = []
        edge_docs = g.get("edges", [])
        if not isinstance(edge_docs, list):
            raise ModelFileError(f"genes[{i}].edges: expected a list")
        for m, e in enumerate(edge_docs):
            where = f"genes[{i}].edges[{m}]"
            _keys(e, _EDGE_KEYS, _EDGE_REQUIRED, where)
            src = e["source"]
            if isinstance(src, str):
                if src not in names:
                    raise ModelFileError(f"{where}.source: unknown gene {src!r}")
                src = names.index(src)
            elif isinstance(src, bool) or not isinstance(src, int) or not 0 <= src < len(genes_doc):
                raise ModelFileError(f"{where}.source: expected a gene name or index, got {src!r}")
            scaled = e.get("scaled", False)
            if not isinstance(scaled, bool):
                raise ModelFileError(f"{where}.scaled: expected true or false")
            try:
                orient = Orientation.parse(e["orientation"])
                shape = _number(e["steepness_or_n"], f"{where}.steepness_or_n")
                theta = _number(e["theta"], f"{where}.theta")
                if e["family"] == "logistic":
                    spec = LogisticSpec(shape, theta, orient)
                elif e["family"] == "hill":
                    spec = HillSpec(shape, theta, orient)
                else:
                    raise ModelFileError(f"{where}.family: expected 'logistic' or 'hill'")
                delay = _number(e.get("delay", 0.0), f"{where}.delay")
                edges.append(RegulationEdge(src, spec, delay, scaled))
            except ModelFileError:
                raise
            except GRNError as exc:
                raise ModelFileError(f"{where}: {exc}") from None
        try:
            genes.append(
                GeneNode(_number(g["kappa"], f"genes[{i}].kappa"), _number(g["gamma"], f"genes[{i}].gamma"), tuple(edges))
            )
        except ModelFileError:
            raise
        except GRNError as exc:
            raise ModelFileError(f"genes[{i}]: {exc}") from None
    try:
        return Network(tuple(genes), tuple(names))
    except GRNError as exc:
        raise ModelFileError(str(exc)) from None


def network_to_dict(network: Network, units: dict | None = None) -> dict:
    """Inverse of :func:`network_from_dict` (sources written as names)."""
    genes = []
    for name, g in zip(network.names, network.genes):
        edges = []
        for e in g.edges:
            r = e.response
            d = {
                "source": network.names[e.source],
                "family": "logistic" if isinstance(r, LogisticSpec) else "hill",
                "steepness_or_n": r.steepness if isinstance(r, LogisticSpec) else r.coefficient,
                "theta": r.threshold,
                "orientation": r.orientation.value,
                "delay": e.delay,
            }
            if e.scaled:
                d["scaled"] = True
            edges.append(d)
        genes.append({"name": name, "kappa": g.production, "gamma": g.degradation, "edges": edges})
    doc: dict = {"genes": genes}
    if units:
        doc["units"] = dict(units)
    return doc


def load_model(path: str | Path) -> Network:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ModelFileError(f"cannot read model file: {exc}") from None
    return network_from_dict(parse_json(text))


def save_model(network: Network, path: str | Path, units: dict | None = None) -> None:
    Path(path).write_text(json.dumps(network_to_dict(network, units), indent=2) + "\n")


# ---------------------------------------------------------------------------
# trajectory CSV
# ---------------------------------------------------------------------------


def write_trajectory_csv(traj: Trajectory, stream: TextIO) -> None:
    """Header ``t,<names>`` then one row per sample with 17 significant digits."""
    stream.write(",".join(("t",) + traj.names) + "\n")
    for t, row in zip(traj.times, traj.states):
        stream.write(",".join(f"{v:.17g}" for v in (t, *row)) + "\n")


def trajectory_csv_text(traj: Trajectory) -> str:
    buf = io.StringIO()
    write_trajectory_csv(traj, buf)
    return buf.getvalue()


def read_trajectory_csv(path_or_stream) -> Trajectory:
    """Parse a CSV written by :func:`write_trajectory_csv`."""
    if isinstance(path_or_stream, (str, Path)):
        try:
            text = Path(path_or_stream).read_text()
        except OSError as exc:
            raise ModelFileError(f"cannot read trajectory: {exc}") from None
    else:
        text = path_or_stream.read()
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows or rows[0][0].strip() != "t" or len(rows[0]) < 2:
        raise ModelFileError("trajectory CSV must start with a 't,<names>' header", 1, 1)
    header = [h.strip() for h in rows[0]]
    data = []
    for i, r in enumerate(rows[1:], start=2):
        if len(r) != len(header):
            raise ModelFileError(f"expected {len(header)} columns", i, 1)
        try:
            data.append([float(v) for v in r])
        except ValueError:
            raise ModelFileError("non-numeric value", i, 1) from None
    if not data:
        raise ModelFileError("trajectory CSV has no rows")
    arr = np.array(data)
    try:
        return Trajectory(arr[:, 0], arr[:, 1:], names=tuple(header[1:]))
    except GRNError as exc:
        raise ModelFileError(f"invalid trajectory: {exc}") from None


# ---------------------------------------------------------------------------
# fit problems
# ---------------------------------------------------------------------------

_FIT_KEYS = {"model", "model_path", "data", "free", "weights", "settings"}


def load_fit_problem(path: str | Path):
    """Read a fit-problem file.

    Layout::

        {"model": {...} | "model_path": "net.json",
         "data": "trajectory.csv",
         "free": [{"kind": "lambda", "targets": [[0, 0], [1, 0]]}],
         "weights": [1, 1],                                # optional
         "settings": {"max_iter": 50, "rel_tol": 1e-10}}   # optional

    Relative paths resolve against the fit file's directory.

    Returns
    -------
    FitProblem, FitConfig
    """
    from .calibration import FitConfig, FitProblem, FreeParameter

    path = Path(path)
    try:
        doc = parse_json(path.read_text())
    except OSError as exc:
        raise ModelFileError(f"cannot read fit problem: {exc}") from None
    _keys(doc, _FIT_KEYS, {"data", "free"}, "fit problem")
    base = path.parent
    if ("model" in doc) == ("model_path" in doc):
        raise ModelFileError("fit problem: give exactly one of 'model' or 'model_path'")
    net = network_from_dict(doc["model"]) if "model" in doc else load_model(base / doc["model_path"])
    data = read_trajectory_csv(base / doc["data"])
    if not isinstance(doc["free"], list):
        raise ModelFileError("free: expected a list")
    try:
        free = []
        for k, p in enumerate(doc["free"]):
            _keys(p, {"kind", "targets"}, {"kind", "targets"}, f"free[{k}]")
            free.append(FreeParameter(p["kind"], tuple(tuple(t) if isinstance(t, list) else (t,) for t in p["targets"])))
        settings = doc.get("settings", {})
        _keys(settings, set(FitConfig.__dataclass_fields__), set(), "settings")
        problem = FitProblem(net, tuple(free), data, doc.get("weights"))
        return problem, FitConfig(**settings)
    except ModelFileError:
        raise
    except (GRNError, TypeError, ValueError) as exc:
        raise ModelFileError(f"fit problem: {exc}") from None


def fit_problem_to_dict(problem, data_path: str, settings: dict | None = None) -> dict:
    doc = {
        "model": network_to_dict(problem.template),
        "data": data_path,
        "free": [p.to_dict() for p in problem.free],
    }
    if problem.weights is not None:
        doc["weights"] = list(problem.weights)
    if settings:
        doc["settings"] = dict(settings)
    return doc
