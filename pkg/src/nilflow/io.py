"""Reading and writing algebra, metric, Gram, certificate and trajectory files.

JSON is written canonically (two-space indent, fixed key order, trailing
newline) so that export after import reproduces a canonical file byte for byte.
Exact constants are written as integers or ``"p/q"`` strings.
"""

from __future__ import annotations

import io
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .algebra import BracketSpec, DiagonalMetric, parse_scalar
from .errors import DimensionMismatch, SchemaError

FLOAT_FMT = "%.17g"


def _load_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise FileNotFoundError(f"file not found: {path}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _scalar(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise SchemaError(f"{where}: expected a number or 'p/q' string, got {value!r}")
    try:
        return parse_scalar(value)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"{where}: cannot parse {value!r} as a number") from None


def _index(obj, key, where):
    if key not in obj:
        raise SchemaError(f"{where}: missing field '{key}'")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{where}.{key}: expected an integer, got {v!r}")
    return v


def algebra_from_dict(data, source: str = "<algebra>") -> BracketSpec:
    if not isinstance(data, dict):
        raise SchemaError(f"{source}: top level must be an object")
    dim = _index(data, "dim", source)
    brackets = data.get("brackets")
    if not isinstance(brackets, list):
        raise SchemaError(f"{source}: field 'brackets' must be a list")
    entries = []
    for i, b in enumerate(brackets):
        where = f"{source}: brackets[{i}]"
        if not isinstance(b, dict):
            raise SchemaError(f"{where}: expected an object")
        j, k, l = (_index(b, key, where) for key in ("j", "k", "l"))
        if "alpha" not in b:
            raise SchemaError(f"{where}: missing field 'alpha'")
        entries.append((j, k, l, _scalar(b["alpha"], where + ".alpha")))
    try:
        return BracketSpec(dim, tuple(entries))
    except ValueError as exc:
        raise SchemaError(f"{source}: {exc}") from None


def metric_from_dict(data, source: str = "<metric>", dim: int | None = None) -> DiagonalMetric:
    if not isinstance(data, dict) or not isinstance(data.get("q"), list):
        raise SchemaError(f"{source}: expected an object with a list field 'q'")
    q = [_scalar(v, f"{source}: q[{i}]") for i, v in enumerate(data["q"])]
    for i, v in enumerate(q):
        if not v > 0:
            raise SchemaError(f"{source}: q[{i}] = {v} is not strictly positive")
    if dim is not None and len(q) != dim:
        raise DimensionMismatch(f"{source}: metric has {len(q)} entries but the algebra has dimension {dim}")
    return DiagonalMetric(tuple(q))


def gram_from_dict(data, source: str = "<gram>") -> np.ndarray:
    if not isinstance(data, dict) or not isinstance(data.get("U"), list):
        raise SchemaError(f"{source}: expected an object with a list field 'U'")
    rows = data["U"]
    m = len(rows)
    for i, r in enumerate(rows):
        if not isinstance(r, list):
            raise SchemaError(f"{source}: U[{i}] must be a list")
        if len(r) != m:
            raise DimensionMismatch(f"{source}: U[{i}] has {len(r)} entries, expected {m}")
        for j, v in enumerate(r):
            if isinstance(v, bool) or not isinstance(v, int):
                raise SchemaError(f"{source}: U[{i}][{j}] must be an integer, got {v!r}")
    U = np.array(rows, dtype=np.int64).reshape(m, m)
    if not np.array_equal(U, U.T):
        raise SchemaError(f"{source}: U is not symmetric")
    return U


def load_algebra(path) -> BracketSpec:
    return algebra_from_dict(_load_json(path), str(path))


def load_metric(path, dim: int | None = None) -> DiagonalMetric:
    return metric_from_dict(_load_json(path), str(path), dim)


def load_gram(path):
    """Gram matrix plus the provenance flag ``"gram-only"``."""
    return gram_from_dict(_load_json(path), str(path)), "gram-only"


def _json_scalar(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def algebra_to_dict(spec: BracketSpec) -> dict:
    return {
        "dim": spec.dim,
        "brackets": [{"j": j, "k": k, "l": l, "alpha": _json_scalar(a)} for j, k, l, a in spec.entries],
    }


def metric_to_dict(metric: DiagonalMetric) -> dict:
    return {"q": [_json_scalar(v) for v in metric.q]}


def gram_to_dict(U) -> dict:
    return {"U": np.asarray(U, dtype=np.int64).tolist()}


def export_algebra(spec: BracketSpec, path=None) -> str:
    text = dumps(algebra_to_dict(spec))
    if path is not None:
        Path(path).write_text(text)
    return text


def export_metric(metric: DiagonalMetric, path=None) -> str:
    text = dumps(metric_to_dict(metric))
    if path is not None:
        Path(path).write_text(text)
    return text


def certificate_to_dict(cert) -> dict:
    d = cert.to_json()
    if cert.exact:
        d["exact"] = {
            "beta": str(cert.beta),
            "a_star": [str(x) for x in cert.a_star],
            "derivation_diag": [str(x) for x in cert.derivation_diag],
        }
    return d


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(FLOAT_FMT % float(x) for x in r) + "\n")
    return buf.getvalue()


def trajectory_csv(traj, invariants: np.ndarray | None = None, run: int | None = None) -> str:
    """``t,q_1..q_n,a_1..a_m,inv_1..inv_k`` with 17 significant digits.

    ``run`` prefixes a sweep index column.
    """
    n, m = traj.q.shape[1], traj.a.shape[1]
    inv = np.zeros((len(traj), 0)) if invariants is None else np.asarray(invariants)
    header = ["t"] + [f"q_{i}" for i in range(1, n + 1)] + [f"a_{i}" for i in range(1, m + 1)]
    header += [f"inv_{i}" for i in range(1, inv.shape[1] + 1)]
    rows = np.column_stack([traj.t, traj.q, traj.a, inv])
    if run is not None:
        header = ["run"] + header
        rows = np.column_stack([np.full(len(rows), run), rows])
    return _csv(header, rows)


def projective_csv(ptraj, run: int | None = None) -> str:
    """``tau,s_1..s_{m-1},eta_1..eta_{m-1}``."""
    k = ptraj.s.shape[1]
    header = ["tau"] + [f"s_{i}" for i in range(1, k + 1)] + [f"eta_{i}" for i in range(1, k + 1)]
    rows = np.column_stack([ptraj.tau, ptraj.s, ptraj.eta])
    if run is not None:
        header = ["run"] + header
        rows = np.column_stack([np.full(len(rows), run), rows])
    return _csv(header, rows)


def read_csv(text: str):
    """Header list and float array from a CSV produced here."""
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]]).reshape(len(lines) - 1, len(header))
    return header, data
