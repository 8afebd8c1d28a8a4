"""Command-line front end.

Exit status: 0 on success, 1 when the input fails validation (Jacobi identity
or nilpotency), 2 on usage errors and unreadable or malformed input files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import catalog, curvature, flow, projective
from . import io as nio
from .algebra import DiagonalMetric, nilpotency_class, root_system, structure_vector, validate_jacobi
from .errors import DimensionMismatch, NilflowError, NoPositiveSolution, NotNilpotent, SchemaError, UnknownEntry
from .linalg import rational_nullspace

SUBCOMMANDS = ("validate", "info", "soliton", "flow", "projective", "equilibria", "invariants", "catalog")
CSV_COMMANDS = ("flow", "projective")


class UsageError(NilflowError):
    pass


class ValidationFailure(NilflowError):
    pass


@dataclass(frozen=True)
class CommandConfig:
    subcommand: str
    catalog: str | None = None
    algebra: str | None = None
    metric: str | None = None
    gram: str | None = None
    alpha: tuple = ()
    t_end: float = 1.0
    rtol: float = 1e-9
    atol: float = 1e-12
    tol: float = curvature.SOLITON_TOL
    samples: int = 101
    out: str | None = None
    format: str | None = None
    sweep: int | None = None
    seed: int = 0
    name: str | None = None  # positional entry for the catalog subcommand

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        for key in ("t_end", "rtol", "atol", "tol"):
            if not getattr(self, key) > 0:
                raise UsageError(f"--{key.replace('_', '-')} must be positive")
        if self.samples < 2:
            raise UsageError("--samples must be at least 2")
        if self.sweep is not None and self.sweep < 1:
            raise UsageError("--sweep must be positive")
        if self.subcommand != "catalog":
            sources = [s for s in (self.catalog, self.algebra, self.gram) if s is not None]
            if len(sources) != 1:
                raise UsageError("give exactly one of --catalog, --algebra, --gram")
            if self.metric is not None and self.algebra is None and self.catalog is None:
                raise UsageError("--metric needs --algebra or --catalog")
        if self.format == "csv" and self.subcommand not in CSV_COMMANDS:
            raise UsageError(f"{self.subcommand} only writes json")

    @property
    def fmt(self) -> str:
        return self.format or ("csv" if self.subcommand in CSV_COMMANDS else "json")


@dataclass
class Inputs:
    spec: object = None
    metric: DiagonalMetric | None = None
    gram: np.ndarray | None = None
    provenance: str = "algebra"
    entry: object = None


def _parse_alpha(text: str):
    try:
        lhs, rhs = text.split("=")
        j, k, l = (int(x) for x in lhs.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected J,K,L=VALUE, got {text!r}") from None
    return (j, k, l), rhs.strip()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("input")
    src.add_argument("--catalog", metavar="NAME")
    src.add_argument("--algebra", metavar="FILE")
    src.add_argument("--metric", metavar="FILE")
    src.add_argument("--gram", metavar="FILE")
    src.add_argument("--alpha", action="append", type=_parse_alpha, default=[], metavar="J,K,L=VALUE",
                     help="override a structure constant of a catalog entry (repeatable)")
    num = common.add_argument_group("numerics")
    num.add_argument("--t-end", type=float, default=1.0)
    num.add_argument("--rtol", type=float, default=1e-9)
    num.add_argument("--atol", type=float, default=1e-12)
    num.add_argument("--tol", type=float, default=curvature.SOLITON_TOL)
    num.add_argument("--samples", type=int, default=101, help="uniformly spaced output times")
    out = common.add_argument_group("output")
    out.add_argument("--out", metavar="PATH")
    out.add_argument("--format", choices=("csv", "json"))
    out.add_argument("--sweep", type=int, metavar="N", help="run N random initial conditions")
    out.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="nilflow", description="Ricci and bracket flow on metric nilpotent Lie algebras")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "catalog":
            p.add_argument("name", nargs="?", help="entry to export; lists all entries when omitted")
    return parser


def config_from_args(ns: argparse.Namespace) -> CommandConfig:
    return CommandConfig(
        subcommand=ns.subcommand, catalog=ns.catalog, algebra=ns.algebra, metric=ns.metric, gram=ns.gram,
        alpha=tuple(ns.alpha), t_end=ns.t_end, rtol=ns.rtol, atol=ns.atol, tol=ns.tol, samples=ns.samples,
        out=ns.out, format=ns.format, sweep=ns.sweep, seed=ns.seed, name=getattr(ns, "name", None),
    )


def load_inputs(cfg: CommandConfig) -> Inputs:
    if cfg.gram is not None:
        U, prov = nio.load_gram(cfg.gram)
        return Inputs(gram=U, provenance=prov)
    if cfg.catalog is not None:
        kwargs = {"alphas": dict(cfg.alpha)} if cfg.alpha else {}
        if kwargs and cfg.catalog.strip().lower() != "r6":
            raise UsageError("--alpha overrides apply to the r6 entry only")
        entry = catalog.get(cfg.catalog, **kwargs)
        if entry.gram_only:
            return Inputs(gram=entry.gram, provenance="gram-only", entry=entry)
        spec = entry.spec
        metric = entry.soliton_metric
    else:
        if cfg.alpha:
            raise UsageError("--alpha overrides apply to catalog entries only")
        spec = nio.load_algebra(cfg.algebra)
        metric = None
        entry = None
    if cfg.metric is not None:
        metric = nio.load_metric(cfg.metric, spec.dim)
    return Inputs(spec=spec, metric=metric or DiagonalMetric.ones(spec.dim), entry=entry)


def _require_spec(inp: Inputs, what: str):
    if inp.spec is None:
        raise UsageError(f"{what} needs an algebra; a Gram matrix alone is not enough")
    return inp.spec


def _validated(spec):
    rep = validate_jacobi(spec)
    if not rep.ok:
        raise ValidationFailure(f"Jacobi identity fails on {len(rep.failures)} triple(s)")
    try:
        nilpotency_class(spec)
    except NotNilpotent as exc:
        raise ValidationFailure(f"algebra is not nilpotent: {exc}") from None
    return spec


def _floats(v):
    return [float(x) for x in v]


def _exact_strings(v):
    return [str(x) for x in v]


def _emit(text: str, out: str | None, stdout) -> None:
    if out is None:
        stdout.write(text)
    else:
        Path(out).write_text(text)


def _random_metrics(n: int, count: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    return [DiagonalMetric(tuple(10.0 ** rng.uniform(-1, 1, size=n))) for _ in range(count)]


def cmd_validate(cfg, inp, stdout, stderr):
    spec = _require_spec(inp, "validate")
    rep = validate_jacobi(spec)
    result = {"jacobi": rep.ok, "exact": rep.exact, "failures": [
        {"triple": list(f[0]), "residual": _floats(f[1])} for f in rep.failures]}
    ok = rep.ok
    try:
        result["nilpotency_class"] = nilpotency_class(spec) if rep.ok else None
    except NotNilpotent as exc:
        result["nilpotency_class"] = None
        result["error"] = str(exc)
        ok = False
    result["nilpotent"] = ok
    _emit(nio.dumps(result), cfg.out, stdout)
    return 0 if ok else 1


def cmd_info(cfg, inp, stdout, stderr):
    if inp.spec is None:
        sys_ = projective.build_projective_system(inp.gram, inp.provenance)
        result = {"provenance": inp.provenance, "U": inp.gram.tolist(), "PU": sys_.PU.tolist(),
                  "pu_kernel": [list(v) for v in projective.pu_kernel(sys_)]}
        _emit(nio.dumps(result), cfg.out, stdout)
        return 0
    spec = _validated(inp.spec)
    roots = root_system(spec, allow_abelian=True)
    a = structure_vector(spec, inp.metric, exact=spec.exact and inp.metric.exact)
    ric = curvature.ricci_vector(roots, a) if roots.m else tuple(0 for _ in range(spec.dim))
    stable = curvature.is_stably_ricci_diagonal(spec)
    cert = curvature.soliton_test(roots, a, cfg.tol) if roots.m else None
    result = {
        "dim": spec.dim,
        "lambda": [list(t) for t in roots.lam],
        "Y": roots.Y.tolist(),
        "U": roots.U.tolist(),
        "metric": _floats(inp.metric.q),
        "structure_vector": _floats(a),
        "ricci_vector": _floats(ric),
        "stably_ricci_diagonal": bool(stable),
        "soliton": cert is not None,
        "beta": None if cert is None else float(cert.beta),
    }
    if curvature._all_exact(ric):
        result["ricci_vector_exact"] = _exact_strings(ric)
    if cert is not None and cert.exact:
        result["beta_exact"] = str(cert.beta)
    _emit(nio.dumps(result), cfg.out, stdout)
    return 0


def cmd_soliton(cfg, inp, stdout, stderr):
    if inp.spec is None:
        v = curvature.positive_gram_solution(inp.gram)
        sys_ = projective.build_projective_system(inp.gram, inp.provenance)
        if v is None:
            if cfg.out:
                stdout.write("no positive solution\n")
            result = {"status": "no positive solution", "kernel_witness": [list(k) for k in projective.pu_kernel(sys_)]}
        else:
            result = {"status": "positive solution", "v": _floats(v)}
        _emit(nio.dumps(result), cfg.out, stdout)
        return 0
    spec = _validated(inp.spec)
    try:
        metric, cert = curvature.find_soliton_metric(spec, cfg.tol)
    except NoPositiveSolution:
        U = root_system(spec).U
        witness = rational_nullspace((U[:-1] - U[-1]).tolist()) if U.shape[0] > 1 else []
        result = {"status": "no positive solution", "kernel_witness": [list(k) for k in witness]}
        if cfg.out:
            stdout.write("no positive solution\n")
        _emit(nio.dumps(result), cfg.out, stdout)
        return 0
    result = {"status": "soliton", "certificate": nio.certificate_to_dict(cert),
              "metric": None if metric is None else _floats(metric.q)}
    _emit(nio.dumps(result), cfg.out, stdout)
    return 0


def _flow_report(roots, traj, a0):
    cert = curvature.soliton_test(roots, list(a0), curvature.SOLITON_TOL)
    return {
        "invariants": [list(d) for d in traj.invariants],
        "invariant_drift": traj.invariant_drift,
        "steps": {"accepted": traj.step_stats.accepted, "rejected": traj.step_stats.rejected,
                  "evaluations": traj.step_stats.evaluations},
        "collapse": None if cert is None else flow.collapse_analysis(roots, cert).to_json(),
    }


def cmd_flow(cfg, inp, stdout, stderr):
    spec = _validated(_require_spec(inp, "flow"))
    roots = root_system(spec, allow_abelian=True)
    t_eval = tuple(np.linspace(0.0, cfg.t_end, cfg.samples)[1:].tolist())
    icfg = flow.IntegratorConfig(t_end=cfg.t_end, rtol=cfg.rtol, atol=cfg.atol, t_eval=t_eval, keep_steps=False)
    metrics = [inp.metric] if cfg.sweep is None else _random_metrics(spec.dim, cfg.sweep, cfg.seed)
    states = [flow.initial_state(spec, q) for q in metrics]
    trajs = flow.integrate_many(roots, states, icfg)
    exact = spec.exact and all(q.exact for q in metrics)
    a0s = [structure_vector(spec, q, exact=True) if exact else st.a for q, st in zip(metrics, states)]
    reports = [_flow_report(roots, tr, a0) if roots.m else {"invariant_drift": tr.invariant_drift}
               for tr, a0 in zip(trajs, a0s)]
    run = None if cfg.sweep is None else 0
    if cfg.fmt == "json":
        runs = [{"t": tr.t.tolist(), "q": tr.q.tolist(), "a": tr.a.tolist(), "report": rep}
                for tr, rep in zip(trajs, reports)]
        _emit(nio.dumps(runs[0] if run is None else {"runs": runs}), cfg.out, stdout)
        return 0
    parts = []
    for i, tr in enumerate(trajs):
        text = nio.trajectory_csv(tr, flow.invariant_values(tr, tr.invariants), None if run is None else i)
        parts.append(text if i == 0 else text.split("\n", 1)[1])
    _emit("".join(parts), cfg.out, stdout)
    report = nio.dumps(reports[0] if run is None else {"runs": reports})
    if cfg.out:
        Path(cfg.out + ".report.json").write_text(report)
    else:
        stderr.write(report)
    return 0


def _projective_system(inp):
    if inp.spec is not None:
        return projective.build_projective_system(root_system(_validated(inp.spec)).U, "algebra")
    return projective.build_projective_system(inp.gram, inp.provenance)


def cmd_projective(cfg, inp, stdout, stderr):
    psys = _projective_system(inp)
    if cfg.sweep is not None:
        rng = np.random.default_rng(cfg.seed)
        starts = [rng.uniform(0.0, 5.0, size=psys.m - 1) for _ in range(cfg.sweep)]
    elif inp.spec is not None:
        starts = [projective.s_from_a(structure_vector(inp.spec, inp.metric)).s]
    else:
        starts = [np.ones(psys.m - 1)]
    t_eval = tuple(np.linspace(0.0, cfg.t_end, cfg.samples)[1:].tolist())
    trajs = [projective.integrate_projective(psys, s0, cfg.t_end, rtol=cfg.rtol, atol=cfg.atol, t_eval=t_eval,
                                             keep_steps=False) for s0 in starts]
    reports = [{
        "final_s": _floats(tr.final),
        "chamber": list(tr.chamber),
        "converged": tr.converged,
        "nearest_equilibrium": None if tr.nearest is None else tr.nearest.to_json(),
        "distance": tr.nearest_distance,
    } for tr in trajs]
    run = None if cfg.sweep is None else 0
    if cfg.fmt == "json":
        runs = [{"tau": tr.tau.tolist(), "s": tr.s.tolist(), "eta": tr.eta.tolist(), "limit": rep}
                for tr, rep in zip(trajs, reports)]
        _emit(nio.dumps(runs[0] if run is None else {"runs": runs}), cfg.out, stdout)
        return 0
    parts = []
    for i, tr in enumerate(trajs):
        text = nio.projective_csv(tr, None if run is None else i)
        parts.append(text if i == 0 else text.split("\n", 1)[1])
    _emit("".join(parts), cfg.out, stdout)
    report = nio.dumps(reports[0] if run is None else {"runs": reports})
    if cfg.out:
        Path(cfg.out + ".limit.json").write_text(report)
    else:
        stderr.write(report)
    return 0


def cmd_equilibria(cfg, inp, stdout, stderr):
    psys = _projective_system(inp)
    eqs = projective.equilibria(psys)
    result = {"provenance": psys.provenance, "PU": psys.PU.tolist(), **eqs.to_json()}
    _emit(nio.dumps(result), cfg.out, stdout)
    return 0


def cmd_invariants(cfg, inp, stdout, stderr):
    spec = _validated(_require_spec(inp, "invariants"))
    roots = root_system(spec, allow_abelian=True)
    _emit(nio.dumps({"exponent_vectors": [list(d) for d in flow.conserved_monomials(roots)]}), cfg.out, stdout)
    return 0


def cmd_catalog(cfg, inp, stdout, stderr):
    name = cfg.name or cfg.catalog
    if name is None:
        listing = [{"name": n, "description": d, "gram_only": g} for n, d, g in catalog.list_entries()]
        _emit(nio.dumps({"entries": listing}), cfg.out, stdout)
        return 0
    kwargs = {"alphas": dict(cfg.alpha)} if cfg.alpha else {}
    entry = catalog.get(name, **kwargs)
    files = {}
    if entry.gram_only:
        files["gram.json"] = nio.dumps(nio.gram_to_dict(entry.gram))
    else:
        files["algebra.json"] = nio.export_algebra(entry.spec)
        if entry.soliton_metric is not None:
            files["metric.json"] = nio.export_metric(entry.soliton_metric)
    if cfg.out is None:
        stdout.write(nio.dumps({k: json.loads(v) for k, v in files.items()}))
        return 0
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for fname, text in files.items():
        (outdir / fname).write_text(text)
    return 0


COMMANDS = {
    "validate": cmd_validate, "info": cmd_info, "soliton": cmd_soliton, "flow": cmd_flow,
    "projective": cmd_projective, "equilibria": cmd_equilibria, "invariants": cmd_invariants,
    "catalog": cmd_catalog,
}


def run(cfg: CommandConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        inp = Inputs() if cfg.subcommand == "catalog" else load_inputs(cfg)
        return COMMANDS[cfg.subcommand](cfg, inp, stdout, stderr)
    except ValidationFailure as exc:
        stderr.write(f"validation failed: {exc}\n")
        return 1
    except FileNotFoundError as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except SchemaError as exc:
        stderr.write(f"error: invalid input: {exc}\n")
        return 2
    except DimensionMismatch as exc:
        stderr.write(f"error: dimension mismatch: {exc}\n")
        return 2
    except UnknownEntry as exc:
        stderr.write(f"error: {exc.args[0]}\n")
        return 2
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 2


def main(argv=None, stdout=None, stderr=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
    except UsageError as exc:
        (stderr or sys.stderr).write(f"usage error: {exc}\n")
        return 2
    return run(cfg, stdout, stderr)
