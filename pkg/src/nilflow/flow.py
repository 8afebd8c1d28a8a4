"""Ricci flow and Lie bracket flow for diagonal metrics on a stably Ricci-diagonal basis.

Along the flow ``(ln q)' = a^T Y`` and ``(ln a)' = -U a``.  Both are
integrated in logarithmic variables so positivity holds by construction.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import integrator
from .algebra import BracketSpec, DiagonalMetric, RootSystem, as_metric, structure_vector
from .curvature import SOLITON_TOL, SolitonCertificate
from .errors import AbelianAlgebra, NotSoliton
from .integrator import StepStats
from .linalg import is_exact, rational_nullspace, to_fraction


@dataclass(frozen=True)
class FlowState:
    t: float
    q: np.ndarray
    a: np.ndarray


@dataclass(frozen=True)
class IntegratorConfig:
    t_end: float = 1.0
    rtol: float = 1e-9
    atol: float = 1e-12
    max_steps: int = 1_000_000
    initial_step: float | None = None
    t_eval: tuple | None = None
    keep_steps: bool = True

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("rtol and atol must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")


@dataclass
class Trajectory:
    t: np.ndarray
    q: np.ndarray  # (N, n)
    a: np.ndarray  # (N, m)
    step_stats: StepStats = field(default_factory=StepStats)
    invariants: list = field(default_factory=list)
    invariant_drift: list = field(default_factory=list)

    def __len__(self):
        return len(self.t)

    def __getitem__(self, i) -> FlowState:
        return FlowState(float(self.t[i]), self.q[i], self.a[i])

    @property
    def samples(self) -> list:
        return [self[i] for i in range(len(self))]

    @property
    def final(self) -> FlowState:
        return self[-1]

    def at(self, t: float) -> FlowState:
        i = int(np.argmin(np.abs(self.t - t)))
        if not np.isclose(self.t[i], t, rtol=0, atol=1e-12 * max(1.0, abs(t))):
            raise KeyError(f"no sample at t={t}")
        return self[i]


def initial_state(spec: BracketSpec, metric) -> FlowState:
    metric = as_metric(metric)
    return FlowState(0.0, metric.array, structure_vector(spec, metric) if spec.m else np.zeros(0))


def bracket_flow_rhs(roots: RootSystem, a) -> np.ndarray:
    """``a' = -a * (U a)``."""
    a = np.asarray(a, dtype=float)
    return -a * (roots.U @ a)


def ricci_flow_rhs(roots: RootSystem, a) -> np.ndarray:
    """``(ln q)' = a^T Y``, i.e. ``-2`` times the Ricci vector."""
    return np.asarray(a, dtype=float) @ roots.Y


def log_rhs(roots: RootSystem):
    """Right-hand side of the coupled system in ``(ln q, ln a)``."""
    Y = roots.Y.astype(float)
    U = roots.U.astype(float)
    n = roots.n

    def rhs(_t, z):
        a = np.exp(z[n:])
        return np.concatenate((a @ Y, -(U @ a)))

    return rhs


def integrate(roots: RootSystem, state0: FlowState, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Adaptive integration of the coupled Ricci / bracket flow from ``state0``.

    Conserved monomial directions from :func:`conserved_monomials` are
    monitored and their drift is stored on the trajectory.
    """
    cfg = cfg or IntegratorConfig()
    q0 = np.asarray(state0.q, dtype=float)
    a0 = np.asarray(state0.a, dtype=float)
    if np.any(q0 <= 0) or np.any(a0 <= 0):
        raise ValueError("initial state must be strictly positive")
    if roots.m == 0:
        times = sorted({0.0, *(() if cfg.t_eval is None else cfg.t_eval), float(cfg.t_end)})
        times = [s for s in times if 0 <= s <= cfg.t_end]
        N = len(times)
        traj = Trajectory(np.array(times) + state0.t, np.tile(q0, (N, 1)), np.zeros((N, 0)))
    else:
        t_eval = None if cfg.t_eval is None else [state0.t + s for s in cfg.t_eval]
        sol = integrator.solve(
            log_rhs(roots),
            state0.t,
            np.concatenate((np.log(q0), np.log(a0))),
            state0.t + cfg.t_end,
            rtol=cfg.rtol,
            atol=cfg.atol,
            max_steps=cfg.max_steps,
            initial_step=cfg.initial_step,
            t_eval=t_eval,
            keep_steps=cfg.keep_steps,
        )
        n = roots.n
        traj = Trajectory(sol.t, np.exp(sol.y[:, :n]), np.exp(sol.y[:, n:]), sol.stats)
    dirs = conserved_monomials(roots)
    traj.invariants = dirs
    traj.invariant_drift = monitor_invariants(traj, dirs)
    return traj


def _worker_count(requested: int | None) -> int:
    cap = os.environ.get("NILFLOW_THREADS")
    n = requested or os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def integrate_many(roots: RootSystem, states: Sequence[FlowState], cfg: IntegratorConfig | None = None,
                   workers: int | None = None) -> list:
    """Integrate several initial states; results come back in input order."""
    with ThreadPoolExecutor(max_workers=_worker_count(workers)) as pool:
        return list(pool.map(lambda s: integrate(roots, s, cfg), states))


def _soliton_scale(cert: SolitonCertificate, a0, tol: float):
    a_star = np.array([float(x) for x in cert.a_star])
    a0 = np.asarray(a0, dtype=float)
    if cert.relative_residual >= tol:
        raise NotSoliton(f"certificate residual {cert.relative_residual:.3e} exceeds tolerance")
    lam = float(a0 @ a_star / (a_star @ a_star))
    if lam <= 0 or np.max(np.abs(a0 - lam * a_star)) > tol * max(1.0, np.max(np.abs(a0))):
        raise NotSoliton("initial structure vector is not on the soliton ray of the certificate")
    return lam


def soliton_trajectory(cert: SolitonCertificate, state0: FlowState, t, tol: float = SOLITON_TOL) -> FlowState:
    """Closed-form soliton solution at time ``t`` (scalar or array).

    ``a(t) = a(0) / (1 - 2 beta t)`` and ``q_j(t) = q_j(0) (1 - 2 beta t)^(r_j / beta)``
    where ``r`` is the Ricci vector.  A state on the ray through ``a_star``
    uses the rescaled ``beta`` and ``r``.
    """
    lam = _soliton_scale(cert, state0.a, tol)
    beta = lam * float(cert.beta)
    ric = lam * np.array([float(r) for r in cert.ricci_vector])
    tt = np.asarray(t, dtype=float) - state0.t
    g = 1.0 - 2.0 * beta * tt
    a0 = np.asarray(state0.a, dtype=float)
    q0 = np.asarray(state0.q, dtype=float)
    if np.ndim(tt) == 0:
        return FlowState(float(t), q0 * g ** (ric / beta), a0 / g)
    return FlowState(np.asarray(t), q0[None, :] * g[:, None] ** (ric / beta)[None, :], a0[None, :] / g[:, None])


def conserved_monomials(roots: RootSystem) -> list:
    """Integer basis of ``{d : Y d = 0}``; each gives a conserved ``prod q_i^d_i``."""
    if roots.m == 0:
        return [tuple(int(i == j) for i in range(roots.n)) for j in range(roots.n)]
    return rational_nullspace(roots.Y.tolist())


def monitor_invariants(traj: Trajectory, dirs) -> list:
    """Max deviation of ``sum d_i ln q_i`` from its initial value, per direction.

    Normalized by ``max(1, |initial value|)``.
    """
    if len(traj) == 0:
        return [0.0 for _ in dirs]
    logq = np.log(traj.q)
    out = []
    for d in dirs:
        vals = logq @ np.asarray(d, dtype=float)
        out.append(float(np.max(np.abs(vals - vals[0])) / max(1.0, abs(vals[0]))))
    return out


def invariant_values(traj: Trajectory, dirs) -> np.ndarray:
    """Monomial values ``prod q_i^d_i`` at each sample, shape (N, len(dirs))."""
    if not dirs:
        return np.zeros((len(traj), 0))
    D = np.array(dirs, dtype=float).T
    return np.exp(np.log(traj.q) @ D)


@dataclass(frozen=True)
class CollapseReport:
    normalized_limit: tuple
    e_min_indices: tuple  # 1-based
    exponents: tuple

    def to_json(self) -> dict:
        return {
            "normalized_limit": [float(x) for x in self.normalized_limit],
            "e_min_indices": list(self.e_min_indices),
            "exponents": [float(x) + 0.0 for x in self.exponents],
            "exponents_exact": [str(x) for x in self.exponents] if all(is_exact(x) for x in self.exponents) else None,
        }


def collapse_analysis(roots: RootSystem, cert: SolitonCertificate, ric=None, tol: float = 1e-12) -> CollapseReport:
    """Asymptotics of a soliton start: ``q_j ~ t^(r_j / beta)``.

    The sup-normalized metric tends to the indicator of the minimal Ricci
    eigenspace, since ``r_min / beta`` is the largest exponent.
    """
    if roots.m == 0:
        raise AbelianAlgebra("collapse is undefined for abelian algebras")
    ric = cert.ricci_vector if ric is None else ric
    beta = cert.beta
    if all(is_exact(x) for x in ric) and is_exact(beta):
        exps = tuple(to_fraction(r) / to_fraction(beta) for r in ric)
    else:
        exps = tuple(float(r) / float(beta) for r in ric)
    rf = np.array([float(r) for r in ric])
    rmin = rf.min()
    e_min = tuple(int(i) + 1 for i in np.flatnonzero(rf - rmin <= tol))
    limit = tuple(1.0 if i + 1 in e_min else 0.0 for i in range(len(rf)))
    return CollapseReport(limit, e_min, exps)


def volume_normalize(q) -> np.ndarray:
    """Sup-normalized representative ``q / max(q)`` of the homothety class."""
    q = as_metric(q).array if isinstance(q, DiagonalMetric) else np.asarray(q, dtype=float)
    if np.any(q <= 0):
        raise ValueError("metric entries must be positive")
    return q / np.max(q, axis=-1, keepdims=True)


def empirical_exponents(traj: Trajectory, decades: float = 1.0) -> np.ndarray:
    """Log-log slopes of ``q_j(t)`` fitted over the last ``decades`` of time."""
    t = traj.t
    t_end = t[-1]
    mask = (t >= t_end / 10 ** decades) & (t > 0)
    if mask.sum() < 2:
        raise ValueError("not enough samples in the last decade")
    x = np.log(t[mask])
    return np.polyfit(x, np.log(traj.q[mask]), 1)[0]

