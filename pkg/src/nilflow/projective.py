"""Projectivized bracket flow in affine coordinates ``s_i = a_i / a_m``.

The true-time field is ``s_i' = -a_m s_i eta_i(s)`` with
``eta_i(s) = n_i . (s, 1)`` and ``n_i = (row i of U) - (row m of U)``.
Dividing by ``a_m > 0`` gives the time-changed field ``(ln s_i)' = -eta_i(s)``
with the same orbits; that is what :func:`integrate_projective` solves.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from . import integrator
from .errors import StepLimitExceeded, SubsetBudgetExceeded
from .linalg import rational_nullspace, rational_solve

MAX_SUBSET_DIM = 20
ZERO_BAND = 1e-10


@dataclass(frozen=True)
class ProjectiveSystem:
    U: np.ndarray
    P: np.ndarray
    normals: np.ndarray  # (m-1, m) rows n_i = e_i^T P U
    provenance: str = "algebra"  # or "gram-only"

    @property
    def m(self) -> int:
        return self.U.shape[0]

    @property
    def PU(self) -> np.ndarray:
        return self.normals


def build_projective_system(U, provenance: str = "algebra") -> ProjectiveSystem:
    U = np.array(U, dtype=np.int64)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError("Gram matrix must be square")
    m = U.shape[0]
    if m < 2:
        raise ValueError("projectivization needs m >= 2")
    P = np.hstack((np.eye(m - 1, dtype=np.int64), -np.ones((m - 1, 1), dtype=np.int64)))
    normals = P @ U
    for arr in (U, P, normals):
        arr.setflags(write=False)
    return ProjectiveSystem(U, P, normals, provenance)


def eta(sys: ProjectiveSystem, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return sys.normals[:, :-1] @ s + sys.normals[:, -1] if s.ndim == 1 else s @ sys.normals[:, :-1].T + sys.normals[:, -1]


@dataclass(frozen=True)
class SimplexState:
    s: np.ndarray
    chamber: tuple


def chamber_sign(sys: ProjectiveSystem, s, tol: float = ZERO_BAND) -> tuple:
    """Sign of each ``eta_i`` as ``-1, 0, +1`` with a zero band of width ``tol``."""
    e = eta(sys, s)
    return tuple(0 if abs(x) < tol else (1 if x > 0 else -1) for x in e)


def s_from_a(a, sys: ProjectiveSystem | None = None, tol: float = ZERO_BAND) -> SimplexState:
    a = np.asarray(a, dtype=float)
    s = a[:-1] / a[-1]
    chamber = chamber_sign(sys, s, tol) if sys is not None and s.size else ()
    return SimplexState(s, chamber)


def projective_rhs(sys: ProjectiveSystem, s, a_m: float | None = None) -> np.ndarray:
    """True-time field ``-a_m s * eta(s)`` or, without ``a_m``, the time-changed ``-s * eta(s)``."""
    s = np.asarray(s, dtype=float)
    f = -s * eta(sys, s)
    return f if a_m is None else a_m * f


def jacobian(sys: ProjectiveSystem, s) -> np.ndarray:
    """Jacobian of the time-changed field ``F_i = -s_i eta_i(s)``."""
    s = np.asarray(s, dtype=float)
    N = sys.normals[:, :-1].astype(float)
    return -np.diag(eta(sys, s)) - s[:, None] * N


def pu_kernel(sys: ProjectiveSystem) -> list:
    """Integer basis of ``ker PU = {v : U v = lambda 1}``."""
    return rational_nullspace(sys.normals.tolist())


@dataclass
class Equilibrium:
    s: np.ndarray
    zero_set: tuple  # 1-based indices M with s_i = 0
    kind: str  # interior-soliton | boundary | repelling
    eta: np.ndarray
    directions: list = field(default_factory=list)  # nonempty for affine families
    eigenvalues: np.ndarray | None = None  # heuristic stability hint (time-changed field)

    def to_json(self) -> dict:
        return {
            "s": [float(x) for x in self.s],
            "M": list(self.zero_set),
            "classification": self.kind,
            "eta": [float(x) for x in self.eta],
            "directions": [[float(x) for x in d] for d in self.directions],
            "jacobian_eigenvalues_heuristic": None if self.eigenvalues is None else [
                [float(np.real(z)), float(np.imag(z))] for z in self.eigenvalues],
        }


@dataclass
class EquilibriumSet:
    points: list

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def repelling(self) -> list:
        return [p for p in self.points if p.kind == "repelling"]

    def nearest(self, s) -> tuple:
        s = np.asarray(s, dtype=float)
        best = min(self.points, key=lambda p: float(np.max(np.abs(p.s - s))))
        return best, float(np.max(np.abs(best.s - s)))

    def to_json(self) -> dict:
        return {"points": [p.to_json() for p in self.points]}


def _classify(sys, s, M, tol):
    e = eta(sys, s)
    if any(e[i - 1] < -tol for i in M):
        return "repelling", e
    if not M and np.all(s > 0):
        return "interior-soliton", e
    return "boundary", e


def equilibria(sys: ProjectiveSystem, max_m: int = MAX_SUBSET_DIM, tol: float = ZERO_BAND) -> EquilibriumSet:
    """All equilibria of the time-changed field in ``s >= 0``.

    For each zero set ``M`` the coordinates outside ``M`` solve
    ``eta_i(s) = 0`` (i not in M) exactly over the rationals.  Points are kept
    when ``s >= 0``; families are returned as a basepoint plus directions.
    """
    k = sys.m - 1
    if k > max_m:
        raise SubsetBudgetExceeded(f"{k} coordinates exceed the subset budget {max_m}")
    N = sys.normals
    found: dict = {}
    for size in range(k + 1):
        for M in itertools.combinations(range(1, k + 1), size):
            free = [i for i in range(1, k + 1) if i not in M]
            s = np.zeros(k)
            directions = []
            if free:
                A = [[int(N[i - 1, j - 1]) for j in free] for i in free]
                b = [-int(N[i - 1, -1]) for i in free]
                sol = rational_solve(A, b)
                if sol is None:
                    continue
                x, null = sol
                if null:
                    base = _feasible_point(x, null)
                    if base is None:
                        continue
                    x = base
                    for d in null:
                        full = np.zeros(k)
                        full[[i - 1 for i in free]] = [float(v) for v in d]
                        directions.append(full)
                vals = np.array([float(v) for v in x])
                if np.any(vals < -tol):
                    continue
                s[[i - 1 for i in free]] = np.maximum(vals, 0.0)
            # a free coordinate that lands on zero belongs to the larger zero set
            if any(s[i - 1] == 0 for i in free) and not directions:
                continue
            key = tuple(np.round(s, 12))
            if key in found:
                continue
            kind, e = _classify(sys, s, M, tol)
            eig = None if directions else np.linalg.eigvals(jacobian(sys, s))
            found[key] = Equilibrium(s, tuple(M), kind, e, directions, eig)
    return EquilibriumSet(list(found.values()))


def _feasible_point(x, null):
    """A point of ``x + span(null)`` with all coordinates >= 0, or None."""
    x = np.array([float(v) for v in x])
    K = np.array([[float(v) for v in d] for d in null]).T
    res = linprog(np.zeros(K.shape[1]), A_ub=-K, b_ub=x, bounds=[(None, None)] * K.shape[1], method="highs")
    if res.status != 0:
        return None
    return [Fraction(v).limit_denominator(10**9) for v in x + K @ res.x]


@dataclass
class ProjectiveTrajectory:
    tau: np.ndarray
    s: np.ndarray  # (N, m-1)
    eta: np.ndarray
    chamber: tuple = ()
    converged: bool = False
    nearest: Equilibrium | None = None
    nearest_distance: float | None = None
    stats: integrator.StepStats | None = None

    @property
    def final(self) -> np.ndarray:
        return self.s[-1]


def integrate_projective(sys: ProjectiveSystem, s0, t_end: float, *, rtol: float = 1e-10, atol: float = 1e-12,
                         max_steps: int = 1_000_000, t_eval: Sequence[float] | None = None,
                         keep_steps: bool = True, match: bool = True,
                         converge_tol: float = 1e-9) -> ProjectiveTrajectory:
    """Integrate ``(ln s_i)' = -eta_i(s)`` in log variables.

    Coordinates that start at zero stay at zero (boundary faces are invariant)
    and are integrated as a reduced system.
    """
    s0 = np.asarray(s0, dtype=float)
    if s0.shape != (sys.m - 1,) or np.any(s0 < 0):
        raise ValueError("s0 must be a nonnegative vector of length m - 1")
    live = np.flatnonzero(s0 > 0)
    Nl = sys.normals[:, :-1].astype(float)
    c = sys.normals[:, -1].astype(float)

    def rhs(_t, z):
        s = np.zeros(sys.m - 1)
        s[live] = np.exp(z)
        return -(Nl[live] @ s + c[live])

    if live.size:
        sol = integrator.solve(rhs, 0.0, np.log(s0[live]), t_end, rtol=rtol, atol=atol, max_steps=max_steps,
                               t_eval=t_eval, keep_steps=keep_steps)
        tau = sol.t
        S = np.zeros((len(tau), sys.m - 1))
        S[:, live] = np.exp(sol.y)
        stats = sol.stats
    else:
        tau = np.array(sorted({0.0, float(t_end), *(() if t_eval is None else t_eval)}))
        S = np.zeros((len(tau), sys.m - 1))
        stats = integrator.StepStats()
    E = eta(sys, S)
    traj = ProjectiveTrajectory(tau, S, E, chamber_sign(sys, S[-1]), stats=stats)
    if t_end >= 1.0:
        traj.converged = _converged(sys, S[-1], t_end, rhs if live.size else None, live, converge_tol, rtol, atol)
    if match and sys.m - 1 <= MAX_SUBSET_DIM:
        eqs = equilibria(sys)
        if len(eqs):
            traj.nearest, traj.nearest_distance = eqs.nearest(S[-1])
    return traj


def _converged(sys, s_end, t_end, rhs, live, tol, rtol, atol) -> bool:
    # autonomous field: compare s(t_end) with one further unit of time
    if rhs is None:
        return True
    try:
        sol = integrator.solve(rhs, 0.0, np.log(s_end[live]), 1.0, rtol=rtol, atol=atol, keep_steps=False)
    except StepLimitExceeded:
        return False
    ahead = s_end.copy()
    ahead[live] = np.exp(sol.y[-1])
    return bool(np.max(np.abs(ahead - s_end)) < tol)


def repelling_certificate(sys: ProjectiveSystem, point: Equilibrium, n: int = 20, radius: float = 1e-3,
                          escape: float = 1e-2, t_max: float = 1e3, seed: int = 0) -> list:
    """Escape times of ``n`` random perturbations into ``s > 0`` at distance ``radius``.

    Each entry is the first sample time at which the orbit leaves the
    ``escape`` ball around the point, or None if it never does before ``t_max``.
    """
    rng = np.random.default_rng(seed)
    k = sys.m - 1
    times = []
    for _ in range(n):
        d = np.abs(rng.normal(size=k))
        d /= np.max(d)
        s0 = point.s + radius * d
        grid = np.geomspace(1e-3, t_max, 400)
        tr = integrate_projective(sys, s0, t_max, t_eval=grid, keep_steps=False, match=False)
        dist = np.max(np.abs(tr.s - point.s), axis=1)
        out = np.flatnonzero(dist > escape)
        times.append(float(tr.tau[out[0]]) if out.size else None)
    return times
