"""Metric nilpotent Lie algebras given by structure constants over an orthogonal basis.

Indices are 1-based throughout the public API, matching the usual notation
``[x_j, x_k] = sum_l alpha_jk^l x_l``.  Only the entries with ``j < k`` are
stored; antisymmetry is implicit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import AbelianAlgebra, DimensionMismatch, NotNilpotent
from .linalg import is_exact, rational_rowspace

JACOBI_TOL = 1e-12


def parse_scalar(value):
    """Coerce a structure constant or metric entry.

    ints and rational strings (``"p/q"`` or decimal) become exact Fractions;
    floats stay floats.
    """
    if isinstance(value, bool):
        raise TypeError("boolean is not a scalar")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        s = value.strip()
        try:
            return Fraction(s)
        except ValueError:
            return float(s)
    return float(value)


@dataclass(frozen=True)
class BracketSpec:
    """Sparse structure constants ``alpha_jk^l`` with ``j < k``.

    Entries are kept in dictionary order on ``(j, k, l)``.
    """

    dim: int
    entries: tuple = ()

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("dimension must be positive")
        object.__setattr__(self, "dim", int(self.dim))
        seen = set()
        clean = []
        for e in self.entries:
            j, k, l, alpha = e
            j, k, l = int(j), int(k), int(l)
            if not (1 <= j < k <= self.dim and 1 <= l <= self.dim):
                raise ValueError(f"bad bracket indices {(j, k, l)} for dim {self.dim}")
            if (j, k, l) in seen:
                raise ValueError(f"duplicate bracket entry {(j, k, l)}")
            alpha = parse_scalar(alpha)
            if alpha == 0:
                raise ValueError(f"zero structure constant at {(j, k, l)}")
            seen.add((j, k, l))
            clean.append((j, k, l, alpha))
        clean.sort(key=lambda e: e[:3])
        object.__setattr__(self, "entries", tuple(clean))

    @classmethod
    def from_relations(cls, dim: int, relations: Mapping) -> "BracketSpec":
        """Build from ``{(j, k, l): alpha}``."""
        return cls(dim, tuple((j, k, l, a) for (j, k, l), a in relations.items()))

    @property
    def triples(self) -> tuple:
        return tuple(e[:3] for e in self.entries)

    @property
    def alphas(self) -> tuple:
        return tuple(e[3] for e in self.entries)

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def exact(self) -> bool:
        return all(is_exact(a) for a in self.alphas)

    @property
    def is_abelian(self) -> bool:
        return not self.entries

    def bracket_table(self) -> dict:
        """``{(j, k): [(l, alpha), ...]}`` including the antisymmetric completion."""
        table: dict = {}
        for j, k, l, a in self.entries:
            table.setdefault((j, k), []).append((l, a))
            table.setdefault((k, j), []).append((l, -a))
        return table

    def tensor(self, values: Sequence[float] | None = None) -> np.ndarray:
        """Dense antisymmetric array ``C[j, k, l]`` (0-based), optionally with replaced constants."""
        vals = self.alphas if values is None else values
        C = np.zeros((self.dim, self.dim, self.dim))
        for (j, k, l), a in zip(self.triples, vals):
            C[j - 1, k - 1, l - 1] = float(a)
            C[k - 1, j - 1, l - 1] = -float(a)
        return C


@dataclass(frozen=True)
class DiagonalMetric:
    """Inner product ``sum q_i dx^i (x) dx^i``; entries may be exact."""

    q: tuple

    def __post_init__(self):
        vals = tuple(parse_scalar(v) for v in np.ravel(np.asarray(self.q, dtype=object)))
        if not vals:
            raise ValueError("empty metric")
        if any(not v > 0 for v in vals):
            raise ValueError("metric entries must be strictly positive")
        object.__setattr__(self, "q", vals)

    @classmethod
    def ones(cls, n: int) -> "DiagonalMetric":
        return cls((1,) * n)

    @property
    def dim(self) -> int:
        return len(self.q)

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.q)

    @property
    def array(self) -> np.ndarray:
        return np.array([float(v) for v in self.q])


def as_metric(metric) -> DiagonalMetric:
    return metric if isinstance(metric, DiagonalMetric) else DiagonalMetric(tuple(np.ravel(metric).tolist()))


@dataclass(frozen=True)
class RootSystem:
    """Index set, integer root matrix ``Y`` (m x n) and Gram matrix ``U = Y Y^T``."""

    lam: tuple
    Y: np.ndarray
    U: np.ndarray
    dim: int = field(default=0)

    @property
    def m(self) -> int:
        return len(self.lam)

    @property
    def n(self) -> int:
        return self.dim


@dataclass
class JacobiReport:
    failures: list = field(default_factory=list)
    exact: bool = True

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok


def _bracket(table: dict, u: Mapping, v: Mapping) -> dict:
    out: dict = {}
    for i, ui in u.items():
        for j, vj in v.items():
            for l, a in table.get((i, j), ()):
                out[l] = out.get(l, 0) + ui * vj * a
    return out


def validate_jacobi(spec: BracketSpec, tol: float = JACOBI_TOL) -> JacobiReport:
    """Check the Jacobi identity on every basis triple ``a < b < c``.

    Exact when all structure constants are rational, otherwise residual
    vectors with infinity norm above ``tol`` are reported.
    """
    table = spec.bracket_table()
    exact = spec.exact
    report = JacobiReport(exact=exact)
    basis = [{i: 1} for i in range(1, spec.dim + 1)]
    for a, b, c in itertools.combinations(range(1, spec.dim + 1), 3):
        xa, xb, xc = basis[a - 1], basis[b - 1], basis[c - 1]
        res: dict = {}
        for u, v, w in ((xa, xb, xc), (xb, xc, xa), (xc, xa, xb)):
            for l, val in _bracket(table, u, _bracket(table, v, w)).items():
                res[l] = res.get(l, 0) + val
        vec = tuple(res.get(l, 0) for l in range(1, spec.dim + 1))
        if exact:
            bad = any(x != 0 for x in vec)
        else:
            bad = max(abs(float(x)) for x in vec) > tol
        if bad:
            report.failures.append(((a, b, c), vec))
    return report


def _span(vectors: list, exact: bool, tol: float = 1e-10) -> list:
    if not vectors:
        return []
    if exact:
        return [list(r) for r in rational_rowspace(vectors)]
    A = np.array(vectors, dtype=float)
    _, s, vt = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    return [list(v) for v in vt[:r]]


def nilpotency_class(spec: BracketSpec) -> int:
    """Step of nilpotency: the smallest ``c`` with ``C^c = 0`` where ``C^0 = g``.

    Abelian algebras have class 1.
    """
    n = spec.dim
    C = spec.tensor() if not spec.exact else None
    table = spec.bracket_table()
    exact = spec.exact
    current = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    step = 0
    while current:
        step += 1
        new = []
        for v in current:
            if exact:
                vd = {i + 1: x for i, x in enumerate(v) if x != 0}
                for j in range(1, n + 1):
                    w = _bracket(table, {j: 1}, vd)
                    new.append([w.get(l, 0) for l in range(1, n + 1)])
            else:
                # rows: [x_j, v] for each j
                new.extend((np.einsum("k,jkl->jl", np.asarray(v, dtype=float), C)).tolist())
        nxt = _span(new, exact)
        if len(nxt) == len(current):
            raise NotNilpotent(f"lower central series stabilizes at dimension {len(nxt)}")
        current = nxt
    return step


def root_system(spec: BracketSpec, allow_abelian: bool = False) -> RootSystem:
    """Root matrix and Gram matrix in dictionary order on ``(j, k, l)``."""
    if spec.is_abelian and not allow_abelian:
        raise AbelianAlgebra("root system needs at least one nonzero bracket")
    n = spec.dim
    Y = np.zeros((spec.m, n), dtype=np.int64)
    for i, (j, k, l) in enumerate(spec.triples):
        Y[i, j - 1] += 1
        Y[i, k - 1] += 1
        Y[i, l - 1] -= 1
    U = Y @ Y.T
    Y.setflags(write=False)
    U.setflags(write=False)
    return RootSystem(lam=spec.triples, Y=Y, U=U, dim=n)


def _check_dims(spec: BracketSpec, metric: DiagonalMetric):
    if metric.dim != spec.dim:
        raise DimensionMismatch(f"metric has {metric.dim} entries, algebra has dimension {spec.dim}")


def structure_vector(spec: BracketSpec, metric, exact: bool = False):
    """Squares of the orthonormal-basis structure constants, ``q_l/(q_j q_k) alpha^2``.

    With ``exact`` a tuple of Fractions is returned (rational inputs
    required); otherwise a float array.
    """
    metric = as_metric(metric)
    _check_dims(spec, metric)
    if exact:
        if not (spec.exact and metric.exact):
            raise ValueError("exact structure vector needs rational constants and metric")
        q = metric.q
        return tuple(q[l - 1] / (q[j - 1] * q[k - 1]) * a * a for j, k, l, a in spec.entries)
    q = metric.array
    out = np.array([q[l - 1] / (q[j - 1] * q[k - 1]) * float(a) ** 2 for j, k, l, a in spec.entries])
    return out


def rescaled_constants(spec: BracketSpec, metric) -> np.ndarray:
    """Structure constants relative to the orthonormalized basis."""
    metric = as_metric(metric)
    _check_dims(spec, metric)
    q = metric.array
    return np.array([np.sqrt(q[l - 1] / (q[j - 1] * q[k - 1])) * float(a) for j, k, l, a in spec.entries])


def ad_matrix(spec: BracketSpec, coeffs: Iterable[float]) -> np.ndarray:
    """Matrix of ``ad_x`` in the basis; column ``j`` holds ``[x, x_j]``."""
    c = np.asarray(list(coeffs), dtype=float)
    if c.shape != (spec.dim,):
        raise DimensionMismatch("coefficient vector has wrong length")
    C = spec.tensor()
    # ad_x[l, j] = sum_i c_i C[i, j, l]
    return np.einsum("i,ijl->lj", c, C)
