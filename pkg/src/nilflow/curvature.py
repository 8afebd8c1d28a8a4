"""Ricci curvature of nilpotent metric Lie algebras and the nilsoliton criterion."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .algebra import BracketSpec, RootSystem, as_metric, rescaled_constants, root_system
from .errors import NoPositiveSolution
from .linalg import is_exact, rational_nullspace, to_fraction

SOLITON_TOL = 1e-9


@dataclass(frozen=True)
class RicciData:
    ricci_form: np.ndarray
    ricci_vector: np.ndarray


@dataclass(frozen=True)
class SolitonCertificate:
    """Soliton constant ``beta`` with ``U a_star = -2 beta 1`` and ``D = Ric - beta Id``.

    ``residual`` is the absolute infinity-norm residual; entries are Fractions
    when the certificate was computed in rational mode.
    """

    beta: object
    a_star: tuple
    residual: object
    derivation_diag: tuple

    @property
    def exact(self) -> bool:
        return is_exact(self.beta)

    @property
    def ricci_vector(self) -> tuple:
        return tuple(d + self.beta for d in self.derivation_diag)

    @property
    def relative_residual(self) -> float:
        return float(self.residual) / (2 * abs(float(self.beta)))

    def to_json(self) -> dict:
        f = float
        return {
            "beta": f(self.beta),
            "a_star": [f(x) for x in self.a_star],
            "residual": f(self.residual),
            "derivation_diag": [f(x) for x in self.derivation_diag],
        }


def _all_exact(values) -> bool:
    return all(is_exact(v) for v in values)


def ricci_form_oracle(spec: BracketSpec, metric) -> RicciData:
    """Full Ricci form from ``ric(x,y) = -1/2 <ad_x, ad_y> + 1/4 <J_x, J_y>``.

    Works in the orthonormalized basis, with ``J_x(y) = ad_y^* x``.
    """
    metric = as_metric(metric)
    C = spec.tensor(rescaled_constants(spec, metric)) if spec.m else np.zeros((spec.dim,) * 3)
    ad_term = np.einsum("ikl,jkl->ij", C, C)
    j_term = np.einsum("yki,ykj->ij", C, C)
    ric = -0.5 * ad_term + 0.25 * j_term
    ric = 0.5 * (ric + ric.T)
    return RicciData(ricci_form=ric, ricci_vector=np.diag(ric).copy())


def ricci_vector(roots: RootSystem, a):
    """``-1/2 a^T Y``; exact (tuple of Fractions) when ``a`` is rational."""
    if _all_exact(a):
        Y = roots.Y
        return tuple(
            -Fraction(1, 2) * sum((to_fraction(a[i]) * int(Y[i, j]) for i in range(roots.m)), Fraction(0))
            for j in range(roots.n)
        )
    return -0.5 * np.asarray(a, dtype=float) @ roots.Y


def is_ricci_diagonal(spec: BracketSpec, metric, tol: float = 1e-10) -> bool:
    ric = ricci_form_oracle(spec, metric).ricci_form
    off = ric - np.diag(np.diag(ric))
    return float(np.max(np.abs(off), initial=0.0)) < tol


@dataclass(frozen=True)
class StabilityResult:
    stable: bool
    witness: tuple | None = None  # ((i, j), exponent vector in sqrt(q), coefficient)

    def __bool__(self):
        return self.stable


def ricci_offdiagonal_monomials(spec: BracketSpec) -> dict:
    """Off-diagonal Ricci entries as polynomials in ``sqrt(q_i)``.

    Returns ``{(i, j): {exponent: coefficient}}`` for ``i < j`` (1-based),
    with integer exponent vectors of the ``sqrt(q)`` variables.  A rescaled
    constant ``alpha_jk^l`` carries the exponent ``e_l - e_j - e_k``.
    """
    n = spec.dim
    half, quarter = (Fraction(1, 2), Fraction(1, 4)) if spec.exact else (0.5, 0.25)
    signed = []
    for j, k, l, a in spec.entries:
        signed.append((j, k, l, a))
        signed.append((k, j, l, -a))

    def expo(j, k, l):
        e = [0] * n
        e[l - 1] += 1
        e[j - 1] -= 1
        e[k - 1] -= 1
        return e

    polys: dict = {}

    def add(i, j, e1, e2, coeff):
        key = tuple(x + y for x, y in zip(e1, e2))
        bucket = polys.setdefault((i, j), {})
        bucket[key] = bucket.get(key, 0) + coeff

    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            polys.setdefault((i, j), {})
    # -1/2 sum_{k,l} c_ik^l c_jk^l
    for (i, k, l, a) in signed:
        for (j, k2, l2, b) in signed:
            if k2 == k and l2 == l and i < j:
                add(i, j, expo(i, k, l), expo(j, k, l), -half * a * b)
    # +1/4 sum_{y,k} c_yk^i c_yk^j
    for (y, k, i, a) in signed:
        for (y2, k2, j, b) in signed:
            if y2 == y and k2 == k and i < j:
                add(i, j, expo(y, k, i), expo(y, k, j), quarter * a * b)
    return polys


def is_stably_ricci_diagonal(spec: BracketSpec, tol: float = 1e-12) -> StabilityResult:
    """Decide whether every off-diagonal Ricci entry vanishes identically in ``q``.

    Coefficients of distinct monomials in ``sqrt(q)`` are independent functions
    of ``q > 0``, so the entry vanishes identically iff every grouped
    coefficient is zero.
    """
    exact = spec.exact
    for pair, poly in sorted(ricci_offdiagonal_monomials(spec).items()):
        for e, c in sorted(poly.items()):
            if (c != 0) if exact else abs(c) > tol:
                return StabilityResult(False, (pair, e, c))
    return StabilityResult(True)


def soliton_test(roots: RootSystem, a, tol: float = SOLITON_TOL) -> SolitonCertificate | None:
    """Test ``U a = -2 beta 1`` for some ``beta < 0``.

    The fitted ``beta`` is ``-(1^T U a) / (2m)``.  In rational mode the
    residual must vanish exactly; otherwise the relative infinity-norm
    residual ``|Ua + 2 beta 1| / |Ua|`` must be below ``tol``.
    """
    m = roots.m
    if len(a) != m:
        raise ValueError("structure vector length does not match the root system")
    if _all_exact(a):
        av = [to_fraction(x) for x in a]
        Ua = [sum((int(roots.U[i, j]) * av[j] for j in range(m)), Fraction(0)) for i in range(m)]
        beta = -sum(Ua, Fraction(0)) / (2 * m)
        residual = max(abs(x + 2 * beta) for x in Ua)
        if residual != 0 or beta >= 0:
            return None
        diag = tuple(r - beta for r in ricci_vector(roots, av))
        return SolitonCertificate(beta, tuple(av), residual, diag)
    av = np.asarray(a, dtype=float)
    Ua = roots.U @ av
    beta = -float(np.sum(Ua)) / (2 * m)
    scale = float(np.max(np.abs(Ua)))
    residual = float(np.max(np.abs(Ua + 2 * beta)))
    if scale == 0 or residual / scale >= tol or beta >= 0:
        return None
    diag = ricci_vector(roots, av) - beta
    return SolitonCertificate(beta, tuple(av.tolist()), residual, tuple(diag.tolist()))


def positive_gram_solution(U) -> tuple | None:
    """A positive ``v`` with ``U v = lambda 1`` and ``lambda > 0``, or None.

    One-dimensional solution spaces are handled exactly; larger ones by a
    linear program over the exact kernel basis.
    """
    U = np.asarray(U, dtype=np.int64)
    m = U.shape[0]
    PU = U[:-1] - U[-1] if m > 1 else np.zeros((0, 1), dtype=np.int64)
    if m == 1:
        return (Fraction(1),) if U[0, 0] > 0 else None
    basis = rational_nullspace(PU.tolist())
    if len(basis) == 1:
        v = basis[0]
        if all(x < 0 for x in v):
            v = tuple(-x for x in v)
        lam = sum(int(U[0, j]) * v[j] for j in range(m))
        if all(x > 0 for x in v) and lam > 0:
            return tuple(Fraction(x) for x in v)
        return None
    K = np.array(basis, dtype=float).T  # m x d
    lam_row = U[0] @ K
    d = K.shape[1]
    # minimize sum(v) subject to v >= 1, lambda >= 1, v = K c
    A_ub = np.vstack([-K, -lam_row[None, :]])
    b_ub = -np.ones(m + 1)
    res = linprog(np.ones(m) @ K, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * d, method="highs")
    if res.status != 0:
        return None
    v = K @ res.x
    return tuple((v / v.max()).tolist())


def find_soliton_metric(spec: BracketSpec, tol: float = SOLITON_TOL):
    """Search for a diagonal soliton metric over the given basis.

    Returns ``(metric, certificate)``; ``metric`` is None when the soliton
    structure vector is not reachable by a diagonal metric (the log-target
    lies outside the row space of ``Y``).  The metric is the minimum-norm
    log-solution, one representative of its homothety class.
    """
    roots = root_system(spec)
    a_star = positive_gram_solution(roots.U)
    if a_star is None:
        raise NoPositiveSolution("no positive solution of U v = lambda 1")
    cert = soliton_test(roots, a_star, tol)
    if cert is None:
        cert = soliton_test(roots, [float(x) for x in a_star], tol)
    if cert is None:  # pragma: no cover - positive kernel vectors always certify
        raise NoPositiveSolution("kernel vector failed the soliton test")
    Y = roots.Y.astype(float)
    target = np.log(np.array([float(al) ** 2 for al in spec.alphas]) / np.array([float(x) for x in a_star]))
    x, *_ = np.linalg.lstsq(Y, target, rcond=None)
    resid = float(np.max(np.abs(Y @ x - target)))
    if resid >= max(tol, 1e-12) * max(1.0, float(np.max(np.abs(target)))):
        return None, cert
    from .algebra import DiagonalMetric

    return DiagonalMetric(tuple(np.exp(x).tolist())), cert


def verify_derivation(spec: BracketSpec, diag, tol: float = 1e-9) -> bool:
    """Check ``d_j + d_k = d_l`` on every bracket triple (exactly for rational input)."""
    if len(diag) != spec.dim:
        raise ValueError("derivation diagonal has wrong length")
    exact = _all_exact(diag)
    for j, k, l in spec.triples:
        r = diag[j - 1] + diag[k - 1] - diag[l - 1]
        if (r != 0) if exact else abs(float(r)) > tol:
            return False
    return True
