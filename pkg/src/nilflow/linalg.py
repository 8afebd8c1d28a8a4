"""Exact linear algebra over the rationals for the small integer matrices used here."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import sympy


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, sympy.Rational):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, (int,)) or hasattr(x, "__index__"):
        return Fraction(int(x))
    return Fraction(x)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def primitive_integer(vec) -> tuple[int, ...]:
    """Scale a rational vector to the primitive integer vector on the same ray."""
    fr = [to_fraction(v) for v in vec]
    den = 1
    for f in fr:
        den = lcm(den, f.denominator)
    ints = [int(f * den) for f in fr]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        return tuple(ints)
    return tuple(v // g for v in ints)


def rational_nullspace(rows) -> list[tuple[int, ...]]:
    """Basis of {v : M v = 0} for a rational matrix M, as primitive integer vectors.

    ``rows`` is a sequence of rows (ints, Fractions or exact strings).
    """
    rows = [list(r) for r in rows]
    if not rows:
        return []
    M = sympy.Matrix([[sympy.Rational(str(to_fraction(x))) for x in r] for r in rows])
    return [primitive_integer([to_fraction(x) for x in v]) for v in M.nullspace()]


def rational_rowspace(rows) -> list[tuple[Fraction, ...]]:
    """Nonzero rows of the reduced row echelon form."""
    rows = [list(r) for r in rows]
    if not rows:
        return []
    M = sympy.Matrix([[sympy.Rational(str(to_fraction(x))) for x in r] for r in rows])
    R, _ = M.rref()
    out = []
    for i in range(R.rows):
        row = tuple(to_fraction(x) for x in R.row(i))
        if any(row):
            out.append(row)
    return out


def rational_solve(A, b):
    """One exact solution of A x = b, or None when inconsistent.

    Returns ``(x, null_basis)`` with free parameters set to zero.
    """
    A = sympy.Matrix([[sympy.Rational(str(to_fraction(x))) for x in r] for r in A])
    b = sympy.Matrix([sympy.Rational(str(to_fraction(x))) for x in b])
    try:
        sol, params = A.gauss_jordan_solve(b)
    except ValueError:
        return None
    if params.shape[0]:
        sol = sol.subs({p: 0 for p in params})
    x = tuple(to_fraction(v) for v in sol)
    return x, [tuple(to_fraction(v) for v in n) for n in A.nullspace()]
