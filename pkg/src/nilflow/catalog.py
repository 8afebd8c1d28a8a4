"""Worked examples shipped as validated fixtures with their expected values.

Each expected value is stored as ``(value, provenance)`` where provenance is
``"source"`` (value stated with the worked example), ``"computed"`` (obtained
by hand or by an independent route) or ``"elementary"``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction as F

import numpy as np

from .algebra import BracketSpec, DiagonalMetric
from .errors import UnknownEntry


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    spec: BracketSpec | None = None
    gram: np.ndarray | None = None
    soliton_metric: DiagonalMetric | None = None
    expected: dict = field(default_factory=dict)

    @property
    def gram_only(self) -> bool:
        return self.spec is None

    def value(self, key):
        return self.expected[key][0]


def _h3():
    spec = BracketSpec.from_relations(3, {(1, 2, 3): 1})
    return CatalogEntry(
        "h3", "3-dim Heisenberg algebra, [x1,x2]=x3", spec, soliton_metric=DiagonalMetric((1, 1, 1)),
        expected={
            "beta": (F(-3, 2), "source"),
            "ricci_vector": ((F(-1, 2), F(-1, 2), F(1, 2)), "source"),
            "gram_matrix": ([[3]], "source"),
            "derivation_diag": ((1, 1, 2), "source"),
            "kernel_vectors": ([(1, 0, 1), (0, 1, 1), (1, -1, 0)], "source"),
            "closed_form_exponents": ((F(1, 3), F(1, 3), F(-1, 3)), "source"),
        })


def _l4():
    spec = BracketSpec.from_relations(4, {(1, 2, 3): 1, (1, 3, 4): 1})
    return CatalogEntry(
        "l4", "4-dim filiform algebra, [x1,x2]=x3, [x1,x3]=x4", spec, soliton_metric=DiagonalMetric((1, 1, 1, 1)),
        expected={
            "beta": (F(-3, 2), "source"),
            "ricci_vector": ((-1, F(-1, 2), 0, F(1, 2)), "source"),
            "gram_matrix": ([[3, 0], [0, 3]], "source"),
            "derivation_diag": ((F(1, 2), 1, F(3, 2), 2), "source"),
            "closed_form_exponents": ((F(2, 3), F(1, 3), 0, F(-1, 3)), "computed"),
        })


def _h5():
    spec = BracketSpec.from_relations(5, {(1, 2, 5): 1, (3, 4, 5): 1})
    return CatalogEntry(
        "h5", "5-dim Heisenberg algebra, [x1,x2]=[x3,x4]=x5", spec, soliton_metric=DiagonalMetric((1,) * 5),
        expected={
            "beta": (F(-2), "computed"),
            "ricci_vector": ((F(-1, 2),) * 4 + (1,), "source"),
            "gram_matrix": ([[3, 1], [1, 3]], "source"),
            "derivation_diag": ((F(3, 2),) * 4 + (3,), "computed"),
            "kernel_vectors": ([(1, 1)], "computed"),
        })


def _p5():
    spec = BracketSpec.from_relations(5, {(1, 3, 4): 1, (1, 4, 5): 1, (2, 3, 5): 1})
    return CatalogEntry(
        "p5", "5-dim prototype, [x1,x3]=x4, [x1,x4]=x5, [x2,x3]=x5", spec,
        soliton_metric=DiagonalMetric((1, 4, 1, 2, 4)),
        expected={
            "beta": (F(-7, 2), "source"),
            "structure_vector": ((2, 2, 1), "source"),
            "ricci_vector": ((-2, F(-1, 2), F(-3, 2), 0, F(3, 2)), "source"),
            "gram_matrix": ([[3, 0, 1], [0, 3, 1], [1, 1, 3]], "source"),
            "pu_matrix": ([[2, -1, -2], [-1, 2, -2]], "source"),
            # D = Ric - beta Id; the integer form diag(3,6,4,7,10) is twice this
            "derivation_diag": ((F(3, 2), 3, 2, F(7, 2), 5), "computed"),
            "kernel_vectors": ([(2, 2, 1)], "source"),
            "closed_form_exponents": ((F(4, 7), F(1, 7), F(3, 7), 0, F(-3, 7)), "source"),
            "equilibria": ([(2, 2), (1, 0), (0, 1), (0, 0)], "source"),
        })


def heisenberg(r: int) -> CatalogEntry:
    """``h_{2r+1}`` with brackets ``[x_{2i-1}, x_{2i}] = x_{2r+1}``."""
    if r < 1:
        raise UnknownEntry(f"heisenberg({r}) needs r >= 1")
    n = 2 * r + 1
    spec = BracketSpec.from_relations(n, {(2 * i - 1, 2 * i, n): 1 for i in range(1, r + 1)})
    gram = [[3 if i == j else 1 for j in range(r)] for i in range(r)]
    return CatalogEntry(
        f"heisenberg({r})", f"{n}-dim Heisenberg algebra", spec, soliton_metric=DiagonalMetric((1,) * n),
        expected={
            "beta": (F(-(r + 2), 2), "computed"),
            "gram_matrix": (gram, "source"),
            "kernel_vectors": ([(1,) * r], "source"),
        })


R6_TRIPLES = [(1, i, i + 1) for i in range(2, 7)] + [(2, i, i + 2) for i in (3, 4, 5)]


def r6(alphas: dict | None = None) -> CatalogEntry:
    """7-dim algebra with ``[x1,xi] = x_{i+1}`` (i=2..6) and ``[x2,xi] = x_{i+2}`` (i=3,4,5).

    ``alphas`` overrides individual constants, keyed by triple.  The Jacobi
    identity ties them together: ``a_134 a_246 = a_156 a_235`` and
    ``a_145 a_257 = a_167 a_246``.
    """
    rel = {t: 1 for t in R6_TRIPLES}
    for t, v in (alphas or {}).items():
        t = tuple(int(x) for x in t)
        if t not in rel:
            raise UnknownEntry(f"{t} is not a bracket of r6")
        rel[t] = v
    spec = BracketSpec.from_relations(7, rel)
    return CatalogEntry(
        "r6", "7-dim algebra admitting no soliton metric", spec,
        expected={
            "soliton": (None, "source"),
            "ad_rank_x1": (5, "source"),
            # column 1 holds [x2, x1] = -x3, so the full rank is 4; on span{x2..x7} it is 3
            "ad_rank_x2": (4, "computed"),
            "ad_rank_x2_on_span_x2_to_x7": (3, "source"),
        })


def _l4b():
    U = np.array([[3, 2, 0], [2, 3, 2], [0, 2, 3]])
    return CatalogEntry(
        "l4b_gram", "3x3 Gram matrix with no positive solution of Uv = 1 (gram-only)", gram=U,
        expected={
            "pu_matrix": ([[3, 0, -3], [2, 1, -1]], "source"),
            "kernel_vectors": ([(1, -1, 1)], "source"),
            "attractor": ((1, 0), "source"),
        })


_BUILDERS = {"h3": _h3, "l4": _l4, "h5": _h5, "p5": _p5, "r6": r6, "l4b_gram": _l4b}
_HEIS = re.compile(r"^heisenberg[(:]?\s*(\d+)\s*\)?$")


def get(name: str, **kwargs) -> CatalogEntry:
    """Look up an entry; ``heisenberg(r)`` accepts any ``r >= 1``."""
    key = name.strip().lower()
    m = _HEIS.match(key)
    if m:
        return heisenberg(int(m.group(1)))
    if key not in _BUILDERS:
        raise UnknownEntry(f"unknown catalog entry {name!r}")
    return _BUILDERS[key](**kwargs)


def list_entries() -> list:
    """``(name, description, gram_only)`` for every entry."""
    out = []
    for key in ("h3", "l4", "h5", "p5", "heisenberg(r)", "r6", "l4b_gram"):
        e = heisenberg(2) if key == "heisenberg(r)" else get(key)
        desc = "(2r+1)-dim Heisenberg family, r >= 1" if key == "heisenberg(r)" else e.description
        out.append((key, desc, e.gram_only))
    return out


list = list_entries  # noqa: A001  (public name ``catalog.list``)
