from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilflow import catalog
from nilflow.algebra import (
    BracketSpec,
    DiagonalMetric,
    ad_matrix,
    nilpotency_class,
    parse_scalar,
    rescaled_constants,
    root_system,
    structure_vector,
    validate_jacobi,
)
from nilflow.errors import AbelianAlgebra, DimensionMismatch, NotNilpotent

positive_q = st.floats(0.1, 10.0, allow_nan=False)


def test_parse_scalar_exactness():
    assert parse_scalar("3/4") == Fraction(3, 4)
    assert parse_scalar(2) == Fraction(2)
    assert isinstance(parse_scalar(0.5), float)
    # decimal strings are exact rationals too
    assert parse_scalar("0.5") == Fraction(1, 2)
    with pytest.raises(TypeError):
        parse_scalar(True)


class TestBracketSpec:
    def test_sorted_dictionary_order(self):
        s = BracketSpec(5, ((2, 3, 5, 1), (1, 4, 5, 1), (1, 3, 4, 1)))
        assert s.triples == ((1, 3, 4), (1, 4, 5), (2, 3, 5))

    @pytest.mark.parametrize("entries", [
        ((2, 1, 3, 1),),  # j > k
        ((1, 1, 3, 1),),  # j == k
        ((1, 2, 4, 1),),  # l out of range
        ((1, 2, 3, 0),),  # zero constant
        ((1, 2, 3, 1), (1, 2, 3, 2)),  # duplicate
    ])
    def test_rejects_malformed(self, entries):
        with pytest.raises(ValueError):
            BracketSpec(3, entries)

    def test_exactness_flag(self):
        assert BracketSpec(3, ((1, 2, 3, "1/2"),)).exact
        assert not BracketSpec(3, ((1, 2, 3, 0.5),)).exact

    def test_bracket_table_antisymmetric(self, p5):
        t = p5.spec.bracket_table()
        assert t[(1, 3)] == [(4, 1)] and t[(3, 1)] == [(4, -1)]


class TestJacobi:
    def test_h3_passes(self, h3):
        assert validate_jacobi(h3.spec).ok

    def test_p5_passes(self, p5):
        assert validate_jacobi(p5.spec)

    def test_counterexample_residual(self):
        # [x1,x2]=x3, [x1,x3]=x1: the cyclic sum on (1,2,3) leaves x3
        rep = validate_jacobi(BracketSpec.from_relations(3, {(1, 2, 3): 1, (1, 3, 1): 1}))
        assert not rep.ok
        (triple, vec), = rep.failures
        assert triple == (1, 2, 3)
        assert vec == (0, 0, 1) or vec == (0, 0, -1)

    def test_float_mode_tolerance(self):
        spec = BracketSpec.from_relations(3, {(1, 2, 3): 0.3})
        rep = validate_jacobi(spec)
        assert rep.ok and not rep.exact

    def test_all_catalog_entries_pass(self, entry):
        assert validate_jacobi(entry.spec).ok

    def test_permutation_invariance(self, entry):
        entries = list(entry.spec.entries)
        random.Random(0).shuffle(entries)
        assert validate_jacobi(BracketSpec(entry.spec.dim, tuple(entries))).ok


class TestNilpotency:
    @pytest.mark.parametrize("name, cls", [("h3", 2), ("l4", 3), ("p5", 3), ("h5", 2), ("r6", 6)])
    def test_known_classes(self, name, cls):
        assert nilpotency_class(catalog.get(name).spec) == cls

    def test_abelian_class_one(self):
        assert nilpotency_class(BracketSpec(4)) == 1

    def test_float_constants(self):
        assert nilpotency_class(BracketSpec.from_relations(4, {(1, 2, 3): 0.7, (1, 3, 4): 1.3})) == 3

    def test_not_nilpotent(self):
        # ad_x1 acts invertibly on span{x2}: [x1,x2]=x2
        with pytest.raises(NotNilpotent):
            nilpotency_class(BracketSpec.from_relations(2, {(1, 2, 2): 1}))

    def test_bounded_by_dimension(self, entry):
        assert nilpotency_class(entry.spec) <= entry.spec.dim


class TestRootSystem:
    def test_h3(self, h3):
        r = root_system(h3.spec)
        assert r.Y.tolist() == [[1, 1, -1]] and r.U.tolist() == [[3]]

    def test_h5(self):
        r = root_system(catalog.get("h5").spec)
        assert r.Y.tolist() == [[1, 1, 0, 0, -1], [0, 0, 1, 1, -1]]
        assert r.U.tolist() == [[3, 1], [1, 3]]

    def test_p5(self, p5_roots):
        assert p5_roots.U.tolist() == [[3, 0, 1], [0, 3, 1], [1, 1, 3]]

    def test_gram_identity_and_diagonal(self, entry):
        r = root_system(entry.spec)
        assert np.array_equal(r.U, r.Y @ r.Y.T)
        assert np.array_equal(r.U, r.U.T)
        for i, (j, k, l) in enumerate(r.lam):
            if len({j, k, l}) == 3:
                assert r.U[i, i] == 3

    def test_readonly(self, p5_roots):
        with pytest.raises(ValueError):
            p5_roots.U[0, 0] = 7

    def test_abelian_rejected(self):
        with pytest.raises(AbelianAlgebra):
            root_system(BracketSpec(3))


class TestStructureVector:
    def test_p5_soliton_metric(self, p5):
        assert structure_vector(p5.spec, p5.soliton_metric, exact=True) == (2, 2, 1)

    def test_ones_metric_unit_alphas(self):
        spec = BracketSpec.from_relations(4, {(1, 2, 3): 1, (1, 3, 4): -1})
        assert structure_vector(spec, DiagonalMetric.ones(4)).tolist() == [1.0, 1.0]

    def test_h3_alpha_squared(self):
        spec = BracketSpec.from_relations(3, {(1, 2, 3): "3/2"})
        assert structure_vector(spec, (1, 1, 1), exact=True) == (Fraction(9, 4),)

    def test_dimension_mismatch(self, p5):
        with pytest.raises(DimensionMismatch):
            structure_vector(p5.spec, (1, 1, 1))

    def test_exact_needs_rational(self, p5):
        with pytest.raises(ValueError):
            structure_vector(p5.spec, (1.5, 1, 1, 1, 1), exact=True)

    def test_metric_positivity(self):
        with pytest.raises(ValueError):
            DiagonalMetric((1, -1, 1))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(positive_q, min_size=5, max_size=5), st.floats(0.01, 100))
    def test_homogeneity_and_rescaled_squares(self, q, lam):
        spec = catalog.get("p5").spec
        a = structure_vector(spec, q)
        np.testing.assert_allclose(rescaled_constants(spec, q) ** 2, a, rtol=1e-14)
        np.testing.assert_allclose(structure_vector(spec, [lam * x for x in q]), a / lam, rtol=1e-12)


class TestRescaledConstants:
    def test_p5(self, p5):
        assert rescaled_constants(p5.spec, p5.soliton_metric)[0] == pytest.approx(np.sqrt(2))

    def test_identity(self, p5):
        np.testing.assert_array_equal(rescaled_constants(p5.spec, (1,) * 5), [1.0, 1.0, 1.0])

    def test_h3(self, h3):
        assert rescaled_constants(h3.spec, (1, 1, 4))[0] == pytest.approx(2.0)


class TestAdMatrix:
    def test_r6_ranks(self):
        spec = catalog.get("r6").spec
        e = np.eye(7)
        assert np.linalg.matrix_rank(ad_matrix(spec, e[0])) == 5
        ad2 = ad_matrix(spec, e[1])
        # the full matrix includes [x2, x1] = -x3
        assert np.linalg.matrix_rank(ad2) == 4
        assert ad2[2, 0] == -1
        assert np.linalg.matrix_rank(ad2[:, 1:]) == 3

    def test_zero(self, p5):
        assert not ad_matrix(p5.spec, np.zeros(5)).any()

    def test_own_column_vanishes(self, entry):
        n = entry.spec.dim
        for j in range(n):
            assert not ad_matrix(entry.spec, np.eye(n)[j])[:, j].any()

    def test_wrong_length(self, p5):
        with pytest.raises(DimensionMismatch):
            ad_matrix(p5.spec, [1, 2])
