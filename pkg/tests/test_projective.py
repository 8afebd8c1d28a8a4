from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilflow import catalog
from nilflow.algebra import root_system, structure_vector
from nilflow.curvature import soliton_test
from nilflow.errors import SubsetBudgetExceeded
from nilflow.flow import FlowState, IntegratorConfig, integrate
from nilflow.projective import (
    build_projective_system,
    chamber_sign,
    equilibria,
    eta,
    integrate_projective,
    jacobian,
    projective_rhs,
    pu_kernel,
    repelling_certificate,
    s_from_a,
)

P5_U = [[3, 0, 1], [0, 3, 1], [1, 1, 3]]
L4B_U = [[3, 2, 0], [2, 3, 2], [0, 2, 3]]


@pytest.fixture
def p5sys():
    return build_projective_system(P5_U)


@pytest.fixture
def l4bsys():
    return build_projective_system(L4B_U, "gram-only")


def heis_sys(r):
    return build_projective_system(root_system(catalog.get(f"heisenberg({r})").spec).U)


class TestBuild:
    def test_pu(self, p5sys, l4bsys):
        assert p5sys.PU.tolist() == [[2, -1, -2], [-1, 2, -2]]
        assert l4bsys.PU.tolist() == [[3, 0, -3], [2, 1, -1]]
        assert build_projective_system(3 * np.eye(2)).PU.tolist() == [[3, -3]]

    def test_p_shape(self, p5sys):
        assert p5sys.P.tolist() == [[1, 0, -1], [0, 1, -1]]
        U = np.array(P5_U)
        for i in range(2):
            assert p5sys.normals[i].tolist() == (U[i] - U[-1]).tolist()

    def test_m1_rejected(self):
        with pytest.raises(ValueError):
            build_projective_system([[3]])

    def test_provenance(self, l4bsys):
        assert l4bsys.provenance == "gram-only"


class TestEta:
    def test_examples(self, p5sys, l4bsys):
        assert eta(p5sys, [2, 2]).tolist() == [0, 0]
        assert eta(p5sys, [0, 0]).tolist() == [-2, -2]
        assert eta(l4bsys, [1, 0]).tolist() == [0, 1]
        # the second normal is (-1, 2, -2)
        assert eta(p5sys, [1, 3]).tolist() == [2 - 3 - 2, -1 + 6 - 2]

    def test_batch(self, p5sys):
        S = np.array([[2, 2], [0, 0]])
        assert eta(p5sys, S).tolist() == [[0, 0], [-2, -2]]

    def test_chamber(self, p5sys):
        assert chamber_sign(p5sys, [3, 3]) == (1, 1)
        assert chamber_sign(p5sys, [0, 0]) == (-1, -1)
        assert chamber_sign(p5sys, [2, 2]) == (0, 0)

    def test_s_from_a(self, p5sys):
        st_ = s_from_a([2, 2, 1], p5sys)
        assert st_.s.tolist() == [2, 2] and st_.chamber == (0, 0)
        assert s_from_a([3, 3, 3]).s.tolist() == [1, 1]
        assert s_from_a([4.0]).s.size == 0


class TestRhs:
    def test_equilibrium(self, p5sys):
        assert not projective_rhs(p5sys, [2, 2]).any()
        assert not projective_rhs(p5sys, [0, 0]).any()

    def test_true_time_scaling(self, p5sys):
        s = np.array([0.3, 4.0])
        np.testing.assert_allclose(projective_rhs(p5sys, s, a_m=2.5), 2.5 * projective_rhs(p5sys, s))

    @pytest.mark.parametrize("r", [2, 3, 5])
    def test_heisenberg(self, r):
        sys_ = heis_sys(r)
        s = np.linspace(0.2, 3, r - 1)
        np.testing.assert_allclose(projective_rhs(sys_, s) / s, 2 * (1 - s))

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(0.01, 5), min_size=2, max_size=2))
    def test_sign_structure_matches_true_time(self, s):
        p5sys = build_projective_system(P5_U)
        assert np.array_equal(np.sign(projective_rhs(p5sys, s)), np.sign(projective_rhs(p5sys, s, a_m=0.3)))

    def test_jacobian_fd(self, p5sys):
        s = np.array([0.7, 1.9])
        h = 1e-6
        J = np.column_stack([(projective_rhs(p5sys, s + h * e) - projective_rhs(p5sys, s - h * e)) / (2 * h)
                             for e in np.eye(2)])
        np.testing.assert_allclose(jacobian(p5sys, s), J, atol=1e-7)


class TestKernel:
    def test_examples(self, p5sys, l4bsys):
        assert pu_kernel(p5sys) == [(2, 2, 1)]
        assert pu_kernel(l4bsys) == [(1, -1, 1)]
        assert pu_kernel(build_projective_system(3 * np.eye(2))) == [(1, 1)]

    def test_kernel_solves_gram(self, entry):
        U = root_system(entry.spec).U
        if U.shape[0] < 2:
            pytest.skip("m = 1")
        sys_ = build_projective_system(U)
        for v in pu_kernel(sys_):
            Uv = U @ np.array(v)
            assert np.all(Uv == Uv[0])


class TestEquilibria:
    def test_p5(self, p5sys):
        eqs = equilibria(p5sys)
        pts = {tuple(p.s.tolist()): p for p in eqs}
        assert set(pts) == {(2.0, 2.0), (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)}
        assert pts[(2.0, 2.0)].kind == "interior-soliton"
        assert pts[(0.0, 0.0)].kind == "repelling"
        assert pts[(0.0, 0.0)].zero_set == (1, 2)

    def test_l4b(self, l4bsys):
        pts = {tuple(p.s.tolist()): p for p in equilibria(l4bsys)}
        assert (1.0, 0.0) in pts and (0.0, 1.0) in pts
        assert (1.0, -1.0) not in pts
        assert all(min(k) >= 0 for k in pts)
        assert pts[(1.0, 0.0)].kind == "boundary"

    def test_h5_interior(self):
        eqs = equilibria(build_projective_system([[3, 1], [1, 3]]))
        interior = [p for p in eqs if p.kind == "interior-soliton"]
        assert len(interior) == 1 and interior[0].s.tolist() == [1.0]

    @pytest.mark.parametrize("U", [P5_U, L4B_U, "r6", "heisenberg(4)", "l4"])
    def test_cross_check_and_classification(self, U):
        if isinstance(U, str):
            U = root_system(catalog.get(U).spec).U
        sys_ = build_projective_system(U)
        for p in equilibria(sys_):
            e = eta(sys_, p.s)
            assert np.max(np.abs(p.s * e)) < 1e-10
            assert np.all(p.s >= 0)
            if p.kind == "repelling":
                assert any(p.s[i - 1] == 0 and e[i - 1] < 0 for i in p.zero_set)

    @pytest.mark.parametrize("name", ["p5", "h5", "heisenberg(3)", "l4"])
    def test_interior_iff_soliton(self, name):
        roots = root_system(catalog.get(name).spec)
        sys_ = build_projective_system(roots.U)
        for p in equilibria(sys_):
            if np.all(p.s > 0):
                assert p.kind == "interior-soliton"
                assert soliton_test(roots, list(p.s) + [1.0]) is not None

    def test_budget(self):
        with pytest.raises(SubsetBudgetExceeded):
            equilibria(build_projective_system(3 * np.eye(5, dtype=int)), max_m=3)

    def test_family(self):
        # singular PU gives a one-parameter family of interior equilibria
        sys_ = build_projective_system([[2, 2, 1], [2, 2, 1], [1, 1, 3]])
        fams = [p for p in equilibria(sys_) if p.directions]
        assert fams
        for p in fams:
            for d in p.directions:
                assert np.allclose(sys_.normals[:, :-1] @ d, 0)

    def test_json(self, p5sys):
        d = equilibria(p5sys).to_json()
        assert {tuple(p["s"]) for p in d["points"]} == {(2.0, 2.0), (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)}
        assert all({"M", "classification", "eta"} <= set(p) for p in d["points"])


class TestIntegrateProjective:
    def test_heisenberg_closed_form(self):
        sys_ = heis_sys(2)
        tr = integrate_projective(sys_, [0.5], 10.0)
        assert tr.final[0] == pytest.approx(np.exp(20) / (1 + np.exp(20)), abs=1e-6)

    def test_p5_converges(self, p5sys):
        tr = integrate_projective(p5sys, [0.1, 4.0], 20.0)
        assert np.max(np.abs(tr.final - 2)) < 1e-3
        assert tr.converged
        assert tr.nearest.kind == "interior-soliton" and tr.nearest_distance < 1e-3

    def test_l4b_converges(self, l4bsys):
        tr = integrate_projective(l4bsys, [3.0, 0.5], 30.0)
        assert np.max(np.abs(tr.final - [1, 0])) < 1e-3

    def test_boundary_invariance(self, p5sys):
        tr = integrate_projective(p5sys, [0.0, 3.0], 10.0)
        assert np.all(tr.s[:, 0] == 0) and np.all(tr.s[:, 1] > 0)
        np.testing.assert_allclose(tr.final, [0, 1], atol=1e-6)
        tr = integrate_projective(p5sys, [0.0, 0.0], 5.0)
        assert not tr.s.any() and tr.converged

    def test_interior_invariance(self, p5sys, rng):
        tr = integrate_projective(p5sys, rng.uniform(0, 5, 2), 20.0)
        assert np.all(tr.s > 0)

    def test_rejects_bad_start(self, p5sys):
        with pytest.raises(ValueError):
            integrate_projective(p5sys, [-1.0, 1.0], 1.0)
        with pytest.raises(ValueError):
            integrate_projective(p5sys, [1.0], 1.0)

    def test_orbit_equivalence(self, p5sys):
        # the true-time orbit of the coupled a-system traces the same curve
        a0 = np.array([0.3, 4.0, 1.0])
        roots = root_system(catalog.get("p5").spec)
        grid = tuple(np.geomspace(1e-4, 1e4, 3000))
        traj = integrate(roots, FlowState(0.0, np.ones(5), a0), IntegratorConfig(t_end=1e4, t_eval=grid, rtol=1e-11))
        true_s = traj.a[:, :2] / traj.a[:, 2:]
        tau_end = float(np.sum(np.diff(traj.t) * 0.5 * (traj.a[1:, 2] + traj.a[:-1, 2])))
        tr = integrate_projective(p5sys, a0[:2], tau_end, t_eval=tuple(np.linspace(0, tau_end, 3001)[1:]),
                                  keep_steps=False, rtol=1e-11)
        assert _hausdorff(true_s, tr.s) < 1e-4


def _to_polyline(points, line):
    a, b = line[:-1], line[1:]
    d = b - a
    L = np.maximum(np.einsum("ij,ij->i", d, d), 1e-300)
    out = []
    for p in points:
        t = np.clip(np.einsum("ij,ij->i", p - a, d) / L, 0, 1)
        out.append(np.min(np.linalg.norm(a + t[:, None] * d - p, axis=1)))
    return max(out)


def _hausdorff(x, y):
    return max(_to_polyline(x, y), _to_polyline(y, x))


class TestRepelling:
    def test_p5_all_escape(self, p5sys):
        for p in equilibria(p5sys).repelling:
            times = repelling_certificate(p5sys, p, n=20, t_max=100)
            assert all(t is not None and t > 0 for t in times)

    def test_attractor_does_not_escape(self, p5sys):
        eqs = equilibria(p5sys)
        interior = next(p for p in eqs if p.kind == "interior-soliton")
        assert all(t is None for t in repelling_certificate(p5sys, interior, n=3, t_max=50))


class TestR6Limit:
    """Qualitative non-soliton behaviour: one entry of the structure vector dies out.

    The limit (0, 1, ..., 1) is non-hyperbolic (eta_1 vanishes there), so the
    decay is algebraic, s_1 ~ c / tau with c close to 1/2.
    """

    def test_entry_vanishes_algebraically(self, rng):
        spec = catalog.get("r6").spec
        sys_ = build_projective_system(root_system(spec).U)
        for _ in range(3):
            s0 = s_from_a(structure_vector(spec, 10 ** rng.uniform(-1, 1, 7))).s
            tr = integrate_projective(sys_, s0, 1000.0, t_eval=(100.0, 1000.0), keep_steps=False, match=False)
            s100, s1000 = tr.s[1], tr.s[2]
            assert s1000[0] < 1e-3
            assert 0.4 < 1000 * s1000[0] < 0.7
            assert s100[0] / s1000[0] == pytest.approx(10, rel=0.1)
            np.testing.assert_allclose(s1000[1:], 1, atol=1e-3)
            assert eta(sys_, np.r_[0.0, np.ones(6)])[0] == 0
