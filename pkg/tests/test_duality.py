import numpy as np
import pytest

from factories import random_instance, scalar_robust_lp
from robvec.cones import PolyhedralCone, in_interior
from robvec.conjugate import GroundSet, VectorMap
from robvec.duality import (RCD1, RCD2, RCD3, RCD4, RVD, RVDK, RVDW, default_s_samples,
                            directional_gaps, reconstruct, run_variant, solve_dual_T, solve_dual_k,
                            solve_dual_weak, solve_primal, solve_scalar_duals, stable_sweep,
                            verify_duality)
from robvec.farkas import RobustInstance, Scenario, operator_grid
from robvec.instances import load_bundled
from robvec.order import FiniteValueSet, weakly_below, wmin

R1 = PolyhedralCone.orthant(1)
R2 = PolyhedralCone.orthant(2)


def _unconstrained(F_table, X, K, k):
    ground = GroundSet(X)
    F = VectorMap(ground, F_table, K)
    slack = Scenario("u0", VectorMap(ground, -np.ones((len(ground), 1)), R1))
    return RobustInstance(ground, F, [slack], R1, np.asarray(k, dtype=float)).validate()


def _rows(a):
    return sorted(map(tuple, np.round(np.asarray(a), 12).tolist()))


# ------------------------------------------------------------------ primal

def test_primal_without_constraints_uses_all_of_C():
    X = np.linspace(-1, 1, 21)
    inst = _unconstrained(np.c_[X ** 2, (X - 1) ** 2], X, R2, [1, 1])
    rep = solve_primal(inst)
    assert rep.indices.tolist() == list(range(21))


def test_primal_scalar_robust_lp():
    rep = solve_primal(scalar_robust_lp(), [[0.0]])
    assert rep.wmin_points.tolist() == [[1.0]]
    X = scalar_robust_lp().ground.points[rep.indices, 0]
    assert X.min() == 1.0


def test_primal_linear_part_removed():
    X = np.linspace(-2, 2, 9)
    inst = _unconstrained(np.c_[3 * X + 1, -X], X, R2, [1, 1])
    rep = solve_primal(inst, [[3.0], [-1.0]])
    assert np.all(rep.values == [1.0, 0.0])


def test_primal_flags_runaway_minimiser():
    X = np.linspace(0, 10, 11)
    inst = _unconstrained(X.reshape(-1, 1), X, R1, [1])
    assert solve_primal(inst, [[2.0]]).possibly_unbounded
    assert not solve_primal(_unconstrained((X - 5).reshape(-1, 1) ** 2, X, R1, [1])).possibly_unbounded


# ------------------------------------------------------------------ RVDk

def test_dual_k_with_zero_only_is_unconstrained_frontier():
    X = np.linspace(-1, 2, 31)
    F = np.c_[X ** 2, (X - 1) ** 2]
    inst = _unconstrained(F, X, R2, [1, 1])
    dual = solve_dual_k(inst, None, [[0.0]])
    expect = wmin(FiniteValueSet(F, R2))
    assert _rows(dual.wmax_points) == _rows(expect)
    assert _rows(solve_primal(inst).wmin_points) == _rows(expect)


def test_dual_k_scalar_robust_lp():
    inst = scalar_robust_lp()
    dual = solve_dual_k(inst, [[0.0]], inst.zgrid())
    assert np.unique(dual.wmax_points).tolist() == [1.0]
    top = [c for c, keep in zip(dual.certificates, dual.wmax_mask) if keep]
    assert {(c.u, float(c.multiplier[0])) for c in top} == {("t0:0", 1.0)}


def test_dual_k_grid_must_contain_zero():
    inst = scalar_robust_lp()
    with pytest.raises(ValueError, match="contain 0"):
        solve_dual_k(inst, None, np.zeros((0, 1)))
    with pytest.raises(ValueError, match="contain 0"):
        solve_dual_k(inst, None, [[1.0]])


# ------------------------------------------------------------------ RVD and RVDw

def test_rank_one_lift_contains_dual_k_frontier():
    inst = load_bundled("convex_1")
    zg = inst.zgrid(4)
    dk = solve_dual_k(inst, None, zg)
    dT = solve_dual_T(inst, None, [np.outer(inst.k, z) for z in zg])
    assert set(_rows(dk.wmax_points)) <= set(_rows(dT.values))
    assert _rows(dk.wmax_points) == _rows(dT.wmax_points)


def test_zero_operator_matches_zero_multiplier():
    inst = load_bundled("convex_2")
    a = solve_dual_T(inst, None, [np.zeros((inst.m, inst.p))])
    b = solve_dual_k(inst, None, [[0.0]])
    assert np.array_equal(a.values, b.values)


def test_weak_dual_with_zero_shift_equals_dual_T():
    inst = load_bundled("convex_1")
    Tgrid = operator_grid(inst.K, inst.S, inst.zgrid(3), 2)
    a = solve_dual_T(inst, None, Tgrid)
    b = solve_dual_weak(inst, None, Tgrid, s_samples=[[0.0]])
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.wmax_mask, b.wmax_mask)
    assert b.heuristic


def test_weak_dual_positive_operators_scalar():
    # T(s) in K, so shifting by s in S never lowers the inner infimum
    inst = scalar_robust_lp()
    Tgrid = [np.array([[z]]) for z in (0.0, 0.5, 1.0, 2.0)]
    a = solve_dual_T(inst, None, Tgrid)
    b = solve_dual_weak(inst, None, Tgrid, s_samples=default_s_samples(inst))
    assert _rows(a.wmax_points) == _rows(b.wmax_points)


def test_weak_dual_discards_operator_into_negative_interior():
    inst = load_bundled("convex_1")
    bad = np.array([[-1.0], [-1.0]])
    rep = solve_dual_weak(inst, None, [np.zeros((2, 1)), bad])
    assert len(rep.discarded) == 1
    assert np.array_equal(rep.discarded[0][0], bad)
    assert "unbounded" in rep.discarded[0][1]


# ------------------------------------------------------------------ verification

def test_scalar_robust_lp_gap_zero():
    inst = scalar_robust_lp()
    rep = verify_duality(solve_primal(inst), solve_dual_k(inst, None, inst.zgrid()), k=inst.k)
    assert rep.max_gap == 0.0 and rep.strong


def test_zero_grid_keeps_weak_duality_but_not_strong():
    inst = scalar_robust_lp()
    rep = verify_duality(solve_primal(inst), solve_dual_k(inst, None, [[0.0]]), k=inst.k)
    assert rep.weak_violations == []
    assert not rep.strong
    assert rep.max_gap == pytest.approx(1.0)


def test_singleton_primal_both_checks_pass():
    inst = _unconstrained(np.array([[1.0, 2.0]]), [0.0], R2, [1, 1])
    rep = verify_duality(solve_primal(inst), solve_dual_k(inst, None, [[0.0]]), k=inst.k)
    assert rep.strong and rep.exact_direction and rep.max_gap == 0.0


def test_directional_gap_example():
    # d + t k >= p with k = (1, 1): t = max(p - d) componentwise
    gaps = directional_gaps(R2, np.array([1.0, 1.0]), np.array([[1.0, 3.0]]),
                            np.array([[0.0, 0.0], [1.0, 2.5]]))
    assert gaps.tolist() == [0.5]


def test_weak_duality_fuzz():
    rng = np.random.default_rng(0)
    checks = instances = 0
    while checks < 10_000 or instances < 30:
        instances += 1
        inst = random_instance(rng)
        L = rng.uniform(-1, 1, (inst.m, inst.n))
        primal = solve_primal(inst, L)
        for variant in (RVDK, RVD, RVDW):
            dual = run_variant(inst, L, variant)
            diff = dual.values[:, None, :] - primal.values[None, :, :]
            bad = in_interior(inst.K, diff.reshape(-1, inst.m))
            assert not bad.any()
            assert verify_duality(primal, dual, k=inst.k).weak_violations == []
            checks += diff.shape[0] * diff.shape[1]


def test_certificates_reconstruct_bitwise():
    for name in ("convex_1", "convex_3", "convex_5"):
        inst = load_bundled(name)
        L = np.full((inst.m, inst.n), 0.25)
        for variant in (RVDK, RVD, RVDW):
            dual = run_variant(inst, L, variant)
            for v, cert in zip(dual.values, dual.certificates):
                assert np.array_equal(reconstruct(inst, L, cert, variant), v)


def test_scalar_consistency_across_dual_forms():
    inst = scalar_robust_lp(U=[1.0])
    # the exact multipliers 1.5, 1 and 0.5 are on the grid
    zg = np.array([[0.0], [0.5], [1.0], [1.5], [2.0]])
    for xstar in (-0.5, 0.0, 0.5):
        L = [[xstar]]
        dk = solve_dual_k(inst, L, zg).wmax_points.max()
        dT = solve_dual_T(inst, L, [np.outer(inst.k, z) for z in zg]).wmax_points.max()
        r1 = solve_scalar_duals(inst, [xstar], RCD1).dual.values[0, 0]
        assert dk == pytest.approx(dT, abs=1e-9)
        assert dk == pytest.approx(r1, abs=1e-9)


def test_enlarging_grid_never_lowers_frontier():
    rng = np.random.default_rng(1)
    for _ in range(20):
        inst = random_instance(rng)
        small = solve_dual_k(inst, None, inst.zgrid(2))
        big = solve_dual_k(inst, None, inst.zgrid(4))
        assert set(_rows(small.values)) <= set(_rows(big.values))
        Mbig = FiniteValueSet(big.values, inst.K)
        assert np.all(weakly_below(Mbig, small.wmax_points))


# ------------------------------------------------------------------ sweeps and scalar duals

def test_sweep_with_zero_operator_is_plain_duality():
    inst = load_bundled("convex_2")
    rep = stable_sweep(inst, [np.zeros((inst.m, inst.n))])[0]
    plain = verify_duality(solve_primal(inst), solve_dual_k(inst, None, inst.zgrid()), k=inst.k)
    assert rep.max_gap == plain.max_gap
    assert np.array_equal(rep.winf_flags, plain.winf_flags)


def test_sweep_flags_runaway_primal_without_crashing():
    X = np.linspace(0, 10, 11)
    inst = _unconstrained((X.reshape(-1, 1) - 5) ** 2, X, R1, [1])
    reps = stable_sweep(inst, [[[0.0]], [[30.0]]])
    assert [r.primal.possibly_unbounded for r in reps] == [False, True]


def test_slater_scalar_sweep_gaps():
    inst = scalar_robust_lp()
    rng = np.random.default_rng(2)
    for rep in stable_sweep(inst, rng.uniform(-1, 1, (5, 1)), variant=RCD1):
        assert rep.max_gap <= 1e-6


def test_scalar_variants_on_robust_lp():
    inst = scalar_robust_lp()
    for variant in (RCD1, RCD2, RCD3, RCD4):
        rep = solve_scalar_duals(inst, [0.0], variant)
        assert rep.primal.wmin_points.tolist() == [[1.0]]
        assert rep.dual.values[0, 0] == pytest.approx(1.0, abs=1e-6)
        assert abs(rep.max_gap) <= 1e-6
    cert = solve_scalar_duals(inst, [0.0], RCD1).dual.certificates[0]
    assert cert["selection"] == ["t0:0"] and cert["lambda"] == pytest.approx([1.0])


def test_no_uncertainty_is_classical_lagrangian():
    inst = scalar_robust_lp(U=[2.0])
    rep = solve_scalar_duals(inst, [0.0], RCD1)
    # min x s.t. x >= 0.5 on a grid of step 0.1
    assert rep.primal.wmin_points.tolist() == [[0.5]]
    assert rep.max_gap <= 1e-6


def test_scalar_duals_reject_vector_instances():
    with pytest.raises(ValueError, match="one-dimensional"):
        solve_scalar_duals(load_bundled("convex_1"), [0.0])
    with pytest.raises(ValueError, match="unknown"):
        solve_scalar_duals(scalar_robust_lp(), [0.0], "RCD9")
    with pytest.raises(ValueError, match="unknown dual variant"):
        run_variant(scalar_robust_lp(), None, "XYZ")
