import numpy as np
import pytest

from hcross import norms as nm
from hcross.classes import ClassSpec
from hcross.errors import InfeasibleError, InvalidWitnessError
from hcross.freqs import build_rho, level_vectors, uniform_points
from hcross.poly import TrigPoly, evaluate
from hcross.witness import (abeta_block_check, box_witness, evaluate_witness,
                            fooling_function, vanishing_poly)


def test_vanishing_single_point_level_one():
    # null space of [1 1] is span(1, -1): g is a unimodular multiple of sin x
    vp = vanishing_poly(np.array([[0.0]]), (1,))
    assert abs(vp.g(np.array([0.0]))) < 1e-12
    xs = np.linspace(0, 2 * np.pi, 64, endpoint=False).reshape(-1, 1)
    assert np.allclose(np.abs(vp.g(xs)), np.abs(np.sin(xs[:, 0])), atol=1e-9)
    assert vp.x_star[0] == pytest.approx(np.pi / 2, abs=1e-6)  # lex tie-break


def test_vanishing_no_points():
    vp = vanishing_poly(np.zeros((0, 1)), (2,))
    assert vp.residual == 0.0
    assert vp.null_dim == len(build_rho((2,)))
    est = nm.sup_estimate(vp.g, oversample=16)
    assert est.value == pytest.approx(1.0, rel=1e-9)


def test_vanishing_two_points_level_two():
    pts = np.array([[0.0], [np.pi]])
    vp = vanishing_poly(pts, (2,))
    assert np.abs(vp.g(pts)).max() <= 1e-9
    assert set(map(tuple, vp.g.freqs.tolist())) <= {(-3,), (-2,), (2,), (3,)}
    assert vp.null_dim == 2


def test_vanishing_infeasible():
    pts = np.linspace(0, 2 * np.pi, 4, endpoint=False).reshape(-1, 1)
    with pytest.raises(InfeasibleError):
        vanishing_poly(pts, (1,))  # 4 points, 2 frequencies


def test_vanishing_deterministic():
    pts = uniform_points(4, 2, np.random.default_rng(5))
    a = vanishing_poly(pts, (3, 3), rng=np.random.default_rng(0))
    b = vanishing_poly(pts, (3, 3), rng=np.random.default_rng(0))
    assert np.array_equal(a.g.coeffs, b.g.coeffs)


# -- fooling function -----------------------------------------------------------

def test_fooler_d1_single_block():
    # n = 3, d = 1: single level (3,), kernel is the order-2 Fejer
    f, rep = fooling_function(np.zeros((0, 1)), 3, 1)
    assert len(rep.blocks) == 1
    assert rep.blocks[0].s == (3,)
    # peak |f(x*)| = |g(x*)| * K_2(0) = 2
    assert rep.blocks[0].peak == pytest.approx(2.0, rel=1e-6)
    assert rep.support_level_max <= 4


def test_fooler_d2_small():
    rng = np.random.default_rng(0)
    pts = uniform_points(8, 2, rng)
    f, rep = fooling_function(pts, 6, 2, rng=np.random.default_rng(1))
    assert len(rep.blocks) == 1           # Y(6,3) in d=2 is {(3,3)}
    assert rep.vanishes
    assert rep.residual <= 1e-9 * rep.sup_lower
    assert rep.support_level_max <= 8     # inside Q_{n+d}
    assert rep.block_owner_unique
    # peak value |t_s(x*)| is the full Fejer mass 2^(n-2d), up to sup slack
    assert rep.blocks[0].peak == pytest.approx(2.0 ** (6 - 4), rel=1e-2)


def test_fooler_rejects_bad_n():
    with pytest.raises(InfeasibleError):
        fooling_function(np.zeros((0, 2)), 7, 2)
    with pytest.raises(InfeasibleError):
        fooling_function(np.zeros((0, 2)), 3, 2)


def test_fooler_rejects_too_many_points():
    pts = uniform_points(40, 1, np.random.default_rng(0))
    with pytest.raises(InfeasibleError):
        fooling_function(pts, 6, 1)  # 2^6/2 = 32 < 40


def test_block_uniqueness_and_disjoint_supports():
    rng = np.random.default_rng(2)
    pts = uniform_points(16, 2, rng)
    f, rep = fooling_function(pts, 9, 2, rng=np.random.default_rng(3))
    assert len(rep.blocks) == 2           # {(3,6), (6,3)}
    seen = {}
    for b in rep.blocks:
        for u in map(tuple, np.unique(level_vectors(b.t.freqs), axis=0).tolist()):
            assert u not in seen
            seen[u] = b.s
    assert rep.block_owner_unique


def test_qp2_delta_block_ratio_positive():
    f, rep = fooling_function(np.zeros((0, 2)), 6, 2)
    b = rep.blocks[0]
    assert b.delta_sup_ratio > 0.05
    lsum = sum(b.delta_sup_level)
    assert rep.n - 2 * rep.d <= lsum <= rep.n + rep.d


# -- witness evaluation -----------------------------------------------------------

def test_witness_scaling_invariance():
    rng = np.random.default_rng(4)
    pts = uniform_points(8, 2, rng)
    f, rep = fooling_function(pts, 6, 2, rng=np.random.default_rng(5))
    w1 = evaluate_witness(f, rep, ClassSpec.hrq(1.5, 2.0), 2.0)
    w2 = evaluate_witness(4.0 * f, rep, ClassSpec.hrq(1.5, 2.0), 2.0)
    assert w2.value == pytest.approx(w1.value, rel=1e-12)
    assert w2.ratio == pytest.approx(w1.ratio, rel=1e-12)


def test_witness_p_equals_q_sanity():
    f, rep = fooling_function(np.zeros((0, 2)), 6, 2)
    w = evaluate_witness(f, rep, ClassSpec.hrq(1.5, 2.0), 2.0)
    assert w.predicted == pytest.approx(6 ** 0.5)  # exponent cancels at p = q
    assert w.value > 0


def test_witness_rejects_nonvanishing():
    f, rep = fooling_function(uniform_points(8, 2, np.random.default_rng(6)), 6, 2)
    rep.residual = rep.sup_lower  # corrupt
    with pytest.raises(InvalidWitnessError):
        evaluate_witness(f, rep, ClassSpec.hrq(1.5, 2.0), 2.0)


def test_witness_zero_function():
    f, rep = fooling_function(np.zeros((0, 1)), 3, 1)
    w = evaluate_witness(TrigPoly.zero(1), rep, ClassSpec.hrq(1.5, 2.0), 2.0)
    assert w.value == 0.0


def test_witness_structural_target():
    f, rep = fooling_function(np.zeros((0, 2)), 6, 2)
    w = evaluate_witness(f, rep, ClassSpec.hab(0.5, 0.0, 1.0), 2.0)
    assert w.value > 0
    assert w.class_scale is not None


# -- box witness -------------------------------------------------------------------

def test_box_witness_tiny():
    w = box_witness(np.array([[0.0]]), (1,), 2.0, 2.0, rng=np.random.default_rng(0))
    assert w.residual <= 1e-9
    assert w.predicted == 1.0  # q = p
    assert w.value == pytest.approx(1.0)  # normalized in the same norm


def test_box_witness_q1_p2():
    rng = np.random.default_rng(1)
    pts = uniform_points(20, 2, rng)
    w = box_witness(pts, (3, 3), 1.0, 2.0, rng=np.random.default_rng(2))
    assert w.predicted == pytest.approx(49 ** 0.5)
    assert w.value > 0
    assert w.residual < 1e-9
    # support stays in the doubled box
    assert w.ratio > 0.01


def test_box_witness_infeasible():
    pts = uniform_points(3, 1, np.random.default_rng(3))
    with pytest.raises(InfeasibleError):
        box_witness(pts, (1,), 2.0, 2.0)


# -- coefficient-budget checks -------------------------------------------------------

def test_abeta_check_runs():
    f, rep = fooling_function(np.zeros((0, 2)), 6, 2)
    for beta in (1.0, 0.5):
        chk = abeta_block_check(rep, beta)
        assert chk.sp1_ok
        assert 0 < chk.max_block_ratio < 4.0
