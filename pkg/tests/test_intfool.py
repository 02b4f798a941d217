import numpy as np
import pytest

from hcross.errors import InfeasibleError
from hcross.freqs import uniform_points
from hcross.intfool import h_infinity_check, integration_fooler
from hcross.poly import TrigPoly


def test_no_points_gives_constant_blocks():
    # unconstrained optimum per block is the constant 1; d=2 has n+1 blocks
    t, rep = integration_fooler(np.zeros((0, 2)), 3, 2)
    assert rep.mean == pytest.approx(4.0, abs=1e-6)
    assert all(b.status == "ok" for b in rep.blocks)
    assert t.coeff((0, 0)).real == pytest.approx(4.0, abs=1e-6)


def test_d1_single_zero():
    # maximize the mean over degree <= 2 with t(0) = 0, |t| <= 1
    t, rep = integration_fooler(np.array([[0.0]]), 2, 1)
    assert len(rep.blocks) == 1
    assert rep.mean > 0.2
    assert abs(t(np.array([0.0]))) < 1e-7
    assert rep.blocks[0].audit_sup <= 1.02


def test_vanishing_and_sup_audit():
    rng = np.random.default_rng(0)
    pts = uniform_points(8, 2, rng)
    t, rep = integration_fooler(pts, 4, 2)
    assert rep.mean > 0
    assert rep.residual < 1e-6
    for b in rep.blocks:
        assert b.audit_sup <= 1.02
        assert b.mean <= b.lp_mean + 1e-12


def test_too_many_points():
    pts = uniform_points(10, 2, np.random.default_rng(1))
    with pytest.raises(InfeasibleError):
        integration_fooler(pts, 3, 2)  # 2^2 = 4 < 10


def test_mean_growth_with_blocks():
    # empty point set: mean equals the composition count n+1 exactly
    for n in (2, 4):
        _, rep = integration_fooler(np.zeros((0, 2)), n, 2)
        assert rep.mean == pytest.approx(n + 1, abs=1e-5)


def test_hinf_zero_function():
    table = h_infinity_check(TrigPoly.zero(2), 1.5, 4)
    assert table.max_ratio == 0.0
    assert table.zeros_consistent


def test_hinf_table_support_pattern():
    rng = np.random.default_rng(2)
    pts = uniform_points(4, 2, rng)
    t, rep = integration_fooler(pts, 4, 2)
    table = h_infinity_check(t, 1.5, 4)
    assert table.zeros_consistent
    assert table.max_ratio > 0
    # blocks beyond the support cutoff vanish
    for row in table.rows:
        if sum(row["u"]) > rep.n + 2:
            assert row["zero"]
    assert 0 < table.implied_scale < np.inf


def test_hinf_single_block_contributions():
    # a single-block fooler only hits bands with u_j <= s_j + 1
    t, rep = integration_fooler(np.zeros((0, 1)), 3, 1)
    table = h_infinity_check(t, 1.0, 3)
    for row in table.rows:
        if not row["zero"]:
            assert row["u"][0] <= 4
