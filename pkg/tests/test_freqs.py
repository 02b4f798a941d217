import numpy as np
import pytest

from hcross import freqs as fq


def brute_rho(s):
    """Independent enumeration of the dyadic block over a bounding box."""
    s = tuple(s)
    hi = max(2 ** max(s), 2)
    out = []
    for k in np.ndindex(*([2 * hi + 1] * len(s))):
        k = tuple(c - hi for c in k)
        ok = True
        for kj, sj in zip(k, s):
            lo = 2 ** (sj - 1) if sj >= 1 else 0  # [2^(s-1)] with integer part
            if not (lo <= abs(kj) < 2 ** sj):
                ok = False
                break
        if ok:
            out.append(k)
    return sorted(out)


def test_axis_level():
    assert [fq.axis_level(k) for k in [0, 1, -1, 2, 3, 4, 7, 8]] == [0, 1, 1, 2, 2, 3, 3, 4]


def test_level_vectors_matches_scalar():
    rng = np.random.default_rng(0)
    ks = rng.integers(-5000, 5000, size=(500, 3))
    expect = np.array([[fq.axis_level(c) for c in row] for row in ks])
    assert np.array_equal(fq.level_vectors(ks), expect)


def test_rho_zero_is_origin():
    r = fq.build_rho((0,))
    assert r.as_tuples() == [(0,)]


def test_rho_level_two():
    r = fq.build_rho((2,))
    assert r.as_tuples() == [(-3,), (-2,), (2,), (3,)]
    assert brute_rho((2,)) == [(-3,), (-2,), (2,), (3,)]


def test_rho_product_cardinality():
    r = fq.build_rho((1, 2))
    assert len(r) == 8
    assert r.as_tuples() == brute_rho((1, 2))


def test_rho_negative_level_rejected():
    with pytest.raises(ValueError):
        fq.build_rho((-1, 2))


def test_rho_cardinality_power_of_two():
    for s in [(0,), (3,), (1, 1), (2, 3), (0, 4), (3, 3, 3)]:
        assert len(fq.build_rho(s)) == 2 ** sum(sj for sj in s if sj >= 1)


def test_qn_d1():
    q = fq.build_qn(2, 1)
    assert q.as_tuples() == [(k,) for k in range(-3, 4)]


def test_qn_d2_small():
    q = fq.build_qn(1, 2)
    assert set(q.as_tuples()) == {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}


def test_qn_zero():
    for d in (1, 2, 3):
        assert fq.build_qn(0, d).as_tuples() == [(0,) * d]


def test_blocks_partition_box():
    # every frequency of a box lands in exactly one dyadic block
    box = fq.build_box((5, 9))
    lev = fq.level_vectors(box.freqs)
    seen = {}
    for k, s in zip(box.as_tuples(), map(tuple, lev.tolist())):
        seen.setdefault(s, []).append(k)
    total = 0
    for s, members in seen.items():
        blk = fq.build_rho(s)
        assert all(k in blk for k in members)
        total += len(members)
    assert total == len(box) == fq.box_cardinality((5, 9))


def test_blocks_disjoint():
    assert not (set(fq.build_rho((2, 1)).as_tuples())
                & set(fq.build_rho((1, 2)).as_tuples()))


def test_build_y_examples():
    assert fq.build_y(6, 2) == [(3, 3)]
    assert fq.build_y(9, 2) == [(3, 6), (6, 3)]
    assert fq.build_y(9, 3) == [(3, 3, 3)]
    assert fq.build_y(12, 2) == [(3, 9), (6, 6), (9, 3)]


def test_build_y_invalid_warns_empty():
    with pytest.warns(UserWarning):
        assert fq.build_y(7, 2) == []
    with pytest.warns(UserWarning):
        assert fq.build_y(3, 2) == []


def test_y_blocks_have_full_size():
    for s in fq.build_y(12, 2):
        assert len(fq.build_rho(s)) == 2 ** 12


def test_min_block_size_enumeration():
    # d=2, n=3: all four compositions give 2^3 = 8
    assert fq.min_block_size(3, 2) == 8
    assert fq.min_block_size(5, 2) == 2 ** 5


def test_box_cardinality():
    assert fq.box_cardinality((2,)) == 5
    assert fq.box_cardinality((1, 3)) == 3 * 7
    assert len(fq.build_box((1, 3))) == 21


def test_point_families_deterministic():
    rng = np.random.default_rng(7)
    a = fq.uniform_points(10, 2, np.random.default_rng(7))
    b = fq.uniform_points(10, 2, np.random.default_rng(7))
    assert np.array_equal(a, b)
    assert a.shape == (10, 2)
    assert (a >= 0).all() and (a < 2 * np.pi).all()
    lat = fq.lattice_points(8, 2)
    assert lat.shape == (8, 2)
    assert np.array_equal(lat, fq.lattice_points(8, 2))
    g = fq.grid_points(9, 2)
    assert g.shape == (9, 2)
