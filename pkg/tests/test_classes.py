import math

import numpy as np
import pytest

from hcross import norms as nm
from hcross.classes import (ClassSpec, check_embedding_inp1, scale_into,
                            scale_into_hrq, scale_into_structural,
                            scale_into_wrq, wrq_reconstruct)
from hcross.errors import UnsupportedRangeError
from hcross.freqs import build_qn
from hcross.poly import TrigPoly


def random_poly_on(freqset, rng):
    cs = rng.standard_normal(len(freqset)) + 1j * rng.standard_normal(len(freqset))
    return TrigPoly(freqset.d, freqset.freqs, cs)


# -- convolution class ---------------------------------------------------------

def test_wrq_single_low_frequency():
    # |multiplier(1)| = 1, so the quotient has unit norm and lambda = 1
    f = TrigPoly.monomial(1, (1,))
    rep = scale_into_wrq(f, 2.0, 2.0)
    assert rep.lam == pytest.approx(1.0)


def test_wrq_frequency_two():
    # |multiplier(2)| = 1/4, quotient coefficient has modulus 4, lambda = 1/4
    f = TrigPoly.monomial(1, (2,))
    rep = scale_into_wrq(f, 2.0, 2.0)
    assert rep.lam == pytest.approx(0.25)


def test_wrq_round_trip():
    rng = np.random.default_rng(0)
    f = random_poly_on(build_qn(5, 2), rng)
    back = wrq_reconstruct(f, 1.7)
    assert np.abs(back.coeffs - f.coeffs).max() <= 1e-12 * np.abs(f.coeffs).max()


def test_wrq_zero_function():
    rep = scale_into_wrq(TrigPoly.zero(1), 1.0, 2.0)
    assert math.isinf(rep.lam)


# -- difference class -----------------------------------------------------------

def test_hrq_proxy_single_mode():
    # only the level-1 block is active; lambda = 2^(-r)/||A_1(e^{ix})||_q
    f = TrigPoly.monomial(1, (1,))
    r, q = 1.5, 2.0
    rep = scale_into_hrq(f, r, q, "proxy")
    blk = nm.a_block(f, (1,))
    assert rep.lam == pytest.approx(2.0 ** (-r) / nm.norm_l2(blk))
    assert rep.binding == (1,)


def test_hrq_proxy_binding_block():
    # binding block maximizes 2^(r||s||_1) ||A_s(f)||_q
    f = TrigPoly.from_dict(1, {(1,): 1.0, (8,): 1.0})
    rep = scale_into_hrq(f, 1.0, 2.0, "proxy")
    assert sum(rep.binding) >= 3


def test_hrq_direct_constant():
    # differences kill constants; the identity term ||f||_q caps the scale
    f = TrigPoly.monomial(1, (0,), 2.0)
    rep = scale_into_hrq(f, 1.5, 2.0, "direct")
    assert rep.binding == "empty"
    assert rep.lam == pytest.approx(0.5)


def test_hrq_direct_vs_proxy_bounded_factor():
    # same function, two membership routes: ratios stay within a stable band
    rng = np.random.default_rng(1)
    factors = []
    for _ in range(5):
        f = random_poly_on(build_qn(6, 2), rng)
        lam_p = scale_into_hrq(f, 1.5, 2.0, "proxy").lam
        lam_d = scale_into_hrq(f, 1.5, 2.0, "direct").lam
        factors.append(lam_p / lam_d)
    assert max(factors) / min(factors) < 10.0


# -- structural classes ----------------------------------------------------------

def test_structural_single_mode():
    f = TrigPoly.monomial(1, (1,))
    for a in (0.5, 1.0, 2.0):
        rep = scale_into_structural(f, ClassSpec.wab(a, 0.0, 1.0))
        assert rep.lam == pytest.approx(2.0 ** (-a))


def test_structural_equality_case():
    # |f_j|_A = 2^(-aj) for all active layers: lambda is exactly 1
    a = 0.8
    f = TrigPoly.from_dict(1, {(1,): 2.0 ** (-a), (2,): 2.0 ** (-2 * a)})
    rep = scale_into_structural(f, ClassSpec.wab(a, 0.0, 1.0))
    assert rep.lam == pytest.approx(1.0)


def test_structural_h_implies_w_with_shifted_b():
    # per-layer quasi-norm superadditivity: |f_j|^beta <= sum_s |delta_s|^beta,
    # so the block-budget scale also meets the layer budget at b' = b + 1/beta
    rng = np.random.default_rng(2)
    for beta in (1.0, 0.5):
        f = random_poly_on(build_qn(5, 2), rng)
        a, b = 0.7, 0.3
        lam_h = scale_into_structural(f, ClassSpec.hab(a, b, beta)).lam
        h = lam_h * f
        for j in nm.active_layers(h):
            lhs = nm.norm_abeta(nm.layer(h, j), beta) ** beta
            rhs = sum(nm.norm_abeta(nm.delta_block(h, s), beta) ** beta
                      for s in nm.active_block_levels(nm.layer(h, j)))
            assert lhs <= rhs * (1 + 1e-9)
            budget = 2.0 ** (-a * j) * max(j, 1) ** ((f.d - 1) * (b + 1 / beta))
            count = len(nm.active_block_levels(nm.layer(h, j)))
            assert nm.norm_abeta(nm.layer(h, j), beta) <= budget * count ** (1 / beta) * (1 + 1e-9)


# -- homogeneity ------------------------------------------------------------------

def test_homogeneity_all_normalizers():
    rng = np.random.default_rng(3)
    f = random_poly_on(build_qn(4, 2), rng)
    for c in (3.0, 0.125, -2.5, 1.0 + 2.0j):
        for make in (lambda g: scale_into_wrq(g, 1.5, 2.0),
                     lambda g: scale_into_hrq(g, 1.5, 2.0, "proxy"),
                     lambda g: scale_into_hrq(g, 1.5, 2.0, "direct"),
                     lambda g: scale_into_structural(g, ClassSpec.wab(0.7, 0.2, 0.5)),
                     lambda g: scale_into_structural(g, ClassSpec.hab(0.7, 0.2, 1.0))):
            lam = make(f).lam
            lam_c = make(c * f).lam
            assert lam_c == pytest.approx(lam / abs(c), rel=1e-12)


# -- embeddings -------------------------------------------------------------------

def test_embedding_single_mode():
    f = TrigPoly.monomial(1, (1,))
    rep = check_embedding_inp1(f, 2.0, 2.0, "W")
    assert rep.a == pytest.approx(1.5)
    assert rep.b == pytest.approx(0.5)
    assert rep.max_ratio > 0 and math.isfinite(rep.max_ratio)


def test_embedding_zero_function():
    rep = check_embedding_inp1(TrigPoly.zero(2), 1.5, 2.0, "H")
    assert rep.max_ratio == 0.0


def test_embedding_ranges_enforced():
    f = TrigPoly.monomial(1, (1,))
    with pytest.raises(UnsupportedRangeError):
        check_embedding_inp1(f, 2.0, 1.0, "W")   # W needs q > 1
    with pytest.raises(UnsupportedRangeError):
        check_embedding_inp1(f, 2.0, 3.0, "H")   # q <= 2
    with pytest.raises(UnsupportedRangeError):
        check_embedding_inp1(f, 0.4, 2.0, "W")   # r > 1/q


def test_embedding_ratios_bounded_over_random_family():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(5):
        f = random_poly_on(build_qn(6, 2), rng)
        rep = check_embedding_inp1(f, 1.5, 2.0, "W")
        worst = max(worst, rep.max_ratio)
    assert worst < 50.0  # empirical constant, just pinned against blow-up


def test_dispatcher_and_validation():
    f = TrigPoly.monomial(1, (1,))
    assert scale_into(f, ClassSpec.wrq(2.0, 2.0)).lam == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ClassSpec.wrq(-1.0, 2.0).validate()
    with pytest.raises(ValueError):
        ClassSpec.hab(1.0, 0.0, 1.5).validate()
