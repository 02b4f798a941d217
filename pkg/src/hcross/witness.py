"""Adversarial witness constructions for sampling-recovery lower bounds.

The engine: given sample points xi, build a trigonometric polynomial that
vanishes on all of them yet is provably large in the target norm while
small in the smoothness-class gauge.  Its norm after class normalization
is a certified lower bound for recovery from those points, since any
reconstruction map sees identical data (all zeros) for +h and -h.

Construction on a dyadic block: the evaluation matrix E[nu, k] =
exp(i<k, xi_nu>) has a null space of dimension at least |rho(s)| - m; we
take an orthonormal null-space basis, pick the candidate with the largest
grid sup among the basis columns and a batch of seeded random unit
combinations (peak concentration improves witness quality), normalize to
unit sup, and multiply by a Fejer kernel centered at the peak.  Summing
such blocks over the 3-separated levels of equal level sum n keeps the
pieces disjoint in dyadic-block terms and makes the sum large in L_p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import norms as nm
from .classes import (ClassSpec, scale_into_hrq, scale_into_structural,
                      scale_into_wrq)
from .errors import InfeasibleError, InvalidWitnessError
from .freqs import FreqSet, box_cardinality, build_box, build_rho, build_y, level_vectors, normalize_points
from .poly import TrigPoly, analyze, evaluate, poly_mul, synthesize
from .kernels import fejer_poly

N_RANDOM_COMBOS = 32
SELECT_OVERSAMPLE = 2      # cheap grid for candidate ranking
REFINE_OVERSAMPLE = 16     # certified estimate used for normalization
VANISH_RTOL = 1e-9
GRID_VALUE_CAP = 2 ** 24   # max tensor-grid values for any full-f sup estimate


@dataclass
class VanishingPoly:
    """A unit-sup polynomial on a frequency set, vanishing on a point set."""

    g: TrigPoly
    points: np.ndarray
    freqset: FreqSet
    x_star: np.ndarray
    sup_grid: float            # certified grid estimate (after normalization)
    sup_slack: float           # refined estimate minus grid estimate, relative
    residual: float            # max |g(xi)| after normalization
    ill_conditioned: bool
    null_dim: int
    n_candidates: int


def _null_space_basis(E: np.ndarray) -> tuple[np.ndarray, bool]:
    """Orthonormal null-space basis columns of E plus an ill-conditioning flag.

    Flags when some singular value sits within 1e-10 of the rank cutoff,
    i.e. the split into range and null space is numerically ambiguous.
    """
    m, K = E.shape
    if m == 0:
        return np.eye(K, dtype=np.complex128), False
    u, s, vh = scipy.linalg.svd(E, full_matrices=True)
    cutoff = max(m, K) * np.finfo(float).eps * (s[0] if len(s) else 0.0)
    rank = int((s > cutoff).sum())
    ill = bool(np.any(np.abs(s - cutoff) < 1e-10))
    return vh[rank:].conj().T, ill


def _batched_grid_sup(freqs: np.ndarray, columns: np.ndarray, d: int,
                      sizes: tuple[int, ...]) -> np.ndarray:
    """Grid sup of each coefficient column, via chunked batched inverse FFTs."""
    npts = int(np.prod(sizes))
    ncand = columns.shape[1]
    flat = np.ravel_multi_index(tuple(np.mod(freqs[:, j], sizes[j]) for j in range(d)),
                                sizes)
    chunk = max(1, int(GRID_VALUE_CAP // max(npts, 1)))
    sups = np.empty(ncand)
    for i in range(0, ncand, chunk):
        cols = columns[:, i:i + chunk].T  # (chunk, K)
        grids = np.zeros((cols.shape[0], npts), dtype=np.complex128)
        grids[:, flat] = cols
        vals = np.fft.ifftn(grids.reshape((cols.shape[0],) + sizes),
                            axes=tuple(range(1, d + 1)))
        sups[i:i + chunk] = np.abs(vals).reshape(cols.shape[0], -1).max(axis=1)
    return sups * npts


def vanishing_poly_on(freqset: FreqSet, points, rng: np.random.Generator | None = None,
                      n_random: int = N_RANDOM_COMBOS) -> VanishingPoly:
    """Unit-sup element of the span of freqset vanishing on the given points."""
    pts = normalize_points(points, freqset.d) if len(np.atleast_2d(points)) else \
        np.zeros((0, freqset.d))
    m, K = len(pts), len(freqset)
    if m >= K:
        raise InfeasibleError(
            f"need fewer points than frequencies: m={m}, |Q|={K}")
    if rng is None:
        rng = np.random.default_rng(0)
    freqs = freqset.freqs
    if m:
        E = np.exp(1j * (pts @ freqs.T.astype(np.float64)))
        basis, ill = _null_space_basis(E)
    else:
        basis, ill = np.eye(K, dtype=np.complex128), False
    nd = basis.shape[1]
    z = rng.standard_normal((nd, n_random)) + 1j * rng.standard_normal((nd, n_random))
    z /= np.linalg.norm(z, axis=0, keepdims=True)
    candidates = np.concatenate([basis, basis @ z], axis=1)

    deg = np.abs(freqs).max(axis=0) if K else np.zeros(freqset.d, int)
    from scipy.fft import next_fast_len
    sel_sizes = tuple(SELECT_OVERSAMPLE * next_fast_len(2 * int(dj) + 1) for dj in deg)
    sups = _batched_grid_sup(freqs, candidates, freqset.d, sel_sizes)
    win = int(np.argmax(sups))  # first maximizer on ties

    g = TrigPoly(freqset.d, freqs, candidates[:, win])
    est = nm.sup_estimate(g, oversample=REFINE_OVERSAMPLE)
    g = (1.0 / est.value) * g
    residual = float(np.abs(evaluate(g, pts)).max()) if m else 0.0
    return VanishingPoly(
        g=g, points=pts, freqset=freqset, x_star=est.x,
        sup_grid=est.grid_value / est.value,
        sup_slack=(est.value - est.grid_value) / est.value,
        residual=residual, ill_conditioned=ill,
        null_dim=nd, n_candidates=candidates.shape[1],
    )


def vanishing_poly(points, s, rng: np.random.Generator | None = None,
                   n_random: int = N_RANDOM_COMBOS) -> VanishingPoly:
    """Vanishing polynomial supported on the dyadic block rho(s)."""
    return vanishing_poly_on(build_rho(s), points, rng, n_random)


# ---------------------------------------------------------------------------
# the level-sum-n fooling function


@dataclass
class BlockRecord:
    s: tuple[int, ...]
    vanisher: VanishingPoly
    t: TrigPoly
    peak: float                 # |t_s(x*)|
    peak_ratio: float           # |t_s(x*)| / 2^n
    delta_sup_ratio: float      # max_u ||delta_u(t_s)||_inf / ||t_s||_inf estimate
    delta_sup_level: tuple[int, ...] | None


@dataclass
class FoolingReport:
    construction: str
    d: int
    n: int
    m: int
    blocks: list[BlockRecord] = field(default_factory=list)
    sup_lower: float = 0.0      # certified lower estimate of ||f||_inf
    residual: float = 0.0       # max_nu |f(xi_nu)|
    support_level_max: int = 0  # max level sum over the support
    block_owner_unique: bool = True
    points: np.ndarray | None = None

    @property
    def vanishes(self) -> bool:
        return self.residual <= VANISH_RTOL * self.sup_lower


def _product_support_mask(s: tuple[int, ...]):
    """Exact support bounds of (block polynomial) x (Fejer of order 2^(s-2)).

    Per axis the Minkowski sum of the block annulus and the kernel box is
    the annulus 2^(s_j-2) + 1 <= |k_j| <= 2^(s_j) + 2^(s_j-2) - 2.
    """
    los = [2 ** (sj - 2) + 1 for sj in s]
    his = [2 ** sj + 2 ** (sj - 2) - 2 for sj in s]

    def mask(freqs):
        ok = np.ones(len(freqs), dtype=bool)
        for j, (lo, hi) in enumerate(zip(los, his)):
            a = np.abs(freqs[:, j])
            ok &= (a >= lo) & (a <= hi)
        return ok

    return mask


def _qp2_block_check(t: TrigPoly, sup_t: float) -> tuple[float, tuple | None]:
    """Largest ||delta_u(t)||_inf relative to ||t||_inf over the support levels."""
    best, best_u = 0.0, None
    for u in nm.active_block_levels(t):
        piece = nm.delta_block(t, u)
        val = nm.sup_norm(piece, oversample=4)
        if val > best:
            best, best_u = val, u
    return (best / sup_t if sup_t > 0 else 0.0), best_u


def fooling_function(points, n: int, d: int,
                     rng: np.random.Generator | None = None,
                     check_blocks: bool = True) -> tuple[TrigPoly, FoolingReport]:
    """Sum of Fejer-localized vanishing polynomials over the 3-separated levels.

    Requires n divisible by 3 with n >= 3d, and at most 2^n/2 points (half
    the smallest block size at level sum n).  The result vanishes on the
    points, lives inside the step hyperbolic cross of order n + d, and hits
    each dyadic block from at most one summand.
    """
    n, d = int(n), int(d)
    pts = normalize_points(points, d) if len(np.atleast_2d(points)) else np.zeros((0, d))
    m = len(pts)
    if n % 3 != 0 or n < 3 * d:
        raise InfeasibleError(f"need n divisible by 3 and n >= {3 * d}, got n={n}")
    if m > 2 ** n // 2:
        raise InfeasibleError(f"too many points: m={m} exceeds 2^{n}/2")
    if rng is None:
        rng = np.random.default_rng(0)
    report = FoolingReport(construction="level-sum fooler", d=d, n=n, m=m, points=pts)
    f = TrigPoly.zero(d)
    owners: dict[tuple[int, ...], tuple[int, ...]] = {}
    for s in build_y(n, d):
        vp = vanishing_poly(pts, s, rng=rng)
        kernel = fejer_poly(tuple(2 ** (sj - 2) for sj in s)).translate(vp.x_star)
        t = poly_mul(vp.g, kernel, support=_product_support_mask(s))
        peak = float(abs(evaluate(t, vp.x_star)))
        ratio, lev = (0.0, None)
        if check_blocks:
            sup_t = nm.sup_norm(t, oversample=4)
            ratio, lev = _qp2_block_check(t, sup_t)
        rec = BlockRecord(s=s, vanisher=vp, t=t, peak=peak,
                          peak_ratio=peak / 2.0 ** n,
                          delta_sup_ratio=ratio, delta_sup_level=lev)
        report.blocks.append(rec)
        for u in nm.active_block_levels(t):
            if u in owners and owners[u] != s:
                report.block_owner_unique = False
            owners[u] = s
        f = f + t
    if not f.is_zero:
        report.support_level_max = int(level_vectors(f.freqs).sum(axis=1).max())
        if report.support_level_max > n + d:
            raise AssertionError("support escaped the order-(n+d) hyperbolic cross")
    # certified lower bound for ||f||_inf: exact evaluations at the block peaks,
    # refined by a memory-capped grid estimate
    peaks = np.array([b.vanisher.x_star for b in report.blocks]) if report.blocks \
        else np.zeros((0, d))
    lower = float(np.abs(evaluate(f, peaks)).max()) if len(peaks) else 0.0
    over = _capped_oversample(f)
    if over >= 2:
        lower = max(lower, nm.sup_estimate(f, oversample=over).value)
    report.sup_lower = lower
    report.residual = float(np.abs(evaluate(f, pts)).max()) if m else 0.0
    return f, report


def _capped_oversample(f: TrigPoly) -> int:
    from scipy.fft import next_fast_len
    base = np.prod([next_fast_len(2 * int(dj) + 1) for dj in f.degrees()],
                   dtype=np.float64)
    over = nm.DEFAULT_OVERSAMPLE
    while over >= 2 and base * over ** f.d > GRID_VALUE_CAP:
        over //= 2
    return over


# ---------------------------------------------------------------------------
# witness evaluation against a class


@dataclass
class WitnessReport:
    construction: str
    d: int
    n: int | None
    m: int
    q: float | None
    p: float
    spec: ClassSpec | None
    norm_p: float               # ||f||_p
    gauge: float                # max_s ||A_s(f)||_q, or the structural budget ratio
    value: float                # certified witness ||h||_p
    predicted: float            # the growth term the theory predicts
    ratio: float
    class_scale: float | None = None   # normalizer scale incl. class decay
    class_value: float | None = None   # class_scale * ||f||_p
    block_norms: dict = field(default_factory=dict)
    residual: float = 0.0
    extras: dict = field(default_factory=dict)


def _block_gauge(f: TrigPoly, q: float, oversample: int) -> tuple[float, dict]:
    table = {}
    for s in nm.active_a_levels(f):
        blk = nm.a_block(f, s)
        if blk.is_zero:
            continue
        if math.isinf(q):
            table[s] = nm.sup_norm(blk, oversample)
        elif q == 2.0:
            table[s] = nm.norm_l2(blk)
        else:
            table[s] = nm.lp_norm(blk, q, oversample)
    return (max(table.values()) if table else 0.0), table


def evaluate_witness(f: TrigPoly, report: FoolingReport, spec: ClassSpec, p: float,
                     oversample: int = nm.DEFAULT_OVERSAMPLE) -> WitnessReport:
    """Certified lower-bound value of the fooler f against a smoothness class.

    For the difference classes the witness is h = f / max_s ||A_s(f)||_q
    (the level-n gauge; its growth term is 2^(n(1/q-1/p)) n^((d-1)/p)); the
    scale carrying the class decay 2^(-rn) is reported alongside.  For the
    structural classes the witness is the normalizer scale times f with the
    growth term m^(1-1/p-1/beta-a) (log m)^((d-1)(b+1/p)).
    """
    spec.validate()
    p = float(p)
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not report.vanishes:
        raise InvalidWitnessError(
            f"fooler does not vanish on its points: residual {report.residual:.3e} "
            f"vs sup {report.sup_lower:.3e}")
    n, d, m = report.n, report.d, max(report.m, 2)
    norm_p = nm.lp_norm(f, p, oversample)
    out = WitnessReport(construction=report.construction, d=d, n=n, m=report.m,
                        q=spec.q, p=p, spec=spec, norm_p=norm_p, gauge=0.0,
                        value=0.0, predicted=1.0, ratio=0.0,
                        residual=report.residual)
    if spec.kind == "Hrq":
        gauge, table = _block_gauge(f, spec.q, oversample)
        out.gauge, out.block_norms = gauge, table
        out.value = norm_p / gauge if gauge > 0 else 0.0
        out.predicted = 2.0 ** (n * (1.0 / spec.q - 1.0 / p)) * n ** ((d - 1) / p)
        rep = scale_into_hrq(f, spec.r, spec.q, "proxy", oversample)
        out.class_scale = rep.lam
        out.class_value = rep.lam * norm_p
    elif spec.kind == "Wrq":
        rep = scale_into_wrq(f, spec.r, spec.q, oversample)
        out.gauge = 1.0 / rep.lam if rep.lam > 0 else math.inf
        out.value = rep.lam * norm_p
        out.predicted = 2.0 ** (n * (1.0 / spec.q - 1.0 / p))
        out.class_scale, out.class_value = rep.lam, rep.lam * norm_p
    else:
        rep = scale_into_structural(f, spec, oversample)
        out.gauge = 1.0 / rep.lam if rep.lam > 0 else math.inf
        out.value = rep.lam * norm_p
        out.predicted = (m ** (1.0 - 1.0 / p - 1.0 / spec.beta - spec.a)
                         * math.log(m) ** ((d - 1) * (spec.b + 1.0 / p)))
        out.class_scale, out.class_value = rep.lam, rep.lam * norm_p
    out.ratio = out.value / out.predicted if out.predicted > 0 else math.inf
    return out


# ---------------------------------------------------------------------------
# single-box witness


def box_witness(points, N, q: float, p: float,
                rng: np.random.Generator | None = None,
                oversample: int = nm.DEFAULT_OVERSAMPLE) -> WitnessReport:
    """Witness on a rectangular box: vanishing polynomial times a shifted Fejer.

    The product lands in the doubled box; normalized to the unit L_q ball,
    its L_p norm is reported against card(box)^(1/q-1/p).
    """
    N = tuple(int(c) for c in np.atleast_1d(N))
    box = build_box(N)
    pts = normalize_points(points, len(N)) if len(np.atleast_2d(points)) else \
        np.zeros((0, len(N)))
    if len(pts) > box_cardinality(N) // 2:
        raise InfeasibleError(
            f"too many points: m={len(pts)} exceeds half the box size {box_cardinality(N)}")
    vp = vanishing_poly_on(box, pts, rng)
    kernel = fejer_poly(tuple(nj + 1 for nj in N)).translate(vp.x_star)
    double = build_box(tuple(2 * nj for nj in N))

    def mask(freqs):
        return double.member_mask(freqs)

    t = poly_mul(vp.g, kernel, support=mask)
    tq = nm.norm_l2(t) if q == 2.0 else nm.lp_norm(t, q, oversample)
    h = (1.0 / tq) * t
    value = nm.lp_norm(h, p, oversample)
    theta = box_cardinality(N)
    predicted = theta ** (1.0 / q - 1.0 / p)
    residual = float(np.abs(evaluate(h, pts)).max()) if len(pts) else 0.0
    return WitnessReport(construction="box fooler", d=len(N), n=None, m=len(pts),
                         q=q, p=p, spec=None, norm_p=value, gauge=tq,
                         value=value, predicted=predicted,
                         ratio=value / predicted, residual=residual,
                         extras={"N": N, "theta": theta,
                                 "sup_slack": vp.sup_slack})


# ---------------------------------------------------------------------------
# coefficient-budget bookkeeping of the fooler blocks


@dataclass
class ABetaCheck:
    beta: float
    rows: list[dict]
    max_block_ratio: float      # max_s |t_s|_{A_beta} / 2^(n/beta)
    sp1_ok: bool                # |g|_A <= card(box)^(1/2) ||g||_2 on every block


def abeta_block_check(report: FoolingReport, beta: float) -> ABetaCheck:
    """Per-block quasi-norm budgets |t_s|_{A_beta} against 2^(n/beta), plus the
    constant-free coefficient-sum inequality on each block's bounding box."""
    beta = float(beta)
    if not 0 < beta <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    rows = []
    worst = 0.0
    sp1_ok = True
    for b in report.blocks:
        val = nm.norm_abeta(b.t, beta)
        bound = 2.0 ** (report.n / beta)
        worst = max(worst, val / bound)
        g = b.vanisher.g
        theta = box_cardinality(tuple(2 ** sj - 1 for sj in b.s))
        lhs, rhs = nm.norm_a(g), theta ** 0.5 * nm.norm_l2(g)
        if lhs > rhs * (1 + 1e-9):
            sp1_ok = False
        rows.append({"s": b.s, "abeta": val, "bound": bound, "ratio": val / bound,
                     "g_a_norm": lhs, "g_sp1_bound": rhs})
    return ABetaCheck(beta=beta, rows=rows, max_block_ratio=worst, sp1_ok=sp1_ok)
