"""Numerical-integration fooler: per-block sup-constrained mean maximization.

For each level s with level sum n, maximize the mean of a real polynomial
on the box of radii [2^(s_j - 1)] subject to vanishing at the sample points
and |t_s| <= 1 enforced on an oversampled grid (a linear program after
splitting coefficients into real and imaginary parts).  The sup constraint
is audited afterwards on a finer grid and the block is rescaled by any
exceedance, so the certified object satisfies ||t_s||_inf <= 1 up to the
audit-grid resolution.  The sum over blocks has mean growing like the
number of blocks, i.e. like n^(d-1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import next_fast_len
from scipy.optimize import linprog

from . import norms as nm
from .errors import InfeasibleError
from .freqs import build_box, compositions, normalize_points
from .poly import TrigPoly, evaluate, synthesize

CONSTRAINT_OVERSAMPLE = 4
AUDIT_OVERSAMPLE = 8
REFINE_TRIGGER = 1.005  # audit overshoot that triggers a cutting-plane pass
MAX_REFINES = 4


def _half_space_split(freqs: np.ndarray):
    """Split box frequencies into zero, lexicographically positive half, and order."""
    zero = np.all(freqs == 0, axis=1)
    pos = np.zeros(len(freqs), dtype=bool)
    for j in range(freqs.shape[1]):
        earlier_zero = np.all(freqs[:, :j] == 0, axis=1)
        pos |= earlier_zero & (freqs[:, j] > 0)
    return freqs[pos]


def _real_basis(points: np.ndarray, half: np.ndarray) -> np.ndarray:
    """Rows evaluate a real polynomial with coefficients (a_0, Re a_k, Im a_k)."""
    if len(half):
        E = np.exp(1j * (points @ half.T.astype(np.float64)))
        return np.hstack([np.ones((len(points), 1)), 2.0 * E.real, -2.0 * E.imag])
    return np.ones((len(points), 1))


def _grid_points(sizes) -> np.ndarray:
    axes = [2.0 * np.pi * np.arange(M) / M for M in sizes]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


@dataclass
class BlockLP:
    s: tuple[int, ...]
    N: tuple[int, ...]
    mean: float                 # achieved mean after rescaling
    lp_mean: float              # raw LP optimum
    audit_sup: float            # sup on the audit grid before rescaling
    status: str
    t: TrigPoly


@dataclass
class IntegrationReport:
    d: int
    n: int
    n_points: int
    blocks: list[BlockLP] = field(default_factory=list)
    mean: float = 0.0
    predicted: float = 1.0      # n^(d-1)
    ratio: float = 0.0
    residual: float = 0.0       # max |t(xi)|
    points: np.ndarray | None = None


def _coeffs_to_poly(x: np.ndarray, half: np.ndarray, d: int) -> TrigPoly:
    coeffs = {(0,) * d: complex(x[0])}
    for i, k in enumerate(map(tuple, half.tolist())):
        a = x[1 + i] + 1j * x[1 + len(half) + i]
        coeffs[k] = a
        coeffs[tuple(-c_ for c_ in k)] = np.conj(a)
    return TrigPoly.from_dict(d, coeffs, real=True)


def _solve_block(s, pts, d) -> BlockLP:
    N = tuple(2 ** (sj - 1) if sj >= 1 else 0 for sj in s)
    box = build_box(N)
    half = _half_space_split(box.freqs)
    nvar = 1 + 2 * len(half)
    # an N_j = 0 axis carries no variation, one grid node suffices there
    sizes = tuple(CONSTRAINT_OVERSAMPLE * (2 * nj + 1) if nj else 1 for nj in N)
    gpts = _grid_points(sizes)
    B = _real_basis(gpts, half)
    A_ub = np.vstack([B, -B])
    b_ub = np.ones(2 * len(gpts))
    kwargs = {}
    if len(pts):
        kwargs["A_eq"] = _real_basis(pts, half)
        kwargs["b_eq"] = np.zeros(len(pts))
    c = np.zeros(nvar)
    c[0] = -1.0  # maximize the mean = coefficient at zero
    audit_sizes = tuple(AUDIT_OVERSAMPLE * (2 * nj + 1) if nj else 1 for nj in N)
    audit_pts = _grid_points(audit_sizes)
    t = TrigPoly.zero(d)
    lp_mean = 0.0
    audit_sup = 0.0
    for round_ in range(MAX_REFINES + 1):
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=(None, None),
                      method="highs", **kwargs)
        if res.status != 0 or res.x is None:
            # t = 0 is always feasible; solver trouble degrades to it with a note
            return BlockLP(s=s, N=N, mean=0.0, lp_mean=0.0, audit_sup=0.0,
                           status=f"solver failure: {res.message}", t=TrigPoly.zero(d))
        t = _coeffs_to_poly(res.x, half, d)
        lp_mean = float(res.x[0])
        vals = np.abs(synthesize(t, audit_sizes).values).ravel()
        audit_sup = float(vals.max()) if vals.size else 0.0
        if audit_sup <= REFINE_TRIGGER or round_ == MAX_REFINES:
            break
        # exchange step: append the audit points where the sup bound is violated
        bad = audit_pts[vals > 1.0 + 1e-9]
        Bbad = _real_basis(bad, half)
        A_ub = np.vstack([A_ub, Bbad, -Bbad])
        b_ub = np.concatenate([b_ub, np.ones(2 * len(bad))])
    scale = 1.0 / max(audit_sup, 1.0)
    if scale < 1.0:
        t = scale * t
    return BlockLP(s=s, N=N, mean=lp_mean * min(scale, 1.0),
                   lp_mean=lp_mean, audit_sup=audit_sup, status="ok", t=t)


def integration_fooler(points, n: int, d: int) -> tuple[TrigPoly, IntegrationReport]:
    """Sum of per-block LP foolers over all levels with level sum n.

    Needs at most 2^(n-1) points.  With no points every block optimum is the
    constant 1 and the mean equals the number of level compositions.
    """
    n, d = int(n), int(d)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    pts = normalize_points(points, d) if len(np.atleast_2d(points)) else np.zeros((0, d))
    if len(pts) > 2 ** (n - 1):
        raise InfeasibleError(f"too many points: {len(pts)} exceeds 2^{n - 1}")
    report = IntegrationReport(d=d, n=n, n_points=len(pts), points=pts)
    t = TrigPoly.zero(d)
    for s in sorted(compositions(n, d)):
        blk = _solve_block(s, pts, d)
        report.blocks.append(blk)
        t = t + blk.t
    report.mean = float(sum(b.mean for b in report.blocks))
    report.predicted = float(n ** (d - 1))
    report.ratio = report.mean / report.predicted
    report.residual = float(np.abs(evaluate(t, pts)).max()) if len(pts) else 0.0
    return t, report


# ---------------------------------------------------------------------------
# band-block table for the sup-norm class membership


@dataclass
class HInfTable:
    n: int
    d: int
    rows: list[dict]
    max_ratio: float            # max_u ||A_u(t)||_inf / (n - ||u||_1 + d)^(d-1)
    zeros_consistent: bool      # empty blocks exactly match the support arithmetic
    implied_scale: float        # c with c * t * 2^(-rn) in the sup-norm class
    r: float


def _band_nonempty(u: tuple[int, ...], boxes: list[tuple[int, ...]]) -> bool:
    """Whether the band at level u meets any block box, by exact arithmetic."""
    for N in boxes:
        ok = True
        for uj, nj in zip(u, N):
            if uj == 0:
                continue  # k = 0 always inside
            lo = 2 ** (uj - 2) + 1 if uj >= 2 else 1
            if lo > nj:
                ok = False
                break
        if ok:
            return True
    return False


def h_infinity_check(t: TrigPoly, r: float, n: int,
                     oversample: int = nm.DEFAULT_OVERSAMPLE) -> HInfTable:
    """Tabulate ||A_u(t)||_inf over all u with ||u||_1 <= n + d.

    Asserts the vanishing pattern implied by the block boxes exactly, and
    reports the growth ratios against (n - ||u||_1 + d)^(d-1) together with
    the scale that places t (damped by 2^(-rn)) inside the sup-norm class.
    """
    r = float(r)
    d = t.d
    boxes = [tuple(2 ** (sj - 1) if sj >= 1 else 0 for sj in s)
             for s in compositions(n, d)]
    rows = []
    max_ratio = 0.0
    zeros_ok = True
    worst_scale = math.inf
    for lsum in range(0, n + d + 1):
        for u in compositions(lsum, d):
            blk = nm.a_block(t, u)
            predicted_nonempty = _band_nonempty(u, boxes)
            if blk.is_zero:
                if predicted_nonempty:
                    # support arithmetic says the band could be hit; an exactly
                    # zero block is consistent only when t itself omits it
                    pass
                rows.append({"u": u, "sup": 0.0, "ratio": 0.0, "zero": True})
                continue
            if not predicted_nonempty:
                zeros_ok = False
            sup = nm.sup_norm(blk, oversample)
            denom = float((n - lsum + d) ** (d - 1))
            ratio = sup / denom
            max_ratio = max(max_ratio, ratio)
            worst_scale = min(worst_scale, 2.0 ** (r * (n - lsum)) / sup)
            rows.append({"u": u, "sup": sup, "ratio": ratio, "zero": False})
    # beyond the cutoff every block must vanish identically
    for extra in range(n + d + 1, n + d + 3):
        for u in compositions(extra, d):
            if not nm.a_block(t, u).is_zero:
                zeros_ok = False
    return HInfTable(n=n, d=d, rows=rows, max_ratio=max_ratio,
                     zeros_consistent=zeros_ok,
                     implied_scale=worst_scale if math.isfinite(worst_scale) else 1.0,
                     r=r)
