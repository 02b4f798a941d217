"""Dyadic decompositions, norms and quasi-norms, mixed differences.

Block extraction is coefficientwise: delta_block restricts to a dyadic
block, a_block multiplies by the band profile, layer sums blocks of equal
level sum.  Norms: the absolute-coefficient norm and its beta-power
quasi-norm are exact sums; L2 is exact by Parseval; general L_p uses the
rectangle rule on an oversampled synthesis grid, which is exact for even
integer p once the grid resolves p times the degree; sup norms are grid
maxima (certified lower estimates) plus a golden-section polish.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.fft import next_fast_len

from . import kernels
from .freqs import level_vectors
from .poly import GridFn, TrigPoly, analyze, default_grid_sizes, evaluate, synthesize

DEFAULT_OVERSAMPLE = 8


# ---------------------------------------------------------------------------
# block extraction


def delta_block(f: TrigPoly, s) -> TrigPoly:
    """Restriction of f to the dyadic block rho(s)."""
    s = np.atleast_1d(np.asarray(s, dtype=np.int64))
    if f.is_zero:
        return f
    return f.restrict(np.all(level_vectors(f.freqs) == s[None, :], axis=1))


def a_block(f: TrigPoly, s) -> TrigPoly:
    """Coefficientwise multiplication by the tensor band profile at level s."""
    if f.is_zero:
        return f
    w = kernels.a_hat_multi(s, f.freqs)
    return TrigPoly(f.d, f.freqs, f.coeffs * w, aliased=f.aliased)


def layer(f: TrigPoly, j: int) -> TrigPoly:
    """Sum of dyadic blocks with level sum j."""
    j = int(j)
    if j < 0:
        raise ValueError(f"layer index must be nonnegative, got {j}")
    if f.is_zero:
        return f
    return f.restrict(level_vectors(f.freqs).sum(axis=1) == j)


def active_block_levels(f: TrigPoly) -> list[tuple[int, ...]]:
    """Levels s with delta_block(f, s) nonzero, lexicographically sorted."""
    if f.is_zero:
        return []
    levels = np.unique(level_vectors(f.freqs), axis=0)
    return [tuple(r) for r in levels.tolist()]


def active_layers(f: TrigPoly) -> list[int]:
    if f.is_zero:
        return []
    return sorted(set(level_vectors(f.freqs).sum(axis=1).tolist()))


def active_a_levels(f: TrigPoly) -> list[tuple[int, ...]]:
    """Levels s with a_block(f, s) nonzero.

    Per axis, a frequency k meets the bands of its own level and, when
    |k| exceeds the lower band edge, the next one up; the active set is the
    union of the per-frequency products.
    """
    if f.is_zero:
        return []
    lev = level_vectors(f.freqs)
    out = set()
    for row, krow in zip(lev.tolist(), np.abs(f.freqs).tolist()):
        choices = []
        for lj, kj in zip(row, krow):
            c = [lj]
            if kj > 0 and kj > 2 ** (lj - 1):
                c.append(lj + 1)
            choices.append(c)
        out.update(itertools.product(*choices))
    return sorted(out)


# ---------------------------------------------------------------------------
# norms


def norm_a(f: TrigPoly) -> float:
    """Sum of absolute coefficients."""
    return float(np.abs(f.coeffs).sum())


def norm_abeta(f: TrigPoly, beta: float) -> float:
    """(sum |c|^beta)^(1/beta); coincides with norm_a at beta = 1."""
    beta = float(beta)
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    if f.is_zero:
        return 0.0
    return float((np.abs(f.coeffs) ** beta).sum() ** (1.0 / beta))


def norm_l2(f: TrigPoly) -> float:
    """Exact via Parseval under the normalized torus measure."""
    return float(np.sqrt((np.abs(f.coeffs) ** 2).sum()))


def _grid_of(f: TrigPoly, oversample: int, pfactor: int = 1) -> GridFn:
    deg = f.degrees()
    sizes = tuple(max(int(oversample), pfactor) * next_fast_len(2 * int(dj) + 1)
                  for dj in deg)
    return synthesize(f, sizes)


def grid_lp(g: GridFn, p: float) -> float:
    """Rectangle-rule L_p of grid values under the normalized measure."""
    p = float(p)
    if p < 1:
        raise ValueError(f"p must be >= 1 for L_p, got {p} (use norm_abeta below 1)")
    a = np.abs(g.values)
    return float(np.mean(a ** p) ** (1.0 / p))


def grid_sup(g: GridFn) -> float:
    return float(np.abs(g.values).max()) if g.npoints else 0.0


@dataclass
class LpResult:
    value: float
    exact: bool          # rectangle rule is exact: p even and grid resolves p*deg
    oversample: int
    refinement_delta: float | None = None  # |value(2x grid) - value| / value, non-even p


def lp_norm(f: TrigPoly | GridFn, p: float, oversample: int = DEFAULT_OVERSAMPLE) -> float:
    return lp_norm_info(f, p, oversample).value


def lp_norm_info(f: TrigPoly | GridFn, p: float,
                 oversample: int = DEFAULT_OVERSAMPLE,
                 check_refinement: bool = False) -> LpResult:
    p = float(p)
    if p < 1:
        raise ValueError(f"p must be >= 1 for L_p, got {p} (use norm_abeta below 1)")
    if isinstance(f, GridFn):
        return LpResult(grid_lp(f, p), exact=False, oversample=0)
    if f.is_zero:
        return LpResult(0.0, exact=True, oversample=int(oversample))
    if p == 2.0:
        return LpResult(norm_l2(f), exact=True, oversample=0)
    g = _grid_of(f, oversample)
    value = grid_lp(g, p)
    even = p == int(p) and int(p) % 2 == 0
    deg = f.degrees()
    resolves = all(g.sizes[j] > p * int(deg[j]) for j in range(f.d))
    exact = bool(even and resolves)
    delta = None
    if check_refinement and not exact:
        g2 = _grid_of(f, 2 * oversample)
        v2 = grid_lp(g2, p)
        delta = abs(v2 - value) / max(v2, 1e-300)
    return LpResult(value, exact=exact, oversample=int(oversample), refinement_delta=delta)


@dataclass
class SupEstimate:
    """Certified grid lower estimate of the sup norm plus a polished value."""

    grid_value: float
    value: float          # max(grid value, golden-section polish)
    x_grid: np.ndarray
    x: np.ndarray
    sizes: tuple[int, ...]


def _golden_polish(f: TrigPoly, x0: np.ndarray, widths: np.ndarray,
                   sweeps: int = 2, iters: int = 40) -> tuple[np.ndarray, float]:
    """Coordinatewise golden-section maximization of |f| near x0."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x = x0.astype(np.float64).copy()
    for _ in range(sweeps):
        for axis in range(f.d):
            lo = x[axis] - widths[axis]
            hi = x[axis] + widths[axis]
            a, b = lo, hi
            c = b - invphi * (b - a)
            e = a + invphi * (b - a)
            xc, xe = x.copy(), x.copy()
            xc[axis], xe[axis] = c, e
            fc, fe = abs(evaluate(f, xc)), abs(evaluate(f, xe))
            for _ in range(iters):
                if fc > fe:
                    b, e, fe = e, c, fc
                    c = b - invphi * (b - a)
                    xc[axis] = c
                    fc = abs(evaluate(f, xc))
                else:
                    a, c, fc = c, e, fe
                    e = a + invphi * (b - a)
                    xe[axis] = e
                    fe = abs(evaluate(f, xe))
            x[axis] = c if fc > fe else e
    return x, float(abs(evaluate(f, x)))


def sup_estimate(f: TrigPoly, oversample: int = DEFAULT_OVERSAMPLE,
                 polish: bool = True) -> SupEstimate:
    """Grid max of |f| (argmax lexicographic in grid indices) with local polish."""
    if f.is_zero:
        z = np.zeros(f.d)
        return SupEstimate(0.0, 0.0, z, z, (0,) * f.d)
    g = _grid_of(f, oversample)
    a = np.abs(g.values)
    flat = int(np.argmax(a))           # first maximizer in C order = lex order
    idx = np.unravel_index(flat, g.sizes)
    x_grid = np.array([g.axis_points(j)[idx[j]] for j in range(f.d)])
    grid_value = float(a[idx])
    x, value = x_grid, grid_value
    if polish:
        widths = np.array([2.0 * np.pi / M for M in g.sizes])
        xp, vp = _golden_polish(f, x_grid, widths)
        if vp > value:
            x, value = xp, vp
    return SupEstimate(grid_value, value, x_grid, x, g.sizes)


def sup_norm(f: TrigPoly | GridFn, oversample: int = DEFAULT_OVERSAMPLE) -> float:
    if isinstance(f, GridFn):
        return grid_sup(f)
    return sup_estimate(f, oversample).value


@dataclass
class NormRequest:
    kind: str                      # "lp" | "sup" | "A" | "A_beta"
    p: float | None = None
    beta: float | None = None
    oversample: int = DEFAULT_OVERSAMPLE


def norm(f: TrigPoly | GridFn, req: NormRequest) -> float:
    if req.kind == "A":
        return norm_a(_as_poly(f))
    if req.kind == "A_beta":
        if req.beta is None:
            raise ValueError("A_beta norm needs beta")
        return norm_abeta(_as_poly(f), req.beta)
    if req.kind == "lp":
        if req.p is None:
            raise ValueError("L_p norm needs p")
        return lp_norm(f, req.p, req.oversample)
    if req.kind == "sup":
        return sup_norm(f, req.oversample)
    raise ValueError(f"unknown norm kind {req.kind!r}")


def _as_poly(f) -> TrigPoly:
    return analyze(f) if isinstance(f, GridFn) else f


# ---------------------------------------------------------------------------
# mixed differences


def mixed_difference(f: TrigPoly | GridFn, e: Sequence[int], t: Sequence[float],
                     l: int) -> TrigPoly | GridFn:
    """Mixed l-th forward difference over the axes in e, spectrally.

    Multiplies c(k) by (exp(i*k_j*t_j) - 1)^l per axis j in e, which is the
    exact action of the forward difference on trigonometric polynomials.
    The empty subset is the identity.
    """
    l = int(l)
    if l < 1:
        raise ValueError(f"difference order must be >= 1, got {l}")
    e = sorted(set(int(j) for j in e))
    if isinstance(f, GridFn):
        p = mixed_difference(analyze(f), e, t, l)
        return synthesize(p, f.sizes)
    if any(j < 0 or j >= f.d for j in e):
        raise ValueError(f"axis subset {e} out of range for dimension {f.d}")
    if not e or f.is_zero:
        return f
    t = np.asarray(t, dtype=np.float64).reshape(f.d)

    def mult(freqs):
        w = np.ones(len(freqs), dtype=np.complex128)
        for j in e:
            w *= (np.exp(1j * freqs[:, j] * t[j]) - 1.0) ** l
        return w

    return f.apply_multiplier(mult)


# ---------------------------------------------------------------------------
# comparison sums for block arrays


def comparison_sum(eps: Mapping[Sequence[int], float], u: float, v: float) -> float:
    """(sum_s eps_s^u * 2^(||s||_1 (u/v - 1)))^(1/u) over the finite support.

    u must be finite; v may be inf (then u/v = 0).
    """
    u = float(u)
    if not (1.0 <= u < math.inf):
        raise ValueError(f"u must lie in [1, inf), got {u}")
    v = float(v)
    if v < 1.0:
        raise ValueError(f"v must lie in [1, inf], got {v}")
    ratio = 0.0 if math.isinf(v) else u / v
    total = 0.0
    for s, val in eps.items():
        val = float(val)
        if val < 0:
            raise ValueError("block array entries must be nonnegative")
        if val == 0.0:
            continue
        n1 = float(sum(int(c) for c in s))
        total += val ** u * 2.0 ** (n1 * (ratio - 1.0))
    return total ** (1.0 / u)
