"""Classical kernels: Fejer, de la Vallee Poussin, band blocks, and the
Bernoulli-type smoothness multiplier.

Coefficient profiles (per axis):

    fejer_hat(j, k)  = (1 - |k|/j)_+                   unit mean, peak value j
    vdp_hat(m, k)    = 2*fejer_hat(2m, k) - fejer_hat(m, k)
                       (1 on |k| <= m, linear ramp to 0 at |k| = 2m)
    a_hat(s, k)      = vdp_hat(2^(s-1), k) - vdp_hat(2^(s-2), k)  for s >= 2,
                       with a_hat(0, .) = indicator of k = 0 and
                       a_hat(1, .) = vdp_hat(1, .) - a_hat(0, .)

The band profile a_hat(s, .) vanishes for |k| <= 2^(s-2) and |k| >= 2^s and
the family telescopes: sum_{s<=S} a_hat(s, k) = vdp_hat(2^(S-1), k).

The smoothness multiplier fr_hat is the coefficient sequence of the
Bernoulli-type function 1 + 2*sum_k k^(-r) cos(kx - r*pi/2); it is exposed
only as a multiplier, never summed pointwise, which keeps every operation
on finitely supported coefficients exact.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .poly import TrigPoly

SING_TOL = 1e-6  # distance to multiples of 2*pi below which the closed form degrades


def _as_level_tuple(s, d=None):
    s = tuple(int(c) for c in np.atleast_1d(s))
    if d is not None and len(s) == 1 and d > 1:
        s = s * d
    return s


def fejer_hat(j: int, k) -> np.ndarray:
    """Triangular coefficient profile of the Fejer kernel of order j - 1."""
    j = int(j)
    if j < 1:
        raise ValueError(f"Fejer order parameter must be >= 1, got {j}")
    k = np.asarray(k, dtype=np.float64)
    return np.maximum(0.0, 1.0 - np.abs(k) / j)


def vdp_hat(m: int, k) -> np.ndarray:
    """Coefficient profile of the de la Vallee Poussin kernel V_m = 2K_{2m} - K_m."""
    m = int(m)
    if m < 1:
        raise ValueError(f"de la Vallee Poussin order must be >= 1, got {m}")
    return 2.0 * fejer_hat(2 * m, k) - fejer_hat(m, k)


def a_hat(s: int, k) -> np.ndarray:
    """Band profile of the block kernel at scalar level s."""
    s = int(s)
    if s < 0:
        raise ValueError(f"level must be nonnegative, got {s}")
    k = np.asarray(k, dtype=np.float64)
    if s == 0:
        return (k == 0).astype(np.float64)
    if s == 1:
        return vdp_hat(1, k) - (k == 0)
    return vdp_hat(2 ** (s - 1), k) - vdp_hat(2 ** (s - 2), k)


def a_hat_multi(s: Sequence[int], freqs: np.ndarray) -> np.ndarray:
    """Tensor band profile evaluated on (K, d) frequency rows."""
    s = _as_level_tuple(s)
    freqs = np.atleast_2d(freqs)
    out = np.ones(len(freqs))
    for j, sj in enumerate(s):
        out *= a_hat(sj, freqs[:, j])
    return out


def fr_hat(r: float, freqs: np.ndarray) -> np.ndarray:
    """Fourier multiplier of the smoothness convolution kernel.

    Per axis: 1 at k = 0 and |k|^(-r) * exp(-i*sign(k)*r*pi/2) otherwise;
    the multivariate multiplier is the product across axes.  Never zero,
    so division by it is always defined.
    """
    r = float(r)
    if r <= 0:
        raise ValueError(f"smoothness must be positive, got {r}")
    freqs = np.atleast_2d(np.asarray(freqs, dtype=np.int64))
    out = np.ones(len(freqs), dtype=np.complex128)
    for j in range(freqs.shape[1]):
        k = freqs[:, j]
        nz = k != 0
        axis = np.ones(len(freqs), dtype=np.complex128)
        axis[nz] = np.abs(k[nz]) ** (-r) * np.exp(-1j * np.sign(k[nz]) * r * np.pi / 2.0)
        out *= axis
    return out


# ---------------------------------------------------------------------------
# materialized polynomials (small tensors; heavy use stays on profiles/grids)


def _tensor_poly(axis_ks: list[np.ndarray], axis_cs: list[np.ndarray]) -> TrigPoly:
    d = len(axis_ks)
    grids_k = np.meshgrid(*axis_ks, indexing="ij")
    grids_c = np.meshgrid(*axis_cs, indexing="ij")
    freqs = np.stack([g.ravel() for g in grids_k], axis=-1)
    coeffs = np.ones(len(freqs))
    for g in grids_c:
        coeffs = coeffs * g.ravel()
    return TrigPoly(d, freqs, coeffs, real=True)


def fejer_poly(j, d: int | None = None) -> TrigPoly:
    """Tensor Fejer kernel as a TrigPoly; scalar j is broadcast across axes."""
    js = _as_level_tuple(j, d)
    if any(c < 1 for c in js):
        raise ValueError(f"Fejer order parameter must be >= 1, got {js}")
    axis_ks, axis_cs = [], []
    for ji in js:
        ks = np.arange(-(ji - 1), ji, dtype=np.int64)
        axis_ks.append(ks)
        axis_cs.append(fejer_hat(ji, ks))
    return _tensor_poly(axis_ks, axis_cs)


def vdp_poly(m, d: int | None = None) -> TrigPoly:
    ms = _as_level_tuple(m, d)
    axis_ks, axis_cs = [], []
    for mi in ms:
        if mi < 1:
            raise ValueError(f"de la Vallee Poussin order must be >= 1, got {mi}")
        ks = np.arange(-(2 * mi - 1), 2 * mi, dtype=np.int64)
        axis_ks.append(ks)
        axis_cs.append(vdp_hat(mi, ks))
    return _tensor_poly(axis_ks, axis_cs)


def a_poly(s, d: int | None = None) -> TrigPoly:
    ss = _as_level_tuple(s, d)
    axis_ks, axis_cs = [], []
    for si in ss:
        hi = max(2 ** si - 1, 0)
        ks = np.arange(-hi, hi + 1, dtype=np.int64)
        axis_ks.append(ks)
        axis_cs.append(a_hat(si, ks))
    p = _tensor_poly(axis_ks, axis_cs)
    # the tensor builder keeps exact zeros out, so prune the dead band
    return p.restrict(np.abs(a_hat_multi(ss, p.freqs)) > 0)


# ---------------------------------------------------------------------------
# closed-form evaluation


def fejer_closed_axis(j: int, x) -> np.ndarray:
    """sin(jx/2)^2 / (j sin(x/2)^2), switching to the coefficient sum near
    the removable singularities at multiples of 2*pi."""
    j = int(j)
    if j < 1:
        raise ValueError(f"Fejer order parameter must be >= 1, got {j}")
    x = np.asarray(x, dtype=np.float64)
    wrapped = np.mod(x + np.pi, 2.0 * np.pi) - np.pi  # distance-to-0 representative
    near = np.abs(wrapped) < SING_TOL
    out = np.empty_like(x)
    safe = ~near
    xs = x[safe]
    out[safe] = np.sin(j * xs / 2.0) ** 2 / (j * np.sin(xs / 2.0) ** 2)
    if near.any():
        xn = x[near]
        acc = np.ones_like(xn)
        for k in range(1, j):
            acc = acc + 2.0 * (1.0 - k / j) * np.cos(k * xn)
        out[near] = acc
    return out


def fejer_closed(j, points) -> np.ndarray:
    """Tensor closed-form Fejer values at one point or an (m, d) array."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    js = _as_level_tuple(j, pts.shape[1])
    out = np.ones(len(pts))
    for axis, ji in enumerate(js):
        out *= fejer_closed_axis(ji, pts[:, axis])
    return out[0] if np.asarray(points).ndim == 1 else out
