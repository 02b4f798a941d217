"""Sparse trigonometric polynomials and their grid duals.

A TrigPoly is a finitely supported map from integer frequencies to complex
coefficients, f(x) = sum_k c(k) exp(i<k, x>).  A GridFn holds values on the
uniform tensor grid (2*pi*m_j/M_j).  The two are exchanged by FFT-based
synthesis/analysis, which is exact whenever every per-axis degree stays
below half the grid size; anything else is flagged as aliased and the flag
propagates through arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.fft import next_fast_len

from .freqs import FreqSet, lex_sort_rows, level_vectors

HERMITIAN_TOL = 1e-10
_EVAL_CHUNK = 4_000_000  # cap on points*coeffs per evaluation chunk


class TrigPoly:
    """Immutable sparse trigonometric polynomial on the torus."""

    __slots__ = ("d", "freqs", "coeffs", "real", "aliased", "_lookup")

    def __init__(self, d: int, freqs, coeffs, real: bool = False,
                 aliased: bool = False):
        d = int(d)
        freqs = np.asarray(freqs, dtype=np.int64).reshape(-1, d)
        coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
        if len(freqs) != len(coeffs):
            raise ValueError("frequency/coefficient length mismatch")
        if len(freqs):
            order = np.lexsort(tuple(freqs[:, j] for j in range(d - 1, -1, -1)))
            freqs, coeffs = freqs[order], coeffs[order]
            uniq, inverse = np.unique(freqs, axis=0, return_inverse=True)
            if len(uniq) != len(freqs):
                acc = np.zeros(len(uniq), dtype=np.complex128)
                np.add.at(acc, inverse, coeffs)
                freqs, coeffs = uniq, acc
            keep = coeffs != 0
            freqs, coeffs = freqs[keep], coeffs[keep]
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "real", bool(real))
        object.__setattr__(self, "aliased", bool(aliased))
        object.__setattr__(self, "_lookup", None)
        if real:
            self._enforce_hermitian()

    def __setattr__(self, name, value):
        raise AttributeError("TrigPoly is immutable")

    # -- construction -------------------------------------------------------

    @classmethod
    def from_dict(cls, d: int, mapping: Mapping[Sequence[int], complex],
                  real: bool = False) -> "TrigPoly":
        ks = np.array([tuple(k) for k in mapping.keys()], dtype=np.int64).reshape(-1, d)
        cs = np.array(list(mapping.values()), dtype=np.complex128)
        return cls(d, ks, cs, real=real)

    @classmethod
    def zero(cls, d: int) -> "TrigPoly":
        return cls(d, np.zeros((0, d), dtype=np.int64), np.zeros(0))

    @classmethod
    def monomial(cls, d: int, k: Sequence[int], c: complex = 1.0) -> "TrigPoly":
        return cls(d, np.array([tuple(k)], dtype=np.int64), np.array([c]))

    def _enforce_hermitian(self):
        table = self.to_dict()
        sym = {}
        worst = 0.0
        scale = max((abs(c) for c in table.values()), default=0.0)
        for k, c in table.items():
            mirror = np.conj(table.get(tuple(-ki for ki in k), 0.0))
            worst = max(worst, abs(c - mirror))
            sym[k] = 0.5 * (c + mirror)
        if scale > 0 and worst > HERMITIAN_TOL * scale:
            raise ValueError(
                f"real flag set but Hermitian symmetry violated by {worst:.3e} "
                f"(relative {worst / scale:.3e})")
        ks = np.array(list(sym.keys()), dtype=np.int64).reshape(-1, self.d)
        cs = np.array(list(sym.values()), dtype=np.complex128)
        if len(ks):
            order = np.lexsort(tuple(ks[:, j] for j in range(self.d - 1, -1, -1)))
            ks, cs = ks[order], cs[order]
            keep = cs != 0
            ks, cs = ks[keep], cs[keep]
        object.__setattr__(self, "freqs", ks)
        object.__setattr__(self, "coeffs", cs)

    # -- basic queries -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def to_dict(self) -> dict[tuple[int, ...], complex]:
        return {tuple(k): complex(c) for k, c in zip(self.freqs.tolist(), self.coeffs)}

    def coeff(self, k: Sequence[int]) -> complex:
        if self._lookup is None:
            object.__setattr__(self, "_lookup",
                               {tuple(f): i for i, f in enumerate(self.freqs.tolist())})
        i = self._lookup.get(tuple(int(c) for c in k))
        return complex(self.coeffs[i]) if i is not None else 0.0j

    def degrees(self) -> np.ndarray:
        """Per-axis maximum |k_j| over the support (zeros when empty)."""
        if self.is_zero:
            return np.zeros(self.d, dtype=np.int64)
        return np.abs(self.freqs).max(axis=0)

    def support_levels(self) -> np.ndarray:
        return level_vectors(self.freqs)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        if not isinstance(other, TrigPoly):
            return NotImplemented
        if other.d != self.d:
            raise ValueError("dimension mismatch")
        return TrigPoly(self.d,
                        np.concatenate([self.freqs, other.freqs], axis=0),
                        np.concatenate([self.coeffs, other.coeffs]),
                        real=self.real and other.real,
                        aliased=self.aliased or other.aliased)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-1.0) * other

    def __mul__(self, c) -> "TrigPoly":
        if isinstance(c, TrigPoly):
            return NotImplemented
        c = complex(c)
        return TrigPoly(self.d, self.freqs, self.coeffs * c,
                        real=self.real and c.imag == 0.0, aliased=self.aliased)

    __rmul__ = __mul__

    def __neg__(self) -> "TrigPoly":
        return (-1.0) * self

    def apply_multiplier(self, mult: Callable[[np.ndarray], np.ndarray]) -> "TrigPoly":
        """Coefficientwise multiplication by a function of the frequency rows."""
        if self.is_zero:
            return self
        return TrigPoly(self.d, self.freqs,
                        self.coeffs * np.asarray(mult(self.freqs)),
                        aliased=self.aliased)

    def restrict(self, where) -> "TrigPoly":
        """Keep coefficients selected by a mask array, callable, or FreqSet."""
        if self.is_zero:
            return self
        if isinstance(where, FreqSet):
            mask = where.member_mask(self.freqs)
        elif callable(where):
            mask = np.asarray(where(self.freqs), dtype=bool)
        else:
            mask = np.asarray(where, dtype=bool)
        return TrigPoly(self.d, self.freqs[mask], self.coeffs[mask],
                        real=self.real, aliased=self.aliased)

    def translate(self, x0) -> "TrigPoly":
        """The shift f(. - x0), applied exactly through coefficient phases."""
        x0 = np.asarray(x0, dtype=np.float64).reshape(self.d)
        phase = np.exp(-1j * (self.freqs @ x0))
        return TrigPoly(self.d, self.freqs, self.coeffs * phase, aliased=self.aliased)

    # -- evaluation ----------------------------------------------------------

    def __call__(self, points):
        return evaluate(self, points)


def evaluate(f: TrigPoly, points):
    """Evaluate sum_k c(k) exp(i<k, x>) at one point or an (m, d) array."""
    pts = np.asarray(points, dtype=np.float64)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != f.d:
        raise ValueError(f"points have dimension {pts.shape[1]}, expected {f.d}")
    out = np.zeros(len(pts), dtype=np.complex128)
    if not f.is_zero:
        kt = f.freqs.T.astype(np.float64)
        chunk = max(1, _EVAL_CHUNK // max(1, len(f.coeffs)))
        for i in range(0, len(pts), chunk):
            out[i:i + chunk] = np.exp(1j * (pts[i:i + chunk] @ kt)) @ f.coeffs
    return out[0] if single else out


@dataclass
class GridFn:
    """Function values on the uniform tensor grid x_m = 2*pi*m/M."""

    d: int
    sizes: tuple[int, ...]
    values: np.ndarray
    aliased: bool = False

    def __post_init__(self):
        self.sizes = tuple(int(s) for s in self.sizes)
        self.values = np.asarray(self.values, dtype=np.complex128).reshape(self.sizes)

    @property
    def npoints(self) -> int:
        return int(np.prod(self.sizes))

    def axis_points(self, j: int) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.sizes[j]) / self.sizes[j]


def synthesize(f: TrigPoly, sizes: Sequence[int]) -> GridFn:
    """Evaluate f on the tensor grid via an inverse FFT.

    The result is flagged aliased when some per-axis degree exceeds
    (M_j - 1)//2, in which case coefficients wrap modulo the grid and the
    round trip through analyze cannot recover them.
    """
    sizes = tuple(int(s) for s in np.atleast_1d(sizes))
    if len(sizes) != f.d:
        raise ValueError("grid rank must match polynomial dimension")
    if any(s < 1 for s in sizes):
        raise ValueError(f"grid sizes must be positive, got {sizes}")
    C = np.zeros(sizes, dtype=np.complex128)
    aliased = f.aliased
    if not f.is_zero:
        deg = f.degrees()
        aliased = aliased or any(int(deg[j]) > (sizes[j] - 1) // 2 for j in range(f.d))
        idx = tuple(np.mod(f.freqs[:, j], sizes[j]) for j in range(f.d))
        np.add.at(C, idx, f.coeffs)
    vals = np.fft.ifftn(C) * float(np.prod(sizes))
    return GridFn(f.d, sizes, vals, aliased=aliased)


def analyze(g: GridFn, support: FreqSet | Callable[[np.ndarray], np.ndarray] | None = None) -> TrigPoly:
    """Recover coefficients on the grid's natural frequency box.

    With `support` given, the output is restricted to it; this keeps the
    support bookkeeping exact when the true support is known a priori
    (products of polynomials, kernels with known bands).
    """
    C = np.fft.fftn(g.values) / float(np.prod(g.sizes))
    axes = [np.rint(np.fft.fftfreq(M) * M).astype(np.int64) for M in g.sizes]
    grids = np.meshgrid(*axes, indexing="ij")
    freqs = np.stack([a.ravel() for a in grids], axis=-1)
    coeffs = C.ravel()
    keep = coeffs != 0
    out = TrigPoly(g.d, freqs[keep], coeffs[keep], aliased=g.aliased)
    if support is not None:
        out = out.restrict(support)
    return out


def default_grid_sizes(f: TrigPoly, oversample: int = 1) -> tuple[int, ...]:
    """Smallest fast non-aliasing grid for f, scaled by the oversampling factor.

    The base size is next_fast_len(2*deg_j + 1) so that doubling `oversample`
    yields nested grids (monotone sup estimates).
    """
    deg = f.degrees()
    return tuple(int(oversample) * next_fast_len(2 * int(dj) + 1) for dj in deg)


def poly_mul(f: TrigPoly, g: TrigPoly,
             support: FreqSet | Callable[[np.ndarray], np.ndarray] | None = None) -> TrigPoly:
    """Product of two polynomials, computed in grid space on a non-aliasing grid.

    Degrees add under multiplication, so a grid with M_j > 2*(deg_f + deg_g)_j
    makes the round trip exact up to floating rounding.
    """
    if f.d != g.d:
        raise ValueError("dimension mismatch")
    if f.is_zero or g.is_zero:
        return TrigPoly.zero(f.d)
    deg = f.degrees() + g.degrees()
    sizes = tuple(next_fast_len(2 * int(dj) + 1) for dj in deg)
    vf = synthesize(f, sizes)
    vg = synthesize(g, sizes)
    prod = GridFn(f.d, sizes, vf.values * vg.values,
                  aliased=f.aliased or g.aliased)
    return analyze(prod, support=support)
