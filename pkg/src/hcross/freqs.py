"""Frequency-set combinatorics on Z^d.

Dyadic blocks, step hyperbolic crosses, rectangular boxes, and the
3-separated level sets driving the fooling constructions.  The block
rho(s) collects frequencies k with [2^(s_j - 1)] <= |k_j| < 2^(s_j) per
axis, so rho(0) = {0} and rho(1) = {-1, +1} on each axis, and the blocks
partition Z^d.  All sets are enumerated explicitly and sorted
lexicographically; that order fixes iteration and tie-breaking for the
whole package.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi


def axis_level(k: int) -> int:
    """Dyadic level of a scalar frequency: 0 for k = 0, else floor(log2|k|) + 1."""
    return int(abs(int(k)).bit_length())


def level_vector(k: Sequence[int]) -> tuple[int, ...]:
    return tuple(axis_level(c) for c in k)


def level_vectors(freqs: np.ndarray) -> np.ndarray:
    """Per-axis dyadic levels of an (K, d) integer frequency array."""
    a = np.abs(np.asarray(freqs, dtype=np.int64))
    # frexp exponent of a positive integer equals its bit length, exactly
    out = np.frexp(a.astype(np.float64))[1].astype(np.int64)
    out[a == 0] = 0
    return out


def lex_sort_rows(arr: np.ndarray) -> np.ndarray:
    if len(arr) == 0:
        return arr
    keys = tuple(arr[:, j] for j in range(arr.shape[1] - 1, -1, -1))
    return arr[np.lexsort(keys)]


@dataclass(frozen=True, eq=False)
class FreqSet:
    """A finite, duplicate-free, lexicographically sorted subset of Z^d."""

    d: int
    freqs: np.ndarray  # (K, d) int64, rows sorted lex
    tag: str = "custom"
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_rows(cls, d: int, rows: np.ndarray, tag: str = "custom") -> "FreqSet":
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, d)
        rows = np.unique(rows, axis=0) if len(rows) else rows
        rows = lex_sort_rows(rows)
        return cls(d=d, freqs=rows, tag=tag)

    @classmethod
    def from_iterable(cls, d: int, ks: Iterable[Sequence[int]], tag: str = "custom") -> "FreqSet":
        rows = np.array([tuple(k) for k in ks], dtype=np.int64).reshape(-1, d)
        return cls.from_rows(d, rows, tag)

    def __len__(self) -> int:
        return len(self.freqs)

    def _key_set(self) -> set:
        if not self._index:
            self._index["set"] = set(map(tuple, self.freqs.tolist()))
        return self._index["set"]

    def __contains__(self, k) -> bool:
        return tuple(int(c) for c in k) in self._key_set()

    def member_mask(self, rows: np.ndarray) -> np.ndarray:
        keys = self._key_set()
        return np.fromiter((tuple(r) in keys for r in rows.tolist()),
                           dtype=bool, count=len(rows))

    def union(self, other: "FreqSet") -> "FreqSet":
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        rows = np.concatenate([self.freqs, other.freqs], axis=0)
        return FreqSet.from_rows(self.d, rows, tag="custom")

    def as_tuples(self) -> list[tuple[int, ...]]:
        return [tuple(r) for r in self.freqs.tolist()]


def rho_axis(s: int) -> np.ndarray:
    """One-dimensional dyadic block {k : [2^(s-1)] <= |k| < 2^s}."""
    s = int(s)
    if s < 0:
        raise ValueError(f"dyadic level must be nonnegative, got {s}")
    if s == 0:
        return np.array([0], dtype=np.int64)
    ks = np.arange(2 ** (s - 1), 2 ** s, dtype=np.int64)
    return np.concatenate([-ks[::-1], ks])


def _product_rows(axis_sets: list[np.ndarray]) -> np.ndarray:
    grids = np.meshgrid(*axis_sets, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1).astype(np.int64)


def build_rho(s: Sequence[int]) -> FreqSet:
    """The dyadic block rho(s) for a level multi-index s."""
    s = tuple(int(c) for c in np.atleast_1d(s))
    if any(c < 0 for c in s):
        raise ValueError(f"dyadic level must be nonnegative, got {s}")
    rows = _product_rows([rho_axis(c) for c in s])
    return FreqSet(d=len(s), freqs=lex_sort_rows(rows), tag=f"rho{s}")


def compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    """All tuples of `parts` nonnegative integers summing to `total`, lex order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def build_qn(n: int, d: int) -> FreqSet:
    """Step hyperbolic cross Q_n: union of rho(s) over level sums ||s||_1 <= n."""
    n, d = int(n), int(d)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    blocks = []
    for j in range(n + 1):
        for s in compositions(j, d):
            blocks.append(_product_rows([rho_axis(c) for c in s]))
    rows = np.concatenate(blocks, axis=0)
    return FreqSet(d=d, freqs=lex_sort_rows(rows), tag=f"Qn({n})")


def build_box(N: Sequence[int]) -> FreqSet:
    """Rectangular box Pi(N, d) = {k : |k_j| <= N_j}."""
    N = tuple(int(c) for c in np.atleast_1d(N))
    if any(c < 0 for c in N):
        raise ValueError(f"box radii must be nonnegative, got {N}")
    rows = _product_rows([np.arange(-c, c + 1, dtype=np.int64) for c in N])
    return FreqSet(d=len(N), freqs=lex_sort_rows(rows), tag=f"box{N}")


def box_cardinality(N: Sequence[int]) -> int:
    return int(np.prod([2 * int(c) + 1 for c in np.atleast_1d(N)]))


def build_y(n: int, d: int) -> list[tuple[int, ...]]:
    """Levels with every coordinate a positive multiple of 3 and ||s||_1 = n.

    Returns the empty list (with a warning) when n is not divisible by 3 or
    n < 3d, since no such level exists.
    """
    n, d = int(n), int(d)
    if n % 3 != 0 or n < 3 * d:
        warnings.warn(
            f"Y({n},3) in dimension {d} is empty: need n divisible by 3 and n >= {3 * d}",
            stacklevel=2,
        )
        return []
    out = []
    for comp in compositions(n // 3 - d, d):
        out.append(tuple(3 * (c + 1) for c in comp))
    return sorted(out)


def min_block_size(n: int, d: int) -> int:
    """S_n: the smallest |rho(s)| over levels with ||s||_1 = n, by enumeration."""
    return min(len(build_rho(s)) for s in compositions(int(n), int(d)))


# ---------------------------------------------------------------------------
# point sets on the torus


def normalize_points(points, d: int | None = None) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if d is not None and pts.shape[1] != d:
        raise ValueError(f"points have dimension {pts.shape[1]}, expected {d}")
    return np.mod(pts, TWO_PI)


def uniform_points(m: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """m independent uniform points in [0, 2*pi)^d."""
    return rng.uniform(0.0, TWO_PI, size=(int(m), int(d)))


def lattice_points(m: int, d: int, gen: int | None = None) -> np.ndarray:
    """Rank-1 Korobov lattice {(i/m) * (1, g, g^2, ...) mod 1} scaled to the torus.

    The default generator is the odd integer nearest m/golden-ratio, nudged
    until coprime with m; any explicit generator is used as given.
    """
    m, d = int(m), int(d)
    if m <= 0:
        return np.zeros((0, d))
    if gen is None:
        gen = max(1, round(m * 0.6180339887498949))
        while np.gcd(gen, m) != 1:
            gen += 1
    z = np.array([pow(int(gen), j, m) if m > 1 else 0 for j in range(d)], dtype=np.int64)
    i = np.arange(m, dtype=np.int64)[:, None]
    return TWO_PI * ((i * z[None, :]) % m) / m


def grid_points(m: int, d: int) -> np.ndarray:
    """Tensor grid with floor(m^(1/d)) nodes per axis (at most m points total)."""
    m, d = int(m), int(d)
    if m <= 0:
        return np.zeros((0, d))
    per_axis = max(1, int(np.floor(m ** (1.0 / d) + 1e-9)))
    axes = [TWO_PI * np.arange(per_axis) / per_axis] * d
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)
