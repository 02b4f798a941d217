"""Membership normalizers for the smoothness classes.

Each normalizer returns the largest scale lambda with lambda*f inside the
named class, together with the per-layer or per-block ratios that pin down
the binding constraint.  Class constants are normalized to 1 throughout, so
every lambda is "up to the class's unspecified constant"; rate experiments
stay constant-free by fitting exponents instead.

Criteria:

  convolution class      exact: divide coefficients by the smoothness
                         multiplier and measure the quotient in L_q
  difference class       proxy: band-block norms against 2^(-r||s||_1)
                         (norm-equivalence criterion), or direct: sampled
                         mixed-difference ratios on a dyadic step ladder
  structural classes     per-layer (W-type) or per-block (H-type)
                         beta-quasi-norm budgets 2^(-a j) j^((d-1) b)
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import norms as nm
from .errors import UnsupportedRangeError
from .kernels import fr_hat
from .poly import TrigPoly

STEP_LADDER_LEVELS = 8  # dyadic steps 2*pi*2^(-i), i = 0..8
TINY_DENOMINATOR = 1e-12


@dataclass(frozen=True)
class ClassSpec:
    """A smoothness class tag with its parameters."""

    kind: str                   # "Wrq" | "Hrq" | "WabA" | "HabA"
    r: float | None = None
    q: float | None = None
    a: float | None = None
    b: float | None = None
    beta: float | None = None

    @classmethod
    def wrq(cls, r: float, q: float) -> "ClassSpec":
        return cls("Wrq", r=float(r), q=float(q))

    @classmethod
    def hrq(cls, r: float, q: float) -> "ClassSpec":
        return cls("Hrq", r=float(r), q=float(q))

    @classmethod
    def wab(cls, a: float, b: float, beta: float = 1.0) -> "ClassSpec":
        return cls("WabA", a=float(a), b=float(b), beta=float(beta))

    @classmethod
    def hab(cls, a: float, b: float, beta: float = 1.0) -> "ClassSpec":
        return cls("HabA", a=float(a), b=float(b), beta=float(beta))

    def validate(self):
        if self.kind in ("Wrq", "Hrq"):
            if self.r is None or self.r <= 0:
                raise ValueError(f"r must be positive, got {self.r}")
            if self.q is None or self.q < 1:
                raise ValueError(f"q must be >= 1, got {self.q}")
        elif self.kind in ("WabA", "HabA"):
            if self.a is None or self.a <= 0:
                raise ValueError(f"a must be positive, got {self.a}")
            if self.b is None:
                raise ValueError("b is required")
            if self.beta is None or not 0 < self.beta <= 1:
                raise ValueError(f"beta must lie in (0, 1], got {self.beta}")
        else:
            raise ValueError(f"unknown class kind {self.kind!r}")
        return self


@dataclass
class MembershipReport:
    """Admissible scale and its audit trail.

    lam * f satisfies every checked constraint, with equality at the binding
    one; scale contributions are listed per layer/block/step.  `criterion`
    records which route produced the number; all class constants are taken
    to be 1, so the scale is meaningful up to that constant.
    """

    lam: float
    criterion: str                       # "exact" | "proxy" | "direct" | "structural"
    binding: object = None
    ratios: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    notes: str = "constants of the class normalized to 1"


def _q_norm(f: TrigPoly, q: float, oversample: int) -> float:
    if math.isinf(q):
        return nm.sup_norm(f, oversample)
    if q == 2.0:
        return nm.norm_l2(f)
    return nm.lp_norm(f, q, oversample)


def scale_into_wrq(f: TrigPoly, r: float, q: float,
                   oversample: int = nm.DEFAULT_OVERSAMPLE) -> MembershipReport:
    """Largest lambda with lambda*f in the convolution class of smoothness r.

    The smoothness multiplier never vanishes, so phi with f = phi * F_r is
    recovered exactly by coefficient division and lambda = 1/||phi||_q.
    """
    r = float(r)
    q = float(q)
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if f.is_zero:
        return MembershipReport(lam=math.inf, criterion="exact",
                                flags=["zero function: any scale admissible"])
    phi = TrigPoly(f.d, f.freqs, f.coeffs / fr_hat(r, f.freqs), aliased=f.aliased)
    nq = _q_norm(phi, q, oversample)
    return MembershipReport(lam=1.0 / nq, criterion="exact",
                            binding="quotient-norm", ratios={"phi_q_norm": nq})


def wrq_reconstruct(f: TrigPoly, r: float) -> TrigPoly:
    """Multiply the quotient back by the smoothness multiplier (round-trip check)."""
    phi = TrigPoly(f.d, f.freqs, f.coeffs / fr_hat(r, f.freqs))
    return TrigPoly(f.d, phi.freqs, phi.coeffs * fr_hat(r, phi.freqs))


def scale_into_hrq(f: TrigPoly, r: float, q: float, mode: str = "proxy",
                   oversample: int = nm.DEFAULT_OVERSAMPLE) -> MembershipReport:
    """Largest lambda with lambda*f in the mixed-difference class.

    proxy:  lambda = min over active band blocks of 2^(-r||s||_1)/||A_s(f)||_q
            (the norm-equivalence criterion, constant normalized to 1).
    direct: lambda = 1/sup of ||Delta^l_t(e) f||_q / prod |t_j|^r over the
            dyadic step ladder and all axis subsets, including the identity
            term ||f||_q for the empty subset; l = [r] + 1.
    """
    r, q = float(r), float(q)
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if f.is_zero:
        return MembershipReport(lam=math.inf, criterion=mode,
                                flags=["zero function: any scale admissible"])
    if mode == "proxy":
        ratios = {}
        for s in nm.active_a_levels(f):
            blk = nm.a_block(f, s)
            if blk.is_zero:
                continue
            ratios[s] = _q_norm(blk, q, oversample) / 2.0 ** (-r * sum(s))
        if not ratios:
            return MembershipReport(lam=math.inf, criterion="proxy",
                                    flags=["no active blocks"])
        binding = max(ratios, key=lambda s: (ratios[s], s))
        return MembershipReport(lam=1.0 / ratios[binding], criterion="proxy",
                                binding=binding, ratios=ratios)
    if mode == "direct":
        l = int(r) + 1
        ladder = [2.0 * np.pi * 2.0 ** (-i) for i in range(STEP_LADDER_LEVELS + 1)]
        flags = []
        ratios = {"empty": _q_norm(f, q, oversample)}
        axes = list(range(f.d))
        for size in range(1, f.d + 1):
            for e in itertools.combinations(axes, size):
                for steps in itertools.product(ladder, repeat=size):
                    t = np.zeros(f.d)
                    for j, tj in zip(e, steps):
                        t[j] = tj
                    denom = float(np.prod([tj ** r for tj in steps]))
                    g = nm.mixed_difference(f, e, t, l)
                    val = _q_norm(g, q, oversample)
                    if denom < TINY_DENOMINATOR:
                        flags.append(f"unstable ratio at e={e}, t={steps}")
                    ratios[(e, steps)] = val / denom
        binding = max(ratios, key=lambda k: (ratios[k], str(k)))
        return MembershipReport(lam=1.0 / ratios[binding], criterion="direct",
                                binding=binding, ratios=ratios, flags=flags)
    raise ValueError(f"unknown mode {mode!r}")


def scale_into_structural(f: TrigPoly, spec: ClassSpec,
                          oversample: int = nm.DEFAULT_OVERSAMPLE) -> MembershipReport:
    """Largest lambda for the coefficient-budget classes.

    W-type: per layer j, |f_j|_{A_beta} <= 2^(-a j) max(j,1)^((d-1) b).
    H-type: the same budget per dyadic block at level sum j.
    """
    spec.validate()
    if spec.kind not in ("WabA", "HabA"):
        raise ValueError(f"structural normalizer got {spec.kind!r}")
    if f.is_zero:
        return MembershipReport(lam=math.inf, criterion="structural",
                                flags=["zero function: any scale admissible"])
    a, b, beta = spec.a, spec.b, spec.beta
    d = f.d
    ratios = {}
    if spec.kind == "WabA":
        for j in nm.active_layers(f):
            budget = 2.0 ** (-a * j) * max(j, 1) ** ((d - 1) * b)
            ratios[j] = nm.norm_abeta(nm.layer(f, j), beta) / budget
    else:
        for s in nm.active_block_levels(f):
            j = sum(s)
            budget = 2.0 ** (-a * j) * max(j, 1) ** ((d - 1) * b)
            ratios[s] = nm.norm_abeta(nm.delta_block(f, s), beta) / budget
    binding = max(ratios, key=lambda k: (ratios[k], str(k)))
    return MembershipReport(lam=1.0 / ratios[binding], criterion="structural",
                            binding=binding, ratios=ratios)


def scale_into(f: TrigPoly, spec: ClassSpec, mode: str = "proxy",
               oversample: int = nm.DEFAULT_OVERSAMPLE) -> MembershipReport:
    spec.validate()
    if spec.kind == "Wrq":
        return scale_into_wrq(f, spec.r, spec.q, oversample)
    if spec.kind == "Hrq":
        return scale_into_hrq(f, spec.r, spec.q, mode, oversample)
    return scale_into_structural(f, spec, oversample)


@dataclass
class EmbeddingReport:
    kind: str
    a: float
    b: float
    ratios: dict
    max_ratio: float


def check_embedding_inp1(f: TrigPoly, r: float, q: float, kind: str = "W",
                         oversample: int = nm.DEFAULT_OVERSAMPLE) -> EmbeddingReport:
    """Layer-norm decay of the class-normalized f against 2^(-(r-1/q)j) j^((d-1)b).

    The smoothness classes embed into the coefficient-budget classes with
    a = r - 1/q and b = 1 - 1/q (convolution type, 1 < q <= 2) or b = 1
    (difference type, 1 <= q <= 2); the reported max ratio is the empirical
    embedding constant for this f.
    """
    r, q = float(r), float(q)
    if kind == "W":
        if not (1.0 < q <= 2.0):
            raise UnsupportedRangeError(f"convolution-type embedding needs 1 < q <= 2, got {q}")
        b = 1.0 - 1.0 / q
        rep = scale_into_wrq(f, r, q, oversample)
    elif kind == "H":
        if not (1.0 <= q <= 2.0):
            raise UnsupportedRangeError(f"difference-type embedding needs 1 <= q <= 2, got {q}")
        b = 1.0
        rep = scale_into_hrq(f, r, q, "proxy", oversample)
    else:
        raise ValueError(f"kind must be 'W' or 'H', got {kind!r}")
    if r <= 1.0 / q:
        raise UnsupportedRangeError(f"embedding needs r > 1/q, got r={r}, q={q}")
    a = r - 1.0 / q
    if f.is_zero:
        return EmbeddingReport(kind, a, b, {}, 0.0)
    h = rep.lam * f
    ratios = {}
    for j in nm.active_layers(f):
        if j < 1:
            continue
        budget = 2.0 ** (-a * j) * max(j, 1) ** ((f.d - 1) * b)
        ratios[j] = nm.norm_a(nm.layer(h, j)) / budget
    return EmbeddingReport(kind, a, b, ratios, max(ratios.values(), default=0.0))
