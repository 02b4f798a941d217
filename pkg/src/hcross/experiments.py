"""Experiment runners, rate fitting, and CSV reporting.

Each runner walks a configured range, builds the matching construction,
and emits one row per instance with the fixed schema

    experiment, d, n, m, q, p, r, a, b, beta, value, predicted_term, ratio, status

plus a rate fit of the witness values: log(value) regressed jointly on
(n*log 2, log n), giving a power exponent (base 2^n) and a log exponent.
With three or fewer distinct n the two regressors are nearly collinear, so
fits carry a conditioning warning rather than a confident log exponent.

All randomness flows from a single seed: per-instance generators are
spawned from it in configuration order, so identical configurations give
byte-identical CSV output (modulo the optional timestamp header).  Runners
sweeping n with uniform random points draw one master stream and use nested
prefixes (common random numbers), which keeps per-n instance hardness
correlated and the fitted exponents out of the pure seed-noise regime.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, fields

import numpy as np

from . import norms as nm
from .classes import ClassSpec
from .errors import ConfigError, InfeasibleError
from .freqs import grid_points, lattice_points, uniform_points
from .intfool import h_infinity_check, integration_fooler
from .witness import (abeta_block_check, box_witness, evaluate_witness,
                      fooling_function)

CSV_COLUMNS = ("experiment", "d", "n", "m", "q", "p", "r", "a", "b", "beta",
               "value", "predicted_term", "ratio", "status")

EXPERIMENTS = ("qpT1", "q1P2", "ST1", "qpL1", "inequalities")
POINT_FAMILIES = ("uniform", "lattice", "grid")
AUDIT_FAMILIES = ("sp1", "s4", "homogeneity", "theoremA", "inp1")


@dataclass
class ExperimentConfig:
    experiment: str = "qpT1"
    d: int = 2
    n_values: tuple[int, ...] = (6, 9, 12)
    m_values: tuple[int, ...] | None = None   # default: half the level-n block size
    q: float = 1.0
    p: float = 2.0
    r: float = 1.5
    a: float = 0.5
    b: float = 0.0
    beta: float = 1.0
    points: str = "uniform"
    seed: int = 0
    oversample: int = 8
    out: str | None = None
    timestamp: bool = True
    trials: int = 1000
    family: str = "sp1"
    lattice_gen: int | None = None

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}, "
                              f"expected one of {EXPERIMENTS}")
        if self.d < 1 or self.d > 3:
            raise ConfigError(f"dimension must be 1..3 at desk scale, got {self.d}")
        if not self.n_values:
            raise ConfigError("n_values must be nonempty")
        if self.points not in POINT_FAMILIES:
            raise ConfigError(f"unknown point family {self.points!r}")
        if self.experiment == "qpT1":
            if not (1.0 <= self.q <= self.p < math.inf and self.p > 1.0):
                raise ConfigError(
                    f"qpT1 needs 1 <= q <= p < inf with p > 1, got q={self.q}, p={self.p}")
            if not self.r > 1.0 / self.q:
                raise ConfigError(f"qpT1 needs r > 1/q, got r={self.r}, q={self.q}")
            if max(self.n_values) > 12 and self.d >= 2:
                raise ConfigError("desk-scale cap: n <= 12 for d >= 2")
        if self.experiment == "ST1":
            if not (0.0 < self.beta <= 1.0):
                raise ConfigError(f"ST1 needs beta in (0, 1], got {self.beta}")
            if not (2.0 <= self.p < math.inf):
                raise ConfigError(f"ST1 needs p in [2, inf), got {self.p}")
            if self.a <= 0:
                raise ConfigError(f"ST1 needs a > 0, got {self.a}")
        return self


_CONFIG_TYPES = {f.name: f for f in fields(ExperimentConfig)}


def _parse_value(key: str, raw: str, lineno: int, path: str):
    def bail(msg):
        raise ConfigError(f"{path}:{lineno}: {msg}")

    raw = raw.strip()
    if key in ("n_values", "m_values"):
        try:
            vals = tuple(int(v) for v in raw.replace(",", " ").split())
        except ValueError:
            bail(f"invalid integer list for {key}: {raw!r}")
        return vals or None
    if key in ("d", "seed", "oversample", "trials", "lattice_gen"):
        try:
            return int(raw)
        except ValueError:
            bail(f"invalid integer for {key}: {raw!r}")
    if key in ("q", "p", "r", "a", "b", "beta"):
        try:
            return float(raw)
        except ValueError:
            bail(f"invalid number for {key}: {raw!r}")
    if key == "timestamp":
        if raw.lower() in ("on", "true", "1", "yes"):
            return True
        if raw.lower() in ("off", "false", "0", "no"):
            return False
        bail(f"invalid boolean for {key}: {raw!r} (use on/off)")
    return raw


def parse_config(path: str) -> ExperimentConfig:
    """Flat key = value file, '#' comments, diagnostics carry line numbers."""
    cfg = ExperimentConfig()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.rstrip()!r}")
            key, raw = stripped.split("=", 1)
            key = key.strip()
            if key not in _CONFIG_TYPES:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            setattr(cfg, key, _parse_value(key, raw, lineno, path))
    return cfg


# ---------------------------------------------------------------------------
# rate fitting


@dataclass
class RateFit:
    alpha: float                 # power exponent in 2^n
    gamma: float                 # log-power exponent in n
    intercept: float
    residual: float              # RMS residual of the regression
    count: int
    conditioning_warning: bool

    def describe(self) -> str:
        warn = " [conditioning warning: log term weakly identified]" \
            if self.conditioning_warning else ""
        return (f"fit: alpha={self.alpha:.4f} gamma={self.gamma:.4f} "
                f"residual={self.residual:.2e} points={self.count}{warn}")


def fit_rate(ns, values) -> RateFit:
    """Regress log(value) on (n*log2, log n) with intercept."""
    ns = np.asarray(ns, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    keep = values > 0
    ns, values = ns[keep], values[keep]
    if len(ns) < 3:
        raise ValueError(f"rate fit needs at least 3 positive samples, got {len(ns)}")
    X = np.stack([np.ones_like(ns), ns * math.log(2.0), np.log(ns)], axis=1)
    y = np.log(values)
    coef, res, rank, sing = np.linalg.lstsq(X, y, rcond=None)
    fitted = X @ coef
    rms = float(np.sqrt(np.mean((fitted - y) ** 2)))
    distinct = len(set(ns.tolist()))
    cond = float(sing[0] / sing[-1]) if sing[-1] > 0 else math.inf
    warn = distinct <= 3 or cond > 1e6
    return RateFit(alpha=float(coef[1]), gamma=float(coef[2]),
                   intercept=float(coef[0]), residual=rms,
                   count=len(ns), conditioning_warning=warn)


# ---------------------------------------------------------------------------
# runners


def _points_for(cfg: ExperimentConfig, m: int, rng: np.random.Generator):
    if cfg.points == "uniform":
        return uniform_points(m, cfg.d, rng)
    if cfg.points == "lattice":
        return lattice_points(m, cfg.d, cfg.lattice_gen)
    return grid_points(m, cfg.d)


class _PointPlan:
    """Per-n point sets; uniform draws come as prefixes of one master stream."""

    def __init__(self, cfg: ExperimentConfig, ms: list[int], seed_child):
        self.cfg = cfg
        self.master = None
        if cfg.points == "uniform" and ms:
            self.master = uniform_points(max(ms), cfg.d,
                                         np.random.default_rng(seed_child))

    def points(self, m: int):
        if self.master is not None:
            return self.master[:m]
        return _points_for(self.cfg, m, np.random.default_rng(0))


def _row(experiment, cfg, **kw):
    row = {c: "" for c in CSV_COLUMNS}
    row["experiment"] = experiment
    row["d"] = cfg.d
    row["status"] = "ok"
    row.update(kw)
    return row


def _spawned(seed: int, count: int):
    return np.random.SeedSequence(seed).spawn(count)


def run_qpT1(cfg: ExperimentConfig):
    """Level-sum fooler witnesses against the difference class."""
    cfg.validate()
    rows, ns, values = [], [], []
    children = _spawned(cfg.seed, 1 + len(cfg.n_values))
    ms = [cfg.m_values[i] if cfg.m_values else 2 ** n // 2
          for i, n in enumerate(cfg.n_values)]
    plan = _PointPlan(cfg, ms, children[0])
    for i, n in enumerate(cfg.n_values):
        m = ms[i]
        base = _row("qpT1", cfg, n=n, m=m, q=cfg.q, p=cfg.p, r=cfg.r)
        try:
            pts = plan.points(m)
            f, rep = fooling_function(pts, n, cfg.d,
                                      rng=np.random.default_rng(children[1 + i]),
                                      check_blocks=False)
            w = evaluate_witness(f, rep, ClassSpec.hrq(cfg.r, cfg.q), cfg.p,
                                 oversample=cfg.oversample)
        except InfeasibleError as exc:
            base["status"] = f"skipped: {exc}"
            rows.append(base)
            continue
        base.update(value=w.value, predicted_term=w.predicted, ratio=w.ratio)
        if not rep.vanishes:
            base["status"] = "invalid-witness"
        rows.append(base)
        ns.append(n)
        values.append(w.value)
    fit = fit_rate(ns, values) if len(values) >= 3 else None
    return rows, fit


def run_q1P2(cfg: ExperimentConfig):
    """Integration foolers: achieved mean against n^(d-1)."""
    cfg.validate()
    rows, ns, values = [], [], []
    children = _spawned(cfg.seed, 1 + len(cfg.n_values))
    ms = [cfg.m_values[i] if cfg.m_values else 2 ** (n - 1)
          for i, n in enumerate(cfg.n_values)]
    plan = _PointPlan(cfg, ms, children[0])
    for i, n in enumerate(cfg.n_values):
        m = ms[i]
        base = _row("q1P2", cfg, n=n, m=m, q=math.inf, p=1.0, r=cfg.r)
        try:
            pts = plan.points(m)
            t, rep = integration_fooler(pts, n, cfg.d)
        except InfeasibleError as exc:
            base["status"] = f"skipped: {exc}"
            rows.append(base)
            continue
        failures = [b for b in rep.blocks if b.status != "ok"]
        if failures:
            base["status"] = f"lp-failures: {len(failures)} blocks"
        table = h_infinity_check(t, cfg.r, n, oversample=4)
        base.update(value=rep.mean, predicted_term=rep.predicted, ratio=rep.ratio)
        if not table.zeros_consistent:
            base["status"] = "band-support-violation"
        rows.append(base)
        ns.append(n)
        values.append(rep.mean)
    fit = fit_rate(ns, values) if len(values) >= 3 else None
    return rows, fit


def run_ST1(cfg: ExperimentConfig):
    """Level-sum fooler witnesses against the structural block class."""
    cfg.validate()
    rows, ns, values = [], [], []
    children = _spawned(cfg.seed, 1 + len(cfg.n_values))
    ms = [cfg.m_values[i] if cfg.m_values else 2 ** n // 2
          for i, n in enumerate(cfg.n_values)]
    plan = _PointPlan(cfg, ms, children[0])
    for i, n in enumerate(cfg.n_values):
        m = ms[i]
        base = _row("ST1", cfg, n=n, m=m, p=cfg.p, a=cfg.a, b=cfg.b, beta=cfg.beta)
        try:
            pts = plan.points(m)
            f, rep = fooling_function(pts, n, cfg.d,
                                      rng=np.random.default_rng(children[1 + i]),
                                      check_blocks=False)
            w = evaluate_witness(f, rep, ClassSpec.hab(cfg.a, cfg.b, cfg.beta), cfg.p,
                                 oversample=cfg.oversample)
            chk = abeta_block_check(rep, cfg.beta)
        except InfeasibleError as exc:
            base["status"] = f"skipped: {exc}"
            rows.append(base)
            continue
        base.update(value=w.value, predicted_term=w.predicted, ratio=w.ratio)
        if not chk.sp1_ok:
            base["status"] = "sp1-violation"
        rows.append(base)
        ns.append(n)
        values.append(w.value)
    fit = fit_rate(ns, values) if len(values) >= 3 else None
    return rows, fit


def run_qpL1(cfg: ExperimentConfig):
    """Box witnesses: n_values are per-axis box radii, m = half the box."""
    cfg.validate()
    rows = []
    children = _spawned(cfg.seed, 1 + len(cfg.n_values))
    ms, thetas = [], []
    for nv in cfg.n_values:
        thetas.append(int(np.prod([2 * nv + 1] * cfg.d)))
    ms = [cfg.m_values[i] if cfg.m_values else thetas[i] // 2
          for i in range(len(cfg.n_values))]
    plan = _PointPlan(cfg, ms, children[0])
    for i, nv in enumerate(cfg.n_values):
        N = (nv,) * cfg.d
        m = ms[i]
        base = _row("qpL1", cfg, n=nv, m=m, q=cfg.q, p=cfg.p)
        try:
            pts = plan.points(m)
            w = box_witness(pts, N, cfg.q, cfg.p,
                            rng=np.random.default_rng(children[1 + i]),
                            oversample=cfg.oversample)
        except InfeasibleError as exc:
            base["status"] = f"skipped: {exc}"
            rows.append(base)
            continue
        base.update(value=w.value, predicted_term=w.predicted, ratio=w.ratio)
        rows.append(base)
    return rows, None


# ---------------------------------------------------------------------------
# inequality audits


def _audit_sp1(cfg, rng):
    """Coefficient-sum bound |f|_A <= card(box)^(1/2) ||f||_2: constant-free."""
    from .freqs import box_cardinality, build_box
    worst = 0.0
    violations = 0
    for _ in range(cfg.trials):
        N = tuple(int(rng.integers(0, 5)) for _ in range(cfg.d))
        box = build_box(N)
        cs = rng.standard_normal(len(box)) + 1j * rng.standard_normal(len(box))
        lhs = float(np.abs(cs).sum())
        rhs = box_cardinality(N) ** 0.5 * float(np.sqrt((np.abs(cs) ** 2).sum()))
        ratio = lhs / rhs if rhs > 0 else 0.0
        worst = max(worst, ratio)
        if ratio > 1.0 + 1e-9:
            violations += 1
    return worst, violations


def _audit_s4(cfg, rng):
    """Power-sum step: sum |y|^beta <= (sum |y|)^beta M^(1-beta)."""
    worst = 0.0
    violations = 0
    for _ in range(cfg.trials):
        mlen = int(rng.integers(1, 50))
        y = rng.standard_normal(mlen) * 10.0 ** rng.integers(-4, 5)
        beta = float(rng.uniform(0.05, 1.0))
        lhs = float((np.abs(y) ** beta).sum())
        rhs = float(np.abs(y).sum() ** beta * mlen ** (1.0 - beta))
        ratio = lhs / rhs if rhs > 0 else 0.0
        worst = max(worst, ratio)
        if ratio > 1.0 + 1e-9:
            violations += 1
    return worst, violations


def _audit_homogeneity(cfg, rng):
    """lambda(c f) = lambda(f)/|c| for every normalizer, to 1e-12 relative."""
    from .classes import scale_into_hrq, scale_into_structural, scale_into_wrq
    from .freqs import build_qn
    from .poly import TrigPoly
    worst = 0.0
    violations = 0
    qn = build_qn(3, cfg.d)
    makers = (lambda g: scale_into_wrq(g, 1.5, 2.0).lam,
              lambda g: scale_into_hrq(g, 1.5, 2.0, "proxy").lam,
              lambda g: scale_into_hrq(g, 1.5, 2.0, "direct").lam,
              lambda g: scale_into_structural(g, ClassSpec.wab(0.7, 0.2, 0.5)).lam,
              lambda g: scale_into_structural(g, ClassSpec.hab(0.7, 0.2, 1.0)).lam)
    per = max(1, cfg.trials // len(makers))
    for make in makers:
        for _ in range(per):
            cs = rng.standard_normal(len(qn)) + 1j * rng.standard_normal(len(qn))
            f = TrigPoly(cfg.d, qn.freqs, cs)
            c = complex(rng.standard_normal() + 1j * rng.standard_normal())
            if abs(c) < 1e-3:
                c = 1.0 + 0.5j
            lam, lam_c = make(f), make(c * f)
            rel = abs(lam_c - lam / abs(c)) / (lam / abs(c))
            worst = max(worst, rel)
            if rel > 1e-12:
                violations += 1
    return worst, violations


def _audit_theorem_a(cfg, rng):
    """Hyperbolic-cross coefficient-sum bound: report the ratio table (has a constant)."""
    from .freqs import build_qn
    from .poly import TrigPoly
    rows = []
    for q in (1.5, 2.0):
        for n in range(2, 9):
            qn = build_qn(n, cfg.d)
            best = 0.0
            for _ in range(3):
                cs = rng.standard_normal(len(qn)) + 1j * rng.standard_normal(len(qn))
                t = TrigPoly(cfg.d, qn.freqs, cs)
                tq = nm.norm_l2(t) if q == 2.0 else nm.lp_norm(t, q, oversample=4)
                denom = 2.0 ** (n / q) * n ** ((cfg.d - 1) * (1.0 - 1.0 / q)) * tq
                best = max(best, nm.norm_a(t) / denom)
            rows.append((q, n, best))
    return rows


def _audit_inp1(cfg, rng):
    """Embedding-chain ratios for random polynomials (empirical constants)."""
    from .classes import check_embedding_inp1
    from .freqs import build_qn
    from .poly import TrigPoly
    qn = build_qn(5, cfg.d)
    worst = {"W": 0.0, "H": 0.0}
    for _ in range(max(1, cfg.trials // 100)):
        cs = rng.standard_normal(len(qn)) + 1j * rng.standard_normal(len(qn))
        f = TrigPoly(cfg.d, qn.freqs, cs)
        for kind in ("W", "H"):
            rep = check_embedding_inp1(f, 1.5, 2.0, kind)
            worst[kind] = max(worst[kind], rep.max_ratio)
    return worst


def run_inequalities(cfg: ExperimentConfig):
    """Seeded inequality audits; constant-free families hard-fail on violation."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    rows = []
    fams = AUDIT_FAMILIES if cfg.family == "all" else (cfg.family,)
    for fam in fams:
        if fam == "sp1":
            worst, bad = _audit_sp1(cfg, rng)
            rows.append(_row("audit-sp1", cfg, q=2.0, value=worst, predicted_term=1.0,
                             ratio=worst, status="ok" if bad == 0 else f"FAIL: {bad} violations"))
        elif fam == "s4":
            worst, bad = _audit_s4(cfg, rng)
            rows.append(_row("audit-s4", cfg, value=worst, predicted_term=1.0,
                             ratio=worst, status="ok" if bad == 0 else f"FAIL: {bad} violations"))
        elif fam == "homogeneity":
            worst, bad = _audit_homogeneity(cfg, rng)
            rows.append(_row("audit-homogeneity", cfg, value=worst, predicted_term=1e-12,
                             ratio=worst / 1e-12,
                             status="ok" if bad == 0 else f"FAIL: {bad} violations"))
        elif fam == "theoremA":
            for q, n, ratio in _audit_theorem_a(cfg, rng):
                rows.append(_row("audit-theoremA", cfg, n=n, q=q, value=ratio,
                                 predicted_term=1.0, ratio=ratio,
                                 status="ok (constant-bearing)"))
        elif fam == "inp1":
            worst = _audit_inp1(cfg, rng)
            for kind, val in worst.items():
                rows.append(_row(f"audit-inp1-{kind}", cfg, r=1.5, q=2.0, value=val,
                                 predicted_term=1.0, ratio=val,
                                 status="ok (constant-bearing)"))
        else:
            raise ConfigError(f"unknown audit family {fam!r}")
    return rows, None


RUNNERS = {"qpT1": run_qpT1, "q1P2": run_q1P2, "ST1": run_ST1,
           "qpL1": run_qpL1, "inequalities": run_inequalities}


# ---------------------------------------------------------------------------
# CSV


def format_cell(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if math.isinf(f):
        return "inf"
    return f"{f:.12g}"


def write_csv(rows, stream, timestamp: bool = True, fit: RateFit | None = None) -> None:
    if timestamp:
        import datetime
        stream.write(f"# generated {datetime.datetime.now().isoformat()}\n")
    stream.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        stream.write(",".join(format_cell(row.get(c, "")) for c in CSV_COLUMNS) + "\n")
    if fit is not None:
        stream.write(f"# {fit.describe()}\n")


def csv_text(rows, timestamp: bool = True, fit: RateFit | None = None) -> str:
    buf = io.StringIO()
    write_csv(rows, buf, timestamp=timestamp, fit=fit)
    return buf.getvalue()
