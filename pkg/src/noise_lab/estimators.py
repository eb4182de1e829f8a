"""Monte Carlo engine: paired (omega, omega^eps) sampling, covariance and
conditional-probability estimators, and common-random-number eps sweeps.

Sample ``s`` draws its base configuration from ``RandomStream(seed, s)`` and
the noise for grid point ``j`` from lane ``j + 1`` of the same stream, so any
estimate is a pure function of ``(seed, sample range)``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Optional, Sequence

import numpy as np

from .core import RandomStream, check_eps, check_probability, chunk_ranges, map_chunks

STAT_TOL_SE = 4.0


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int
    seed: int

    def to_dict(self):
        return asdict(self)

    def within(self, target: float, k: float = STAT_TOL_SE) -> bool:
        return abs(self.value - target) <= k * self.stderr + 1e-15


@dataclass(frozen=True)
class Pin:
    """Coordinates forced to 1 (``ones``) or 0 (``zeros``) before noise."""

    ones: tuple = ()
    zeros: tuple = ()


@dataclass
class Outcomes:
    """Per-sample indicator outcomes.

    ``base[s]`` is ``f(omega_s)``; ``pinned[s, k]`` is ``f`` on ``omega_s``
    after applying pin ``k``; ``noised[s, k, j]`` is ``f`` on the pinned
    configuration after noise at ``eps_grid[j]``.
    """

    base: np.ndarray
    pinned: np.ndarray
    noised: np.ndarray
    inconclusive: int = 0

    @property
    def samples(self) -> int:
        return int(self.base.shape[0])

    @classmethod
    def concat(cls, parts: Sequence["Outcomes"]) -> "Outcomes":
        return cls(np.concatenate([o.base for o in parts]),
                   np.concatenate([o.pinned for o in parts]),
                   np.concatenate([o.noised for o in parts]),
                   sum(o.inconclusive for o in parts))


def dense_chunk(f, p: float, eps_grid: Sequence[float], pins: Sequence[Pin], seed: int,
                lo: int, hi: int) -> Outcomes:
    """Outcomes for samples ``lo..hi-1`` of a bit-vector function."""
    n, count, ne = f.arity, hi - lo, len(eps_grid)
    base = np.empty((count, n), dtype=bool)
    resample = np.empty((ne, count, n), dtype=bool)
    fresh = np.empty((ne, count, n), dtype=bool)
    for r, s in enumerate(range(lo, hi)):
        base[r] = RandomStream(seed, s).generator().random(n) < p
        for j, eps in enumerate(eps_grid):
            g = RandomStream(seed, s, j + 1).generator()
            resample[j, r] = g.random(n) < eps
            fresh[j, r] = g.random(n) < p
    f0 = np.asarray(f.evaluate(base), dtype=bool)
    pinned = np.empty((count, len(pins)), dtype=bool)
    noised = np.empty((count, len(pins), ne), dtype=bool)
    for k, pin in enumerate(pins):
        w = base
        if pin.ones or pin.zeros:
            w = base.copy()
            w[:, list(pin.ones)] = True
            w[:, list(pin.zeros)] = False
        pinned[:, k] = f.evaluate(w)
        for j in range(ne):
            noised[:, k, j] = f.evaluate(np.where(resample[j], fresh[j], w))
    return Outcomes(f0, pinned, noised)


def _chunk(f, p, eps_grid, pins, seed, lo, hi):
    if hasattr(f, "mc_chunk"):
        return f.mc_chunk(p, eps_grid, pins, seed, lo, hi)
    return dense_chunk(f, p, eps_grid, pins, seed, lo, hi)


def paired_outcomes(f, p: float, eps_grid: Sequence[float], samples: int, seed: int,
                    pins: Optional[Sequence[Pin]] = None, start: int = 0,
                    workers: Optional[int] = None) -> Outcomes:
    """Sample-index-parallel evaluation of ``f`` on paired configurations."""
    check_probability(p)
    eps_grid = [check_eps(e) for e in eps_grid]
    if samples < 1:
        raise ValueError("need at least one sample")
    pins = [Pin()] if pins is None else list(pins)
    job = partial(_chunk, f, p, eps_grid, pins, seed)
    return Outcomes.concat(map_chunks(job, chunk_ranges(samples, start), workers))


# -- statistics --------------------------------------------------------------

def _jackknife(z: np.ndarray, stat) -> tuple[float, float]:
    """Point value and jackknife stderr of ``stat`` applied to column means of ``z``."""
    z = np.asarray(z, dtype=float)
    n = z.shape[0]
    total = z.sum(axis=0)
    value = float(stat(total / n))
    if n < 2:
        return value, float("nan")
    loo = (total[None, :] - z) / (n - 1)
    theta = np.asarray(stat(loo.T), dtype=float)
    var = (n - 1) / n * float(np.sum((theta - theta.mean()) ** 2))
    return value, math.sqrt(max(var, 0.0))


def _mean_estimate(x: np.ndarray, seed: int) -> Estimate:
    x = np.asarray(x, dtype=float)
    n = x.size
    se = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    return Estimate(float(x.mean()), se, n, seed)


def _cov_stat(m):
    return m[2] - m[0] * m[1]


def covariance_from_pairs(x: np.ndarray, y: np.ndarray, seed: int) -> Estimate:
    z = np.column_stack([x, y, x * y]).astype(float)
    v, se = _jackknife(z, _cov_stat)
    return Estimate(v, se, int(z.shape[0]), seed)


def _corr_stat(m):
    with np.errstate(invalid="ignore", divide="ignore"):
        return (m[2] - m[0] * m[1]) / (m[0] * (1.0 - m[0]))


def correlation_from_pairs(x: np.ndarray, y: np.ndarray, seed: int) -> Estimate:
    """``Cov(f, f') / Var(f)`` with ``Var(f) = m(1-m)`` from the base samples."""
    z = np.column_stack([x, y, x * y]).astype(float)
    v, se = _jackknife(z, _corr_stat)
    return Estimate(v, se, int(z.shape[0]), seed)


@dataclass(frozen=True)
class CovarianceResult:
    estimate: Estimate
    degenerate: bool

    def to_dict(self):
        return {"estimate": self.estimate.to_dict(), "degenerate": self.degenerate}


def estimate_covariance(f, p: float, eps: float, samples: int, seed: int,
                        workers: Optional[int] = None) -> CovarianceResult:
    """Paired-sample estimate of ``Cov(f(omega), f(omega^eps))`` with jackknife stderr."""
    if samples < 100:
        raise ValueError("covariance estimation needs >= 100 samples")
    out = paired_outcomes(f, p, [eps], samples, seed, workers=workers)
    x, y = out.base, out.noised[:, 0, 0]
    degenerate = bool(np.all(x == x[0]) and np.all(y == y[0]))
    if degenerate:
        return CovarianceResult(Estimate(0.0, 0.0, samples, seed), True)
    return CovarianceResult(covariance_from_pairs(x, y, seed), False)


@dataclass(frozen=True)
class ConditionalResult:
    """``P(f(omega^eps)=1 | f(omega)=1)``, ``P(f=1)`` and their difference."""

    conditional: Estimate
    prob_one: Estimate
    gap: Estimate
    positives: int
    degenerate: bool

    def to_dict(self):
        return {"conditional": self.conditional.to_dict(), "prob_one": self.prob_one.to_dict(),
                "gap": self.gap.to_dict(), "positives": self.positives,
                "degenerate": self.degenerate}


def _ratio_stat(m):
    with np.errstate(invalid="ignore", divide="ignore"):
        return m[1] / m[0]


def _gap_stat(m):
    with np.errstate(invalid="ignore", divide="ignore"):
        return m[1] / m[0] - m[0]


def conditional_from_pairs(x: np.ndarray, y: np.ndarray, seed: int) -> ConditionalResult:
    x = np.asarray(x, dtype=float)
    z = np.column_stack([x, x * np.asarray(y, dtype=float)])
    n = z.shape[0]
    positives = int(x.sum())
    p1 = _mean_estimate(x, seed)
    if positives == 0 or positives == n:
        nan = Estimate(float("nan"), float("nan"), n, seed)
        if positives == 0:
            return ConditionalResult(nan, p1, nan, 0, True)
        # every base sample is positive: the conditional law is the noised marginal
        cond = _mean_estimate(z[:, 1], seed)
        gap = Estimate(cond.value - 1.0, cond.stderr, n, seed)
        return ConditionalResult(cond, p1, gap, positives, True)
    cv, cse = _jackknife(z, _ratio_stat)
    gv, gse = _jackknife(z, _gap_stat)
    return ConditionalResult(Estimate(cv, cse, n, seed), p1, Estimate(gv, gse, n, seed),
                             positives, False)


def estimate_conditional(f, p: float, eps: float, samples: int, seed: int,
                         min_positive: int = 100, budget_cap: int = 64,
                         workers: Optional[int] = None) -> ConditionalResult:
    """Ratio estimate of ``P(f(omega^eps)=1 | f(omega)=1)``.

    The sample count doubles until ``min_positive`` samples have
    ``f(omega) = 1`` or ``budget_cap * samples`` is reached.
    """
    check_eps(eps)
    cap = samples * budget_cap
    parts = [paired_outcomes(f, p, [eps], samples, seed, workers=workers)]
    total = samples
    while int(sum(o.base.sum() for o in parts)) < min_positive and total < cap:
        extra = min(total, cap - total)
        parts.append(paired_outcomes(f, p, [eps], extra, seed, start=total, workers=workers))
        total += extra
    out = Outcomes.concat(parts)
    res = conditional_from_pairs(out.base, out.noised[:, 0, 0], seed)
    if res.positives < min_positive and not res.degenerate:
        res = ConditionalResult(res.conditional, res.prob_one, res.gap, res.positives, True)
    return res


def estimate_probability(f, p: float, samples: int, seed: int,
                         pin: Optional[Pin] = None, workers: Optional[int] = None) -> Estimate:
    out = paired_outcomes(f, p, [0.0], samples, seed, pins=[pin or Pin()], workers=workers)
    return _mean_estimate(out.pinned[:, 0], seed)


# -- sweeps ------------------------------------------------------------------

SWEEP_HEADER = ["eps", "estimate", "stderr", "samples", "seed",
                "correlation", "correlation_stderr", "flip", "flip_stderr"]


@dataclass(frozen=True)
class SweepRow:
    eps: float
    covariance: Estimate
    correlation: Estimate
    flip: Estimate


@dataclass
class SweepResult:
    p: float
    rows: list[SweepRow]
    prob_one: Estimate
    crossing: Optional[dict] = field(default=None)

    @property
    def eps_grid(self) -> list[float]:
        return [r.eps for r in self.rows]

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for r in self.rows:
            c = r.covariance
            w.writerow([repr(r.eps), repr(c.value), repr(c.stderr), c.samples, c.seed,
                        repr(r.correlation.value), repr(r.correlation.stderr),
                        repr(r.flip.value), repr(r.flip.stderr)])
        return out.getvalue()

    @staticmethod
    def read_csv(text: str) -> list[dict]:
        rows = list(csv.DictReader(io.StringIO(text)))
        conv = {"samples": int, "seed": int}
        return [{k: conv.get(k, float)(v) for k, v in row.items()} for row in rows]

    def is_monotone(self, k: float = STAT_TOL_SE) -> bool:
        """Correlation nonincreasing along the grid up to ``k`` combined stderrs."""
        for a, b in zip(self.rows, self.rows[1:]):
            slack = k * math.hypot(a.correlation.stderr, b.correlation.stderr)
            if b.correlation.value > a.correlation.value + slack:
                return False
        return True


def sweep_from_outcomes(out: Outcomes, p: float, eps_grid: Sequence[float], seed: int,
                        pin_index: int = 0, threshold: float = 0.5) -> SweepResult:
    x = out.base
    rows = []
    for j, eps in enumerate(eps_grid):
        y = out.noised[:, pin_index, j]
        rows.append(SweepRow(float(eps), covariance_from_pairs(x, y, seed),
                             correlation_from_pairs(x, y, seed),
                             _mean_estimate(x != y, seed)))
    crossing = None
    for prev, row in zip([None] + rows[:-1], rows):
        if row.correlation.value < threshold:
            crossing = {"threshold": threshold, "eps": row.eps,
                        "previous_eps": None if prev is None else prev.eps}
            break
    return SweepResult(p, rows, _mean_estimate(x, seed), crossing)


def sweep_eps(f, p: float, eps_grid: Sequence[float], samples: int, seed: int,
              workers: Optional[int] = None, threshold: float = 0.5) -> SweepResult:
    """Covariance, normalised correlation and flip probability on an eps grid.

    All grid points share the same base samples (common random numbers).
    """
    grid = [check_eps(e) for e in eps_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("eps grid must be strictly increasing")
    out = paired_outcomes(f, p, grid, samples, seed, workers=workers)
    return sweep_from_outcomes(out, p, grid, seed, threshold=threshold)
