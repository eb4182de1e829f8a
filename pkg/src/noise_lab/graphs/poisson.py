"""Monte Carlo Chen–Stein diagnostics for subgraph copy counts."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import partial
from typing import Optional

import numpy as np
from scipy import stats

from ..core import RandomStream, check_probability, chunk_ranges, map_chunks
from .edges import sample_edges
from .properties import ContainsPattern

# non-degeneracy window for P(X = 0) and the largest acceptable P(I_W)
NONDEGENERATE_RANGE = (0.01, 0.99)
MAX_WITNESS_PROB = 0.05


@dataclass(frozen=True)
class PoissonDiagnostics:
    samples: int
    seed: int
    mean: float
    mean_stderr: float
    variance: float
    conditional_mean: float
    conditional_mean_stderr: float
    lam: float
    max_witness_prob: float
    tv_bound: float
    tv_bound_stderr: float
    tv_empirical: float
    tv_empirical_stderr: float
    prob_zero: float
    nondegenerate: bool
    small_witness_prob: bool
    degenerate: bool

    @property
    def preconditions_hold(self) -> bool:
        return self.nondegenerate and self.small_witness_prob and not self.degenerate

    def bound_respected(self, k: float = 4.0) -> bool:
        se = math.hypot(self.tv_bound_stderr, self.tv_empirical_stderr)
        return self.tv_empirical <= self.tv_bound + k * se

    def to_dict(self):
        d = asdict(self)
        d["preconditions_hold"] = self.preconditions_hold
        d["bound_respected"] = self.bound_respected()
        return d


def _count_chunk(prop: ContainsPattern, p: float, witness, seed: int, lo: int, hi: int):
    free = np.empty(hi - lo, dtype=np.int64)
    pinned = np.empty(hi - lo, dtype=np.int64)
    for r, s in enumerate(range(lo, hi)):
        g = sample_edges(prop.n, p, RandomStream(seed, s))
        free[r] = prop.count(g)
        pinned[r] = prop.count(g.with_zeros(witness)) if g.any_of(witness) else free[r]
    return free, pinned


def sample_counts(prop: ContainsPattern, p: float, samples: int, seed: int,
                  workers: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Copy counts ``X`` on ``omega`` and on ``omega`` with the canonical witness set to 0."""
    check_probability(p)
    witness = prop.canonical_witness()
    parts = map_chunks(partial(_count_chunk, prop, p, witness, seed),
                       chunk_ranges(samples), workers)
    return (np.concatenate([a for a, _ in parts]), np.concatenate([b for _, b in parts]))


def empirical_tv(counts: np.ndarray, lam: float) -> tuple[float, float]:
    """TV distance between the empirical law of ``counts`` and Po(lam), with a
    delta-method stderr (the sign pattern is treated as fixed)."""
    counts = np.asarray(counts, dtype=np.int64)
    n = counts.size
    top = int(counts.max()) if n else 0
    hist = np.bincount(counts, minlength=top + 1) / n
    pmf = stats.poisson.pmf(np.arange(top + 1), lam)
    diff = hist - pmf
    tail = float(stats.poisson.sf(top, lam))
    tv = 0.5 * (float(np.abs(diff).sum()) + tail)
    sign = np.sign(diff)
    per_sample = 0.5 * sign[counts]
    se = float(per_sample.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    return tv, se


def _bound_and_stderr(x: np.ndarray, extra: float) -> tuple[float, float]:
    """``Var/E - 1 + extra`` with a jackknife stderr."""
    x = np.asarray(x, dtype=float)
    n = x.size
    s1, s2 = x.sum(), (x * x).sum()

    def stat(a, b, m):
        mean = a / m
        var = b / m - mean * mean
        with np.errstate(invalid="ignore", divide="ignore"):
            return var / mean - 1 + extra

    value = float(stat(s1, s2, n))
    loo = stat(s1 - x, s2 - x * x, n - 1)
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return value, se


def diagnostics_from_counts(free: np.ndarray, pinned: np.ndarray, witness_size: int, p: float,
                            seed: int, lam: Optional[float] = None) -> PoissonDiagnostics:
    n = free.size
    mean = float(free.mean())
    maxprob = p ** witness_size
    degenerate = mean == 0.0
    if degenerate:
        nan = float("nan")
        return PoissonDiagnostics(n, seed, 0.0, 0.0, 0.0, float(pinned.mean()), nan, 0.0,
                                  maxprob, nan, nan, nan, nan, 1.0, False,
                                  maxprob <= MAX_WITNESS_PROB, True)
    lam = mean if lam is None else float(lam)
    bound, bound_se = _bound_and_stderr(free, 2 * maxprob)
    tv, tv_se = empirical_tv(free, lam)
    p0 = float(np.mean(free == 0))
    lo, hi = NONDEGENERATE_RANGE
    return PoissonDiagnostics(
        n, seed, mean, float(free.std(ddof=1) / math.sqrt(n)), float(free.var(ddof=1)),
        float(pinned.mean()), float(pinned.std(ddof=1) / math.sqrt(n)), lam, maxprob,
        bound, bound_se, tv, tv_se, p0, lo < p0 < hi, maxprob <= MAX_WITNESS_PROB, False)


def poisson_diagnostics(prop: ContainsPattern, p: float, samples: int, seed: int,
                        lam: Optional[float] = None, workers: Optional[int] = None
                        ) -> PoissonDiagnostics:
    """Sampled ``E X``, ``Var X``, ``E[X | omega_W* = 0]``, the Chen–Stein bound
    ``Var/E - 1 + 2 max P(I_W)`` and the empirical TV distance to Po(lam).

    ``lam`` defaults to the sample mean.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    free, pinned = sample_counts(prop, p, samples, seed, workers)
    return diagnostics_from_counts(free, pinned, prop.h.num_edges, p, seed, lam)


def bin_poisson_tv(trials: int, prob: float) -> float:
    """Exact TV distance between Bin(trials, prob) and Po(trials * prob)."""
    lam = trials * prob
    k = np.arange(trials + 1)
    diff = np.abs(stats.binom.pmf(k, trials, prob) - stats.poisson.pmf(k, lam))
    return 0.5 * (float(np.sort(diff).sum()) + float(stats.poisson.sf(trials, lam)))
