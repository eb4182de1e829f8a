"""Exact first and second moments of subgraph counts in G(n, p), in log space."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .patterns import PatternGraph, clique


def log_comb(n, k) -> float:
    if k < 0 or k > n:
        return -math.inf
    k = min(k, n - k)
    if k <= 256:
        return _log_falling(n, k) - math.lgamma(k + 1)
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _log_falling(n: int, k: int) -> float:
    if k > n:
        return -math.inf
    if k <= 256:
        # direct sum: lgamma differences lose digits to cancellation at large n
        return math.fsum(math.log(n - i) for i in range(k))
    return math.lgamma(n + 1) - math.lgamma(n - k + 1)


def _log_p(p: float) -> float:
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    return math.log(p) if p > 0 else -math.inf


def log_expected_copies(h: PatternGraph, n: int, p: float) -> float:
    """``log E[X]`` with ``E[X] = C(n, k) p^l k! / aut(H)``."""
    lp = _log_p(p)
    if h.k > n:
        return -math.inf
    pw = h.num_edges * lp if h.num_edges else 0.0
    return _log_falling(n, h.k) - math.log(h.automorphisms) + pw


def expected_copies(h: PatternGraph, n: int, p: float) -> float:
    return math.exp(log_expected_copies(h, n, p))


def log_expected_cliques(n: int, k: int, p: float) -> float:
    lp = _log_p(p)
    return log_comb(n, k) + (math.comb(k, 2) * lp if k >= 2 else 0.0)


def expected_cliques(n: int, k: int, p: float) -> float:
    return math.exp(log_expected_cliques(n, k, p))


def log_expected_cycles(n: int, ell: int, p: float) -> float:
    """``log`` of ``(1/2) C(n, l) (l-1)! p^l``, the expected number of ``l``-cycles."""
    if ell < 3:
        raise ValueError("cycles have length >= 3")
    return _log_falling(n, ell) - math.log(2 * ell) + ell * _log_p(p)


def cycle_window_lengths(n: int, a: float, b: float) -> range:
    lo, hi = a * n ** (1 / 3), b * n ** (1 / 3)
    return range(max(3, math.floor(lo) + 1), math.ceil(hi))


def expected_cycles_in_window(n: int, a: float, b: float, p: float) -> float:
    """Expected number of cycles with length in ``(a n^{1/3}, b n^{1/3})``."""
    terms = [log_expected_cycles(n, ell, p) for ell in cycle_window_lengths(n, a, b)]
    return float(np.exp(logsumexp(terms))) if terms else 0.0


def solve_p_for_expected(h: PatternGraph, n: int, target: float = 1.0) -> float:
    """The ``p`` with ``E[X] = target`` (closed form, since ``E[X]`` is a monomial in ``p``)."""
    if h.num_edges == 0 or target <= 0:
        raise ValueError("need a pattern with edges and a positive target")
    lp = (math.log(target) - _log_falling(n, h.k) + math.log(h.automorphisms)) / h.num_edges
    if lp > 0:
        raise ValueError("target exceeds the count in the complete graph")
    return math.exp(lp)


def solve_clique_p(n: int, k: int, target: float = 1.0) -> float:
    return solve_p_for_expected(clique(k), n, target)


@dataclass(frozen=True)
class OverlapMoments:
    """Clique count moments; ``log_deltas[i]`` is ``log Delta_i`` for ``i = 2 .. k-1``."""

    n: int
    k: int
    p: float
    log_mean: float
    log_deltas: dict
    log_variance: float
    log_bound: float

    @property
    def mean(self) -> float:
        return math.exp(self.log_mean)

    @property
    def deltas(self) -> dict:
        return {i: math.exp(v) for i, v in self.log_deltas.items()}

    @property
    def delta_total(self) -> float:
        return math.exp(self.log_delta_total)

    @property
    def log_delta_total(self) -> float:
        vals = list(self.log_deltas.values())
        return float(logsumexp(vals)) if vals else -math.inf

    @property
    def variance(self) -> float:
        return math.exp(self.log_variance)

    @property
    def delta_ratio(self) -> float:
        """``sum Delta / (E X)^2``; small means the second moment method applies."""
        return math.exp(self.log_delta_total - 2 * self.log_mean)

    def delta_negligible(self, threshold: float = 0.1) -> bool:
        return self.delta_ratio < threshold

    def to_dict(self):
        return {"n": self.n, "k": self.k, "p": self.p, "log_mean": self.log_mean,
                "log_deltas": {str(i): v for i, v in self.log_deltas.items()},
                "log_variance": self.log_variance, "log_bound": self.log_bound,
                "delta_ratio": self.delta_ratio, "delta_negligible": self.delta_negligible()}


def clique_overlap_moments(n: int, k: int, p: float) -> OverlapMoments:
    """``E X``, ``Delta_i`` for ``i = 2..k-1``, exact ``Var X`` and the bound ``E X + sum Delta``.

    ``Delta_i = C(n,k) C(k,i) C(n-k,k-i) p^{2C(k,2) - C(i,2)}`` sums
    ``P(both present)`` over ordered pairs of cliques sharing ``i`` vertices.
    """
    if k < 2 or k > n:
        raise ValueError("need 2 <= k <= n")
    lp = _log_p(p)
    ek = math.comb(k, 2)
    log_mean = log_comb(n, k) + ek * lp
    log_deltas = {}
    for i in range(2, k):
        log_deltas[i] = (log_comb(n, k) + log_comb(k, i) + log_comb(n - k, k - i)
                         + (2 * ek - math.comb(i, 2)) * lp)
    # Var = E X (1 - p^{C(k,2)}) + sum_i Delta_i (1 - p^{C(i,2)})
    terms = [log_mean + _log1m_exp(ek * lp)]
    terms += [v + _log1m_exp(math.comb(i, 2) * lp) for i, v in log_deltas.items()]
    log_var = float(logsumexp(terms))
    log_bound = float(logsumexp([log_mean] + list(log_deltas.values())))
    return OverlapMoments(n, k, p, log_mean, log_deltas, log_var, log_bound)


def _log1m_exp(x: float) -> float:
    """``log(1 - e^x)`` for ``x <= 0``."""
    if x == 0:
        return -math.inf
    if x > -math.log(2):
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


def two_clique_deltas(n: int, k: int, p: float) -> dict:
    """``Delta_{i,j}``: summed probability that a ``k``-clique meeting the fixed
    disjoint cliques ``H'`` and ``H''`` in ``i`` and ``j`` vertices is present,
    given both are.  Keys ``(i, j)`` with ``i + j <= k``; values in log space."""
    if 2 * k > n:
        raise ValueError("need 2k <= n")
    lp = _log_p(p)
    ek = math.comb(k, 2)
    out = {}
    for i in range(k + 1):
        for j in range(k + 1 - i):
            out[(i, j)] = (log_comb(n - 2 * k, k - i - j) + log_comb(k, i) + log_comb(k, j)
                           + (ek - math.comb(i, 2) - math.comb(j, 2)) * lp)
    return out
