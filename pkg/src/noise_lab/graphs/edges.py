"""Edge configurations of G(n, p) over the C(n, 2) slots of K_n.

Slot index of the pair ``u < v`` is ``u*n - u*(u+1)/2 + (v - u - 1)``.

Small graphs (at most ``DENSE_SLOTS`` slots) are drawn bit by bit exactly as
:func:`noise_lab.core.sample_configuration` would draw them.  Larger graphs
use a sparse sampler with the same law: a Binomial(M, p) edge count followed
by a uniformly random set of that many slots.  Sparse noise draws the set of
slots resampled to 1 the same way, and decides removal of each present edge
with a per-slot hash uniform, so the per-slot law is that of the noise
operator.
"""
from __future__ import annotations

from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from ..core import (Configuration, RandomStream, _noise_bits, check_eps, check_probability,
                    hash_uniform, stream_key)

DENSE_SLOTS = 1 << 20


def num_slots(n: int) -> int:
    return n * (n - 1) // 2


def edge_index(u, v, n: int):
    """Slot index of the unordered pair ``{u, v}`` (vectorised)."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    a, b = np.minimum(u, v), np.maximum(u, v)
    if np.any(a == b):
        raise ValueError("loops are not edges")
    return a * n - a * (a + 1) // 2 + (b - a - 1)


def edge_pair(idx, n: int):
    """Inverse of :func:`edge_index`; returns ``(u, v)`` arrays with ``u < v``."""
    idx = np.asarray(idx, dtype=np.int64)
    m = 2 * n - 1
    u = np.floor((m - np.sqrt(np.maximum(m * m - 8.0 * idx, 0.0))) / 2).astype(np.int64)
    u = np.clip(u, 0, n - 2)
    start = u * n - u * (u + 1) // 2
    # correct float rounding by one step either way
    over = start > idx
    u = np.where(over, u - 1, u)
    start = u * n - u * (u + 1) // 2
    nxt = (u + 1) * n - (u + 1) * (u + 2) // 2
    under = idx >= nxt
    u = np.where(under, u + 1, u)
    start = u * n - u * (u + 1) // 2
    v = idx - start + u + 1
    return u, v


class EdgeConfig:
    """A graph on ``n`` labelled vertices, stored as sorted slot indices."""

    def __init__(self, n: int, edges: Iterable[int] = ()):
        if n < 2:
            raise ValueError("need n >= 2")
        e = np.unique(np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                                 dtype=np.int64))
        if e.size and (e[0] < 0 or e[-1] >= num_slots(n)):
            raise IndexError("edge slot out of range")
        e.flags.writeable = False
        self.n = int(n)
        self.edges = e

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "EdgeConfig":
        pairs = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        return cls(n, edge_index(pairs[:, 0], pairs[:, 1], n) if len(pairs) else [])

    @classmethod
    def from_configuration(cls, n: int, omega: Configuration) -> "EdgeConfig":
        if len(omega) != num_slots(n):
            raise ValueError("configuration length must be C(n, 2)")
        return cls(n, np.flatnonzero(omega.bits))

    @classmethod
    def complete(cls, n: int) -> "EdgeConfig":
        return cls(n, np.arange(num_slots(n)))

    def to_configuration(self) -> Configuration:
        bits = np.zeros(num_slots(self.n), dtype=bool)
        bits[self.edges] = True
        return Configuration(bits)

    def __len__(self):
        return int(self.edges.size)

    def __eq__(self, other):
        return isinstance(other, EdgeConfig) and self.n == other.n and np.array_equal(
            self.edges, other.edges)

    def __repr__(self):
        return f"EdgeConfig(n={self.n}, edges={len(self)})"

    @cached_property
    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        return edge_pair(self.edges, self.n)

    def has_edge(self, u: int, v: int) -> bool:
        i = int(edge_index(u, v, self.n))
        j = np.searchsorted(self.edges, i)
        return bool(j < self.edges.size and self.edges[j] == i)

    def any_of(self, indices) -> bool:
        idx = np.asarray(list(indices), dtype=np.int64)
        return bool(np.isin(idx, self.edges, assume_unique=False).any())

    def with_ones(self, indices) -> "EdgeConfig":
        return EdgeConfig(self.n, np.union1d(self.edges, np.asarray(list(indices), dtype=np.int64)))

    def with_zeros(self, indices) -> "EdgeConfig":
        return EdgeConfig(self.n, np.setdiff1d(self.edges, np.asarray(list(indices), dtype=np.int64)))

    @cached_property
    def degrees(self) -> np.ndarray:
        u, v = self.pairs
        return np.bincount(u, minlength=self.n) + np.bincount(v, minlength=self.n)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        u, v = self.pairs
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        data = np.ones(rows.size, dtype=np.int8)
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def components(self) -> tuple[int, np.ndarray]:
        return connected_components(self.adjacency, directed=False)

    def neighbors(self, v: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[v]:a.indptr[v + 1]]


def _uniform_subset(rng: np.random.Generator, total: int, m: int) -> np.ndarray:
    """Uniformly random ``m``-subset of ``range(total)``: the first ``m``
    distinct values of an i.i.d. uniform sequence."""
    if m <= 0:
        return np.empty(0, dtype=np.int64)
    if 2 * m > total:
        keep = np.ones(total, dtype=bool)
        keep[_uniform_subset(rng, total, total - m)] = False
        return np.flatnonzero(keep)
    chosen = np.empty(0, dtype=np.int64)
    while chosen.size < m:
        need = m - chosen.size
        seq = np.concatenate([chosen, rng.integers(0, total, size=need + need // 8 + 16)])
        _, first = np.unique(seq, return_index=True)
        chosen = seq[np.sort(first)][:m]
    return np.sort(chosen)


def _as_idx(indices) -> np.ndarray:
    return np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices,
                      dtype=np.int64)


def sample_edges(n: int, p: float, stream: RandomStream, ones=(), zeros=()) -> EdgeConfig:
    """Draw G(n, p), then force the slots in ``ones`` present and ``zeros`` absent."""
    check_probability(p)
    total = num_slots(n)
    rng = stream.generator()
    if total <= DENSE_SLOTS:
        bits = rng.random(total) < p
        bits[_as_idx(ones)] = True
        bits[_as_idx(zeros)] = False
        return EdgeConfig(n, np.flatnonzero(bits))
    edges = _uniform_subset(rng, total, int(rng.binomial(total, p)))
    ones, zeros = _as_idx(ones), _as_idx(zeros)
    if ones.size:
        edges = np.union1d(edges, ones)
    if zeros.size:
        edges = np.setdiff1d(edges, zeros)
    return EdgeConfig(n, edges)


def noise_edges(g: EdgeConfig, p: float, eps: float, stream: RandomStream) -> EdgeConfig:
    """``omega^eps`` on edge slots: each slot resampled from Bernoulli(p) with probability eps."""
    check_probability(p)
    check_eps(eps)
    if eps == 0.0:
        return g
    total = num_slots(g.n)
    rng = stream.generator()
    if total <= DENSE_SLOTS:
        bits = np.zeros(total, dtype=bool)
        bits[g.edges] = True
        return EdgeConfig(g.n, np.flatnonzero(_noise_bits(rng, bits, p, eps)))
    # slots resampled to 1: i.i.d. Bernoulli(eps p)
    to_one = _uniform_subset(rng, total, int(rng.binomial(total, eps * p)))
    # a slot not resampled to 1 is resampled to 0 w.p. eps(1-p) / (1 - eps p)
    q = eps * (1 - p) / (1 - eps * p) if eps * p < 1 else 1.0
    survivors = g.edges[~np.isin(g.edges, to_one, assume_unique=True)]
    drop = hash_uniform(stream_key(stream), survivors) < q
    return EdgeConfig(g.n, np.union1d(survivors[~drop], to_one))


def largest_component(g: EdgeConfig) -> np.ndarray:
    """Vertex ids of the largest component (lowest label wins ties)."""
    _, labels = g.components
    sizes = np.bincount(labels)
    return np.flatnonzero(labels == int(np.argmax(sizes)))


def induced(g: EdgeConfig, vertices) -> EdgeConfig:
    """Subgraph keeping only edges with both ends in ``vertices`` (labels unchanged)."""
    keep = np.zeros(g.n, dtype=bool)
    keep[np.asarray(vertices, dtype=np.int64)] = True
    u, v = g.pairs
    return EdgeConfig(g.n, g.edges[keep[u] & keep[v]])
