"""Monotone graph properties as oracles on :class:`EdgeConfig`.

Each property also plugs into the Monte Carlo engine through
:meth:`GraphProperty.mc_chunk`, which draws graphs with the sparse/dense
edge samplers instead of materialising ``C(n, 2)`` bits.
"""
from __future__ import annotations

import math
from collections import defaultdict
from typing import Optional, Sequence

import numpy as np

from ..core import RandomStream
from ..estimators import Outcomes, Pin
from ..fourier import BooleanFunction, MAX_EXACT_ARITY
from .counting import contains_copy, count_cliques, count_copies
from .edges import EdgeConfig, edge_index, noise_edges, num_slots, sample_edges
from .patterns import PatternGraph, clique

DEFAULT_CYCLE_BUDGET = 2_000_000


class GraphProperty:
    """A monotone increasing property of graphs on ``n`` vertices."""

    name = "property"
    direction = "increasing"
    witness_kind: Optional[str] = None

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("need n >= 2")
        self.n = int(n)

    @property
    def arity(self) -> int:
        return num_slots(self.n)

    @property
    def monotone(self) -> bool:
        return True

    def value(self, g: EdgeConfig) -> bool:
        raise NotImplementedError

    def __call__(self, g: EdgeConfig) -> int:
        return int(self.value(g))

    def canonical_witness(self) -> Optional[tuple]:
        return None

    def count(self, g: EdgeConfig) -> int:
        raise NotImplementedError(f"{self.name} has no counting statistic")

    def sample_edges(self, p: float, stream: RandomStream, ones=(), zeros=()) -> EdgeConfig:
        return sample_edges(self.n, p, stream, ones, zeros)

    def _evaluate_checked(self, g: EdgeConfig) -> tuple[bool, int]:
        """Value plus an inconclusive flag (0/1)."""
        return bool(self.value(g)), 0

    def mc_chunk(self, p: float, eps_grid: Sequence[float], pins: Sequence[Pin], seed: int,
                 lo: int, hi: int) -> Outcomes:
        count = hi - lo
        base = np.empty(count, dtype=bool)
        pinned = np.empty((count, len(pins)), dtype=bool)
        noised = np.empty((count, len(pins), len(eps_grid)), dtype=bool)
        bad = 0
        for r, s in enumerate(range(lo, hi)):
            g = sample_edges(self.n, p, RandomStream(seed, s))
            base[r], b = self._evaluate_checked(g)
            bad += b
            for k, pin in enumerate(pins):
                w = g
                if pin.ones:
                    w = w.with_ones(pin.ones)
                if pin.zeros:
                    w = w.with_zeros(pin.zeros)
                if w is g:
                    pinned[r, k] = base[r]
                else:
                    pinned[r, k], b = self._evaluate_checked(w)
                    bad += b
                for j, eps in enumerate(eps_grid):
                    noisy = noise_edges(w, p, eps, RandomStream(seed, s, j + 1))
                    noised[r, k, j], b = self._evaluate_checked(noisy)
                    bad += b
        return Outcomes(base, pinned, noised, bad)

    def as_boolean_function(self) -> "GraphBooleanFunction":
        return GraphBooleanFunction(self)

    def is_monotone_spot_check(self, p: float, trials: int, seed: int) -> bool:
        """Adding a random edge never turns the property off (random trials)."""
        for t in range(trials):
            rng = RandomStream(seed, t).generator()
            g = sample_edges(self.n, p, RandomStream(seed, t, 1))
            missing = int(rng.integers(0, self.arity))
            if self.value(g) and not self.value(g.with_ones([missing])):
                return False
        return True

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} n={self.n}>"


class GraphBooleanFunction(BooleanFunction):
    """Bit-vector view of a graph property over the ``C(n, 2)`` edge slots."""

    def __init__(self, prop: GraphProperty):
        super().__init__(prop.arity, monotone=prop.monotone, name=prop.name)
        self.prop = prop
        if self.arity <= 20:
            self.truth_table()

    def evaluate(self, x):
        x = np.asarray(x, dtype=bool)
        flat = x.reshape(-1, self.arity)
        out = np.fromiter((self.prop.value(EdgeConfig(self.prop.n, np.flatnonzero(row)))
                           for row in flat), dtype=bool, count=flat.shape[0])
        return out.reshape(x.shape[:-1])


# -- cycles with length in a window -----------------------------------------

class CycleSearchBudget(Exception):
    pass


def _two_core(vertices: np.ndarray, adj: dict) -> dict:
    """Peel degree-<=1 vertices; returns the 2-core adjacency (dict of sets)."""
    core = {v: set(adj[v]) for v in vertices.tolist()}
    stack = [v for v, nb in core.items() if len(nb) <= 1]
    while stack:
        v = stack.pop()
        if v not in core:
            continue
        for w in core.pop(v):
            nb = core.get(w)
            if nb is not None:
                nb.discard(v)
                if len(nb) <= 1:
                    stack.append(w)
    return core


def _kernel_chains(core: dict) -> tuple[list, list]:
    """Split a connected 2-core into branch vertices and the chains
    (internally degree-2 paths) between them: ``(a, b, length)``."""
    branch = [v for v, nb in core.items() if len(nb) >= 3]
    if not branch:
        return [], []
    branch_set = set(branch)
    chains, seen = [], set()
    for a in branch:
        for first in core[a]:
            if (a, first) in seen:
                continue
            prev, cur, length = a, first, 1
            while cur not in branch_set:
                nxt = next(w for w in core[cur] if w != prev)
                prev, cur, length = cur, nxt, length + 1
            seen.add((a, first))
            seen.add((cur, prev))
            chains.append((a, cur, length))
    return branch, chains


def _kernel_cycle_in_range(branch: list, chains: list, lo: float, hi: float, budget: int) -> bool:
    """Is there a simple cycle of length in ``(lo, hi)``?  Backtracking over the
    kernel multigraph; each cycle is rooted at its smallest branch vertex."""
    for a, b, length in chains:
        if a == b and lo < length < hi:
            return True
    out = defaultdict(list)
    for cid, (a, b, length) in enumerate(chains):
        if a != b:
            out[a].append((b, length, cid))
            out[b].append((a, length, cid))
    steps = 0
    for s in sorted(out):
        visited = {s}

        def dfs(v, dist, last_cid):
            nonlocal steps
            for w, length, cid in out[v]:
                steps += 1
                if steps > budget:
                    raise CycleSearchBudget
                if cid == last_cid:
                    continue
                d = dist + length
                if d >= hi:
                    continue
                if w == s:
                    if lo < d:
                        return True
                    continue
                if w in visited or w < s:
                    continue
                visited.add(w)
                if dfs(w, d, cid):
                    return True
                visited.discard(w)
            return False

        if dfs(s, 0, -1):
            return True
    return False


def has_cycle_length_in(g: EdgeConfig, lo: float, hi: float,
                        budget: int = DEFAULT_CYCLE_BUDGET) -> Optional[bool]:
    """Whether ``g`` has a simple cycle with ``lo < length < hi``.

    Returns ``None`` if some component exhausted the search budget and no
    qualifying cycle was found elsewhere.
    """
    if len(g) == 0:
        return False
    ncomp, labels = g.components
    u, v = g.pairs
    vcount = np.bincount(labels, minlength=ncomp)
    ecount = np.bincount(labels[u], minlength=ncomp)
    cyclic = np.flatnonzero((ecount >= vcount) & (vcount > math.floor(lo)))
    if cyclic.size == 0:
        return False
    keep = np.isin(labels, cyclic)
    emask = keep[u]
    adj = defaultdict(list)
    for a, b in zip(u[emask].tolist(), v[emask].tolist()):
        adj[a].append(b)
        adj[b].append(a)
    inconclusive = False
    for c in cyclic.tolist():
        verts = np.flatnonzero(labels == c)
        core = _two_core(verts, adj)
        if not core:
            continue
        branch, chains = _kernel_chains(core)
        if not branch:
            if lo < len(core) < hi:
                return True
            continue
        try:
            if _kernel_cycle_in_range(branch, chains, lo, hi, budget):
                return True
        except CycleSearchBudget:
            inconclusive = True
    return None if inconclusive else False


class CycleInRange(GraphProperty):
    """Contains a cycle of length in the open window ``(a n^{1/3}, b n^{1/3})``."""

    def __init__(self, n: int, a: float, b: float, budget: int = DEFAULT_CYCLE_BUDGET):
        super().__init__(n)
        if not 0 < a < b:
            raise ValueError("need 0 < a < b")
        self.a, self.b, self.budget = float(a), float(b), int(budget)
        self.lo = a * n ** (1 / 3)
        self.hi = b * n ** (1 / 3)
        self.name = f"cycle({a},{b})"

    def lengths(self) -> range:
        return range(math.floor(self.lo) + 1, math.ceil(self.hi))

    def _evaluate_checked(self, g):
        r = has_cycle_length_in(g, self.lo, self.hi, self.budget)
        return (False, 1) if r is None else (r, 0)

    def value(self, g):
        return bool(self._evaluate_checked(g)[0])


def property_cycle_in_range(n: int, a: float, b: float) -> CycleInRange:
    return CycleInRange(n, a, b)


# -- minimum degree ---------------------------------------------------------

class MinDegree(GraphProperty):
    """Minimum degree at least ``k``.

    Canonical 0-witness: ``n - k`` edges of the star at vertex 0 (the slots
    ``{0, j}`` for ``j = k .. n-1``); if all are absent vertex 0 has degree
    below ``k``.
    """

    witness_kind = "zero"

    def __init__(self, n: int, k: int):
        super().__init__(n)
        if not 1 <= k < n:
            raise ValueError("need 1 <= k < n")
        self.k = int(k)
        self.name = f"mindeg>={k}"

    def value(self, g):
        return bool(g.degrees.min() >= self.k)

    def canonical_witness(self):
        return tuple(edge_index(0, np.arange(self.k, self.n), self.n).tolist())

    def zero_witness_count(self, g) -> int:
        """Occurring 0-witnesses: ``sum_v C(n-1-deg v, n-k)``."""
        free = self.n - 1 - g.degrees
        return int(sum(math.comb(int(f), self.n - self.k) for f in free))


def property_min_degree(n: int, k: int) -> MinDegree:
    return MinDegree(n, k)


# -- subgraph containment ---------------------------------------------------

class ContainsPattern(GraphProperty):
    witness_kind = "one"

    def __init__(self, h: PatternGraph, n: int):
        super().__init__(n)
        if h.k > n:
            raise ValueError("pattern larger than the host graph")
        self.h = h
        self.name = f"contains({h.name})"

    def value(self, g):
        return contains_copy(self.h, g)

    def count(self, g) -> int:
        return count_copies(self.h, g)

    def canonical_witness(self):
        """Copy of ``H`` placed on vertices ``0 .. k-1``."""
        return tuple(sorted(int(edge_index(u, v, self.n)) for u, v in self.h.edges))


class Clique(ContainsPattern):
    def __init__(self, n: int, k: int):
        if k < 2:
            raise ValueError("clique size must be >= 2")
        super().__init__(clique(k), n)
        self.k = k
        self.name = f"clique{k}"

    def value(self, g):
        return count_cliques(g, self.k, limit=1) > 0

    def count(self, g) -> int:
        return count_cliques(g, self.k)


def property_clique(n: int, k: int) -> Clique:
    return Clique(n, k)


def property_contains(h: PatternGraph, n: int) -> ContainsPattern:
    return ContainsPattern(h, n)
