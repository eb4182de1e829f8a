"""Subgraph counting: pattern embeddings by backtracking, cliques by
bitset recursion, triangles by degree-ordered wedge closing."""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .edges import EdgeConfig
from .patterns import PatternGraph

MAX_PATTERN_VERTICES = 12
BITSET_MAX_N = 4096


def _search_order(h: PatternGraph) -> list[int]:
    """BFS order per component, starting from the highest-degree vertex."""
    adj = h.adjacency_sets()
    deg = [len(a) for a in adj]
    order, seen = [], set()
    for root in sorted(range(h.k), key=lambda v: -deg[v]):
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in sorted(adj[v], key=lambda x: -deg[x]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return order


def count_embeddings(h: PatternGraph, adj: Sequence, limit: Optional[int] = None) -> int:
    """Injective edge-preserving maps ``V(H) -> V(G)``; ``adj[v]`` is the
    neighbour set of ``v`` in ``G``.  Stops early once ``limit`` is reached."""
    order = _search_order(h)
    hadj = h.adjacency_sets()
    hdeg = [len(a) for a in hadj]
    pos = {v: i for i, v in enumerate(order)}
    back = [[w for w in hadj[v] if pos[w] < pos[v]] for v in order]
    gdeg = [len(a) for a in adj]
    n = len(adj)
    image = [0] * h.k
    used = set()
    count = 0

    def rec(i):
        nonlocal count
        if i == len(order):
            count += 1
            return limit is not None and count >= limit
        v = order[i]
        prev = back[i]
        if prev:
            anchor = image[prev[0]]
            cands = adj[anchor]
        else:
            cands = range(n)
        need = hdeg[v]
        for c in cands:
            if c in used or gdeg[c] < need:
                continue
            if any(c not in adj[image[w]] for w in prev[1:]):
                continue
            image[v] = c
            used.add(c)
            stop = rec(i + 1)
            used.discard(c)
            if stop:
                return True
        return False

    rec(0)
    return count


def count_embeddings_pattern(h: PatternGraph, g: PatternGraph) -> int:
    return count_embeddings(h, g.adjacency_sets())


def adjacency_sets(g: EdgeConfig) -> list[set]:
    a = g.adjacency
    return [set(a.indices[a.indptr[v]:a.indptr[v + 1]].tolist()) for v in range(g.n)]


def count_copies(h: PatternGraph, g: EdgeConfig) -> int:
    """Number of (not necessarily induced) subgraphs of ``g`` isomorphic to ``h``."""
    if h.k > MAX_PATTERN_VERTICES:
        raise ValueError(f"pattern has {h.k} vertices; limit is {MAX_PATTERN_VERTICES}")
    if h.num_edges == h.k * (h.k - 1) // 2:
        return count_cliques(g, h.k)
    emb = count_embeddings(h, adjacency_sets(g))
    aut = h.automorphisms
    if emb % aut:
        raise AssertionError("embedding count not divisible by |Aut(H)|")
    return emb // aut


def contains_copy(h: PatternGraph, g: EdgeConfig) -> bool:
    if h.num_edges == h.k * (h.k - 1) // 2:
        return count_cliques(g, h.k, limit=1) > 0
    if len(g) < h.num_edges:
        return False
    return count_embeddings(h, adjacency_sets(g), limit=1) > 0


def _higher_neighbour_bits(g: EdgeConfig) -> list[int]:
    u, v = g.pairs
    hi = [0] * g.n
    for a, b in zip(u.tolist(), v.tolist()):
        hi[a] |= 1 << b
    return hi


def count_cliques(g: EdgeConfig, k: int, limit: Optional[int] = None) -> int:
    """Number of ``k``-cliques; each is enumerated once in increasing vertex order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return g.n
    if k == 2:
        return len(g)
    if g.n > BITSET_MAX_N:
        return _count_cliques_sets(g, k, limit)
    hi = _higher_neighbour_bits(g)
    count = 0

    def rec(cand: int, depth: int) -> bool:
        nonlocal count
        if depth == k - 1:
            count += cand.bit_count()
            return limit is not None and count >= limit
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            nxt = cand & hi[v]
            if nxt.bit_count() >= k - depth - 1 and rec(nxt, depth + 1):
                return True
        return False

    for v in range(g.n):
        if hi[v].bit_count() >= k - 1 and rec(hi[v], 1):
            break
    return count


def _count_cliques_sets(g: EdgeConfig, k: int, limit: Optional[int]) -> int:
    u, v = g.pairs
    hi = [set() for _ in range(g.n)]
    for a, b in zip(u.tolist(), v.tolist()):
        hi[a].add(b)
    count = 0

    def rec(cand: set, depth: int) -> bool:
        nonlocal count
        if depth == k - 1:
            count += len(cand)
            return limit is not None and count >= limit
        for w in sorted(cand):
            nxt = cand & hi[w]
            if len(nxt) >= k - depth - 1 and rec({x for x in nxt if x > w}, depth + 1):
                return True
        return False

    for x in range(g.n):
        if len(hi[x]) >= k - 1 and rec(hi[x], 1):
            break
    return count


def _oriented(g: EdgeConfig) -> sp.csr_matrix:
    u, v = g.pairs
    deg = g.degrees
    rank = np.lexsort((np.arange(g.n), deg))
    pos = np.empty(g.n, dtype=np.int64)
    pos[rank] = np.arange(g.n)
    fwd = pos[u] < pos[v]
    src = np.where(fwd, u, v)
    dst = np.where(fwd, v, u)
    return sp.csr_matrix((np.ones(src.size, dtype=np.int64), (src, dst)), shape=(g.n, g.n))


def triangle_count(g: EdgeConfig) -> int:
    if len(g) < 3:
        return 0
    low = _oriented(g)
    return int((low @ low).multiply(low).sum())


def triangles(g: EdgeConfig) -> np.ndarray:
    """All triangles as an ``(T, 3)`` array of sorted vertex triples."""
    if len(g) < 3:
        return np.empty((0, 3), dtype=np.int64)
    low = _oriented(g)
    closing = (low @ low).multiply(low).tocoo()
    lowT = low.T.tocsr()
    out = []
    for a, c in zip(closing.row.tolist(), closing.col.tolist()):
        # middle vertices b with a -> b -> c
        outs = low.indices[low.indptr[a]:low.indptr[a + 1]]
        ins = lowT.indices[lowT.indptr[c]:lowT.indptr[c + 1]]
        for b in np.intersect1d(outs, ins).tolist():
            out.append(sorted((a, b, c)))
    if not out:
        return np.empty((0, 3), dtype=np.int64)
    return np.unique(np.array(out, dtype=np.int64), axis=0)
