"""Independent slow reference implementations used as test oracles.

Nothing here imports the package's transform, noise or counting code; each
quantity is computed straight from its definition.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def weights(n, p):
    x = np.arange(1 << n)
    ones = np.array([bin(v).count("1") for v in x])
    return p ** ones * (1 - p) ** (n - ones)


def naive_transform(table, n, p):
    """``fhat(S) = E[f chi_S]`` with ``chi_S = prod_{i in S} (x_i - p)/sqrt(p(1-p))``; O(4^N)."""
    t = np.asarray(table, dtype=float)
    mu = weights(n, p)
    xs = (np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1
    z = (xs - p) / math.sqrt(p * (1 - p))
    out = np.empty(1 << n)
    for s in range(1 << n):
        idx = [i for i in range(n) if s >> i & 1]
        chi = np.prod(z[:, idx], axis=1) if idx else np.ones(1 << n)
        out[s] = float(np.sum(t * mu * chi))
    return out


def noise_product_moment(table, n, p, eps):
    """``E[f(omega) f(omega^eps)]`` by applying the one-bit noise kernel along
    each axis of the joint law (exhaustive over all pairs)."""
    t = np.asarray(table, dtype=float)
    mu = weights(n, p)
    kernel = np.array([[1 - eps + eps * (1 - p), eps * p],
                       [eps * (1 - p), 1 - eps + eps * p]])  # kernel[x, y]
    g = t.reshape((2,) * n)  # axis j <-> bit n-1-j
    for ax in range(n):
        g = np.moveaxis(np.tensordot(kernel, g, axes=([1], [ax])), 0, ax)
    return float(np.sum(mu * t * g.reshape(-1)))


def noise_triples_moment(table, n, p, eps):
    """Same quantity, enumerating every (omega, resample-mask, fresh-bits) triple."""
    t = np.asarray(table, dtype=bool)
    mu = weights(n, p)
    size = 1 << n
    total = 0.0
    for x in range(size):
        if not t[x]:
            continue
        for r in range(size):
            rb = bin(r).count("1")
            pr = eps ** rb * (1 - eps) ** (n - rb)
            for fresh in range(size):
                if fresh & ~r:
                    continue
                fb = bin(fresh).count("1")
                pf = p ** fb * (1 - p) ** (rb - fb)
                y = (x & ~r) | fresh
                if t[y]:
                    total += mu[x] * pr * pf
    return total


def naive_influences(table, n, p):
    t = np.asarray(table, dtype=bool)
    mu = weights(n, p)
    return np.array([sum(mu[x] for x in range(1 << n) if t[x] != t[x ^ (1 << i)])
                     for i in range(n)])


def naive_pivotal_moments(table, n, p):
    """``(E|P|, E[|P| | f=1], P(f=1))`` by enumeration."""
    t = np.asarray(table, dtype=bool)
    mu = weights(n, p)
    sizes = np.array([sum(t[x] != t[x ^ (1 << i)] for i in range(n)) for x in range(1 << n)])
    p1 = float(mu[t].sum())
    e = float((mu * sizes).sum())
    e1 = float((mu * sizes)[t].sum() / p1) if p1 > 0 else float("nan")
    return e, e1, p1


def conditional_variance_enumeration(table, n, p, eps):
    """``Var(P(f(omega^eps)=1 | omega))`` by exhaustive enumeration."""
    t = np.asarray(table, dtype=float)
    mu = weights(n, p)
    cond = np.empty(1 << n)
    for x in range(1 << n):
        q = np.ones(1 << n)
        for i in range(n):
            bit = (np.arange(1 << n) >> i) & 1
            xi = x >> i & 1
            stay = np.where(bit == xi, 1 - eps, 0.0)
            q *= stay + eps * np.where(bit == 1, p, 1 - p)
        cond[x] = float(np.sum(q * t))
    m = float(np.sum(mu * cond))
    return float(np.sum(mu * (cond - m) ** 2))


def random_monotone_table(rng, n):
    """Up-closure of a few random points."""
    t = np.zeros(1 << n, dtype=bool)
    for x in rng.integers(0, 1 << n, size=int(rng.integers(1, 5))):
        sup = [y for y in range(1 << n) if y & int(x) == int(x)]
        t[sup] = True
    return t


def brute_minimal_true_points(table, n):
    t = np.asarray(table, dtype=bool)
    out = []
    for x in range(1 << n):
        if t[x] and all(not t[x & ~(1 << i)] for i in range(n) if x >> i & 1):
            out.append(tuple(i for i in range(n) if x >> i & 1))
    return sorted(out)


def brute_automorphisms(k, edges):
    es = {frozenset(e) for e in edges}
    return sum(1 for perm in itertools.permutations(range(k))
               if {frozenset((perm[u], perm[v])) for u, v in edges} == es)


def brute_cliques(n, edge_pairs, k):
    es = {frozenset(e) for e in edge_pairs}
    return sum(1 for c in itertools.combinations(range(n), k)
               if all(frozenset(pr) in es for pr in itertools.combinations(c, 2)))


def brute_copies(k, pattern_edges, n, edge_pairs):
    """Count subgraph copies as distinct edge-set images of injective maps."""
    es = {frozenset(e) for e in edge_pairs}
    images = set()
    for verts in itertools.permutations(range(n), k):
        img = frozenset(frozenset((verts[u], verts[v])) for u, v in pattern_edges)
        if img <= es:
            images.add(img)
    return len(images)


def brute_clique_pair_sum(n, k, p):
    """``sum over ordered pairs of distinct k-cliques sharing >= 2 vertices of
    p^{|E1 u E2|}``, grouped by the overlap size."""
    cliques = list(itertools.combinations(range(n), k))
    out = {}
    for a in cliques:
        ea = {frozenset(e) for e in itertools.combinations(a, 2)}
        sa = set(a)
        for b in cliques:
            i = len(sa & set(b))
            if a == b or i < 2:
                continue
            eb = {frozenset(e) for e in itertools.combinations(b, 2)}
            out[i] = out.get(i, 0.0) + p ** len(ea | eb)
    return out


def brute_two_clique_deltas(n, k, p):
    """Fix ``H' = {0..k-1}``, ``H'' = {k..2k-1}``; sum ``P(H present | H', H'')``
    over all ``k``-sets ``H`` grouped by ``(|H n H'|, |H n H''|)``."""
    h1, h2 = set(range(k)), set(range(k, 2 * k))
    given = {frozenset(e) for e in itertools.combinations(sorted(h1), 2)}
    given |= {frozenset(e) for e in itertools.combinations(sorted(h2), 2)}
    out = {}
    for c in itertools.combinations(range(n), k):
        i, j = len(h1 & set(c)), len(h2 & set(c))
        missing = sum(1 for e in itertools.combinations(c, 2) if frozenset(e) not in given)
        out[(i, j)] = out.get((i, j), 0.0) + p ** missing
    return out


def brute_balance(k, edges):
    """``(balanced, strictly_balanced)`` over all nonempty proper vertex subsets."""
    d = len(edges) / k
    bal = strict = True
    for r in range(1, k):
        for sub in itertools.combinations(range(k), r):
            s = set(sub)
            e = sum(1 for u, v in edges if u in s and v in s)
            if e / r > d:
                bal = strict = False
            if e / r >= d:
                strict = False
    return bal, strict


def has_cycle_in_window_nx(n, edge_pairs, lo, hi):
    import networkx as nx
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edge_pairs)
    for c in nx.simple_cycles(g, length_bound=max(3, math.ceil(hi) - 1)):
        if lo < len(c) < hi:
            return True
    return False
