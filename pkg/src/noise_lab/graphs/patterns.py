"""Small pattern graphs H: construction, automorphisms and balancedness."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

MAX_BALANCE_VERTICES = 24


@dataclass(frozen=True)
class PatternGraph:
    k: int
    edges: tuple
    name: str = "H"
    declared_aut: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        norm = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v or not (0 <= u < self.k and 0 <= v < self.k):
                raise ValueError(f"bad pattern edge ({u}, {v})")
            norm.append((min(u, v), max(u, v)))
        if len(set(norm)) != len(norm):
            raise ValueError("duplicate pattern edge")
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def adjacency_sets(self) -> list[set]:
        adj = [set() for _ in range(self.k)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency_sets()]

    @property
    def automorphisms(self) -> int:
        if self.declared_aut is not None:
            return self.declared_aut
        return _aut_cache(self)

    def to_text(self) -> str:
        lines = [f"{self.k} {self.num_edges}"] + [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "H") -> "PatternGraph":
        """Parse ``"k l"`` followed by ``l`` lines ``"u v"`` (0-indexed)."""
        rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 2:
            raise ValueError("first line must be 'k l'")
        k, ell = int(rows[0][0]), int(rows[0][1])
        if len(rows) - 1 != ell:
            raise ValueError(f"header promises {ell} edges, found {len(rows) - 1}")
        return cls(k, tuple((int(a), int(b)) for a, b in rows[1:]), name)


_AUT: dict = {}


def _aut_cache(h: PatternGraph) -> int:
    key = (h.k, h.edges)
    if key not in _AUT:
        from .counting import count_embeddings_pattern
        _AUT[key] = count_embeddings_pattern(h, h)
    return _AUT[key]


def clique(k: int) -> PatternGraph:
    return PatternGraph(k, tuple((i, j) for i in range(k) for j in range(i + 1, k)), f"K{k}",
                        declared_aut=math.factorial(k))


def cycle(ell: int) -> PatternGraph:
    return PatternGraph(ell, tuple((i, (i + 1) % ell) for i in range(ell)), f"C{ell}",
                        declared_aut=2 * ell)


def path(ell: int) -> PatternGraph:
    """Path with ``ell`` edges."""
    return PatternGraph(ell + 1, tuple((i, i + 1) for i in range(ell)), f"P{ell}")


def disjoint_edges(count: int) -> PatternGraph:
    return PatternGraph(2 * count, tuple((2 * i, 2 * i + 1) for i in range(count)),
                        f"{count}K2")


def disjoint_union(a: PatternGraph, b: PatternGraph) -> PatternGraph:
    shift = a.k
    return PatternGraph(a.k + b.k, a.edges + tuple((u + shift, v + shift) for u, v in b.edges),
                        f"{a.name}+{b.name}")


def two_triangles_path(r: int) -> PatternGraph:
    """Two triangles joined by a path with ``r >= 1`` edges.

    Vertices 0,1,2 and 3,4,5 form the triangles; the path runs from vertex 2
    through ``r - 1`` new vertices to vertex 3.
    """
    if r < 1:
        raise ValueError("path length must be >= 1")
    edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
    chain = [2] + list(range(6, 6 + r - 1)) + [3]
    edges += list(zip(chain, chain[1:]))
    return PatternGraph(5 + r, tuple(edges), f"TT{r}")


@dataclass(frozen=True)
class BalanceReport:
    balanced: bool
    strictly_balanced: bool
    density: float
    max_proper_density: float
    witness_subset: tuple

    def to_dict(self):
        return {"balanced": self.balanced, "strictly_balanced": self.strictly_balanced,
                "density": self.density, "max_proper_density": self.max_proper_density,
                "witness_subset": list(self.witness_subset)}


def strictly_balanced(h: PatternGraph) -> BalanceReport:
    """Exhaustive scan of vertex subsets comparing induced edge densities.

    Balanced: every subgraph has ``e/v <= e(H)/v(H)``.  Strictly balanced:
    strict inequality for every subgraph on fewer vertices.  Only induced
    subgraphs need checking since dropping edges lowers density.
    """
    k, ell = h.k, h.num_edges
    if k > MAX_BALANCE_VERTICES:
        raise ValueError(f"pattern has {k} vertices; exhaustive scan is limited to "
                         f"{MAX_BALANCE_VERTICES}")
    if ell == 0:
        raise ValueError("pattern has no edges")
    eu = np.array([u for u, _ in h.edges], dtype=np.uint64)
    ev = np.array([v for _, v in h.edges], dtype=np.uint64)
    full = (1 << k) - 1
    best_num, best_den, best_mask = -1, 1, 0
    balanced = strict = True
    step = 1 << 18
    for lo in range(1, full, step):
        masks = np.arange(lo, min(full, lo + step), dtype=np.uint64)
        sizes = np.bitwise_count(masks).astype(np.int64)
        inside = ((masks[:, None] >> eu[None, :]) & (masks[:, None] >> ev[None, :])
                  & np.uint64(1)).sum(axis=1).astype(np.int64)
        # compare inside/sizes with ell/k exactly
        lhs = inside * k
        rhs = ell * sizes
        if np.any(lhs > rhs):
            balanced = strict = False
        if np.any(lhs >= rhs):
            strict = False
        # track densest proper subset
        j = int(np.argmax(inside / sizes))
        if inside[j] * best_den > best_num * sizes[j]:
            best_num, best_den, best_mask = int(inside[j]), int(sizes[j]), int(masks[j])
    subset = tuple(i for i in range(k) if best_mask >> i & 1)
    return BalanceReport(balanced, strict, ell / k, best_num / best_den if best_num >= 0 else 0.0,
                         subset)
