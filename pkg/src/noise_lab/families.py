"""Named Boolean function families and their analytic recursions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import check_eps, check_probability
from .fourier import AUTO_TABLE_ARITY, BooleanFunction

MAX_ORACLE_ARITY = 1 << 26


@dataclass(frozen=True)
class TribesSpec:
    blocks: int
    block_size: int
    reversed: bool = False

    def __post_init__(self):
        if self.blocks < 1 or self.block_size < 1:
            raise ValueError("tribes needs at least one block of at least one bit")

    @property
    def arity(self) -> int:
        return self.blocks * self.block_size

    @classmethod
    def for_arity(cls, n: int, reversed: bool = False) -> "TribesSpec":
        """Blocks of ``floor(log2(n / log2 n))`` bits; a trailing short block is dropped."""
        if n < 4:
            raise ValueError("need n >= 4")
        b = max(1, int(math.floor(math.log2(n / math.log2(n)))))
        return cls(n // b, b, reversed)

    def prob_one(self, p: float) -> float:
        """Closed-form ``P(f = 1)``."""
        check_probability(p)
        if self.reversed:
            # f = 0 iff some block is all zeros
            q = math.exp(self.block_size * math.log1p(-p))
            return math.exp(self.blocks * _log1m(q))
        q = math.exp(self.block_size * math.log(p))
        return -math.expm1(self.blocks * _log1m(q))


def _log1m(q: float) -> float:
    """``log(1 - q)``, with ``-inf`` once ``q`` has rounded to 1."""
    return math.log1p(-q) if q < 1.0 else -math.inf


@dataclass(frozen=True)
class RecMajSpec:
    fanout: int
    depth: int

    def __post_init__(self):
        if self.fanout < 3 or self.fanout % 2 == 0:
            raise ValueError("fanout must be an odd integer >= 3")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")

    @property
    def arity(self) -> int:
        return self.fanout ** self.depth


@dataclass(frozen=True)
class CompositionSpec:
    outer: BooleanFunction
    inner: BooleanFunction

    @property
    def arity(self) -> int:
        return self.outer.arity * self.inner.arity


def _check_arity(n: int):
    if n > MAX_ORACLE_ARITY:
        raise OverflowError(f"arity {n} exceeds the oracle limit {MAX_ORACLE_ARITY}")


class Tribes(BooleanFunction):
    """OR of ANDs over consecutive blocks; reversed: AND of ORs."""

    def __init__(self, spec: TribesSpec):
        _check_arity(spec.arity)
        kind = "rtribes" if spec.reversed else "tribes"
        super().__init__(spec.arity, monotone=True, name=f"{kind}{spec.blocks}x{spec.block_size}")
        self.spec = spec
        if self.arity <= AUTO_TABLE_ARITY:
            self.truth_table()

    def evaluate(self, x):
        x = np.asarray(x, dtype=bool)
        blocks = x.reshape(x.shape[:-1] + (self.spec.blocks, self.spec.block_size))
        if self.spec.reversed:
            return ~(~blocks).all(axis=-1).any(axis=-1)
        return blocks.all(axis=-1).any(axis=-1)

    def block_witness(self, block: int = 0) -> list[int]:
        b = self.spec.block_size
        return list(range(block * b, (block + 1) * b))


class RecursiveMajority(BooleanFunction):
    """Iterated majority over a complete ``fanout``-ary tree; leaves are
    grouped consecutively, children of one node are adjacent."""

    def __init__(self, spec: RecMajSpec):
        _check_arity(spec.arity)
        super().__init__(spec.arity, monotone=True, name=f"recmaj{spec.fanout}^{spec.depth}")
        self.spec = spec
        if self.arity <= AUTO_TABLE_ARITY:
            self.truth_table()

    def evaluate(self, x):
        x = np.asarray(x, dtype=bool)
        r = self.spec.fanout
        v = x
        for _ in range(self.spec.depth):
            v = v.reshape(v.shape[:-1] + (-1, r)).sum(axis=-1, dtype=np.int32) > r // 2
        return v.reshape(v.shape[:-1])

    def canonical_witness(self) -> list[int]:
        """The 1-witness choosing the first ``(fanout+1)/2`` children at every node."""
        r, need = self.spec.fanout, (self.spec.fanout + 1) // 2
        leaves = [0]
        for _ in range(self.spec.depth):
            leaves = [r * v + c for v in leaves for c in range(need)]
        return sorted(leaves)


class Composition(BooleanFunction):
    """``outer(inner(block 1), ..., inner(block n))`` on consecutive blocks."""

    def __init__(self, spec: CompositionSpec):
        _check_arity(spec.arity)
        mono = spec.outer.monotone and spec.inner.monotone
        super().__init__(spec.arity, monotone=mono, name=f"{spec.outer.name}o{spec.inner.name}")
        self.spec = spec
        if self.arity <= AUTO_TABLE_ARITY:
            self.truth_table()

    def evaluate(self, x):
        x = np.asarray(x, dtype=bool)
        m = self.spec.inner.arity
        inner = self.spec.inner.evaluate(x.reshape(x.shape[:-1] + (self.spec.outer.arity, m)))
        return self.spec.outer.evaluate(inner)


def make_tribes(spec: TribesSpec) -> Tribes:
    return Tribes(spec)


def make_recmaj(spec: RecMajSpec) -> RecursiveMajority:
    return RecursiveMajority(spec)


def make_composition(spec: CompositionSpec) -> Composition:
    return Composition(spec)


# -- analytic recursions ----------------------------------------------------

def h_map(x: float) -> float:
    """One step of the 5-majority witness recursion, ``-x^3/2 + 3x^2/4 + 3x/4``."""
    return -0.5 * x ** 3 + 0.75 * x ** 2 + 0.75 * x


def iterate_h(x0: float, k: int) -> float:
    """``h^(k)(x0)`` by direct iteration in 64-bit floats."""
    if not (0.0 <= x0 <= 1.0):
        raise ValueError("x0 must lie in [0, 1]")
    x = float(x0)
    for _ in range(int(k)):
        x = h_map(x)
    return x


def iterate_h_offset(delta: float, k: int) -> float:
    """``h^(k)(1/2 + delta) - 1/2`` for offsets far below float spacing at 1/2.

    Centred at 1/2 the map is exactly ``d -> (9/8) d - d^3 / 2``, so offsets
    such as ``0.89^5000`` survive instead of rounding ``1/2 + delta`` to 1/2.
    """
    if not (-0.5 <= delta <= 0.5):
        raise ValueError("offset must lie in [-1/2, 1/2]")
    d = float(delta)
    for _ in range(int(k)):
        d = 1.125 * d - 0.5 * d ** 3
    return d


def recmaj_conditioned_prob(fanout: int, depth: int, eps: float, p: float = 0.5) -> float:
    """Exact ``P(f(omega^eps) = 1 | omega_W == 1)`` for the canonical 1-witness.

    The recursions hold at ``p = 1/2`` only.  A ``Fraction`` eps gives an
    exact rational result for fanout 3.
    """
    check_eps(eps)
    if p != 0.5:
        raise ValueError("the recursive-majority recursions assume p = 1/2")
    if fanout not in (3, 5):
        raise ValueError(f"unsupported fanout {fanout}; use 3 or 5")
    half = Fraction(1, 2) if isinstance(eps, Fraction) else 0.5
    z = 1 - eps * half
    for _ in range(depth):
        if fanout == 3:
            z = z * z + 2 * z * (1 - z) * half
        else:
            z = h_map(z)
    return z


def _bisect(g, lo: float, hi: float, max_iter: int = 400) -> float:
    glo = g(lo)
    if glo * g(hi) > 0:
        raise ValueError("no sign change on the bracket")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def tribes_bias_solve(spec: TribesSpec, target: float = 0.5) -> float:
    """Solve ``P(f = 1) = target`` for the bit bias ``p`` by bisection."""
    check_probability(target, "target")
    tiny = 1e-300
    p = _bisect(lambda q: spec.prob_one(q) - target, tiny, 1.0 - 1e-16)
    if not (0.0 < p < 1.0):
        raise AssertionError("bias solve left (0, 1)")
    return p


def tribes_prob_one_large(blocks: float, block_size: int, p: float, reversed: bool = False) -> float:
    """Closed form for block counts beyond integer range (e.g. ``n^{log n}`` bits)."""
    if reversed:
        q = math.exp(block_size * math.log1p(-p))
        return math.exp(blocks * math.log1p(-q))
    q = math.exp(block_size * math.log(p))
    return -math.expm1(blocks * math.log1p(-q))


def composed_inner_sizes(n: int) -> tuple[float, int, float]:
    """Sizes of the reversed-tribes inner function paired with an ``n``-bit
    outer tribes: ``m = floor(n^{ln n})`` bits, ``b = floor(log2(m / log2 m))``
    bits per block, ``m // b`` blocks (returned as floats when huge)."""
    log2m = math.log(n) * math.log2(n)
    b = int(math.floor(log2m - math.log2(log2m)))
    blocks = 2.0 ** (log2m - math.log2(b))
    return 2.0 ** log2m, b, blocks


def solve_large_reversed_bias(blocks: float, block_size: int, target: float = 0.5) -> float:
    return _bisect(lambda q: tribes_prob_one_large(blocks, block_size, q, True) - target,
                   1e-12, 1.0 - 1e-12)


def tribes_witness_gap(spec: TribesSpec, p: float, eps: float) -> float:
    """Exact ``P(f(omega^eps)=1 | omega_W == 1) - P(f=1)`` for a block witness
    of a forward tribes function: ``u [(1 - eps(1-p))^b - p^b]`` with
    ``u = (1 - p^b)^{blocks-1}``."""
    check_probability(p)
    check_eps(eps)
    if spec.reversed:
        raise ValueError("gap formula is for forward tribes")
    b = spec.block_size
    u = (1.0 - p ** b) ** (spec.blocks - 1)
    return u * ((1.0 - eps * (1.0 - p)) ** b - p ** b)


def tribes_gap_bracket(block_size: int, eps: float) -> tuple[float, float]:
    """Bracket ``((1 - eps/2 - eps^2/16)^b, (1 - eps/2 + eps^2/16)^b)``."""
    check_eps(eps)
    return ((1 - eps / 2 - eps ** 2 / 16) ** block_size,
            (1 - eps / 2 + eps ** 2 / 16) ** block_size)
