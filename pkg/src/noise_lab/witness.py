"""1- and 0-witnesses of monotone functions and witness-conditioned noise
experiments."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import Configuration, NoiseParams
from .estimators import Estimate, Pin, paired_outcomes, _mean_estimate
from .fourier import BooleanFunction, TruthTableFunction

MAX_ENUM_ARITY = 20
ONE, ZERO = "one", "zero"


@dataclass(frozen=True)
class WitnessSet:
    kind: str
    witnesses: tuple
    complete: bool

    def __post_init__(self):
        if self.kind not in (ONE, ZERO):
            raise ValueError("kind must be 'one' or 'zero'")

    def __len__(self):
        return len(self.witnesses)

    def __iter__(self):
        return iter(self.witnesses)


def canonical(kind: str, *witnesses) -> WitnessSet:
    """Caller-supplied representative witnesses (not an exhaustive list)."""
    return WitnessSet(kind, tuple(tuple(sorted(int(i) for i in w)) for w in witnesses), False)


def _mask_to_set(mask: int, n: int) -> tuple:
    return tuple(i for i in range(n) if mask >> i & 1)


def enumerate_witnesses(f: BooleanFunction, kind: str = ONE) -> WitnessSet:
    """All minimal true points (1-witnesses) or complements of maximal false
    points (0-witnesses) of a monotone function, by a scan of the cube."""
    if f.arity > MAX_ENUM_ARITY:
        raise ValueError(f"arity {f.arity} too large; supply canonical witnesses instead")
    t = f.truth_table()
    n = f.arity
    if not f.monotone or not f.is_monotone():
        raise ValueError("witness enumeration needs a monotone function")
    if kind == ONE:
        keep = t.copy()
        for i in range(n):
            # x with bit i set stays only if clearing bit i makes f false
            v = t.reshape(-1, 2, 1 << i)
            k = keep.reshape(-1, 2, 1 << i)
            k[:, 1, :] &= ~v[:, 0, :]
        masks = np.flatnonzero(keep)
    elif kind == ZERO:
        keep = ~t
        for i in range(n):
            v = t.reshape(-1, 2, 1 << i)
            k = keep.reshape(-1, 2, 1 << i)
            k[:, 0, :] &= v[:, 1, :]
        full = (1 << n) - 1
        masks = np.sort(full ^ np.flatnonzero(keep))
    else:
        raise ValueError("kind must be 'one' or 'zero'")
    return WitnessSet(kind, tuple(_mask_to_set(int(m), n) for m in masks), True)


def is_minimal_witness(f: BooleanFunction, w: Sequence[int], kind: str) -> bool:
    n = f.arity
    if kind == ONE:
        def forced(s):
            x = np.zeros(n, dtype=bool)
            x[list(s)] = True
            return f(x) == 1
    else:
        def forced(s):
            x = np.ones(n, dtype=bool)
            x[list(s)] = False
            return f(x) == 0
    w = list(w)
    return forced(w) and all(not forced(w[:i] + w[i + 1:]) for i in range(len(w)))


def dual(f: BooleanFunction) -> TruthTableFunction:
    """``omega -> 1 - f(1 - omega)``; its 1-witnesses are the 0-witnesses of ``f``."""
    t = f.truth_table()
    return TruthTableFunction(~t[::-1], monotone=f.monotone or None, name=f"dual({f.name})")


@dataclass
class SnsReport:
    kind: str
    eps: float
    p: float
    prob_target: Estimate
    conditional: list[Estimate]
    gaps: list[Estimate]
    witnesses: list[tuple] = field(repr=False)
    degenerate: bool = False

    @property
    def max_gap(self) -> Estimate:
        return self.gaps[self.argmax]

    @property
    def argmax(self) -> int:
        return int(np.argmax([g.value for g in self.gaps]))

    def to_dict(self, include_witnesses: bool = True) -> dict:
        d = {
            "kind": self.kind, "eps": self.eps, "p": self.p,
            "prob_target": self.prob_target.to_dict(),
            "max_gap": self.max_gap.to_dict(), "argmax": self.argmax,
            "degenerate": self.degenerate,
            "per_witness": [
                {"conditional": c.to_dict(), "gap": g.to_dict()}
                for c, g in zip(self.conditional, self.gaps)
            ],
        }
        if include_witnesses:
            for row, w in zip(d["per_witness"], self.witnesses):
                row["witness"] = list(w)
        return d


def sns_gap(f, witnesses: WitnessSet, params: NoiseParams, samples: int, seed: int,
            workers: Optional[int] = None) -> SnsReport:
    """Estimate ``g(W) = P(f(omega^eps)=b | omega_W == b) - P(f = b)`` for each
    supplied witness, with ``b = 1`` for 1-witnesses and ``b = 0`` for
    0-witnesses.

    Every witness is evaluated on the same base samples and noise, and the
    stderr of each gap is that of the per-sample paired difference.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    if len(witnesses) == 0:
        raise ValueError("no witnesses supplied")
    if witnesses.kind == ONE:
        pins = [Pin(ones=tuple(w)) for w in witnesses]
    else:
        pins = [Pin(zeros=tuple(w)) for w in witnesses]
    out = paired_outcomes(f, params.p, [params.eps], samples, seed, pins=pins, workers=workers)
    target = 1 if witnesses.kind == ONE else 0
    x = (out.base == target)
    base = _mean_estimate(x, seed)
    conds, gaps = [], []
    for k in range(len(pins)):
        y = (out.noised[:, k, 0] == target)
        conds.append(_mean_estimate(y, seed))
        gaps.append(_mean_estimate(y.astype(float) - x, seed))
    degenerate = bool(x.all() or not x.any())
    return SnsReport(witnesses.kind, params.eps, params.p, base, conds, gaps,
                     list(witnesses), degenerate)


def zero_witness_count(f, witnesses: WitnessSet, omega) -> int:
    """Number of supplied 0-witnesses ``W`` with ``omega_W == 0``."""
    if witnesses.kind != ZERO:
        raise ValueError("expected a 0-witness set")
    if isinstance(omega, Configuration):
        bits = omega.bits
        return sum(1 for w in witnesses if not bits[list(w)].any())
    return sum(1 for w in witnesses if not omega.any_of(w))


@dataclass(frozen=True)
class ZeroWitnessReport:
    mean: Estimate
    eps: Optional[float]
    floor: Optional[float]

    def to_dict(self):
        return {"mean": self.mean.to_dict(), "eps": self.eps, "floor": self.floor}


def expected_zero_witness_count(f, witnesses: WitnessSet, p: float, samples: int, seed: int,
                                eps: Optional[float] = None, counter=None) -> ZeroWitnessReport:
    """Monte Carlo ``E[Y]`` for the occurring-0-witness count.

    A bounded ``E[Y]`` rules out 1-strong noise sensitivity: every
    1-witness-conditioned probability is at least ``1 - eps * E[Y]``, which
    is reported as ``floor`` when ``eps`` is given.  ``counter`` may replace
    the generic count with a closed form (e.g. per-vertex stars).
    """
    from .core import RandomStream, sample_configuration

    ys = np.empty(samples)
    for s in range(samples):
        stream = RandomStream(seed, s)
        if hasattr(f, "sample_edges"):
            omega = f.sample_edges(p, stream)
        else:
            omega = sample_configuration(f.arity, p, stream)
        ys[s] = counter(omega) if counter is not None else zero_witness_count(f, witnesses, omega)
    est = _mean_estimate(ys, seed)
    floor = None if eps is None else max(0.0, 1.0 - eps * est.value)
    return ZeroWitnessReport(est, eps, floor)


def recmaj_zero_witness_total(depth: int) -> int:
    """Number of 0-witnesses of recursive 3-majority: ``3^(2^k - 1)``."""
    return 3 ** (2 ** depth - 1)


def recmaj_expected_zero_witnesses(depth: int) -> float:
    """``E Y`` at ``p = 1/2``: ``(1/3)(3/2)^(2^k)``."""
    return math.pow(1.5, 2 ** depth) / 3.0
