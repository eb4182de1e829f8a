"""Configurations, the p-biased product measure, the noise operator and
reproducible random streams.

Every random draw in the package goes through a :class:`RandomStream`, a
Philox generator keyed by ``(master_seed, stream_id)``.  Monte Carlo code uses
the global sample index as ``stream_id`` so that results never depend on how
samples are split between workers.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

_MASK64 = (1 << 64) - 1

#: fixed Monte Carlo chunk size; never derived from the worker count
CHUNK_SIZE = 256


def check_probability(p: float, name: str = "p") -> float:
    p = float(p)
    if not (0.0 < p < 1.0):
        raise ValueError(f"{name} must lie strictly inside (0, 1), got {p!r}")
    return p


def check_eps(eps: float) -> float:
    eps = float(eps)
    if not (0.0 <= eps <= 1.0):
        raise ValueError(f"eps must lie in [0, 1], got {eps!r}")
    return eps


@dataclass(frozen=True)
class NoiseParams:
    """Bit marginal ``p`` and per-bit resampling rate ``eps``."""

    p: float
    eps: float

    def __post_init__(self):
        check_probability(self.p)
        check_eps(self.eps)


@dataclass(frozen=True)
class RandomStream:
    """Counter-based random substream.

    ``lane`` selects an independent block of the Philox counter space, so one
    sample can own several non-overlapping sequences (e.g. one per noise level
    of a sweep) without changing its ``stream_id``.
    """

    master_seed: int
    stream_id: int
    lane: int = 0

    def generator(self) -> np.random.Generator:
        key = [self.master_seed & _MASK64, self.stream_id & _MASK64]
        counter = [0, 0, self.lane & _MASK64, 0]
        return np.random.Generator(np.random.Philox(key=key, counter=counter))

    def with_lane(self, lane: int) -> "RandomStream":
        return RandomStream(self.master_seed, self.stream_id, lane)


class Configuration:
    """Immutable bit vector ``omega`` over the index set ``{0, ..., N-1}``."""

    __slots__ = ("_bits",)

    def __init__(self, bits):
        arr = np.array(bits, dtype=bool, copy=True).reshape(-1)
        if arr.size == 0:
            raise ValueError("a configuration needs at least one coordinate")
        arr.flags.writeable = False
        self._bits = arr

    @classmethod
    def ones(cls, n: int) -> "Configuration":
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def zeros(cls, n: int) -> "Configuration":
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def from_mask(cls, mask: int, n: int) -> "Configuration":
        return cls((mask >> np.arange(n)) & 1)

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    def __len__(self) -> int:
        return self._bits.size

    def __getitem__(self, i):
        return self._bits[i]

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash(np.packbits(self._bits).tobytes())

    def __repr__(self):
        if len(self) <= 64:
            return "Configuration('" + "".join("1" if b else "0" for b in self._bits) + "')"
        return f"Configuration(N={len(self)}, ones={self.popcount()})"

    def popcount(self) -> int:
        return int(np.count_nonzero(self._bits))

    def any_of(self, indices) -> bool:
        return bool(self._bits[np.asarray(list(indices), dtype=np.int64)].any())

    def to_mask(self) -> int:
        """Integer with bit ``i`` equal to ``omega_i`` (truth-table index)."""
        return int.from_bytes(np.packbits(self._bits, bitorder="little").tobytes(), "little")


def _draw_bits(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    return rng.random(n) < p


def _noise_bits(rng: np.random.Generator, bits: np.ndarray, p: float, eps: float) -> np.ndarray:
    # resample mask and fresh bits are independent draws; combine by select
    resample = rng.random(bits.shape[-1]) < eps
    fresh = rng.random(bits.shape[-1]) < p
    return np.where(resample, fresh, bits)


def sample_configuration(n: int, p: float, stream: RandomStream) -> Configuration:
    """Draw ``omega`` from the product Bernoulli(p) measure on ``n`` bits."""
    if n < 1:
        raise ValueError("n must be >= 1")
    check_probability(p)
    return Configuration(_draw_bits(stream.generator(), n, p))


def apply_noise(omega: Configuration, params: NoiseParams, stream: RandomStream) -> Configuration:
    """Return ``omega^eps``: each bit independently resampled with probability eps."""
    if params.eps == 0.0:
        return omega
    return Configuration(_noise_bits(stream.generator(), omega.bits, params.p, params.eps))


def _as_index_array(indices: Iterable[int], n: int) -> np.ndarray:
    idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexError(f"witness index out of range for N={n}")
    return idx


def apply_noise_conditioned(
    omega_base: Configuration | int,
    fixed_ones: Iterable[int],
    params: NoiseParams,
    stream: RandomStream,
) -> tuple[Configuration, Configuration]:
    """Sample ``(omega, omega^eps)`` with ``omega`` conditioned on ``omega_W == 1``.

    ``omega_base`` is either an unconditioned product-measure sample, whose
    bits outside ``W`` are kept, or an arity, in which case the base is drawn
    from ``stream``.  Conditioning is done by pinning the coordinates of ``W``
    (exact for a product measure); the noise then acts on every coordinate,
    including those in ``W``.
    """
    rng = stream.generator()
    if isinstance(omega_base, Configuration):
        n = len(omega_base)
        bits = omega_base.bits.copy()
    else:
        n = int(omega_base)
        if n < 1:
            raise ValueError("n must be >= 1")
        bits = _draw_bits(rng, n, params.p)
    idx = _as_index_array(fixed_ones, n)
    bits[idx] = True
    noised = _noise_bits(rng, bits, params.p, params.eps) if params.eps > 0 else bits
    return Configuration(bits), Configuration(noised)


# -- hashing uniforms -------------------------------------------------------

def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = x + np.uint64(0x9E3779B97F4A7C15)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def hash_uniform(key: int, indices: np.ndarray) -> np.ndarray:
    """Uniform(0,1) values that are a pure function of ``(key, index)``.

    Used where a per-coordinate draw must be addressable by coordinate index
    (sparse noise on graphs) instead of by draw order.
    """
    with np.errstate(over="ignore"):
        k = _splitmix64(np.array([key & _MASK64], dtype=np.uint64))[0]
        h = _splitmix64(np.asarray(indices, dtype=np.uint64) ^ k)
        h = _splitmix64(h + k)
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def stream_key(stream: RandomStream) -> int:
    """64-bit digest of a stream, for :func:`hash_uniform`."""
    with np.errstate(over="ignore"):
        parts = np.array([stream.master_seed & _MASK64, stream.stream_id & _MASK64,
                          stream.lane & _MASK64], dtype=np.uint64)
        acc = np.uint64(0x243F6A8885A308D3)
        for v in parts:
            acc = _splitmix64(np.array([acc ^ v], dtype=np.uint64))[0]
    return int(acc)


# -- sample-index parallelism ----------------------------------------------

def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("NOISE_LAB_WORKERS", "1")))
    except ValueError:
        return 1


def chunk_ranges(samples: int, start: int = 0, chunk: int = CHUNK_SIZE) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk, start + samples)) for lo in range(start, start + samples, chunk)]


def map_chunks(func: Callable, ranges: Sequence[tuple[int, int]], workers: int | None = None) -> list:
    """Apply ``func(lo, hi)`` to each sample range, returning results in range order.

    The reduction order is fixed by the ranges, so the outcome is identical
    for any worker count.
    """
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(ranges) <= 1:
        return [func(lo, hi) for lo, hi in ranges]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(func, lo, hi) for lo, hi in ranges]
        return [f.result() for f in futures]
