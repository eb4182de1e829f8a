"""Exact p-biased Fourier-Walsh analysis of small Boolean functions.

Truth tables are indexed by integer masks: entry ``x`` holds ``f(omega)`` for
the configuration with ``omega_i`` equal to bit ``i`` of ``x``.  Subsets
``S`` of coordinates use the same encoding, so ``coeffs[S]`` is the
coefficient of the character ``chi_S``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import Configuration, check_eps, check_probability

#: largest arity for which a full table / transform is built
MAX_EXACT_ARITY = 25
#: largest arity tabulated automatically by the families
AUTO_TABLE_ARITY = 20

PARSEVAL_TOL = 1e-12
IDENTITY_TOL = 1e-12


class ArityError(ValueError):
    """Raised when an exact operation is requested above its arity cutoff."""


class IdentityViolation(AssertionError):
    """An exact identity failed beyond its floating-point tolerance."""


def enumerate_inputs(n: int, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """Rows ``start..stop`` of the ``2^n x n`` input matrix (mask order)."""
    stop = (1 << n) if stop is None else stop
    masks = np.arange(start, stop, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def product_weights(n: int, p: float) -> np.ndarray:
    """Probability of each mask under the product Bernoulli(p) measure."""
    w = np.ones(1)
    for _ in range(n):
        w = np.concatenate([w * (1.0 - p), w * p])
    return w


def popcounts(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)


class BooleanFunction:
    """A predicate on ``{0,1}^arity``.

    Subclasses implement :meth:`evaluate` on a boolean array whose last axis
    has length ``arity``.  ``monotone`` declares that ``omega <= omega'``
    coordinatewise implies ``f(omega) <= f(omega')``.
    """

    name = "f"

    def __init__(self, arity: int, monotone: bool = False, name: Optional[str] = None):
        if arity < 1:
            raise ValueError("arity must be >= 1")
        self.arity = int(arity)
        self.monotone = bool(monotone)
        if name is not None:
            self.name = name
        self._table = None

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, omega) -> int:
        if isinstance(omega, Configuration):
            bits = omega.bits
        elif isinstance(omega, (int, np.integer)):
            bits = Configuration.from_mask(int(omega), self.arity).bits
        else:
            bits = np.asarray(omega, dtype=bool)
        if bits.shape[-1] != self.arity:
            raise ValueError(f"expected {self.arity} bits, got {bits.shape[-1]}")
        return int(self.evaluate(bits[None, :])[0])

    @property
    def tabulated(self) -> bool:
        return self._table is not None

    def truth_table(self) -> np.ndarray:
        """Boolean array of length ``2^arity`` (cached)."""
        if self._table is None:
            if self.arity > MAX_EXACT_ARITY:
                raise ArityError(f"arity {self.arity} exceeds the exact cutoff {MAX_EXACT_ARITY}")
            size = 1 << self.arity
            table = np.empty(size, dtype=bool)
            step = 1 << 16
            for lo in range(0, size, step):
                hi = min(size, lo + step)
                table[lo:hi] = self.evaluate(enumerate_inputs(self.arity, lo, hi))
            table.flags.writeable = False
            self._table = table
        return self._table

    def is_monotone(self) -> bool:
        """Exhaustive monotonicity check on the truth table."""
        return table_is_monotone(self.truth_table(), self.arity)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} arity={self.arity}>"


class TruthTableFunction(BooleanFunction):
    """Function backed by an explicit truth table."""

    def __init__(self, table, monotone: Optional[bool] = None, name: str = "table"):
        table = np.asarray(table).astype(bool).reshape(-1)
        n = int(table.size).bit_length() - 1
        if table.size != (1 << n) or n < 1:
            raise ValueError("truth table length must be a power of two >= 2")
        if n > MAX_EXACT_ARITY:
            raise ArityError(f"arity {n} exceeds the exact cutoff {MAX_EXACT_ARITY}")
        table = table.copy()
        table.flags.writeable = False
        is_mono = table_is_monotone(table, n)
        if monotone and not is_mono:
            raise ValueError("table declared monotone but is not")
        super().__init__(n, monotone=is_mono if monotone is None else monotone, name=name)
        self._table = table

    @classmethod
    def from_function(cls, f: BooleanFunction) -> "TruthTableFunction":
        return cls(f.truth_table(), monotone=f.monotone or None, name=f.name)

    def evaluate(self, x):
        x = np.asarray(x, dtype=bool)
        masks = (x.astype(np.int64) << np.arange(self.arity, dtype=np.int64)).sum(axis=-1)
        return self._table[masks]


def table_is_monotone(table: np.ndarray, n: int) -> bool:
    t = np.asarray(table, dtype=bool)
    for i in range(n):
        v = t.reshape(-1, 2, 1 << i)
        if np.any(v[:, 0, :] & ~v[:, 1, :]):
            return False
    return True


def dictator(n: int, i: int = 0) -> TruthTableFunction:
    return TruthTableFunction(enumerate_inputs(n)[:, i], monotone=True, name=f"dictator{i}")


def majority(n: int) -> TruthTableFunction:
    if n % 2 == 0:
        raise ValueError("majority needs odd arity")
    return TruthTableFunction(popcounts(n) > n // 2, monotone=True, name=f"maj{n}")


def and_function(n: int) -> TruthTableFunction:
    t = np.zeros(1 << n, dtype=bool)
    t[-1] = True
    return TruthTableFunction(t, monotone=True, name=f"and{n}")


def constant(n: int, value: int = 1) -> TruthTableFunction:
    return TruthTableFunction(np.full(1 << n, bool(value)), monotone=True, name=f"const{value}")


# -- spectral table ---------------------------------------------------------

@dataclass(frozen=True)
class SpectralSample:
    """Law of the spectral sample: ``P(S) = fhat(S)^2``.

    ``residual`` is ``1 - sum fhat(S)^2 = 1 - E f``; it is non-zero because a
    0/1-valued function has ``E f^2 = E f``.
    """

    masks: np.ndarray
    mass: np.ndarray
    residual: float

    def total_mass(self) -> float:
        return float(self.mass.sum())

    def expected_size(self) -> float:
        return float((np.bitwise_count(self.masks.astype(np.uint64)) * self.mass).sum())


@dataclass(frozen=True)
class SpectralTable:
    arity: int
    p: float
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.coeffs.flags.writeable = False

    @property
    def mean(self) -> float:
        return float(self.coeffs[0])

    def levels(self) -> np.ndarray:
        return popcounts(self.arity)

    def level_weights(self) -> np.ndarray:
        """``W_k = sum_{|S|=k} fhat(S)^2`` for ``k = 0..arity``."""
        return np.bincount(self.levels(), weights=self.coeffs ** 2, minlength=self.arity + 1)

    def parseval_sum(self) -> float:
        return float(math.fsum(self.coeffs ** 2))

    def parseval_residual(self) -> float:
        return abs(self.parseval_sum() - self.mean)

    def variance(self) -> float:
        return float(math.fsum(self.coeffs[1:] ** 2))

    def expected_spectral_size(self) -> float:
        """``E|S|`` for the spectral sample ``S``."""
        return float(math.fsum(self.levels() * self.coeffs ** 2))

    def spectral_sample(self) -> SpectralSample:
        mass = self.coeffs ** 2
        nz = np.flatnonzero(mass > 0)
        return SpectralSample(nz, mass[nz], residual=1.0 - float(math.fsum(mass)))

    def coefficient(self, subset) -> float:
        mask = 0
        for i in subset:
            mask |= 1 << int(i)
        return float(self.coeffs[mask])

    def inverse(self) -> np.ndarray:
        """Reconstruct the function values ``f(x)`` from the coefficients."""
        p = self.p
        c = np.array(self.coeffs, dtype=float)
        lo, hi = math.sqrt(p / (1 - p)), math.sqrt((1 - p) / p)
        for i in range(self.arity):
            v = c.reshape(-1, 2, 1 << i)
            a = v[:, 0, :].copy()
            b = v[:, 1, :].copy()
            v[:, 0, :] = a - lo * b
            v[:, 1, :] = a + hi * b
        return c

    def to_csv(self, fh=None, parseval_row: bool = False) -> Optional[str]:
        """Write ``mask,coefficient`` rows (mask as hex). Returns text if no handle."""
        out = io.StringIO() if fh is None else fh
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["mask", "coefficient"])
        for s, c in enumerate(self.coeffs):
            w.writerow([f"0x{s:x}", repr(float(c))])
        if parseval_row:
            w.writerow(["parseval", repr(self.parseval_sum())])
        return out.getvalue() if fh is None else None

    @classmethod
    def from_csv(cls, text: str, p: float) -> "SpectralTable":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and r[0].startswith("0x")]
        n = len(rows).bit_length() - 1
        coeffs = np.zeros(len(rows))
        for mask, val in rows:
            coeffs[int(mask, 16)] = float(val)
        return cls(n, p, coeffs)


def transform(f: BooleanFunction, p: float) -> SpectralTable:
    """p-biased Fourier-Walsh coefficients via an in-place butterfly.

    Coordinate ``i`` uses the orthonormal basis
    ``chi_i(1) = sqrt((1-p)/p)``, ``chi_i(0) = -sqrt(p/(1-p))``.
    O(N 2^N) time.
    """
    check_probability(p)
    if f.arity > MAX_EXACT_ARITY:
        raise ArityError(f"arity {f.arity} too large for the exact transform")
    c = f.truth_table().astype(float)
    a = math.sqrt(p * (1 - p))
    for i in range(f.arity):
        v = c.reshape(-1, 2, 1 << i)
        f0 = v[:, 0, :].copy()
        f1 = v[:, 1, :]
        v[:, 0, :] = (1 - p) * f0 + p * f1
        v[:, 1, :] = a * (f1 - f0)
    return SpectralTable(f.arity, p, c)


def noise_covariance_exact(table: SpectralTable, eps: float) -> float:
    """``Cov(f(omega), f(omega^eps)) = sum_{S != {}} fhat(S)^2 (1-eps)^|S|``."""
    check_eps(eps)
    w = table.level_weights()
    k = np.arange(1, table.arity + 1)
    return float(math.fsum(w[1:] * (1.0 - eps) ** k))


def noise_correlation_exact(table: SpectralTable, eps: float) -> float:
    """Covariance normalised by ``Var f`` (nan for constant functions)."""
    var = table.variance()
    return noise_covariance_exact(table, eps) / var if var > 0 else float("nan")


def conditional_variance_exact(table: SpectralTable, eps: float) -> float:
    """``Var(P(f(omega^eps) = 1 | omega)) = sum_{S != {}} fhat(S)^2 (1-eps)^{2|S|}``."""
    check_eps(eps)
    w = table.level_weights()
    k = np.arange(1, table.arity + 1)
    return float(math.fsum(w[1:] * (1.0 - eps) ** (2 * k)))


def spectral_mass_below(table: SpectralTable, k: int) -> float:
    """``sum_{0 < |S| < k} fhat(S)^2``."""
    w = table.level_weights()
    return float(math.fsum(w[1:max(1, min(k, table.arity + 1))]))


def _require_table(f: BooleanFunction) -> np.ndarray:
    if f.arity > MAX_EXACT_ARITY:
        raise ArityError(f"arity {f.arity} too large for enumeration")
    return f.truth_table()


def _pivotal_indicator(t: np.ndarray, i: int) -> np.ndarray:
    v = t.reshape(-1, 2, 1 << i)
    d = v[:, 0, :] != v[:, 1, :]
    return np.stack([d, d], axis=1).reshape(-1)


def influences(f: BooleanFunction, p: float, verify: bool = True) -> np.ndarray:
    """Exact influences ``I_i = P(f(omega) != f(omega with bit i flipped))``.

    For monotone ``f`` (and ``verify``) also checks the level-one identity
    ``fhat({i}) = sqrt(p(1-p)) I_i`` and raises :class:`IdentityViolation`
    when it fails.
    """
    check_probability(p)
    t = _require_table(f)
    mu = product_weights(f.arity, p)
    infl = np.array([math.fsum(mu[_pivotal_indicator(t, i)]) for i in range(f.arity)])
    if verify and f.monotone:
        coeffs = transform(f, p).coeffs
        level_one = coeffs[1 << np.arange(f.arity)]
        dev = np.max(np.abs(level_one - math.sqrt(p * (1 - p)) * infl))
        if dev > IDENTITY_TOL:
            raise IdentityViolation(f"fhat({{i}}) vs sqrt(p(1-p)) I_i off by {dev:.3e}")
    return infl


@dataclass(frozen=True)
class PivotalReport:
    p: float
    pivotal_counts: np.ndarray = field(repr=False)
    influences: np.ndarray
    prob_one: float
    expected_size: float
    expected_size_given_one: float
    expected_size_given_zero: float
    lemma_status: str
    lemma_residual: Optional[float]

    def pivotal_set(self, f: BooleanFunction, omega) -> list[int]:
        """Coordinates whose flip changes ``f`` at ``omega``."""
        x = omega.to_mask() if isinstance(omega, Configuration) else int(omega)
        t = f.truth_table()
        return [i for i in range(f.arity) if t[x] != t[x ^ (1 << i)]]


def pivotal_report(f: BooleanFunction, p: float) -> PivotalReport:
    """Exact pivotal-set aggregates by enumeration.

    When ``f`` is monotone, or ``p = 1/2``, asserts
    ``E[|P| | f=1] = (p / P(f=1)) E|P|`` to 1e-12.
    """
    check_probability(p)
    t = _require_table(f)
    mu = product_weights(f.arity, p)
    counts = np.zeros(t.size, dtype=np.int64)
    infl = np.empty(f.arity)
    for i in range(f.arity):
        piv = _pivotal_indicator(t, i)
        counts += piv
        infl[i] = math.fsum(mu[piv])
    p1 = float(math.fsum(mu[t]))
    exp_size = float(math.fsum(mu * counts))
    if p1 <= 0.0 or p1 >= 1.0 or not np.any(t) or np.all(t):
        return PivotalReport(p, counts, infl, p1, exp_size, float("nan"), float("nan"),
                             "skipped: degenerate", None)
    given_one = float(math.fsum(mu[t] * counts[t])) / p1
    given_zero = float(math.fsum(mu[~t] * counts[~t])) / (1.0 - p1)
    if f.monotone or p == 0.5:
        residual = abs(given_one - p / p1 * exp_size)
        if residual > IDENTITY_TOL * max(1.0, given_one):
            raise IdentityViolation(f"E[|P| | f=1] identity off by {residual:.3e}")
        status = "ok"
    else:
        residual = None
        status = "skipped: non-monotone with p != 1/2"
    return PivotalReport(p, counts, infl, p1, exp_size, given_one, given_zero, status, residual)


def spectral_pivotal_identity(table: SpectralTable, report: PivotalReport) -> tuple[float, float]:
    """Return ``(E|S|, p(1-p) E|P|)`` and assert they agree to 1e-12."""
    lhs = table.expected_spectral_size()
    rhs = table.p * (1 - table.p) * report.expected_size
    if abs(lhs - rhs) > IDENTITY_TOL * max(1.0, abs(rhs)):
        raise IdentityViolation(f"E|S| = {lhs!r} but p(1-p)E|P| = {rhs!r}")
    return lhs, rhs
