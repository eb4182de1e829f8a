import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from noise_lab.core import (Configuration, NoiseParams, RandomStream, apply_noise,
                            apply_noise_conditioned, chunk_ranges, hash_uniform, map_chunks,
                            sample_configuration)


def test_p_must_be_strictly_inside():
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            sample_configuration(4, bad, RandomStream(0, 0))
    with pytest.raises(ValueError):
        NoiseParams(0.5, 1.2)


def test_configuration_is_immutable():
    c = Configuration([1, 0, 1])
    with pytest.raises(ValueError):
        c.bits[0] = False
    assert len(c) == 3 and c.popcount() == 2 and c.to_mask() == 0b101
    assert Configuration.from_mask(0b101, 3) == c
    assert c.any_of([1, 2]) and not c.any_of([1])


def test_large_sample_mean():
    om = sample_configuration(10**6, 0.5, RandomStream(7, 0))
    assert abs(om.bits.mean() - 0.5) < 4 * math.sqrt(0.25 / 10**6)


def test_determinism_and_independence_of_streams():
    a = sample_configuration(20, 0.3, RandomStream(11, 5))
    b = sample_configuration(20, 0.3, RandomStream(11, 5))
    assert a == b
    c = sample_configuration(2000, 0.5, RandomStream(11, 6))
    d = sample_configuration(2000, 0.5, RandomStream(11, 7))
    assert c != d
    # independent streams: agreement rate near 1/2
    agree = np.mean(c.bits == d.bits)
    assert abs(agree - 0.5) < 4 * math.sqrt(0.25 / 2000)


def test_zero_noise_is_identity():
    om = sample_configuration(50, 0.4, RandomStream(1, 1))
    assert apply_noise(om, NoiseParams(0.4, 0.0), RandomStream(1, 2)) == om


def test_full_noise_is_fresh():
    n = 200_000
    om = Configuration.ones(n)
    out = apply_noise(om, NoiseParams(0.3, 1.0), RandomStream(2, 0))
    assert abs(out.bits.mean() - 0.3) < 4 * math.sqrt(0.21 / n)


def test_flip_rate_at_half():
    n, eps = 10**6, 0.3
    om = sample_configuration(n, 0.5, RandomStream(3, 0))
    out = apply_noise(om, NoiseParams(0.5, eps), RandomStream(3, 1))
    rate = np.mean(om.bits != out.bits)
    se = math.sqrt(eps / 2 * (1 - eps / 2) / n)
    assert abs(rate - eps / 2) < 4 * se


def test_marginal_preserved_chisquare():
    # law of 3-bit patterns of omega^eps matches the product measure
    p, eps, n = 0.3, 0.4, 300_000
    om = sample_configuration(n, p, RandomStream(4, 0))
    out = apply_noise(om, NoiseParams(p, eps), RandomStream(4, 1)).bits
    codes = out[0::3][: n // 3].astype(int) + 2 * out[1::3][: n // 3] + 4 * out[2::3][: n // 3]
    obs = np.bincount(codes, minlength=8)
    ones = np.array([bin(c).count("1") for c in range(8)])
    exp = obs.sum() * p ** ones * (1 - p) ** (3 - ones)
    assert stats.chisquare(obs, exp).pvalue > 1e-4


def test_conditioned_all_and_empty():
    n = 8
    om, _ = apply_noise_conditioned(n, range(n), NoiseParams(0.3, 0.5), RandomStream(0, 0))
    assert om == Configuration.ones(n)
    base = sample_configuration(n, 0.3, RandomStream(0, 1))
    om, _ = apply_noise_conditioned(base, [], NoiseParams(0.3, 0.5), RandomStream(0, 2))
    assert om == base
    with pytest.raises(IndexError):
        apply_noise_conditioned(n, [8], NoiseParams(0.3, 0.5), RandomStream(0, 3))


def test_conditioned_witness_survival():
    w, p, eps, trials = 20, 0.5, 0.2, 20_000
    hits = 0
    for s in range(trials):
        _, noised = apply_noise_conditioned(w, range(w), NoiseParams(p, eps), RandomStream(9, s))
        hits += bool(noised.bits.all())
    target = (1 - eps * (1 - p)) ** w
    se = math.sqrt(target * (1 - target) / trials)
    assert abs(hits / trials - target) < 4 * se


def test_conditioned_outside_coordinates_iid():
    p, eps, trials = 0.3, 0.5, 4000
    outs = np.array([apply_noise_conditioned(10, [0, 1], NoiseParams(p, eps),
                                             RandomStream(12, s))[1].bits for s in range(trials)])
    free = outs[:, 2:]
    se = math.sqrt(p * (1 - p) / free.size)
    assert abs(free.mean() - p) < 4 * se
    # pinned coordinates survive as 1 w.p. 1 - eps(1-p)
    assert abs(outs[:, 0].mean() - (1 - eps * (1 - p))) < 4 * math.sqrt(0.2 / trials)


@given(st.integers(0, 2**63 - 1), st.integers(0, 2**40))
@settings(max_examples=50, deadline=None)
def test_hash_uniform_in_unit_interval(key, idx):
    u = hash_uniform(key, np.array([idx, idx + 1]))
    assert np.all((u >= 0) & (u < 1))
    assert u[0] == hash_uniform(key, np.array([idx]))[0]


@given(st.integers(1, 2000), st.integers(0, 100))
@settings(max_examples=50, deadline=None)
def test_chunk_ranges_partition(samples, start):
    r = chunk_ranges(samples, start)
    assert r[0][0] == start and r[-1][1] == start + samples
    assert all(a[1] == b[0] for a, b in zip(r, r[1:]))


def _square_sum(lo, hi):
    return sum(i * i for i in range(lo, hi))


def test_map_chunks_worker_invariance():
    ranges = chunk_ranges(3000)
    assert map_chunks(_square_sum, ranges, 1) == map_chunks(_square_sum, ranges, 3)
