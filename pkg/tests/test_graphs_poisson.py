import math

import numpy as np
import pytest
from scipy import stats

from noise_lab.graphs.moments import solve_clique_p
from noise_lab.graphs.patterns import disjoint_edges
from noise_lab.graphs.poisson import (bin_poisson_tv, diagnostics_from_counts, empirical_tv,
                                      poisson_diagnostics)
from noise_lab.graphs.properties import property_clique, property_contains


def test_bin_poisson_tribes_analogue():
    blocks, prob = 5461, 2.0 ** -12
    assert blocks * prob == pytest.approx(1.333, abs=1e-3)
    tv = bin_poisson_tv(blocks, prob)
    # independent check by summing over a generous support
    k = np.arange(200)
    ref = 0.5 * np.abs(stats.binom.pmf(k, blocks, prob) - stats.poisson.pmf(k, blocks * prob)).sum()
    assert tv == pytest.approx(ref, rel=1e-6)
    assert tv < 0.01
    # Le Cam: TV <= trials * prob^2
    assert tv <= blocks * prob ** 2


def test_empirical_tv_exact_small():
    counts = np.array([0, 0, 1, 2])
    lam = 1.0
    pmf = stats.poisson.pmf([0, 1, 2], lam)
    ref = 0.5 * (abs(0.5 - pmf[0]) + abs(0.25 - pmf[1]) + abs(0.25 - pmf[2])
                 + stats.poisson.sf(2, lam))
    assert empirical_tv(counts, lam)[0] == pytest.approx(ref, rel=1e-12)


def test_empirical_tv_shrinks_for_true_poisson():
    rng = np.random.default_rng(0)
    small = empirical_tv(rng.poisson(1.0, 500), 1.0)[0]
    big = empirical_tv(rng.poisson(1.0, 50000), 1.0)[0]
    assert big < small and big < 0.01


def test_bound_on_poisson_counts_near_zero():
    rng = np.random.default_rng(1)
    x = rng.poisson(2.0, 20000)
    d = diagnostics_from_counts(x, x, 3, 0.1, seed=0)
    assert abs(d.tv_bound - 2 * 0.001) < 4 * d.tv_bound_stderr
    assert d.preconditions_hold and d.bound_respected()


def test_k4_chen_stein():
    n = 50
    p = solve_clique_p(n, 4)
    d = poisson_diagnostics(property_clique(n, 4), p, samples=1500, seed=3)
    assert d.mean == pytest.approx(1.0, abs=4 * d.mean_stderr)
    assert d.preconditions_hold
    assert d.bound_respected(4.0)
    # pinning the witness off can only lower the count
    assert d.conditional_mean <= d.mean + 1e-12


def test_disjoint_edges_control_flagged():
    n = 30
    d = poisson_diagnostics(property_contains(disjoint_edges(2), n), 0.2, samples=200, seed=1)
    assert d.prob_zero == 0.0
    assert not d.nondegenerate
    assert not d.preconditions_hold


def test_degenerate_flag():
    d = poisson_diagnostics(property_clique(20, 5), 1e-6, samples=50, seed=0)
    assert d.degenerate and not d.preconditions_hold
    assert math.isnan(d.tv_bound)


def test_rejects_single_sample():
    with pytest.raises(ValueError):
        poisson_diagnostics(property_clique(10, 3), 0.3, samples=1, seed=0)
