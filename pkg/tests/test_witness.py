import itertools
import math

import numpy as np
import pytest

from noise_lab.core import Configuration, NoiseParams
from noise_lab.families import (RecMajSpec, TribesSpec, make_recmaj, make_tribes,
                                recmaj_conditioned_prob, tribes_witness_gap)
from noise_lab.fourier import TruthTableFunction, and_function, majority
from noise_lab.witness import (canonical, dual, enumerate_witnesses,
                               expected_zero_witness_count, is_minimal_witness,
                               recmaj_expected_zero_witnesses, recmaj_zero_witness_total,
                               sns_gap, zero_witness_count)
from noise_lab.estimators import estimate_conditional
from oracles import brute_minimal_true_points, random_monotone_table


def test_and_witnesses():
    f = and_function(3)
    assert list(enumerate_witnesses(f, "one")) == [(0, 1, 2)]
    assert sorted(enumerate_witnesses(f, "zero")) == [(0,), (1,), (2,)]


def test_tribes_witnesses_are_blocks():
    f = make_tribes(TribesSpec(2, 3))
    assert sorted(enumerate_witnesses(f, "one")) == [(0, 1, 2), (3, 4, 5)]


def test_recmaj_witness_sizes_and_zero_count():
    f = make_recmaj(RecMajSpec(3, 2))
    ones = enumerate_witnesses(f, "one")
    assert all(len(w) == 4 for w in ones)
    zeros = enumerate_witnesses(f, "zero")
    assert len(zeros) == recmaj_zero_witness_total(2) == 27
    assert tuple(f.canonical_witness()) in set(ones)


def test_minimality_and_oracle_agreement():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        table = random_monotone_table(rng, n)
        f = TruthTableFunction(table, monotone=True)
        ws = enumerate_witnesses(f, "one")
        assert sorted(ws) == brute_minimal_true_points(table, n)
        assert all(is_minimal_witness(f, w, "one") for w in ws)
        zs = enumerate_witnesses(f, "zero")
        assert all(is_minimal_witness(f, w, "zero") for w in zs)
        # duality: 0-witnesses of f are the 1-witnesses of the dual
        assert sorted(zs) == sorted(enumerate_witnesses(dual(f), "one"))


def test_non_monotone_rejected():
    with pytest.raises(ValueError):
        enumerate_witnesses(TruthTableFunction(np.array([1, 0, 0, 1], dtype=bool)), "one")


def test_recmaj3_conditioned_probability():
    eps = 0.3
    for depth in (2, 4):
        f = make_recmaj(RecMajSpec(3, depth))
        r = sns_gap(f, canonical("one", f.canonical_witness()), NoiseParams(0.5, eps),
                    20_000, seed=5)
        assert r.conditional[0].within(1 - eps / 2)


def test_recmaj5_matches_recursion():
    f = make_recmaj(RecMajSpec(5, 4))
    r = sns_gap(f, canonical("one", f.canonical_witness()), NoiseParams(0.5, 0.5), 20_000, 6)
    assert r.conditional[0].within(recmaj_conditioned_prob(5, 4, 0.5))


def test_tribes_gap_matches_formula_and_fkg():
    spec = TribesSpec(4, 3)
    f = make_tribes(spec)
    ws = enumerate_witnesses(f, "one")
    p, eps = 0.5, 0.4
    r = sns_gap(f, ws, NoiseParams(p, eps), 40_000, 8)
    target = tribes_witness_gap(spec, p, eps)
    assert all(g.within(target) for g in r.gaps)
    assert all(g.value >= -4 * g.stderr for g in r.gaps)
    d = r.to_dict()
    assert d["argmax"] == r.argmax and len(d["per_witness"]) == 4


def test_sandwich_inequality():
    f = majority(7)
    ws = enumerate_witnesses(f, "one")
    p, eps = 0.5, 0.3
    r = sns_gap(f, ws, NoiseParams(p, eps), 20_000, 9)
    c = estimate_conditional(f, p, eps, 20_000, 9)
    best = max(r.conditional, key=lambda e: e.value)
    assert c.conditional.value <= best.value + 4 * math.hypot(best.stderr, c.conditional.stderr)


def test_zero_witness_gaps_use_zero_target():
    f = and_function(4)
    zs = enumerate_witnesses(f, "zero")
    r = sns_gap(f, zs, NoiseParams(0.5, 0.2), 20_000, 10)
    # pinning a coordinate to 0 makes f=0 certain unless the noise revives it
    assert all(c.value > 0.9 for c in r.conditional)
    assert r.prob_target.within(1 - 1 / 16)


def test_degenerate_flag_and_errors():
    f = TruthTableFunction(np.ones(8, dtype=bool))
    r = sns_gap(f, canonical("one", []), NoiseParams(0.5, 0.2), 200, 1)
    assert r.degenerate
    with pytest.raises(ValueError):
        sns_gap(f, canonical("one", []), NoiseParams(0.5, 0.2), 0, 1)


def test_zero_witness_count_examples():
    f = and_function(3)
    zs = enumerate_witnesses(f, "zero")
    assert zero_witness_count(f, zs, Configuration.ones(3)) == 0
    assert zero_witness_count(f, zs, Configuration.zeros(3)) == 3


def test_min_degree_zero_witness_count_on_empty_graph():
    from noise_lab.graphs import EdgeConfig, MinDegree
    g = EdgeConfig(6, [])
    prop = MinDegree(6, 1)
    assert prop.zero_witness_count(g) == 6
    # generic counter over explicit stars agrees
    from noise_lab.graphs.edges import edge_index
    stars = [tuple(int(edge_index(v, u, 6)) for u in range(6) if u != v) for v in range(6)]
    assert zero_witness_count(prop, canonical("zero", *stars), g) == 6


def test_expected_zero_witnesses_recmaj():
    f = make_recmaj(RecMajSpec(3, 2))
    zs = enumerate_witnesses(f, "zero")
    rep = expected_zero_witness_count(f, zs, 0.5, 20_000, 11, eps=0.1)
    assert rep.mean.within(recmaj_expected_zero_witnesses(2))
    assert rep.floor == pytest.approx(max(0.0, 1 - 0.1 * rep.mean.value))
