import math

import pytest

from noise_lab.graphs.edges import EdgeConfig
from noise_lab.graphs.giant import (far_threshold, find_path, giant_robustness_experiment,
                                    is_simple_path, path_length)


def _line(n):
    return EdgeConfig.from_pairs(n, [(i, i + 1) for i in range(n - 1)])


def test_path_length_formula():
    assert path_length(10**5, 10) == 7
    assert far_threshold(10**5, 10) == pytest.approx(2.5)
    assert path_length(10**4, 4) == math.floor(1.5 * math.log(10**4) / math.log(4))


def test_find_path_on_line():
    g = _line(12)
    p = find_path(g, 0, 10, 10, set())
    assert p == list(range(11))
    assert is_simple_path(g, p, 10)
    assert find_path(g, 0, 10, 9, set()) is None
    assert find_path(g, 0, 10, 11, set()) is None


def test_find_path_on_cycle_with_forbidden():
    n = 12
    g = EdgeConfig.from_pairs(n, [(i, (i + 1) % n) for i in range(n)])
    for length in (4, 8):
        p = find_path(g, 0, 4, length, set())
        assert p is not None and is_simple_path(g, p, length)
        assert p[0] == 0 and p[-1] == 4
    assert find_path(g, 0, 4, 8, {2}) is not None
    assert find_path(g, 0, 4, 4, {2}) is None


def test_find_path_length_one_and_errors():
    g = _line(3)
    assert find_path(g, 0, 1, 1, set()) == [0, 1]
    with pytest.raises(ValueError):
        find_path(g, 0, 1, 0, set())


def test_is_simple_path_rejects():
    g = _line(5)
    assert not is_simple_path(g, [0, 1, 0], 2)
    assert not is_simple_path(g, [0, 2], 1)
    assert not is_simple_path(g, [0, 1, 2], 3)


def test_zero_noise_conditional_is_one():
    rep = giant_robustness_experiment(3000, 6.0, 0.0, samples=12, seed=1, path_samples=4)
    assert rep.prob_one > 0
    assert rep.conditional == 1.0
    assert rep.path_length == path_length(3000, 6.0)


def test_report_fields_and_determinism():
    a = giant_robustness_experiment(2000, 5.0, 0.1, samples=8, seed=2, path_samples=3)
    b = giant_robustness_experiment(2000, 5.0, 0.1, samples=8, seed=2, path_samples=3)
    assert a.to_dict() == b.to_dict()
    assert 0 <= a.prob_one <= 1 and a.pairs_tested <= 3


@pytest.mark.parametrize("lam", [0.5, 1.0])
def test_rejects_subcritical(lam):
    with pytest.raises(ValueError):
        giant_robustness_experiment(1000, lam, 0.1, samples=2)


def test_rejects_bad_args():
    with pytest.raises(ValueError):
        giant_robustness_experiment(1000, 5, 0.1, k_triangles=0, samples=2)
    with pytest.raises(ValueError):
        giant_robustness_experiment(1000, 5, 1.5, samples=2)
