import math

import numpy as np
import pytest

from mccatch.errors import ConfigurationError, ContractViolation, InputError
from mccatch.metric import DatasetHandle, MetricSpec, distance, levenshtein, transformation_cost
from oracles import levenshtein_ref

# (a, b, distance) checked by hand against the DP table
WORD_PAIRS = [
    ("", "", 0), ("", "abc", 3), ("abc", "", 3), ("a", "a", 0), ("a", "b", 1),
    ("smith", "smyth", 1), ("kitten", "sitting", 3), ("flaw", "lawn", 2), ("book", "back", 2),
    ("sunday", "saturday", 3), ("abc", "cba", 2), ("intention", "execution", 5), ("gumbo", "gambol", 2),
    ("ab", "ba", 2), ("abcdef", "azced", 3), ("horse", "ros", 3), ("silva", "silveira", 3),
    ("oliveira", "olivera", 1), ("aaaa", "aa", 2), ("distance", "editing", 5),
]


def test_distance_examples():
    spec = MetricSpec.lp()
    assert distance(np.array([1.5, 2.0]), np.array([1.5, 2.0]), spec) == 0
    assert distance(np.array([0.0, 0.0]), np.array([3.0, 4.0]), spec) == 5.0
    assert distance("smith", "smyth", MetricSpec.edit()) == 1


def test_other_lp():
    a, b = np.array([0.0, 0.0]), np.array([3.0, 4.0])
    assert distance(a, b, MetricSpec.lp(p=1)) == 7.0
    assert distance(a, b, MetricSpec.lp(p=math.inf)) == 4.0


@pytest.mark.parametrize("a,b,want", WORD_PAIRS)
def test_levenshtein_table(a, b, want):
    assert levenshtein(a, b) == want
    assert levenshtein_ref(a, b) == want


def test_batched_edit_matches_scalar():
    rng = np.random.default_rng(4)
    words = ["".join(rng.choice(list("abcd"), int(rng.integers(0, 9)))) for _ in range(60)]
    data = DatasetHandle.from_strings(words)
    I, J = np.triu_indices(60, 1)
    got = data.dist_pairs(I, J)
    assert got.tolist() == [levenshtein(words[i], words[j]) for i, j in zip(I, J)]


def test_transformation_cost():
    assert transformation_cost(MetricSpec.lp(dim=3)) == 3
    # <3> + <26> + <10>, from the arbitrary-precision code-length oracle
    assert transformation_cost(MetricSpec.edit(26, 10)) == pytest.approx(16.400598567797203, abs=1e-12)
    assert transformation_cost(MetricSpec.external(lambda a, b: 0.0, t=7)) == 7
    assert DatasetHandle.from_strings(["ab", "abcd"]).transformation_cost() == pytest.approx(
        transformation_cost(MetricSpec.edit(4, 4)))


def test_triangle_inequality():
    rng = np.random.default_rng(0)
    for p in (1.0, 2.0, 3.0, math.inf):
        spec = MetricSpec.lp(p=p)
        for _ in range(1000):
            a, b, c = rng.normal(size=(3, 4)) * rng.uniform(0.1, 100)
            assert distance(a, c, spec) <= distance(a, b, spec) + distance(b, c, spec) + 1e-9
    for _ in range(1000):
        a, b, c = ("".join(rng.choice(list("xyz"), int(rng.integers(0, 7)))) for _ in range(3))
        assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


def test_rejects_bad_payloads():
    with pytest.raises(InputError):
        DatasetHandle.from_vectors([[0.0, np.nan]])
    with pytest.raises(InputError):
        DatasetHandle.from_vectors([[0.0, np.inf]])
    with pytest.raises(ContractViolation):
        distance("abc", np.zeros(2), MetricSpec.lp())
    with pytest.raises(ConfigurationError):
        MetricSpec.lp(p=0.5)
    with pytest.raises(ConfigurationError):
        MetricSpec.external(lambda a, b: 0.0, t=0)


def test_external_metric_roundtrip():
    objs = [1, 4, 9]
    data = DatasetHandle.from_objects(objs, lambda a, b: abs(a - b), t=1)
    assert data.dist(0, 2) == 8
    assert data.dist_many(1, [0, 1, 2]).tolist() == [3, 0, 5]
