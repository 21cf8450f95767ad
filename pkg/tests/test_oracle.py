import math

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from mccatch.errors import ConfigurationError
from mccatch.index import build_index, estimate_diameter
from mccatch.metric import DatasetHandle
from mccatch.oracle import (NeighborProfile, Plateau, build_oracle_plot, find_plateaus,
                            neighbor_profiles, radii_schedule)


def test_radii_schedule():
    s = radii_schedule(16384, 15)
    assert s.radii.tolist() == [2.0 ** k for k in range(15)]
    assert radii_schedule(1, 2).radii.tolist() == [0.5, 1.0]
    s = radii_schedule(3.7, 9)
    assert s.a == 9 and s.r(9) == 3.7 and s.r(0) == 0.0
    with pytest.raises(ConfigurationError):
        radii_schedule(1.0, 1)


def test_grid_index():
    s = radii_schedule(8, 4)  # 1, 2, 4, 8
    assert s.grid_index([0.0, 0.99, 1.0, 3.9, 4.0, 100]).tolist() == [0, 0, 1, 2, 3, 4]


def test_profiles_collinear():
    data = DatasetHandle.from_vectors([[0.0], [1.0], [2.0]])
    tree = build_index(data)
    s = radii_schedule(2.0, 4)  # .25 .5 1 2
    prof = neighbor_profiles(tree, s, 3)
    assert prof.counts[:, 0].tolist() == [1, 1, 1]
    assert prof.counts[:, 2].tolist() == [2, 3, 2]
    assert prof.counts[:, 3].tolist() == [3, 3, 3]


def test_profiles_stop_above_c():
    data = DatasetHandle.from_vectors([[0.0], [1.0], [2.0]])
    prof = neighbor_profiles(build_index(data), radii_schedule(2.0, 4), 1)
    # at r = 1 the counts exceed 1, so r = 2 is never queried
    assert prof.counts.tolist() == [[1, 1, 2, 0], [1, 1, 3, 0], [1, 1, 2, 0]]


def test_sparse_profiles_agree_with_dense():
    X = np.random.default_rng(2).standard_normal((500, 2))
    tree = build_index(DatasetHandle.from_vectors(X))
    s = radii_schedule(estimate_diameter(tree), 15)
    prof = neighbor_profiles(tree, s, 50)
    D = cdist(X, X)
    dense = np.stack([(D <= r).sum(1) for r in s.radii], 1)
    dense[:, -1] = 500
    known = prof.counts > 0
    assert np.array_equal(prof.counts[known], dense[known])
    # every computed row is a prefix that stops right after the first count above c
    for row, full in zip(prof.counts, dense):
        k = int(known_len(row))
        stop = next((e + 1 for e in range(15) if full[e] > 50), 15)
        assert k == min(stop, 15)


def known_len(row):
    return np.count_nonzero(row)


def test_find_plateaus_examples():
    s = radii_schedule(2.0 ** 4, 5)
    assert find_plateaus([3, 3, 3, 3, 3], s, 0.1, 10) == [Plateau(1, 5, 3, 15.0)]
    got = find_plateaus([1, 1, 1, 5, 9], s, 0.1, 10)
    assert got[0] == Plateau(1, 3, 1, 3.0)
    # slope from 1 to 5 on a doubling ladder
    assert math.log(5) / math.log(2) > 0.1

    s8 = radii_schedule(128.0, 8)
    got = find_plateaus([1, 1, 5, 5, 5, 200, 0, 0], s8, 0.1, 20)
    assert [(p.start, p.end, p.height) for p in got] == [(1, 2, 1), (3, 5, 5)]


def test_excused_plateau_dropped():
    s = radii_schedule(2.0 ** 5, 6)
    got = find_plateaus([1, 1, 50, 50, 50, 50], s, 0.1, 20)
    assert [(p.start, p.end) for p in got] == [(1, 2)]


def _plot_from_rows(rows, l, a, b, c):
    s = radii_schedule(l, a)
    return build_oracle_plot(NeighborProfile(np.array(rows, dtype=np.int64), c), s, b), s


def test_oracle_plot_examples():
    plot, s = _plot_from_rows([[1, 1, 5, 5, 5, 200, 0, 0]], 128.0, 8, 0.1, 20)
    assert plot.x[0] == 1.0 and plot.y[0] == 12.0
    assert (plot.first_end[0], plot.middle_start[0], plot.middle_end[0]) == (2, 3, 5)

    plot, _ = _plot_from_rows([[5, 5, 9, 9, 0, 0, 0, 0]], 128.0, 8, 0.1, 20)
    assert plot.x[0] == 0.0

    plot, s = _plot_from_rows([[1, 1, 1, 1, 1, 1, 1, 1000]], 128.0, 8, 0.1, 20)
    assert plot.x[0] == s.r(7) - s.r1 and plot.y[0] == 0.0


def test_middle_plateau_ending_at_top_is_ignored():
    # the height-3 plateau reaches r_a, which does not count as a middle plateau
    plot, _ = _plot_from_rows([[1, 3, 3, 3]], 8.0, 4, 0.1, 5)
    assert plot.y[0] == 0.0


def test_longest_middle_plateau_wins():
    rows = [[1, 2, 2, 7, 7, 30, 0, 0]]
    plot, s = _plot_from_rows(rows, 128.0, 8, 0.1, 20)
    # [2,3] has length r3-r2 = 2 and [4,5] length r5-r4 = 8: the longer wins
    assert (plot.middle_start[0], plot.middle_end[0]) == (4, 5)
    # with c = 5 only the first remains
    plot, s = _plot_from_rows(rows, 128.0, 8, 0.1, 5)
    assert (plot.middle_start[0], plot.middle_end[0]) == (2, 3)


def test_tie_between_equal_length_plateaus():
    # a doubling ladder never gives two equal lengths, so use an evenly spaced one
    from mccatch.oracle import RadiiSchedule
    lin = RadiiSchedule(diameter=7.0, radii=np.arange(1.0, 8.0))
    plot = build_oracle_plot(NeighborProfile(np.array([[1, 1, 3, 3, 6, 6, 50]]), 10), lin, 0.1)
    assert (plot.middle_start[0], plot.middle_end[0]) == (3, 4)


def test_vectorized_plot_matches_row_by_row():
    rng = np.random.default_rng(5)
    for trial in range(20):
        X = rng.standard_normal((300, 2))
        X[:4] += 6
        tree = build_index(DatasetHandle.from_vectors(X))
        s = radii_schedule(estimate_diameter(tree), 12)
        c = int(rng.integers(2, 40))
        b = float(rng.choice([0.0, 0.1, 0.5]))
        prof = neighbor_profiles(tree, s, c)
        plot = build_oracle_plot(prof, s, b)
        for i in range(300):
            ps = find_plateaus(prof.counts[i], s, b, c)
            first = [p for p in ps if p.height == 1]
            mids = [p for p in ps if p.height > 1 and p.end != s.a]
            assert plot.first_end[i] == (first[0].end if first else 0)
            want = max(mids, key=lambda p: (p.length, -p.start)) if mids else None
            assert plot.middle_end[i] == (want.end if want else 0)


def test_to_tsv(tmp_path):
    plot, _ = _plot_from_rows([[1, 1, 5, 5, 5, 200, 0, 0], [5, 5, 5, 9, 0, 0, 0, 0]], 128.0, 8, 0.1, 20)
    plot.to_tsv(tmp_path / "p.tsv")
    lines = (tmp_path / "p.tsv").read_text().splitlines()
    assert lines[0] == "id\tx\ty\tfirst_end_index\tmiddle_start_index\tmiddle_end_index"
    assert lines[1] == "0\t1\t12\t2\t3\t5"
    assert lines[2].split("\t")[3] == ""
