import os
import subprocess
import sys

import numpy as np
import pytest

from mccatch._backend import HAVE_NUMBA, backend, current_backend, set_backend, set_num_threads
from mccatch.index import build_index, count_self_join, pair_self_join
from mccatch.metric import DatasetHandle
from mccatch.score import run_mccatch
from mccatch.synth import planted_outlier_corpus

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def _same(r1, r2):
    assert np.array_equal(r1.profile.counts, r2.profile.counts)
    assert np.array_equal(r1.plot.x, r2.plot.x) and np.array_equal(r1.plot.y, r2.plot.y)
    assert r1.cutoff == r2.cutoff
    assert [m.members.tolist() for m in r1.microclusters] == [m.members.tolist() for m in r2.microclusters]
    assert r1.scores == r2.scores
    assert np.array_equal(r1.point_scores, r2.point_scores)


@pytest.mark.parametrize("seed", range(3))
def test_pipeline_identical_across_backends(seed):
    data, _ = planted_outlier_corpus(seed, n_inliers=2000)
    with backend("numba"):
        a = run_mccatch(data)
    with backend("numpy"):
        b = run_mccatch(data)
    _same(a, b)


def test_strings_identical_across_backends():
    rng = np.random.default_rng(2)
    words = ["".join(rng.choice(list("abc"), int(rng.integers(1, 7)))) for _ in range(300)]
    data = DatasetHandle.from_strings(words)
    tree = build_index(data)
    with backend("numba"):
        ca, pa = count_self_join(tree, 2), pair_self_join(tree, 1)
    with backend("numpy"):
        cb, pb = count_self_join(tree, 2), pair_self_join(tree, 1)
    assert np.array_equal(ca, cb) and np.array_equal(pa, pb)


def test_thread_count_does_not_change_results():
    data, _ = planted_outlier_corpus(5, n_inliers=2000)
    set_num_threads(1)
    a = run_mccatch(data)
    set_num_threads(8)
    b = run_mccatch(data)
    set_num_threads(0)
    _same(a, b)


def test_backend_switching():
    before = current_backend()
    with backend("numpy"):
        assert current_backend() == "numpy"
    assert current_backend() == before
    with pytest.raises(ValueError):
        set_backend("cuda")


def test_env_flag_selects_numpy():
    env = dict(os.environ, MCCATCH_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from mccatch._backend import current_backend as c; print(c())"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    assert out == "numpy"
