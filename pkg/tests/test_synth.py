import hashlib

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from mccatch.cli import read_vector_csv
from mccatch.errors import ConfigurationError
from mccatch.synth import (AxiomScenario, CloudSpec, generate_axiom_scenario, generate_cloud,
                           lattice_template, planted_outlier_corpus, write_labels_csv, write_vectors_csv)


def test_isolation_instance():
    spec = AxiomScenario("isolation", "gaussian", 10_000, 5, 5, red_bridge=5.0, green_bridge=10.0, seed=1)
    data, labels = generate_axiom_scenario(spec)
    assert data.n == 10_010
    assert np.bincount(labels).tolist() == [10_000, 5, 5]
    red, green = data.vectors[labels == 1], data.vectors[labels == 2]
    assert np.allclose(red.mean(0), [-5, 0], atol=0.1)
    assert np.allclose(green.mean(0), [0, -10], atol=0.1)


def test_cardinality_instance():
    spec = AxiomScenario.default("cardinality", "cross", seed=2)
    assert spec.red_bridge == spec.green_bridge and spec.red_size == 20 and spec.green_size == 5
    _, labels = generate_axiom_scenario(spec)
    assert np.bincount(labels).tolist() == [10_000, 20, 5]


@pytest.mark.parametrize("shape", ["gaussian", "cross", "arc"])
def test_planted_clusters_clear_the_inliers(shape):
    for axiom in ("isolation", "cardinality"):
        data, labels = generate_axiom_scenario(AxiomScenario.default(axiom, shape, seed=0))
        X = data.vectors
        for k in (1, 2):
            gap = cdist(X[labels == k], X[labels == 0]).min()
            assert gap > 1.0


def test_zero_spread_gives_coincident_members():
    spec = AxiomScenario("isolation", "arc", 500, 4, 4, 6.0, 12.0, mc_spread=0.0)
    data, labels = generate_axiom_scenario(spec)
    green = data.vectors[labels == 2]
    assert cdist(green, green).max() == 0.0


def test_lattice_template_is_connected():
    for k in (1, 2, 5, 9, 20, 37):
        T = lattice_template(k, 0.3)
        assert len(np.unique(T, axis=0)) == k
        if k > 1:
            D = cdist(T, T)
            np.fill_diagonal(D, np.inf)
            assert np.allclose(D.min(1), 0.3)
        assert np.allclose(lattice_template(k, 0.3)[:min(k, 5)], lattice_template(5, 0.3)[:min(k, 5)])


def test_invalid_specs():
    bad = [
        AxiomScenario("isolation", "gaussian", red_bridge=3.0),
        AxiomScenario("isolation", "gaussian", red_bridge=8.0, green_bridge=8.0),
        AxiomScenario("cardinality", "gaussian", red_size=5, green_size=5, red_bridge=8, green_bridge=8),
        AxiomScenario("cardinality", "gaussian", red_size=20, green_size=5, red_bridge=8, green_bridge=9),
        AxiomScenario("isolation", "blob"),
        AxiomScenario("isolation", "gaussian", mc_spread=-1.0),
    ]
    for spec in bad:
        with pytest.raises(ConfigurationError):
            generate_axiom_scenario(spec)


def test_clouds():
    a = generate_cloud(CloudSpec("uniform", 2, 4, seed=9)).vectors
    b = generate_cloud(CloudSpec("uniform", 2, 4, seed=9)).vectors
    assert a.shape == (4, 2) and ((a >= 0) & (a <= 1)).all()
    assert np.array_equal(a, b)
    d = generate_cloud(CloudSpec("diagonal", 7, 300, seed=1, jitter=1e-4)).vectors
    spread = d.max(1) - d.min(1)
    assert (spread <= 1e-4).all()
    for dim in (0, 51):
        with pytest.raises(ConfigurationError):
            generate_cloud(CloudSpec("uniform", dim, 10))
    with pytest.raises(ConfigurationError):
        generate_cloud(CloudSpec("ring", 2, 10))


def test_planted_corpus():
    data, labels = planted_outlier_corpus(4, n_inliers=1000)
    assert data.n == 1015 and labels.sum() == 15
    with pytest.raises(ConfigurationError):
        planted_outlier_corpus(0, bridge=3.0)


def _digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_csv_roundtrip_is_exact_and_stable(tmp_path):
    data, labels = generate_axiom_scenario(AxiomScenario.default("cardinality", "arc", seed=7, n_inliers=300))
    write_vectors_csv(data, tmp_path / "a.csv")
    write_vectors_csv(data, tmp_path / "b.csv")
    write_labels_csv(labels, tmp_path / "l.csv")
    assert _digest(tmp_path / "a.csv") == _digest(tmp_path / "b.csv")
    back = read_vector_csv(tmp_path / "a.csv")
    assert np.array_equal(back.vectors, data.vectors)
    assert back.labels == list(range(data.n))
    rows = (tmp_path / "l.csv").read_text().splitlines()
    assert rows[0] == "id,label" and rows[-1] == f"{data.n - 1},green"
