import numpy as np
import pytest
from scipy.spatial.distance import pdist, squareform

from vgsynth.embedding import (conditional_affinities, embed_2d,
                               embedding_overlap, mixing_score,
                               write_embedding_csv)
from vgsynth.errors import UndefinedMetricError


def gaussian_cloud(rng, n, dim=5, center=0.0):
    return rng.standard_normal((n, dim)) + center


class TestAffinities:
    def test_rows_are_distributions(self, rng):
        X = gaussian_cloud(rng, 80)
        D2 = squareform(pdist(X, "sqeuclidean"))
        P, _ = conditional_affinities(D2, perplexity=15.0)
        np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-9)
        assert np.all(np.diag(P) == 0.0)

    def test_entropy_hits_perplexity_target(self, rng):
        X = gaussian_cloud(rng, 120)
        D2 = squareform(pdist(X, "sqeuclidean"))
        _, entropies = conditional_affinities(D2, perplexity=20.0)
        np.testing.assert_allclose(entropies, np.log(20.0), atol=1e-5)


class TestEmbed2d:
    def test_shape_contract(self, rng):
        emb = embed_2d(gaussian_cloud(rng, 40), perplexity=10, iterations=60, seed=1)
        assert emb.coords.shape == (40, 2)
        assert np.isfinite(emb.coords).all()

    def test_seed_determinism(self, rng):
        X = gaussian_cloud(rng, 30)
        a = embed_2d(X, perplexity=8, iterations=50, seed=7)
        b = embed_2d(X, perplexity=8, iterations=50, seed=7)
        np.testing.assert_array_equal(a.coords, b.coords)

    def test_kl_decreases_after_exaggeration(self, rng):
        X = np.vstack([gaussian_cloud(rng, 100, center=0.0),
                       gaussian_cloud(rng, 100, center=4.0)])
        emb = embed_2d(X, perplexity=20, iterations=500, seed=3)
        assert emb.kl_trace[499] <= emb.kl_trace[299]

    def test_perplexity_must_be_below_n(self, rng):
        with pytest.raises(ValueError):
            embed_2d(gaussian_cloud(rng, 10), perplexity=10, iterations=10, seed=0)

    def test_too_few_points_rejected(self, rng):
        with pytest.raises(ValueError):
            embed_2d(gaussian_cloud(rng, 3), perplexity=2, iterations=10, seed=0)

    def test_cap_subsamples(self, rng):
        emb = embed_2d(gaussian_cloud(rng, 60), perplexity=5, iterations=20,
                       seed=0, max_points=50)
        assert emb.coords.shape == (50, 2)
        assert emb.indices.shape == (50,)
        assert np.all(np.diff(emb.indices) > 0)


class TestMixingScore:
    def test_far_clusters_score_near_zero(self, rng):
        coords = np.vstack([gaussian_cloud(rng, 50, dim=2, center=0.0),
                            gaussian_cloud(rng, 50, dim=2, center=100.0)])
        origins = np.array(["real"] * 50 + ["synthetic"] * 50)
        assert mixing_score(coords, origins, k=5) <= 0.01

    def test_fair_coin_labels_score_one(self):
        scores = []
        for seed in range(20):
            rng = np.random.default_rng(seed)
            coords = rng.standard_normal((1000, 2))
            origins = np.where(rng.random(1000) < 0.5, "real", "synthetic")
            scores.append(mixing_score(coords, origins, k=10))
        assert abs(np.mean(scores) - 1.0) <= 0.1

    def test_duplicated_points_score_two(self, rng):
        real = gaussian_cloud(rng, 40, dim=2)
        coords = np.vstack([real, real])
        origins = np.array(["real"] * 40 + ["synthetic"] * 40)
        assert mixing_score(coords, origins, k=1) == pytest.approx(2.0)

    def test_single_origin_rejected(self, rng):
        coords = gaussian_cloud(rng, 10, dim=2)
        with pytest.raises(UndefinedMetricError):
            mixing_score(coords, np.array(["real"] * 10), k=2)

    def test_k_bounds(self, rng):
        coords = gaussian_cloud(rng, 10, dim=2)
        origins = np.array(["real"] * 5 + ["synthetic"] * 5)
        with pytest.raises(ValueError):
            mixing_score(coords, origins, k=10)


def test_embedding_overlap_balances_and_scores(rng):
    real = gaussian_cloud(rng, 120, dim=6)
    synth = gaussian_cloud(rng, 80, dim=6) + 0.1
    result = embedding_overlap(real, synth, perplexity=15, iterations=120,
                               seed=2, k=5)
    assert result.coords.shape == (160, 2)
    assert (result.origins == "real").sum() == 80
    assert result.mixing > 0.5  # same distribution, strong intermixing


def test_embedding_csv_export(tmp_path, rng):
    coords = gaussian_cloud(rng, 6, dim=2)
    origins = ["real"] * 3 + ["synthetic"] * 3
    path = tmp_path / "emb.csv"
    write_embedding_csv(coords, origins, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,origin"
    assert len(lines) == 7
    assert lines[1].endswith("real")
