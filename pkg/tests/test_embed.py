import types

import numpy as np
import pytest

from feclustre.errors import AffinityTooLarge, ConfigError, EmbeddingError
from feclustre.stages.corpus.features import build_feature_set
from feclustre.stages.corpus.models import Feature, FeatureSource
from feclustre.stages.embed import providers
from feclustre.stages.cluster import metrics, sweep
from feclustre.stages.embed.affinity import affinity, cosine_dissimilarity
from feclustre.stages.embed.cache import read_binary, read_vector_cache, write_binary, write_vector_cache
from feclustre.stages.embed.embedder import embed_features, embed_texts
from feclustre.stages.embed.hashing import hashing_embed
from feclustre.stages.embed.models import EmbeddingMatrix
from feclustre.stages.embed.providers import CachedProvider, HashingProvider, RemoteEmbeddingProvider

from conftest import random_unit_rows


class FixedProvider:
    tag = "fixed"

    def __init__(self, dim=3, fail_on=None, dims=None):
        self.dim = dim
        self.fail_on = fail_on
        self.dims = dims
        self.calls = 0

    def embed(self, texts):
        self.calls += 1
        if self.fail_on and any(t in self.fail_on for t in texts):
            raise RuntimeError("provider down")
        dim = self.dims[texts[0]] if self.dims else self.dim
        return np.array([[len(t), 1.0] + [2.0] * (dim - 2) for t in texts])


def feature_set(*surfaces):
    return build_feature_set([Feature.from_raw(s, "r1", FeatureSource.SYNTACTIC) for s in surfaces])


def cosine(u, v):
    return float(np.dot(u, v))


def test_hashing_is_deterministic_and_unit():
    a, b = hashing_embed("dark mode"), hashing_embed("dark mode")
    assert np.array_equal(a, b)
    assert np.linalg.norm(a) == pytest.approx(1.0)


def test_hashing_distinguishes_surfaces():
    assert cosine(hashing_embed("abc", 64), hashing_embed("xyz", 64)) < 1.0


def test_hashing_rewards_shared_ngrams():
    base = hashing_embed("dark mode", 256, 0)
    assert cosine(base, hashing_embed("dark modes", 256, 0)) > cosine(base, hashing_embed("voice input", 256, 0))


def test_hashing_rejects_small_dimension():
    with pytest.raises(ConfigError):
        hashing_embed("x", 4)


def test_embed_features_normalizes_rows():
    fs = feature_set("chat", "voice input", "export")
    matrix = embed_features(fs, FixedProvider(dim=384))
    assert matrix.vectors.shape == (3, 384)
    assert np.allclose(np.linalg.norm(matrix.vectors, axis=1), 1.0)
    assert matrix.ids == ("chat", "voice input", "export")


def test_embed_features_reports_failed_surfaces():
    fs = feature_set("chat", "voice input")
    provider = FixedProvider(fail_on={"voice input"})
    with pytest.raises(EmbeddingError) as info:
        embed_features(fs, provider, batch_size=1, retries=2, backoff=0.0)
    assert info.value.failed == ["voice input"]


def test_embed_texts_rejects_dimension_mismatch():
    provider = FixedProvider(dims={"a": 3, "b": 4})
    with pytest.raises(EmbeddingError):
        embed_texts(["a", "b"], provider, batch_size=1, backoff=0.0)


def test_embedding_matrix_invariants():
    with pytest.raises(EmbeddingError):
        EmbeddingMatrix(ids=("a",), vectors=np.array([[2.0, 0.0]]), provider_tag="x")
    with pytest.raises(EmbeddingError):
        EmbeddingMatrix(ids=("a",), vectors=np.array([[np.nan, 1.0]]), provider_tag="x")


def test_affinity_matches_double_loop():
    rng = np.random.default_rng(11)
    vectors = random_unit_rows(rng, 200, 16)
    matrix = EmbeddingMatrix(ids=tuple(str(i) for i in range(200)), vectors=vectors, provider_tag="rand")
    dist = affinity(matrix).dist
    oracle = np.empty((200, 200))
    for i in range(200):
        for j in range(200):
            oracle[i, j] = 0.0 if i == j else 1.0 - sum(vectors[i, d] * vectors[j, d] for d in range(16))
    assert np.allclose(dist, oracle, atol=1e-12)
    assert np.array_equal(dist, dist.T)
    assert np.all(np.diag(dist) == 0.0)


def test_affinity_extremes():
    vectors = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [1.0, 0.0]])
    dist = affinity(EmbeddingMatrix(ids=tuple("abcd"), vectors=vectors, provider_tag="x")).dist
    assert dist[0, 1] == pytest.approx(1.0)
    assert dist[0, 2] == pytest.approx(2.0)
    assert dist[0, 3] == 0.0


def test_affinity_refuses_large_inputs():
    matrix = EmbeddingMatrix(ids=("a", "b", "c"), vectors=np.eye(3), provider_tag="x")
    with pytest.raises(AffinityTooLarge):
        affinity(matrix, max_size=2)


def test_vector_cache_formats(tmp_path):
    vectors = np.array([[0.6, 0.8], [1.0, 0.0]])
    write_vector_cache(tmp_path / "v.jsonl", ["a", "b"], vectors)
    cached = read_vector_cache(tmp_path / "v.jsonl")
    assert list(cached) == ["a", "b"]
    assert np.array_equal(cached["a"], vectors[0])

    write_binary(tmp_path / "v.bin", vectors)
    data = (tmp_path / "v.bin").read_bytes()
    assert data[:6] == b"FECLV1"
    assert len(data) == 6 + 8 + 4 * 4
    assert np.allclose(read_binary(tmp_path / "v.bin"), vectors, atol=1e-7)


def test_cached_provider_only_embeds_misses(tmp_path):
    inner = FixedProvider()
    cached = CachedProvider(inner, str(tmp_path / "cache.jsonl"))
    cached.embed(["a", "b"])
    cached.save()
    again = CachedProvider(FixedProvider(), str(tmp_path / "cache.jsonl"))
    again.embed(["b", "a"])
    assert again.inner.calls == 0
    again.embed(["c"])
    assert again.inner.calls == 1


def test_remote_provider_orders_by_index(monkeypatch):
    def fake_embedding(model, input, api_base=None, api_key=None):
        rows = [{"index": i, "embedding": [float(i + 1), 1.0]} for i in range(len(input))]
        return types.SimpleNamespace(data=list(reversed(rows)))

    monkeypatch.setattr("feclustre.stages.embed.services.embedding_client.litellm.embedding", fake_embedding)
    vectors = RemoteEmbeddingProvider(model="m").embed(["a", "b"])
    assert vectors.tolist() == [[1.0, 1.0], [2.0, 1.0]]


def test_provider_swap_keeps_shapes():
    fs = feature_set("chat", "voice input", "export")
    for provider in (HashingProvider(64, 1), FixedProvider(dim=5)):
        matrix = embed_features(fs, provider)
        assert matrix.n == 3
        assert np.allclose(np.linalg.norm(matrix.vectors, axis=1), 1.0)


def test_build_provider_rejects_unknown_mode():
    with pytest.raises(ConfigError):
        providers.build_provider("nope")


def test_clustering_shares_the_affinity_dissimilarity():
    assert metrics.cosine_dissimilarity is cosine_dissimilarity
    assert sweep.cosine_dissimilarity is cosine_dissimilarity
    vectors = random_unit_rows(np.random.default_rng(5), 12, 6)
    dist = cosine_dissimilarity(vectors)
    assert np.array_equal(dist, dist.T)
    assert np.all(np.diag(dist) == 0.0) and dist.min() >= 0.0 and dist.max() <= 2.0
    matrix = EmbeddingMatrix(ids=tuple(f"f{i}" for i in range(12)), vectors=vectors, provider_tag="test")
    assert np.array_equal(affinity(matrix).dist, dist)
