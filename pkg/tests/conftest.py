import itertools
import json

import numpy as np
import pytest

from feclustre.stages.embed.models import EmbeddingMatrix
from feclustre.stages.embed.providers import HashingProvider
from feclustre.stages.embed.embedder import embed_texts

# Three vocabularies with no letters in common; every feature is a shared base
# phrase plus a short permutation suffix drawn from the same letters.
PLANTED = (
    ("abcdefgh", "faded cabbage bead"),
    ("ijklmnop", "monk pool lion limp"),
    ("qrstuvwx", "trust strut vwxq"),
)

FIXTURE_ALPHABETS = (
    ("abcde", "bead cab dace"),
    ("fghij", "fig jig hij"),
    ("klmno", "knoll moon lonk"),
    ("pqrst", "prst tsqr strp"),
    ("uvwxy", "vuxy wyv uwu"),
)


def variants(alphabet: str, base: str, count: int, width: int) -> list:
    suffixes = itertools.islice(itertools.permutations(alphabet, width), count)
    return [f"{base} {''.join(s)}" for s in suffixes]


@pytest.fixture
def planted_surfaces():
    return [s for alphabet, base in PLANTED for s in variants(alphabet, base, 20, 4)]


@pytest.fixture
def hashing_provider():
    return HashingProvider(dim=256, seed=0)


def embed_surfaces(surfaces, provider=None) -> EmbeddingMatrix:
    provider = provider or HashingProvider(dim=256, seed=0)
    return EmbeddingMatrix(ids=tuple(surfaces), vectors=embed_texts(surfaces, provider), provider_tag=provider.tag)


@pytest.fixture
def planted_embeddings(planted_surfaces):
    return embed_surfaces(planted_surfaces)


def random_unit_rows(rng, n, dim):
    vectors = rng.normal(size=(n, dim))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def write_jsonl(path, records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return path


@pytest.fixture
def fixture_corpus(tmp_path):
    """Fifty synthetic features over five vocabularies, with reviews and gold."""
    surfaces = [s for alphabet, base in FIXTURE_ALPHABETS for s in variants(alphabet, base, 10, 3)]
    reviews = [
        {"review_id": f"r{i}", "app_id": f"app{i % 3}", "body": f"I really like the {s} option"}
        for i, s in enumerate(surfaces)
    ]
    syntactic = [{"surface": s, "review_id": f"r{i}"} for i, s in enumerate(surfaces)]
    llm = [{"surface": s, "review_id": f"r{i}"} for i, s in enumerate(surfaces) if i % 2 == 0]
    gold = [{"review_id": f"r{i}", "features": [s]} for i, s in enumerate(surfaces)]
    paths = {
        "reviews": write_jsonl(tmp_path / "reviews.jsonl", reviews),
        "syntactic": write_jsonl(tmp_path / "syntactic.jsonl", syntactic),
        "llm": write_jsonl(tmp_path / "llm.jsonl", llm),
        "gold": write_jsonl(tmp_path / "gold.jsonl", gold),
    }
    config = {
        "inputs": {
            "reviews": str(paths["reviews"]),
            "features": [
                {"path": str(paths["syntactic"]), "source": "syntactic"},
                {"path": str(paths["llm"]), "source": "llm"},
            ],
            "gold": str(paths["gold"]),
        },
        "offline": True,
        "seed": 7,
        "output_dir": str(tmp_path / "out"),
    }
    paths["config"] = tmp_path / "config.json"
    paths["config"].write_text(json.dumps(config), encoding="utf-8")
    paths["surfaces"] = surfaces
    return paths
