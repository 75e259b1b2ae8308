"""Protocol conformance: the [score] endpoint must return one finite score
per pair in request order, never crash on malformed input, preserve order
under permutation, and replay identically."""
import random

import pytest
from fastapi.testclient import TestClient

from scorer_service.app import create_app
from scorer_service.model import TrainConfig, finetune
from scorer_service.store import ModelStore
from test_model import _synthetic_pairs


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    root = tmp_path_factory.mktemp("models")
    store = ModelStore(root)
    head = finetune(_synthetic_pairs(n=400, seed=4), TrainConfig(seed=4))
    store.save_version("vbd", head)
    return TestClient(create_app(store))


def _random_pairs(rng, n):
    vocab = ["topic1", "topic2", "court", "filing", "advice", "лихва", "7"]
    pairs = []
    for _ in range(n):
        query = " ".join(rng.choices(vocab, k=rng.randint(1, 3)))
        text = " ".join(rng.choices(vocab, k=rng.randint(0, 12)))
        pairs.append({"query": query, "text": text})
    return pairs


def test_thousand_randomized_requests_hold_invariants(client):
    rng = random.Random(123)
    models = ["vbd", "cp", "pp", "np", "rp"]
    for i in range(1000):
        pairs = _random_pairs(rng, rng.randint(0, 6))
        body = {"model": rng.choice(models), "pairs": pairs}
        resp = client.post("/score", json=body)
        assert resp.status_code == 200, resp.text
        scores = resp.json()["scores"]
        assert len(scores) == len(pairs)
        assert all(isinstance(s, float) for s in scores)
        for pair, score in zip(pairs, scores):
            if not pair["text"].strip():
                assert score == 0.0


def test_order_preservation_under_permutation(client):
    rng = random.Random(5)
    pairs = _random_pairs(rng, 20)
    base = client.post("/score", json={"model": "vbd", "pairs": pairs}).json()["scores"]
    perm = list(range(20))
    rng.shuffle(perm)
    permuted = [pairs[i] for i in perm]
    out = client.post("/score", json={"model": "vbd", "pairs": permuted}).json()["scores"]
    assert out == [base[i] for i in perm]


def test_replay_determinism(client):
    rng = random.Random(6)
    pairs = _random_pairs(rng, 10)
    body = {"model": "vbd", "pairs": pairs}
    first = client.post("/score", json=body)
    second = client.post("/score", json=body)
    assert first.content == second.content


def test_duplicated_pair_scores_identically(client):
    pair = {"query": "topic1", "text": "court filing topic1"}
    resp = client.post("/score", json={"model": "vbd", "pairs": [pair, pair]})
    scores = resp.json()["scores"]
    assert scores[0] == scores[1]


def test_empty_pairs_list(client):
    resp = client.post("/score", json={"model": "vbd", "pairs": []})
    assert resp.status_code == 200
    assert resp.json() == {"scores": []}


def test_unknown_model_is_4xx(client):
    resp = client.post("/score", json={"model": "bert-large", "pairs": []})
    assert resp.status_code == 404
    assert "unknown model" in resp.json()["detail"]


def test_malformed_requests_are_4xx_not_crashes(client):
    cases = [
        {},
        {"model": "vbd"},
        {"pairs": []},
        {"model": "vbd", "pairs": [{"query": "x"}]},
        {"model": "vbd", "pairs": [{"query": "x", "text": 7.5}]},
        {"model": 3, "pairs": []},
        {"model": "vbd", "pairs": "not-a-list"},
    ]
    for body in cases:
        resp = client.post("/score", json=body)
        assert 400 <= resp.status_code < 500, body
    resp = client.post("/score", content=b"{broken json",
                       headers={"Content-Type": "application/json"})
    assert 400 <= resp.status_code < 500


def test_trained_model_actually_discriminates(client):
    pairs = [
        {"query": "topic1", "text": "court filing topic1 notice"},
        {"query": "topic1", "text": "court filing notice record"},
    ]
    scores = client.post("/score", json={"model": "vbd", "pairs": pairs}).json()["scores"]
    assert scores[0] > scores[1]


def test_health_lists_model_inventory(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert set(body["models"]) == {"vbd", "cp", "pp", "np", "rp"}
    assert body["models"]["vbd"]["version"] == 1
    assert body["models"]["vbd"]["trained_pairs"] == 400
    assert body["models"]["cp"]["version"] == 0


def test_shared_weights_mode(tmp_path):
    store = ModelStore(tmp_path, shared_weights=True)
    head = finetune(_synthetic_pairs(n=150, seed=8), TrainConfig(seed=8))
    store.save_version("vbd", head)
    client = TestClient(create_app(store))
    pairs = [{"query": "topic2", "text": "topic2 advice"}]
    by_model = {
        m: client.post("/score", json={"model": m, "pairs": pairs}).json()["scores"][0]
        for m in ("vbd", "cp", "pp", "np", "rp")
    }
    assert len(set(by_model.values())) == 1
    assert by_model["vbd"] != 0.0
