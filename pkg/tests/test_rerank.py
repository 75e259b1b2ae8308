import itertools
import json
import math
import random
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from counselrank.index import build_index
from counselrank.labeling import QueryTopic
from counselrank.profiles import build_profiles
from counselrank.rankers import score_bm25_document
from counselrank.rerank import (PairScorer, RemoteScorer, ScoreVector,
                                ScorerError, build_score_vectors, rerank_vbd,
                                score_profiles, stub_scorer, vbd_scores)
from counselrank.sentiment import default_lexicon
from counselrank.synth import SynthConfig, generate
from util import a, make_corpus, q


def topic(text, qid=None):
    return QueryTopic(query_id=qid or text, tag_text=text,
                      relevant_experts=frozenset({"x", "y"}))


class ConstantScorer(PairScorer):
    scorer_id = "constant"

    def __init__(self, value=1.0):
        self.value = value

    def score(self, query, text):
        return self.value


class ExplodingScorer(PairScorer):
    scorer_id = "exploding"

    def score(self, query, text):
        raise RuntimeError("boom")


@pytest.fixture(scope="module")
def setup():
    config = SynthConfig(n_lawyers=12, n_questions=40, n_tags=2,
                         experts_per_tag=2, answers_per_question=4, seed=17)
    corpus, planted = generate(config)
    index = build_index(corpus)
    tag = sorted(planted)[0]
    query = topic(tag)
    initial, d_q = score_bm25_document(query, index)
    return corpus, index, query, initial, d_q


def test_constant_scorer_counts_answers(setup):
    corpus, _, query, initial, d_q = setup
    scores = vbd_scores(query, initial, d_q, corpus, ConstantScorer(1.0), k=50)
    pool_counts = {}
    for doc, _ in d_q.entries:
        lid = corpus.answers[doc].lawyer_id
        pool_counts[lid] = pool_counts.get(lid, 0) + 1
    for lid, s in scores.items():
        assert s == pool_counts.get(lid, 0)
    ranked = rerank_vbd(query, initial, d_q, corpus, ConstantScorer(1.0), k=50)
    by_count = sorted(scores, key=lambda l: (-scores[l], l))
    assert ranked.ids()[:len(by_count)] == by_count


def test_k1_keeps_order(setup):
    corpus, index, query, initial, d_q = setup
    ranked = rerank_vbd(query, initial, d_q, corpus, stub_scorer(index), k=1)
    assert ranked.ids() == initial.ids()


def test_rerank_is_a_permutation(setup):
    corpus, index, query, initial, d_q = setup
    for k in (1, 3, 50):
        ranked = rerank_vbd(query, initial, d_q, corpus, stub_scorer(index), k=k)
        assert sorted(ranked.ids()) == sorted(initial.ids())
        assert ranked.ids()[k:] == initial.ids()[k:]


def test_vbd_scores_match_brute_force_loop(setup):
    corpus, index, query, initial, d_q = setup
    scorer = stub_scorer(index)
    got = vbd_scores(query, initial, d_q, corpus, scorer, k=5)
    top5 = initial.ids()[:5]
    assert set(got) == set(top5)
    for lid in top5:
        expected = math.fsum(
            scorer.score(query.tag_text, corpus.answers[doc].text)
            for doc, _ in d_q.entries
            if corpus.answers[doc].lawyer_id == lid
        )
        assert got[lid] == pytest.approx(expected, abs=0.0)


def test_aggregation_modes(setup):
    corpus, index, query, initial, d_q = setup
    scorer = stub_scorer(index)
    sums = vbd_scores(query, initial, d_q, corpus, scorer, k=4, agg="sum")
    means = vbd_scores(query, initial, d_q, corpus, scorer, k=4, agg="mean")
    maxes = vbd_scores(query, initial, d_q, corpus, scorer, k=4, agg="max")
    counts = {}
    for doc, _ in d_q.entries:
        lid = corpus.answers[doc].lawyer_id
        counts[lid] = counts.get(lid, 0) + 1
    for lid in sums:
        n = counts.get(lid, 0)
        if n:
            assert means[lid] == pytest.approx(sums[lid] / n)
            assert maxes[lid] <= sums[lid]
    with pytest.raises(ValueError, match="unknown aggregation"):
        vbd_scores(query, initial, d_q, corpus, scorer, k=4, agg="median")


def test_scorer_failure_is_wrapped(setup):
    corpus, _, query, initial, d_q = setup
    with pytest.raises(ScorerError, match="exploding"):
        vbd_scores(query, initial, d_q, corpus, ExplodingScorer(), k=3)


def test_stub_scorer_zero_without_query_terms(setup):
    _, index, _, _, _ = setup
    scorer = stub_scorer(index)
    assert scorer.score("topic00", "entirely unrelated words") == 0.0
    assert scorer.score("", "anything") == 0.0


def test_stub_scorer_query_is_maximal_among_same_length_passages(setup):
    _, index, _, _, _ = setup
    query = "topic00 petition"
    vocab = ["topic00", "petition", "court", "filing"]
    best = stub_scorer(index).score(query, query)
    for combo in itertools.product(vocab, repeat=2):
        passage = " ".join(combo)
        assert stub_scorer(index).score(query, passage) <= best + 1e-15, passage


def _oracle_stub(index, query, text):
    terms = sorted(set(index.analyzer.tokens(query)))
    passage = index.analyzer.tokens(text)
    raw = 0.0
    for t in terms:
        tf = passage.count(t)
        if tf:
            icf = math.log(1 + (index.collection_len + 1) / (index.collection_tf.get(t, 0) + 1))
            raw += math.log(1 + tf) * icf
    return raw / (1 + raw)


def test_stub_scorer_dual_implementation(setup):
    corpus, index, _, _, _ = setup
    scorer = stub_scorer(index)
    rng = random.Random(3)
    texts = [ans.text for ans in corpus.answers.values()]
    queries = ["topic00", "topic01 filing", "court petition topic00w2", "zzz"]
    for _ in range(100):
        query = rng.choice(queries)
        text = rng.choice(texts)
        assert scorer.score(query, text) == pytest.approx(
            _oracle_stub(index, query, text), abs=1e-12)


def test_score_profiles_and_empty_profiles(setup):
    corpus, index, query, initial, d_q = setup
    profiles = build_profiles(query, d_q, corpus, default_lexicon(), seed=5)
    scorer = stub_scorer(index)
    vectors = score_profiles(query, profiles, scorer)
    assert set(vectors) == set(profiles)
    for lid, vec in vectors.items():
        ps = profiles[lid]
        for kind in ("cp", "pp", "np", "rp"):
            got = getattr(vec, f"s_{kind}")
            pt = ps.get(kind)
            if pt.empty:
                assert got == 0.0
            else:
                assert got == scorer.score(query.tag_text, pt.text)
        assert vec.s_bd == 0.0


def test_identical_profile_texts_score_identically(setup):
    _, index, query, _, _ = setup
    from counselrank.profiles import ProfileSet, ProfileText

    same = ProfileText("good advice here", 3, ("u1",))
    ps = ProfileSet(query_id=query.query_id, lawyer_id="l1", cp=ProfileText("", 0, ()),
                    pp=same, np=same, rp=ProfileText("", 0, ()), seed=0)
    vec = score_profiles(query, {"l1": ps}, stub_scorer(index))["l1"]
    assert vec.s_pp == vec.s_np


def test_build_score_vectors_keys_do_not_depend_on_scorer(setup):
    corpus, index, query, initial, d_q = setup
    profiles = build_profiles(query, d_q, corpus, default_lexicon(), seed=5)
    with_stub = build_score_vectors(query, initial, d_q, corpus, profiles,
                                    stub_scorer(index), k=6)
    with_const = build_score_vectors(query, initial, d_q, corpus, profiles,
                                     ConstantScorer(0.25), k=6)
    assert set(with_stub) == set(with_const) == set(initial.ids()[:6])


def test_score_vector_requires_finite_values():
    with pytest.raises(ValueError, match="finite"):
        ScoreVector(query_id="q", lawyer_id="l", s_bd=math.nan)


# -- remote scorer against a local HTTP stub --

class _Handler(BaseHTTPRequestHandler):
    server_version = "stub/1"

    def log_message(self, *args):
        pass

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        self.server.requests.append(body)
        behavior = self.server.behaviors.pop(0) if self.server.behaviors else "ok"
        if behavior == "fail500":
            self.send_response(500)
            self.end_headers()
            return
        if behavior == "reject":
            self.send_response(422)
            self.end_headers()
            return
        if behavior == "short":
            scores = [0.5]
        else:
            scores = [self.server.constant] * len(body["pairs"])
        payload = json.dumps({"scores": scores}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)


@pytest.fixture()
def stub_service():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    server.requests = []
    server.behaviors = []
    server.constant = 0.75
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server, f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


def test_remote_scorer_empty_batch_makes_no_call(stub_service):
    server, url = stub_service
    scorer = RemoteScorer(url, sleep=lambda s: None)
    assert scorer.score_many([]) == []
    assert server.requests == []


def test_remote_scorer_constant_passthrough_and_batching(stub_service):
    server, url = stub_service
    scorer = RemoteScorer(url, model="cp", batch_size=4, sleep=lambda s: None)
    pairs = [(f"q{i}", f"text {i}") for i in range(10)]
    assert scorer.score_many(pairs) == [0.75] * 10
    assert len(server.requests) == 3  # 4 + 4 + 2
    assert server.requests[0]["model"] == "cp"
    assert server.requests[0]["pairs"][0] == {"query": "q0", "text": "text 0"}
    assert len(server.requests[-1]["pairs"]) == 2


def test_remote_scorer_retries_transient_failures(stub_service):
    server, url = stub_service
    server.behaviors = ["fail500", "fail500"]
    naps = []
    scorer = RemoteScorer(url, sleep=naps.append)
    assert scorer.score("q", "t") == 0.75
    assert len(server.requests) == 3
    assert naps == [0.1, 0.2]  # exponential backoff


def test_remote_scorer_gives_up_after_retries(stub_service):
    server, url = stub_service
    server.behaviors = ["fail500"] * 4
    scorer = RemoteScorer(url, sleep=lambda s: None)
    with pytest.raises(ScorerError, match="unreachable after 4 attempts"):
        scorer.score("q", "t")
    assert len(server.requests) == 4


def test_remote_scorer_client_error_is_not_retried(stub_service):
    server, url = stub_service
    server.behaviors = ["reject"]
    scorer = RemoteScorer(url, sleep=lambda s: None)
    with pytest.raises(ScorerError, match="rejected request: HTTP 422"):
        scorer.score("q", "t")
    assert len(server.requests) == 1


def test_remote_scorer_length_mismatch_is_protocol_error(stub_service):
    server, url = stub_service
    server.behaviors = ["short"]
    scorer = RemoteScorer(url, sleep=lambda s: None)
    with pytest.raises(ScorerError, match="returned 1 scores for 2 pairs"):
        scorer.score_many([("a", "b"), ("c", "d")])


def test_remote_scorer_unreachable_endpoint_names_it():
    scorer = RemoteScorer("http://127.0.0.1:9", timeout=0.2, sleep=lambda s: None)
    with pytest.raises(ScorerError, match="127.0.0.1:9"):
        scorer.score("q", "t")
