"""Neural-style re-ranking over a pluggable (query, text) pair scorer.

The re-ranker takes the top-k lawyers of an initial ranking, scores each of
their retrieved answers as a (query, answer) pair, aggregates per lawyer
(sum by default), and reorders the top-k block by that aggregate; lawyers
below the cutoff keep their initial order after the block. The same scorer
interface also scores the four per-lawyer profiles.

Two scorers ship here: a deterministic lexical stub (so the whole pipeline
runs with no model service), and an HTTP client for the external scorer
service speaking the /score protocol.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Mapping, Sequence

import requests

from .corpus import Corpus
from .index import IndexedCollection
from .labeling import QueryTopic
from .profiles import PROFILE_KINDS, ProfileSet
from .rankers import AnswerRanking, RankedList

DEFAULT_TOP_K = 50


class ScorerError(RuntimeError):
    """A scorer failed; carries the scorer id and the offending input."""

    def __init__(self, scorer_id: str, detail: str):
        super().__init__(f"scorer {scorer_id!r}: {detail}")
        self.scorer_id = scorer_id


class PairScorer:
    """Deterministic relevance scorer for (query, passage) pairs; higher
    means more relevant."""

    scorer_id: str = "base"

    def score(self, query: str, text: str) -> float:
        raise NotImplementedError

    def score_many(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        return [self.score(q, t) for q, t in pairs]


@dataclass(frozen=True)
class ScoreVector:
    query_id: str
    lawyer_id: str
    s_bd: float = 0.0
    s_cp: float = 0.0
    s_pp: float = 0.0
    s_np: float = 0.0
    s_rp: float = 0.0

    def __post_init__(self):
        for name in ("s_bd", "s_cp", "s_pp", "s_np", "s_rp"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.s_bd, self.s_cp, self.s_pp, self.s_np, self.s_rp)


class StubScorer(PairScorer):
    """Smoothed lexical overlap against collection statistics.

    raw(q, p) = sum over distinct query terms t of
                log(1 + tf(t, p)) * log(1 + (C + 1) / (cf(t) + 1))

    where C is the collection length and cf the collection frequency; the
    score is raw / (1 + raw), squashing into [0, 1). A passage without any
    query term scores exactly 0.
    """

    scorer_id = "stub-lexical"

    def __init__(self, index: IndexedCollection):
        self._collection_tf = index.collection_tf
        self._collection_len = index.collection_len
        self._analyzer = index.analyzer

    def score(self, query: str, text: str) -> float:
        q_terms = sorted(set(self._analyzer.tokens(query)))
        if not q_terms:
            return 0.0
        counts: dict[str, int] = {}
        for tok in self._analyzer.tokens(text):
            counts[tok] = counts.get(tok, 0) + 1
        raw = 0.0
        for t in q_terms:
            tf = counts.get(t, 0)
            if tf == 0:
                continue
            icf = math.log(1.0 + (self._collection_len + 1) / (self._collection_tf.get(t, 0) + 1))
            raw += math.log(1.0 + tf) * icf
        return raw / (1.0 + raw)


class RemoteScorer(PairScorer):
    """Client for the external scorer service (POST {endpoint}/score).

    Requests are sent in batches; transient failures (connection errors and
    5xx responses) are retried up to three times with exponential backoff.
    A response whose score list length differs from the request is a
    protocol error.
    """

    def __init__(self, endpoint: str, model: str = "vbd", timeout: float = 10.0,
                 batch_size: int = 32, max_retries: int = 3, backoff: float = 0.1,
                 session: requests.Session | None = None, sleep=time.sleep):
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.timeout = timeout
        self.batch_size = batch_size
        self.max_retries = max_retries
        self.backoff = backoff
        self.scorer_id = f"remote-{model}"
        self._session = session or requests.Session()
        self._sleep = sleep

    def score(self, query: str, text: str) -> float:
        return self.score_many([(query, text)])[0]

    def score_many(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        if not pairs:
            return []
        out: list[float] = []
        for start in range(0, len(pairs), self.batch_size):
            out.extend(self._score_batch(pairs[start:start + self.batch_size]))
        return out

    def _score_batch(self, batch: Sequence[tuple[str, str]]) -> list[float]:
        body = {
            "model": self.model,
            "pairs": [{"query": q, "text": t} for q, t in batch],
        }
        url = f"{self.endpoint}/score"
        last_error = "unknown"
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                resp = self._session.post(url, json=body, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = str(exc)
                continue
            if 400 <= resp.status_code < 500:
                raise ScorerError(self.scorer_id, f"{url} rejected request: HTTP {resp.status_code}")
            if resp.status_code != 200:
                last_error = f"HTTP {resp.status_code}"
                continue
            try:
                scores = resp.json()["scores"]
            except (ValueError, KeyError) as exc:
                raise ScorerError(self.scorer_id, f"{url} sent malformed response: {exc}") from exc
            if len(scores) != len(batch):
                raise ScorerError(
                    self.scorer_id,
                    f"{url} returned {len(scores)} scores for {len(batch)} pairs",
                )
            return [float(s) for s in scores]
        raise ScorerError(
            self.scorer_id,
            f"{url} unreachable after {self.max_retries + 1} attempts: {last_error}",
        )


def stub_scorer(index: IndexedCollection) -> PairScorer:
    return StubScorer(index)


def remote_scorer(endpoint: str, model: str = "vbd", timeout: float = 10.0,
                  batch_size: int = 32) -> PairScorer:
    return RemoteScorer(endpoint, model=model, timeout=timeout, batch_size=batch_size)


def _answers_in_pool(d_q: AnswerRanking, corpus: Corpus) -> dict[str, list[str]]:
    by_lawyer: dict[str, list[str]] = {}
    for doc_id, _ in d_q.entries:
        by_lawyer.setdefault(corpus.answers[doc_id].lawyer_id, []).append(doc_id)
    return by_lawyer


def vbd_scores(q: QueryTopic, initial: RankedList, d_q: AnswerRanking, corpus: Corpus,
               scorer: PairScorer, k: int = DEFAULT_TOP_K, agg: str = "sum"
               ) -> dict[str, float]:
    """Aggregate answer-pair scores for each of the top-k initial lawyers.
    A lawyer with no answers in the pool scores 0 (no evidence)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    top = [lid for lid, _ in initial.entries[:k]]
    pool = _answers_in_pool(d_q, corpus)

    pairs: list[tuple[str, str]] = []
    owners: list[str] = []
    for lid in top:
        for doc_id in pool.get(lid, ()):
            pairs.append((q.tag_text, corpus.answers[doc_id].text))
            owners.append(lid)
    try:
        flat = scorer.score_many(pairs)
    except ScorerError:
        raise
    except Exception as exc:
        raise ScorerError(scorer.scorer_id, f"failed on {len(pairs)} pairs: {exc}") from exc

    grouped: dict[str, list[float]] = {lid: [] for lid in top}
    for lid, s in zip(owners, flat):
        grouped[lid].append(s)

    out: dict[str, float] = {}
    for lid in top:
        vals = grouped[lid]
        if not vals:
            out[lid] = 0.0
        elif agg == "sum":
            out[lid] = math.fsum(vals)
        elif agg == "mean":
            out[lid] = math.fsum(vals) / len(vals)
        elif agg == "max":
            out[lid] = max(vals)
        else:
            raise ValueError(f"unknown aggregation {agg!r}")
    return out


def rerank_vbd(q: QueryTopic, initial: RankedList, d_q: AnswerRanking, corpus: Corpus,
               scorer: PairScorer, k: int = DEFAULT_TOP_K, agg: str = "sum") -> RankedList:
    """Reorder the top-k block by aggregated pair scores; below-k lawyers
    keep their initial order after the block, with scores rebased below the
    block minimum so the list stays monotone."""
    s_bd = vbd_scores(q, initial, d_q, corpus, scorer, k=k, agg=agg)
    block = sorted(s_bd, key=lambda lid: (-s_bd[lid], lid))
    entries = [(lid, s_bd[lid]) for lid in block]
    floor = min((s for _, s in entries), default=0.0)
    for i, (lid, _) in enumerate(initial.entries[k:]):
        entries.append((lid, floor - 1.0 - i))
    return RankedList(q.query_id, tuple(entries), run_tag=f"vbd-{scorer.scorer_id}")


def _score_kind(q: QueryTopic, profiles: Mapping[str, ProfileSet], kind: str,
                scorer: PairScorer) -> dict[str, float]:
    pairs: list[tuple[str, str]] = []
    owners: list[str] = []
    for lawyer_id in sorted(profiles):
        pt = profiles[lawyer_id].get(kind)
        if not pt.empty:
            pairs.append((q.tag_text, pt.text))
            owners.append(lawyer_id)
    try:
        flat = scorer.score_many(pairs)
    except ScorerError:
        raise
    except Exception as exc:
        raise ScorerError(scorer.scorer_id, f"failed on {len(pairs)} pairs: {exc}") from exc
    return dict(zip(owners, flat))


def score_profiles(q: QueryTopic, profiles: Mapping[str, ProfileSet],
                   scorer: PairScorer,
                   profile_scorers: Mapping[str, PairScorer] | None = None
                   ) -> dict[str, ScoreVector]:
    """Score each non-empty profile once as a (query, profile text) pair;
    empty profiles score 0 without touching the scorer. ``profile_scorers``
    may map profile kinds to dedicated scorers (one model head per kind)."""
    profile_scorers = profile_scorers or {}
    by_kind = {
        kind: _score_kind(q, profiles, kind, profile_scorers.get(kind, scorer))
        for kind in PROFILE_KINDS
    }
    return {
        lid: ScoreVector(
            query_id=q.query_id,
            lawyer_id=lid,
            s_cp=by_kind["cp"].get(lid, 0.0),
            s_pp=by_kind["pp"].get(lid, 0.0),
            s_np=by_kind["np"].get(lid, 0.0),
            s_rp=by_kind["rp"].get(lid, 0.0),
        )
        for lid in sorted(profiles)
    }


def build_score_vectors(q: QueryTopic, initial: RankedList, d_q: AnswerRanking,
                        corpus: Corpus, profiles: Mapping[str, ProfileSet],
                        scorer: PairScorer, profile_scorers: Mapping[str, PairScorer] | None = None,
                        k: int = DEFAULT_TOP_K, agg: str = "sum") -> dict[str, ScoreVector]:
    """One ScoreVector per lawyer in the re-rank pool: the aggregated answer
    score plus the four profile scores (0 when a profile is missing)."""
    s_bd = vbd_scores(q, initial, d_q, corpus, scorer, k=k, agg=agg)
    prof_vecs = score_profiles(q, profiles, scorer, profile_scorers)
    out: dict[str, ScoreVector] = {}
    for lid in sorted(s_bd):
        pv = prof_vecs.get(lid)
        out[lid] = ScoreVector(
            query_id=q.query_id,
            lawyer_id=lid,
            s_bd=s_bd[lid],
            s_cp=pv.s_cp if pv else 0.0,
            s_pp=pv.s_pp if pv else 0.0,
            s_np=pv.s_np if pv else 0.0,
            s_rp=pv.s_rp if pv else 0.0,
        )
    return out
