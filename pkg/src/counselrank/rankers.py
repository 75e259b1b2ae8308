"""Candidate-based and document-based lawyer rankers.

The candidate-based ranker scores a query against each lawyer's pooled
answers:

    p(q|ca) = prod_t [ (1-l_ca) * sum_d p(t|d) p(d|ca) + l_ca * p(t) ]

The document-based ranker scores answers first and aggregates per lawyer:

    rel(d,q) = prod_t [ (1-l_d) p(t|d) + l_d p(t) ]
    p(q|ca)  = sum_d rel(d,q) * p(d|ca)

Smoothing is length-dependent Bayes smoothing, l = beta / (beta + length).
The document association p(d|ca) defaults to 1/|D_ca| (a proper mixture);
a constant-1 mode is available since the association is stated only as
"constant" and the two differ materially for the document-based sum.

BM25 counterparts score one concatenated pseudo-document per candidate
(candidate-level) or individual answers summed per lawyer (document-level).
All products are evaluated in log space; accumulations whose operand order
depends on document enumeration use math.fsum so rankings are invariant
under document id relabeling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .index import IndexedCollection
from .labeling import QueryTopic


class RankingError(ValueError):
    pass


@dataclass(frozen=True)
class SmoothingParams:
    """Bayes smoothing: lambda = beta / (beta + length)."""

    beta: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    def lambda_doc(self, doc_len: int) -> float:
        return self.beta / (self.beta + doc_len)

    def lambda_cand(self, cand_len: int) -> float:
        return self.beta / (self.beta + cand_len)


def default_smoothing(index: IndexedCollection) -> SmoothingParams:
    """beta defaults to the mean answer length (1.0 on an empty index)."""
    mean = index.mean_doc_len
    return SmoothingParams(beta=mean if mean > 0 else 1.0)


def _sorted_entries(scores: Mapping[str, float]) -> tuple[tuple[str, float], ...]:
    return tuple(sorted(scores.items(), key=lambda kv: (-kv[1], kv[0])))


@dataclass(frozen=True)
class RankedList:
    query_id: str
    entries: tuple[tuple[str, float], ...]
    run_tag: str
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        ids = [e[0] for e in self.entries]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate ids in ranked list")
        scores = [e[1] for e in self.entries]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValueError("scores must be non-increasing")

    @classmethod
    def from_scores(cls, query_id: str, scores: Mapping[str, float], run_tag: str,
                    warnings: tuple[str, ...] = ()) -> "RankedList":
        return cls(query_id, _sorted_entries(scores), run_tag, warnings)

    def ids(self) -> list[str]:
        return [e[0] for e in self.entries]


@dataclass(frozen=True)
class AnswerRanking:
    query_id: str
    entries: tuple[tuple[str, float], ...]
    run_tag: str
    cutoff: int | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        scores = [e[1] for e in self.entries]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValueError("scores must be non-increasing")

    @classmethod
    def from_scores(cls, query_id: str, scores: Mapping[str, float], run_tag: str,
                    cutoff: int | None = None) -> "AnswerRanking":
        return cls(query_id, _sorted_entries(scores), run_tag, cutoff)

    def ids(self) -> list[str]:
        return [e[0] for e in self.entries]


def _query_tokens(q: QueryTopic, index: IndexedCollection) -> list[str]:
    tokens = index.analyzer.tokens(q.tag_text)
    if not tokens:
        raise RankingError(f"query {q.query_id!r} is empty after analysis")
    return tokens


def _candidates(index: IndexedCollection) -> dict[str, list[str]]:
    """Lawyers with at least one non-empty document, with those documents."""
    out: dict[str, list[str]] = {}
    for author, docs in index.author_docs.items():
        kept = [d for d in docs if index.doc_len[d] > 0]
        if kept:
            out[author] = kept
    return out


def _doc_log_rel(tokens: Sequence[str], tfs: Sequence[Mapping[str, int]],
                 p_t: Sequence[float], doc_id: str, doc_len: int, lam: float) -> float:
    """log prod_t [(1-lam) tf/len + lam p(t)]; -inf when any factor is 0."""
    logs = []
    for i, t in enumerate(tokens):
        mix = (1.0 - lam) * (tfs[i].get(doc_id, 0) / doc_len) + lam * p_t[i]
        if mix <= 0.0:
            return -math.inf
        logs.append(math.log(mix))
    return math.fsum(logs)


def score_model1(q: QueryTopic, index: IndexedCollection, sp: SmoothingParams,
                 doc_assoc: str = "uniform") -> RankedList:
    """Candidate-based ranking. doc_assoc: "uniform" uses p(d|ca)=1/|D_ca|
    (default), "one" uses the unnormalized constant 1."""
    tokens = _query_tokens(q, index)
    p_t = [index.collection_prob(t) for t in tokens]
    tfs = [index.doc_tfs(t) for t in tokens]
    scores: dict[str, float] = {}
    for cand, docs in _candidates(index).items():
        assoc = 1.0 / len(docs) if doc_assoc == "uniform" else 1.0
        lam = sp.lambda_cand(sum(index.doc_len[d] for d in docs))
        logs = []
        score = None
        for i in range(len(tokens)):
            inner = math.fsum(
                (tfs[i].get(d, 0) / index.doc_len[d]) * assoc for d in docs
            )
            mix = (1.0 - lam) * inner + lam * p_t[i]
            if mix <= 0.0:
                score = 0.0
                break
            logs.append(math.log(mix))
        if score is None:
            score = math.exp(math.fsum(logs))
        scores[cand] = score
    return RankedList.from_scores(q.query_id, scores, run_tag="model1-lm")


def score_model2(q: QueryTopic, index: IndexedCollection, sp: SmoothingParams,
                 doc_assoc: str = "uniform") -> tuple[RankedList, AnswerRanking]:
    """Document-based ranking. Returns the lawyer ranking and the retrieved
    answer ranking (documents matching at least one query term)."""
    tokens = _query_tokens(q, index)
    p_t = [index.collection_prob(t) for t in tokens]
    tfs = [index.doc_tfs(t) for t in tokens]
    matching = set()
    for tf in tfs:
        matching.update(tf)

    doc_rel: dict[str, float] = {}
    lawyer_scores: dict[str, float] = {}
    for cand, docs in _candidates(index).items():
        assoc = 1.0 / len(docs) if doc_assoc == "uniform" else 1.0
        contribs = []
        for d in docs:
            log_rel = _doc_log_rel(tokens, tfs, p_t, d, index.doc_len[d], sp.lambda_doc(index.doc_len[d]))
            rel = 0.0 if log_rel == -math.inf else math.exp(log_rel)
            if d in matching:
                doc_rel[d] = rel
            contribs.append(rel * assoc)
        lawyer_scores[cand] = math.fsum(contribs)

    return (
        RankedList.from_scores(q.query_id, lawyer_scores, run_tag="model2-lm"),
        AnswerRanking.from_scores(q.query_id, doc_rel, run_tag="model2-lm-docs"),
    )


def _bm25_idf(n_docs: int, df: int) -> float:
    return math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))


def _bm25_term(tf: int, doc_len: int, avgdl: float, k1: float, b: float) -> float:
    if tf == 0 or avgdl == 0:
        return 0.0
    return tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * doc_len / avgdl))


def score_bm25_candidate(q: QueryTopic, index: IndexedCollection,
                         k1: float = 1.2, b: float = 0.75) -> RankedList:
    """Candidate-level BM25 over one concatenated pseudo-document per
    lawyer. Query tokens keep their multiplicity."""
    tokens = _query_tokens(q, index)
    cands = _candidates(index)
    n = len(cands)
    pseudo_len = {c: sum(index.doc_len[d] for d in docs) for c, docs in cands.items()}
    avgdl = math.fsum(pseudo_len.values()) / n if n else 0.0

    scores: dict[str, float] = {}
    term_stats: dict[str, tuple[dict[str, int], int]] = {}
    for t in set(tokens):
        tf_by_doc = index.doc_tfs(t)
        tf_by_cand: dict[str, int] = {}
        for cand, docs in cands.items():
            f = sum(tf_by_doc.get(d, 0) for d in docs)
            if f:
                tf_by_cand[cand] = f
        term_stats[t] = (tf_by_cand, len(tf_by_cand))

    for cand in cands:
        total = 0.0
        for t in tokens:
            tf_by_cand, df = term_stats[t]
            f = tf_by_cand.get(cand, 0)
            if f == 0:
                continue
            total += _bm25_idf(n, df) * _bm25_term(f, pseudo_len[cand], avgdl, k1, b)
        scores[cand] = total
    return RankedList.from_scores(q.query_id, scores, run_tag="model1-bm25")


def score_bm25_document(q: QueryTopic, index: IndexedCollection,
                        k1: float = 1.2, b: float = 0.75
                        ) -> tuple[RankedList, AnswerRanking]:
    """Document-level BM25 on answers, summed per lawyer. Also returns the
    matching-answer ranking used as the retrieval pool for profiles."""
    tokens = _query_tokens(q, index)
    n = index.n_docs
    avgdl = index.mean_doc_len

    doc_scores: dict[str, float] = {}
    for t in set(tokens):
        tf_by_doc = index.doc_tfs(t)
        df = len(tf_by_doc)
        if df == 0:
            continue
        idf = _bm25_idf(n, df)
        qtf = tokens.count(t)
        for d, f in tf_by_doc.items():
            doc_scores[d] = doc_scores.get(d, 0.0) + qtf * idf * _bm25_term(
                f, index.doc_len[d], avgdl, k1, b
            )

    lawyer_scores: dict[str, float] = {}
    for cand, docs in _candidates(index).items():
        lawyer_scores[cand] = math.fsum(doc_scores.get(d, 0.0) for d in docs)

    return (
        RankedList.from_scores(q.query_id, lawyer_scores, run_tag="model2-bm25"),
        AnswerRanking.from_scores(q.query_id, doc_scores, run_tag="model2-bm25-docs"),
    )


def score_bm25_variants(q: QueryTopic, index: IndexedCollection,
                        params: tuple[float, float] = (1.2, 0.75)
                        ) -> tuple[RankedList, RankedList, AnswerRanking]:
    """Both BM25 rankings (candidate-level, document-level) plus the
    document-level answer ranking."""
    k1, b = params
    cand = score_bm25_candidate(q, index, k1, b)
    doc, answers = score_bm25_document(q, index, k1, b)
    return cand, doc, answers


def filter_by_city(ranking: RankedList | AnswerRanking, asker_city: str,
                   index: IndexedCollection):
    """Drop entries whose lawyer (or answer's author) practices in another
    city; order is preserved. An asker city absent from the index yields an
    empty result flagged with a warning rather than an error."""
    if isinstance(ranking, AnswerRanking):
        city_of: Callable[[str], str | None] = index.doc_city.get
    else:
        city_of = index.author_city.get

    known = set(index.author_city.values()) | set(index.doc_city.values())
    if asker_city not in known:
        return replace(
            ranking,
            entries=(),
            warnings=ranking.warnings + (f"unknown city {asker_city!r}",),
        )
    kept = tuple(e for e in ranking.entries if city_of(e[0]) == asker_city)
    return replace(ranking, entries=kept)


def write_run(rankings: Iterable[RankedList], path: str | Path) -> None:
    """TREC run lines: ``query_id Q0 lawyer_id rank score run_tag``."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for rl in rankings:
            for rank, (lid, score) in enumerate(rl.entries, start=1):
                fh.write(f"{rl.query_id} Q0 {lid} {rank} {score:.17g} {rl.run_tag}\n")


def read_run(path: str | Path) -> list[RankedList]:
    grouped: dict[str, list[tuple[str, float]]] = {}
    tags: dict[str, str] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 6:
                raise RankingError(f"{path}:{lineno}: expected 6 run-file columns")
            qid, _, lid, _, score, tag = parts
            grouped.setdefault(qid, []).append((lid, float(score)))
            tags[qid] = tag
    return [
        RankedList(qid, tuple(entries), tags[qid]) for qid, entries in grouped.items()
    ]
