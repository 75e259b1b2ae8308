"""Inverted index and collection statistics over answer documents.

One index document per answer. The index is immutable after build and
supplies every term/document probability and frequency the rankers use:
term_prob_doc is tf/doc_len, collection_prob is collection frequency over
collection length.
"""
from __future__ import annotations

import pickle
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .analyze import DEFAULT_ANALYZER, TextAnalyzer
from .corpus import Corpus

_MAGIC = b"CRIDX1\n"


class IndexStatsError(ValueError):
    pass


@dataclass(frozen=True)
class IndexedCollection:
    postings: Mapping[str, tuple[tuple[str, int], ...]]
    doc_len: Mapping[str, int]
    collection_len: int
    doc_author: Mapping[str, str]
    author_docs: Mapping[str, tuple[str, ...]]
    doc_city: Mapping[str, str]
    author_city: Mapping[str, str]
    collection_tf: Mapping[str, int] = field(repr=False)
    analyzer: TextAnalyzer = DEFAULT_ANALYZER

    @property
    def n_docs(self) -> int:
        return len(self.doc_len)

    @property
    def n_terms(self) -> int:
        return len(self.postings)

    @property
    def mean_doc_len(self) -> float:
        return self.collection_len / self.n_docs if self.n_docs else 0.0

    def tf(self, term: str, doc_id: str) -> int:
        for d, f in self.postings.get(term, ()):
            if d == doc_id:
                return f
        return 0

    def term_prob_doc(self, term: str, doc_id: str) -> float:
        """p(term | doc) = tf / doc_len; 0 for empty documents."""
        n = self.doc_len[doc_id]
        if n == 0:
            return 0.0
        return self.tf(term, doc_id) / n

    def collection_prob(self, term: str) -> float:
        """p(term) over the whole collection. Errors on an empty collection."""
        if self.collection_len == 0:
            raise IndexStatsError("collection_prob undefined on empty collection")
        return self.collection_tf.get(term, 0) / self.collection_len

    def doc_tfs(self, term: str) -> dict[str, int]:
        return dict(self.postings.get(term, ()))


def build_index(corpus: Corpus, analyzer: TextAnalyzer = DEFAULT_ANALYZER) -> IndexedCollection:
    """Index every answer in corpus order. Answers that analyze to zero
    tokens stay in the index with doc_len 0 (rankers skip them)."""
    postings_acc: dict[str, list[tuple[str, int]]] = {}
    doc_len: dict[str, int] = {}
    doc_author: dict[str, str] = {}
    doc_city: dict[str, str] = {}
    author_docs: dict[str, list[str]] = {}
    collection_tf: dict[str, int] = {}
    total = 0

    for ans in corpus.answers.values():
        tokens = analyzer.tokens(ans.text)
        doc_len[ans.id] = len(tokens)
        doc_author[ans.id] = ans.lawyer_id
        doc_city[ans.id] = corpus.lawyers[ans.lawyer_id].city
        author_docs.setdefault(ans.lawyer_id, []).append(ans.id)
        total += len(tokens)
        counts: dict[str, int] = {}
        for t in tokens:
            counts[t] = counts.get(t, 0) + 1
        for t in sorted(counts):
            postings_acc.setdefault(t, []).append((ans.id, counts[t]))
            collection_tf[t] = collection_tf.get(t, 0) + counts[t]

    return IndexedCollection(
        postings={t: tuple(postings_acc[t]) for t in sorted(postings_acc)},
        doc_len=doc_len,
        collection_len=total,
        doc_author=doc_author,
        author_docs={a: tuple(d) for a, d in sorted(author_docs.items())},
        doc_city=doc_city,
        author_city={a: corpus.lawyers[a].city for a in sorted(author_docs)},
        collection_tf={t: collection_tf[t] for t in sorted(collection_tf)},
        analyzer=analyzer,
    )


def save_index(index: IndexedCollection, path: str | Path) -> None:
    """Single versioned binary file; identical indexes serialize to
    identical bytes."""
    payload = {
        "postings": dict(index.postings),
        "doc_len": dict(index.doc_len),
        "collection_len": index.collection_len,
        "doc_author": dict(index.doc_author),
        "author_docs": dict(index.author_docs),
        "doc_city": dict(index.doc_city),
        "author_city": dict(index.author_city),
        "collection_tf": dict(index.collection_tf),
        "analyzer": (index.analyzer.lowercase, index.analyzer.strip_punctuation),
    }
    with Path(path).open("wb") as fh:
        fh.write(_MAGIC)
        fh.write(pickle.dumps(payload, protocol=4))


def load_index(path: str | Path) -> IndexedCollection:
    with Path(path).open("rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise IndexStatsError(f"{path}: not an index file (bad magic {magic!r})")
        payload = pickle.loads(fh.read())
    lower, strip = payload.pop("analyzer")
    return IndexedCollection(analyzer=TextAnalyzer(lower, strip), **payload)
