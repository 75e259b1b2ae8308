"""Query-dependent lawyer profiles built from the retrieved answer pool.

For every lawyer with at least one answer in the retrieved pool, four
textual profiles are assembled:

  cp  first sentence of each comment on their retrieved answers,
      in seeded-shuffle order;
  pp  positive-labeled sentences of their retrieved answers, shuffled;
  np  negative-labeled sentences, shuffled;
  rp  their retrieved answers, most recent first.

Units accumulate until the token count first exceeds the cap (512), then
the profile is truncated to the cap exactly. Profile text is the joined
analyzer tokens, so token accounting is idempotent and rebuilds are
byte-identical. Every shuffle draws from a substream derived from
(seed, query, lawyer, kind), so build order can never perturb output.
"""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .analyze import DEFAULT_ANALYZER, TextAnalyzer
from .corpus import Corpus
from .labeling import QueryTopic
from .rankers import AnswerRanking
from .sentiment import SentimentLexicon, score_sentence, split_sentences

TOKEN_CAP = 512
PROFILE_KINDS = ("cp", "pp", "np", "rp")


@dataclass(frozen=True)
class ProfileText:
    text: str
    token_count: int
    source_units: tuple[str, ...]

    @property
    def empty(self) -> bool:
        return self.token_count == 0


@dataclass(frozen=True)
class ProfileSet:
    query_id: str
    lawyer_id: str
    cp: ProfileText
    pp: ProfileText
    np: ProfileText
    rp: ProfileText
    seed: int

    def get(self, kind: str) -> ProfileText:
        return getattr(self, kind)


def shuffle_stream(seed: int, query_id: str, lawyer_id: str, kind: str) -> random.Random:
    """Independent deterministic substream per (seed, query, lawyer, kind)."""
    key = f"{seed}/{query_id}/{lawyer_id}/{kind}".encode("utf-8")
    return random.Random(int.from_bytes(hashlib.sha256(key).digest()[:8], "big"))


def _assemble(units: Iterable[tuple[str, str]], analyzer: TextAnalyzer) -> ProfileText:
    tokens: list[str] = []
    used: list[str] = []
    for uid, text in units:
        if len(tokens) > TOKEN_CAP:
            break
        tokens.extend(analyzer.tokens(text))
        used.append(uid)
    tokens = tokens[:TOKEN_CAP]
    return ProfileText(" ".join(tokens), len(tokens), tuple(used))


def build_profiles(q: QueryTopic, d_q: AnswerRanking, corpus: Corpus,
                   lexicon: SentimentLexicon, seed: int,
                   analyzer: TextAnalyzer = DEFAULT_ANALYZER) -> dict[str, ProfileSet]:
    """Build the four profiles for every lawyer with an answer in d_q."""
    answers_by_lawyer: dict[str, list] = {}
    for doc_id, _ in d_q.entries:
        ans = corpus.answers[doc_id]
        answers_by_lawyer.setdefault(ans.lawyer_id, []).append(ans)

    out: dict[str, ProfileSet] = {}
    for lawyer_id in sorted(answers_by_lawyer):
        answers = answers_by_lawyer[lawyer_id]

        comment_units: list[tuple[str, str]] = []
        for ans in answers:
            for cid in sorted(
                corpus.comments_by_answer.get(ans.id, ()),
                key=lambda c: (corpus.comments[c].timestamp, c),
            ):
                first = split_sentences(corpus.comments[cid].text)
                if first:
                    comment_units.append((cid, first[0]))
        shuffle_stream(seed, q.query_id, lawyer_id, "cp").shuffle(comment_units)

        pos_units: list[tuple[str, str]] = []
        neg_units: list[tuple[str, str]] = []
        for ans in answers:
            for i, sent in enumerate(split_sentences(ans.text)):
                label = score_sentence(sent, lexicon, analyzer).label
                if label == "positive":
                    pos_units.append((f"{ans.id}#s{i}", sent))
                elif label == "negative":
                    neg_units.append((f"{ans.id}#s{i}", sent))
        shuffle_stream(seed, q.query_id, lawyer_id, "pp").shuffle(pos_units)
        shuffle_stream(seed, q.query_id, lawyer_id, "np").shuffle(neg_units)

        recent = sorted(answers, key=lambda a: (-a.timestamp, a.id))
        recency_units = [(a.id, a.text) for a in recent]

        out[lawyer_id] = ProfileSet(
            query_id=q.query_id,
            lawyer_id=lawyer_id,
            cp=_assemble(comment_units, analyzer),
            pp=_assemble(pos_units, analyzer),
            np=_assemble(neg_units, analyzer),
            rp=_assemble(recency_units, analyzer),
            seed=seed,
        )
    return out


def export_profiles(profiles: Mapping[str, ProfileSet], path: str | Path,
                    append: bool = False) -> None:
    """Line-delimited ``{query_id, lawyer_id, kind, text}`` records for the
    scorer service."""
    mode = "a" if append else "w"
    with Path(path).open(mode, encoding="utf-8") as fh:
        for lawyer_id in sorted(profiles):
            ps = profiles[lawyer_id]
            for kind in PROFILE_KINDS:
                fh.write(json.dumps(
                    {
                        "query_id": ps.query_id,
                        "lawyer_id": lawyer_id,
                        "kind": kind,
                        "text": ps.get(kind).text,
                    },
                    sort_keys=True,
                    ensure_ascii=False,
                ))
                fh.write("\n")
