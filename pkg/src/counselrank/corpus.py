"""Corpus data model and file ingestion for legal Q&A dumps.

The corpus is a set of cross-referenced records: questions (categorized and
tagged), answers (single-authored by lawyers, optionally marked best),
comments on answers, and lawyer references. Records arrive as line-delimited
JSON objects carrying a ``kind`` field; ingestion validates every invariant
up front so that downstream stages never see a dangling reference.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class CorpusError(ValueError):
    """Raised for malformed records, duplicate ids, or dangling references."""


@dataclass(frozen=True)
class Question:
    id: str
    text: str
    category: str
    tags: frozenset[str]
    city: str
    state: str
    timestamp: int


@dataclass(frozen=True)
class Answer:
    id: str
    question_id: str
    lawyer_id: str
    text: str
    is_best: bool
    timestamp: int


@dataclass(frozen=True)
class Comment:
    id: str
    answer_id: str
    text: str
    timestamp: int


@dataclass(frozen=True)
class LawyerRef:
    lawyer_id: str
    city: str
    state: str


@dataclass(frozen=True)
class Corpus:
    """Immutable, validated record store with resolved cross-references.

    Questions, answers, and comments are kept in (timestamp, id) order;
    lawyers in id order. The derived maps are plain lookups used by every
    downstream module.
    """

    questions: Mapping[str, Question]
    answers: Mapping[str, Answer]
    comments: Mapping[str, Comment]
    lawyers: Mapping[str, LawyerRef]
    answers_by_question: Mapping[str, tuple[str, ...]] = field(repr=False)
    answers_by_lawyer: Mapping[str, tuple[str, ...]] = field(repr=False)
    comments_by_answer: Mapping[str, tuple[str, ...]] = field(repr=False)

    @property
    def n_questions(self) -> int:
        return len(self.questions)

    @property
    def n_answers(self) -> int:
        return len(self.answers)

    @property
    def n_comments(self) -> int:
        return len(self.comments)

    @property
    def n_lawyers(self) -> int:
        return len(self.lawyers)

    @property
    def total_posts(self) -> int:
        """Questions plus answers. Comments are replies, not posts."""
        return self.n_questions + self.n_answers

    def categories(self) -> list[str]:
        return sorted({q.category for q in self.questions.values()})

    @staticmethod
    def from_records(
        questions: Iterable[Question],
        answers: Iterable[Answer],
        comments: Iterable[Comment],
        lawyers: Iterable[LawyerRef],
        origin: Mapping[str, str] | None = None,
    ) -> "Corpus":
        """Validate and assemble a corpus from parsed records.

        ``origin`` optionally maps record ids to "file:line" strings so
        violation messages can name their source.
        """
        origin = origin or {}

        def _where(rid: str) -> str:
            return f" ({origin[rid]})" if rid in origin else ""

        q_sorted = sorted(questions, key=lambda q: (q.timestamp, q.id))
        a_sorted = sorted(answers, key=lambda a: (a.timestamp, a.id))
        c_sorted = sorted(comments, key=lambda c: (c.timestamp, c.id))
        l_sorted = sorted(lawyers, key=lambda l: l.lawyer_id)

        qmap: dict[str, Question] = {}
        for q in q_sorted:
            if q.id in qmap:
                raise CorpusError(f"duplicate question id {q.id!r}{_where(q.id)}")
            if not q.tags:
                raise CorpusError(f"question {q.id!r} has no tags{_where(q.id)}")
            if q.timestamp <= 0:
                raise CorpusError(f"question {q.id!r} has non-positive timestamp{_where(q.id)}")
            qmap[q.id] = q

        lmap: dict[str, LawyerRef] = {}
        for l in l_sorted:
            if l.lawyer_id in lmap:
                raise CorpusError(f"duplicate lawyer id {l.lawyer_id!r}{_where(l.lawyer_id)}")
            lmap[l.lawyer_id] = l

        amap: dict[str, Answer] = {}
        dup = set(qmap) | set(lmap)
        for a in a_sorted:
            if a.id in amap or a.id in dup:
                raise CorpusError(f"duplicate id {a.id!r} on answer{_where(a.id)}")
            if a.question_id not in qmap:
                raise CorpusError(
                    f"answer {a.id!r} references unknown question {a.question_id!r}{_where(a.id)}"
                )
            if a.lawyer_id not in lmap:
                raise CorpusError(
                    f"answer {a.id!r} references unknown lawyer {a.lawyer_id!r}{_where(a.id)}"
                )
            if not a.text.strip():
                raise CorpusError(f"answer {a.id!r} has empty text{_where(a.id)}")
            amap[a.id] = a

        cmap: dict[str, Comment] = {}
        dup |= set(amap)
        for c in c_sorted:
            if c.id in cmap or c.id in dup:
                raise CorpusError(f"duplicate id {c.id!r} on comment{_where(c.id)}")
            if c.answer_id not in amap:
                raise CorpusError(
                    f"comment {c.id!r} references unknown answer {c.answer_id!r}{_where(c.id)}"
                )
            cmap[c.id] = c

        by_question: dict[str, list[str]] = {}
        by_lawyer: dict[str, list[str]] = {}
        for a in amap.values():
            by_question.setdefault(a.question_id, []).append(a.id)
            by_lawyer.setdefault(a.lawyer_id, []).append(a.id)
        by_answer: dict[str, list[str]] = {}
        for c in cmap.values():
            by_answer.setdefault(c.answer_id, []).append(c.id)

        return Corpus(
            questions=qmap,
            answers=amap,
            comments=cmap,
            lawyers=lmap,
            answers_by_question={k: tuple(v) for k, v in by_question.items()},
            answers_by_lawyer={k: tuple(v) for k, v in by_lawyer.items()},
            comments_by_answer={k: tuple(v) for k, v in by_answer.items()},
        )


_REQUIRED_FIELDS = {
    "question": ("id", "text", "category", "tags", "city", "state", "timestamp"),
    "answer": ("id", "question_id", "lawyer_id", "text", "is_best", "timestamp"),
    "comment": ("id", "answer_id", "text", "timestamp"),
    "lawyer": ("lawyer_id", "city", "state"),
}


def _parse_record(obj: dict, where: str):
    kind = obj.get("kind")
    if kind not in _REQUIRED_FIELDS:
        raise CorpusError(f"{where}: unknown or missing kind {kind!r}")
    missing = [f for f in _REQUIRED_FIELDS[kind] if f not in obj]
    if missing:
        raise CorpusError(f"{where}: {kind} record missing fields {missing}")
    try:
        if kind == "question":
            return kind, Question(
                id=str(obj["id"]),
                text=str(obj["text"]),
                category=str(obj["category"]),
                tags=frozenset(str(t) for t in obj["tags"]),
                city=str(obj["city"]),
                state=str(obj["state"]),
                timestamp=int(obj["timestamp"]),
            )
        if kind == "answer":
            return kind, Answer(
                id=str(obj["id"]),
                question_id=str(obj["question_id"]),
                lawyer_id=str(obj["lawyer_id"]),
                text=str(obj["text"]),
                is_best=bool(obj["is_best"]),
                timestamp=int(obj["timestamp"]),
            )
        if kind == "comment":
            return kind, Comment(
                id=str(obj["id"]),
                answer_id=str(obj["answer_id"]),
                text=str(obj["text"]),
                timestamp=int(obj["timestamp"]),
            )
        return kind, LawyerRef(
            lawyer_id=str(obj["lawyer_id"]),
            city=str(obj["city"]),
            state=str(obj["state"]),
        )
    except (TypeError, ValueError) as exc:
        raise CorpusError(f"{where}: bad field value in {kind} record: {exc}") from exc


def ingest_corpus(paths: Sequence[str | Path]) -> Corpus:
    """Read line-delimited JSON corpus files into a validated Corpus.

    Every line must be one well-formed record object. Errors name the file
    and line of the offending record; dangling references name the record.
    An empty path list yields an empty corpus.
    """
    questions: list[Question] = []
    answers: list[Answer] = []
    comments: list[Comment] = []
    lawyers: list[LawyerRef] = []
    origin: dict[str, str] = {}

    for path in paths:
        path = Path(path)
        with path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                where = f"{path}:{lineno}"
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"{where}: malformed JSON: {exc}") from exc
                if not isinstance(obj, dict):
                    raise CorpusError(f"{where}: record is not an object")
                kind, rec = _parse_record(obj, where)
                if kind == "question":
                    questions.append(rec)
                    origin.setdefault(rec.id, where)
                elif kind == "answer":
                    answers.append(rec)
                    origin.setdefault(rec.id, where)
                elif kind == "comment":
                    comments.append(rec)
                    origin.setdefault(rec.id, where)
                else:
                    lawyers.append(rec)
                    origin.setdefault(rec.lawyer_id, where)

    return Corpus.from_records(questions, answers, comments, lawyers, origin)


def _record_to_obj(rec) -> dict:
    if isinstance(rec, Question):
        return {
            "kind": "question",
            "id": rec.id,
            "text": rec.text,
            "category": rec.category,
            "tags": sorted(rec.tags),
            "city": rec.city,
            "state": rec.state,
            "timestamp": rec.timestamp,
        }
    if isinstance(rec, Answer):
        return {
            "kind": "answer",
            "id": rec.id,
            "question_id": rec.question_id,
            "lawyer_id": rec.lawyer_id,
            "text": rec.text,
            "is_best": rec.is_best,
            "timestamp": rec.timestamp,
        }
    if isinstance(rec, Comment):
        return {
            "kind": "comment",
            "id": rec.id,
            "answer_id": rec.answer_id,
            "text": rec.text,
            "timestamp": rec.timestamp,
        }
    return {
        "kind": "lawyer",
        "lawyer_id": rec.lawyer_id,
        "city": rec.city,
        "state": rec.state,
    }


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    """Serialize a corpus back to the line-delimited ingestion format.

    Output order (lawyers, questions, answers, comments, each in corpus
    order) and key order are fixed, so identical corpora produce
    byte-identical files.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for group in (corpus.lawyers, corpus.questions, corpus.answers, corpus.comments):
            for rec in group.values():
                fh.write(json.dumps(_record_to_obj(rec), sort_keys=True, ensure_ascii=False))
                fh.write("\n")
