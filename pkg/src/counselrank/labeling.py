"""Ground-truth expert labeling, query selection, and expert-level splits.

A lawyer is an expert on a category tag when three conditions all hold:

  (a) at least 10 of their answers in the category are best answers;
  (b) their best-answer count on the tag is strictly greater than the mean
      best-answer count among lawyers active on that tag (>= 1 answer);
  (c) their acceptance ratio (best answers / answers) in the category is
      strictly greater than the collection mean acceptance ratio, where the
      collection mean averages the per-lawyer ratios of lawyers active in
      the category.

All intermediate averages are kept on the label set so the decision can be
re-derived from stats alone.
"""
from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus

MIN_BEST_ANSWERS = 10
MIN_EXPERTS_PER_QUERY = 2
TOP_TAG_FRACTION = 0.2


class LabelingError(ValueError):
    pass


@dataclass(frozen=True)
class LawyerStats:
    """Per-lawyer answer counts: overall, by category, and by tag within the
    labeled category."""

    answer_count: int
    best_answer_count: int
    by_category: Mapping[str, tuple[int, int]]  # category -> (answers, best)
    by_tag: Mapping[str, tuple[int, int]]  # tag -> (answers, best)


@dataclass(frozen=True)
class ExpertLabelSet:
    category: str
    labels: Mapping[tuple[str, str], bool]  # (lawyer_id, tag) -> expert?
    avg_best_answers_per_tag: Mapping[str, float]
    collection_avg_acceptance_ratio: float
    per_lawyer_stats: Mapping[str, LawyerStats]

    def is_expert(self, lawyer_id: str, tag: str) -> bool:
        return self.labels.get((lawyer_id, tag), False)

    def experts_on(self, tag: str) -> frozenset[str]:
        return frozenset(l for (l, t), v in self.labels.items() if v and t == tag)

    def all_experts(self) -> frozenset[str]:
        return frozenset(l for (l, t), v in self.labels.items() if v)

    def recheck(self, lawyer_id: str, tag: str) -> bool:
        """Recompute the three labeling conditions from stored stats."""
        stats = self.per_lawyer_stats.get(lawyer_id)
        if stats is None:
            return False
        cat_answers, cat_best = stats.by_category.get(self.category, (0, 0))
        if cat_answers == 0:
            return False
        tag_best = stats.by_tag.get(tag, (0, 0))[1]
        tag_avg = self.avg_best_answers_per_tag.get(tag)
        if tag_avg is None:
            return False
        return (
            cat_best >= MIN_BEST_ANSWERS
            and tag_best > tag_avg
            and cat_best / cat_answers > self.collection_avg_acceptance_ratio
        )


@dataclass(frozen=True)
class QueryTopic:
    query_id: str
    tag_text: str
    relevant_experts: frozenset[str]

    def __post_init__(self):
        if not self.tag_text:
            raise ValueError("query tag_text must be non-empty")


@dataclass(frozen=True)
class DatasetSplit:
    name: str
    expert_ids: frozenset[str]
    queries: tuple[QueryTopic, ...] = field(default=())


def label_experts(corpus: Corpus, category: str) -> ExpertLabelSet:
    """Label (lawyer, tag) expert pairs for one category.

    Tag counts attribute an answer to every tag of its question. Raises
    LabelingError when the category has no answers.
    """
    total_answers: dict[str, int] = {}
    total_best: dict[str, int] = {}
    by_category: dict[str, dict[str, list[int]]] = {}
    by_tag: dict[str, dict[str, list[int]]] = {}
    tag_lawyers: dict[str, set[str]] = {}

    seen_category_answer = False
    for ans in corpus.answers.values():
        q = corpus.questions[ans.question_id]
        lid = ans.lawyer_id
        total_answers[lid] = total_answers.get(lid, 0) + 1
        total_best[lid] = total_best.get(lid, 0) + (1 if ans.is_best else 0)
        cat_counts = by_category.setdefault(lid, {}).setdefault(q.category, [0, 0])
        cat_counts[0] += 1
        cat_counts[1] += 1 if ans.is_best else 0
        if q.category != category:
            continue
        seen_category_answer = True
        for tag in q.tags:
            tag_counts = by_tag.setdefault(lid, {}).setdefault(tag, [0, 0])
            tag_counts[0] += 1
            tag_counts[1] += 1 if ans.is_best else 0
            tag_lawyers.setdefault(tag, set()).add(lid)

    if not seen_category_answer:
        raise LabelingError(f"category {category!r} has no answers")

    stats: dict[str, LawyerStats] = {}
    for lid in sorted(total_answers):
        stats[lid] = LawyerStats(
            answer_count=total_answers[lid],
            best_answer_count=total_best[lid],
            by_category={c: (v[0], v[1]) for c, v in sorted(by_category[lid].items())},
            by_tag={t: (v[0], v[1]) for t, v in sorted(by_tag.get(lid, {}).items())},
        )

    # Mean best-answer count per tag, over lawyers with >= 1 answer on it.
    avg_best_per_tag: dict[str, float] = {}
    for tag in sorted(tag_lawyers):
        active = tag_lawyers[tag]
        avg_best_per_tag[tag] = math.fsum(
            stats[l].by_tag[tag][1] for l in active
        ) / len(active)

    # Collection mean acceptance ratio over lawyers active in the category.
    ratios = []
    for lid, st in stats.items():
        cat_answers, cat_best = st.by_category.get(category, (0, 0))
        if cat_answers > 0:
            ratios.append(cat_best / cat_answers)
    collection_avg = math.fsum(ratios) / len(ratios)

    labels: dict[tuple[str, str], bool] = {}
    for tag in sorted(tag_lawyers):
        for lid in sorted(tag_lawyers[tag]):
            st = stats[lid]
            cat_answers, cat_best = st.by_category[category]
            tag_best = st.by_tag[tag][1]
            labels[(lid, tag)] = (
                cat_best >= MIN_BEST_ANSWERS
                and tag_best > avg_best_per_tag[tag]
                and cat_best / cat_answers > collection_avg
            )

    return ExpertLabelSet(
        category=category,
        labels=labels,
        avg_best_answers_per_tag=avg_best_per_tag,
        collection_avg_acceptance_ratio=collection_avg,
        per_lawyer_stats=stats,
    )


def _slug(text: str) -> str:
    s = re.sub(r"[^0-9a-z]+", "-", text.lower()).strip("-")
    return s or "tag"


def select_queries(
    corpus: Corpus, labels: ExpertLabelSet, anchor_category: str
) -> list[QueryTopic]:
    """Turn high-co-occurrence tags of the anchor category into query topics.

    Tags are ranked by how many anchor-category questions carry them; the
    top 20% (ceiling, boundary ties included) survive, and of those only
    tags with at least two labeled experts become queries. The anchor
    category itself is not a candidate tag.
    """
    counts: dict[str, int] = {}
    for q in corpus.questions.values():
        if q.category != anchor_category:
            continue
        for tag in q.tags:
            if tag == anchor_category:
                continue
            counts[tag] = counts.get(tag, 0) + 1
    if not counts:
        return []

    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    keep = math.ceil(TOP_TAG_FRACTION * len(ranked))
    boundary = ranked[keep - 1][1]
    kept = [tag for tag, n in ranked if n >= boundary]

    used_ids: dict[str, int] = {}
    topics: list[QueryTopic] = []
    for tag in kept:
        experts = labels.experts_on(tag)
        if len(experts) < MIN_EXPERTS_PER_QUERY:
            continue
        qid = _slug(tag)
        n = used_ids.get(qid, 0)
        used_ids[qid] = n + 1
        if n:
            qid = f"{qid}-{n + 1}"
        topics.append(QueryTopic(query_id=qid, tag_text=tag, relevant_experts=experts))
    return topics


SPLIT_NAMES = ("train", "validation", "test")


def _restrict_queries(
    queries: Sequence[QueryTopic], experts: frozenset[str]
) -> tuple[QueryTopic, ...]:
    out = []
    for q in queries:
        hit = q.relevant_experts & experts
        if hit:
            out.append(QueryTopic(q.query_id, q.tag_text, frozenset(hit)))
    return tuple(out)


def split_by_experts(
    queries: Sequence[QueryTopic],
    labels: ExpertLabelSet,
    seed: int,
    ratios: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3),
) -> tuple[DatasetSplit, DatasetSplit, DatasetSplit]:
    """Partition labeled experts into train/validation/test, then restrict
    each query's relevant set to the split's experts.

    Split sizes follow cumulative-floor allocation, so 61 experts at equal
    ratios come out 20/20/21. Deterministic for a fixed seed.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {ratios}")
    experts = sorted(labels.all_experts())
    if len(experts) < len(SPLIT_NAMES):
        raise LabelingError(
            f"need at least {len(SPLIT_NAMES)} experts to split, got {len(experts)}"
        )
    rng = random.Random(seed)
    rng.shuffle(experts)
    n = len(experts)
    b1 = math.floor(n * ratios[0])
    b2 = math.floor(n * (ratios[0] + ratios[1]))
    parts = (experts[:b1], experts[b1:b2], experts[b2:])
    return tuple(
        DatasetSplit(
            name=name,
            expert_ids=frozenset(part),
            queries=_restrict_queries(queries, frozenset(part)),
        )
        for name, part in zip(SPLIT_NAMES, parts)
    )


def splits_from_assignment(
    queries: Sequence[QueryTopic], assignment: Mapping[str, str]
) -> tuple[DatasetSplit, DatasetSplit, DatasetSplit]:
    """Build splits from an explicit lawyer -> split-name assignment (the
    authoritative partition file, when one exists)."""
    unknown = sorted(set(assignment.values()) - set(SPLIT_NAMES))
    if unknown:
        raise LabelingError(f"unknown split names in assignment: {unknown}")
    out = []
    for name in SPLIT_NAMES:
        part = frozenset(l for l, s in assignment.items() if s == name)
        out.append(
            DatasetSplit(name=name, expert_ids=part, queries=_restrict_queries(queries, part))
        )
    return tuple(out)


def write_splits(splits: Iterable[DatasetSplit], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for split in splits:
            for lid in sorted(split.expert_ids):
                fh.write(f"{split.name}\t{lid}\n")


def read_split_assignment(path: str | Path) -> dict[str, str]:
    assignment: dict[str, str] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise LabelingError(f"{path}:{lineno}: expected 'split<TAB>lawyer_id'")
            name, lid = parts
            assignment[lid] = name
    return assignment


def write_qrels(queries: Iterable[QueryTopic], path: str | Path) -> None:
    """TREC qrels lines: ``query_id 0 lawyer_id 1``."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for q in queries:
            for lid in sorted(q.relevant_experts):
                fh.write(f"{q.query_id} 0 {lid} 1\n")


def read_qrels(path: str | Path) -> dict[str, set[str]]:
    qrels: dict[str, set[str]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise LabelingError(f"{path}:{lineno}: expected 'qid 0 lawyer_id rel'")
            qid, _, lid, rel = parts
            if int(rel) > 0:
                qrels.setdefault(qid, set()).add(lid)
            else:
                qrels.setdefault(qid, set())
    return qrels
