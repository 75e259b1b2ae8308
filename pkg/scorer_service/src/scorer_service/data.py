"""Training-pair construction and file formats.

Labeled pairs live in JSONL files: {"query": ..., "text": ..., "label": 0|1}.
pairs_from_profile_export builds them from the ranking pipeline's exported
profile file plus a TREC qrels file: profiles of relevant lawyers become
positives, and negatives are sampled from other lawyers' profiles on the
same query, one per positive.
"""
from __future__ import annotations

import json
import random
from pathlib import Path

from .model import LabeledPair


def read_pairs(path: str | Path) -> list[LabeledPair]:
    out = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            try:
                out.append(LabeledPair(
                    query=str(obj["query"]),
                    text=str(obj["text"]),
                    label=int(obj["label"]),
                ))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad pair record: {exc}") from exc
    return out


def write_pairs(pairs, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(json.dumps(
                {"query": p.query, "text": p.text, "label": p.label},
                sort_keys=True, ensure_ascii=False) + "\n")


def read_qrels(path: str | Path) -> dict[str, set[str]]:
    qrels: dict[str, set[str]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if len(parts) != 4:
                continue
            qid, _, lawyer_id, rel = parts
            if int(rel) > 0:
                qrels.setdefault(qid, set()).add(lawyer_id)
    return qrels


def pairs_from_profile_export(profiles_path: str | Path, qrels_path: str | Path,
                              kind: str, seed: int = 0) -> list[LabeledPair]:
    """Positives: the given profile kind of relevant lawyers per query.
    Negatives: randomly sampled profiles of non-relevant lawyers on the
    same query, 1:1 with the positives."""
    qrels = read_qrels(qrels_path)
    by_query: dict[str, list[tuple[str, str]]] = {}
    queries_text: dict[str, str] = {}
    with Path(profiles_path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if obj.get("kind") != kind or not obj.get("text"):
                continue
            qid = obj["query_id"]
            by_query.setdefault(qid, []).append((obj["lawyer_id"], obj["text"]))
            queries_text.setdefault(qid, qid)

    rng = random.Random(seed)
    out: list[LabeledPair] = []
    for qid in sorted(by_query):
        relevant = qrels.get(qid, set())
        entries = by_query[qid]
        positives = [(lid, text) for lid, text in entries if lid in relevant]
        candidates = [(lid, text) for lid, text in entries if lid not in relevant]
        if not positives or not candidates:
            continue
        query_text = queries_text[qid]
        for lid, text in positives:
            out.append(LabeledPair(query=query_text, text=text, label=1))
            neg_lid, neg_text = rng.choice(candidates)
            out.append(LabeledPair(query=query_text, text=neg_text, label=0))
    return out
