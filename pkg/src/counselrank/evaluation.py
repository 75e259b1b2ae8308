"""IR metrics, paired significance testing, and seen/unseen analysis.

Average precision divides by the total number of relevant experts for the
query, so relevant experts missing from a run pull the score down (TREC
convention). Precision at k treats missing ranks as non-relevant. The
paired t-test is one-tailed (mean of a-b greater than zero) with the
Student t survival function evaluated through the regularized incomplete
beta function.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .labeling import QueryTopic
from .rankers import RankedList

PRECISION_CUTOFFS = (1, 2, 5)


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class QueryMetrics:
    ap: float
    rr: float
    p1: float
    p2: float
    p5: float

    def as_dict(self) -> dict[str, float]:
        return {"ap": self.ap, "rr": self.rr, "p1": self.p1, "p2": self.p2, "p5": self.p5}


_ZERO = QueryMetrics(0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class EvalReport:
    per_query: Mapping[str, QueryMetrics]
    means: QueryMetrics
    run_tag: str
    n_queries: int


def _normalize_qrels(qrels) -> dict[str, frozenset[str]]:
    if isinstance(qrels, Mapping):
        return {qid: frozenset(rel) for qid, rel in qrels.items()}
    return {q.query_id: frozenset(q.relevant_experts) for q in qrels}


def query_metrics(ranked_ids: Sequence[str], relevant: frozenset[str]) -> QueryMetrics:
    if not relevant:
        raise EvaluationError("relevant set must be non-empty")
    hits = 0
    precision_sum = 0.0
    rr = 0.0
    for rank, lid in enumerate(ranked_ids, start=1):
        if lid in relevant:
            hits += 1
            precision_sum += hits / rank
            if rr == 0.0:
                rr = 1.0 / rank
    ap = precision_sum / len(relevant)
    p_at = []
    for k in PRECISION_CUTOFFS:
        top = ranked_ids[:k]
        p_at.append(sum(1 for lid in top if lid in relevant) / k)
    return QueryMetrics(ap, rr, p_at[0], p_at[1], p_at[2])


def _mean_metrics(per_query: Mapping[str, QueryMetrics]) -> QueryMetrics:
    if not per_query:
        return _ZERO
    n = len(per_query)
    return QueryMetrics(
        ap=math.fsum(m.ap for m in per_query.values()) / n,
        rr=math.fsum(m.rr for m in per_query.values()) / n,
        p1=math.fsum(m.p1 for m in per_query.values()) / n,
        p2=math.fsum(m.p2 for m in per_query.values()) / n,
        p5=math.fsum(m.p5 for m in per_query.values()) / n,
    )


def evaluate_run(runs: Iterable[RankedList],
                 qrels: Mapping[str, Iterable[str]] | Iterable[QueryTopic],
                 run_tag: str | None = None) -> EvalReport:
    """Evaluate ranked lists against relevance judgments. Every run query
    must have qrels; the error lists the queries that do not."""
    runs = list(runs)
    rel = _normalize_qrels(qrels)
    missing = sorted(rl.query_id for rl in runs if rl.query_id not in rel)
    if missing:
        raise EvaluationError(f"run queries without qrels: {missing}")
    per_query: dict[str, QueryMetrics] = {}
    tag = run_tag
    for rl in runs:
        per_query[rl.query_id] = query_metrics(rl.ids(), rel[rl.query_id])
        tag = tag or rl.run_tag
    return EvalReport(
        per_query=per_query,
        means=_mean_metrics(per_query),
        run_tag=tag or "run",
        n_queries=len(per_query),
    )


# -- Student t machinery (kept dependency-free; the test suite checks it
#    against an independent statistics library) --

def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified
    Lentz's method)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 400):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: int) -> float:
    """P(T > t) for Student's t with df degrees of freedom."""
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x)
    return tail if t > 0 else 1.0 - tail


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    significant: bool


def paired_ttest(a: Sequence[float], b: Sequence[float], alpha: float = 0.05) -> TTestResult:
    """One-tailed paired t-test of mean(a - b) > 0.

    Zero-variance differences degenerate cleanly: a constant positive
    difference gives p = 0 (significant), a constant zero difference gives
    p = 1 (not significant).
    """
    if len(a) != len(b):
        raise EvaluationError(f"paired samples differ in length: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        raise EvaluationError("need at least 2 paired observations")
    diffs = [x - y for x, y in zip(a, b)]
    mean = math.fsum(diffs) / n
    var = math.fsum((d - mean) ** 2 for d in diffs) / (n - 1)
    if var == 0.0:
        if mean > 0:
            return TTestResult(math.inf, 0.0, True)
        if mean < 0:
            return TTestResult(-math.inf, 1.0, False)
        return TTestResult(0.0, 1.0, False)
    t = mean / math.sqrt(var / n)
    p = student_t_sf(t, n - 1)
    return TTestResult(t, p, p < alpha)


def seen_unseen_report(test_report: EvalReport, train_queries: Iterable[str],
                       test_queries: Iterable[str] | None = None
                       ) -> tuple[EvalReport, EvalReport]:
    """Split a test report into seen queries (also present in training) and
    unseen ones. An empty partition comes back with n_queries 0."""
    train_set = set(train_queries)
    qids = set(test_report.per_query)
    if test_queries is not None:
        qids &= set(test_queries)
    seen = {qid: m for qid, m in test_report.per_query.items() if qid in qids and qid in train_set}
    unseen = {qid: m for qid, m in test_report.per_query.items() if qid in qids and qid not in train_set}
    return (
        EvalReport(seen, _mean_metrics(seen), f"{test_report.run_tag}/seen", len(seen)),
        EvalReport(unseen, _mean_metrics(unseen), f"{test_report.run_tag}/unseen", len(unseen)),
    )


def format_report(report: EvalReport) -> str:
    lines = [
        f"run: {report.run_tag}  queries: {report.n_queries}",
        f"MAP   {report.means.ap:.4f}",
        f"MRR   {report.means.rr:.4f}",
        f"P@1   {report.means.p1:.4f}",
        f"P@2   {report.means.p2:.4f}",
        f"P@5   {report.means.p5:.4f}",
    ]
    return "\n".join(lines)


def write_report(report: EvalReport, path: str | Path) -> None:
    """Line-delimited report: one record per query plus a means record."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for qid in sorted(report.per_query):
            rec = {"query_id": qid, "run_tag": report.run_tag}
            rec.update(report.per_query[qid].as_dict())
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
        rec = {"query_id": None, "run_tag": report.run_tag, "n_queries": report.n_queries}
        rec.update(report.means.as_dict())
        fh.write(json.dumps(rec, sort_keys=True) + "\n")
