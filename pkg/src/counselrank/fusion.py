"""Linear score fusion and grid-search weight tuning.

The final ranking score is an integer-weighted linear combination of the
five model scores (answer aggregate plus the four profiles), weights in
[1, 100]. The full five-dimensional grid is intractable, so the default
tuner is deterministic coordinate ascent from the uniform all-ones vector,
sweeping one weight at a time over the whole range and cycling until a
full pass yields no improvement; exhaustive search is available for small
ranges. Ties always resolve to the lexicographically smallest vector.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .evaluation import query_metrics
from .labeling import DatasetSplit, QueryTopic
from .rerank import ScoreVector

WEIGHT_MIN = 1
WEIGHT_MAX = 100
WEIGHT_FIELDS = ("w_bd", "w_cp", "w_pp", "w_np", "w_rp")


class TuningError(ValueError):
    pass


@dataclass(frozen=True)
class WeightVector:
    w_bd: int
    w_cp: int
    w_pp: int
    w_np: int
    w_rp: int

    def __post_init__(self):
        for name in WEIGHT_FIELDS:
            v = getattr(self, name)
            if not isinstance(v, int) or not WEIGHT_MIN <= v <= WEIGHT_MAX:
                raise ValueError(f"{name}={v!r} outside [{WEIGHT_MIN}, {WEIGHT_MAX}]")

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.w_bd, self.w_cp, self.w_pp, self.w_np, self.w_rp)


def aggregate(scores: ScoreVector, w: WeightVector) -> float:
    return (
        w.w_bd * scores.s_bd
        + w.w_cp * scores.s_cp
        + w.w_pp * scores.s_pp
        + w.w_np * scores.s_np
        + w.w_rp * scores.s_rp
    )


@dataclass(frozen=True)
class TuneConfig:
    strategy: str = "ascent"  # or "exhaustive"
    lo: int = WEIGHT_MIN
    hi: int = WEIGHT_MAX
    max_sweeps: int = 25


VectorMap = Mapping[tuple[str, str], ScoreVector]


def _queries_of(valid) -> Sequence[QueryTopic]:
    if isinstance(valid, DatasetSplit):
        return valid.queries
    return list(valid)


def rank_by_aggregate(query_id: str, lawyers: Sequence[str], vectors: VectorMap,
                      weights: Sequence[int]) -> list[str]:
    scored = []
    for lid in lawyers:
        v = vectors[(query_id, lid)]
        s = (
            weights[0] * v.s_bd + weights[1] * v.s_cp + weights[2] * v.s_pp
            + weights[3] * v.s_np + weights[4] * v.s_rp
        )
        scored.append((lid, s))
    scored.sort(key=lambda e: (-e[1], e[0]))
    return [lid for lid, _ in scored]


def mean_ap_for_weights(queries: Sequence[QueryTopic], vectors: VectorMap,
                        weights: Sequence[int]) -> float:
    lawyers_by_query: dict[str, list[str]] = {}
    for qid, lid in vectors:
        lawyers_by_query.setdefault(qid, []).append(lid)
    aps = []
    for q in queries:
        lawyers = sorted(lawyers_by_query.get(q.query_id, []))
        ranked = rank_by_aggregate(q.query_id, lawyers, vectors, weights)
        aps.append(query_metrics(ranked, frozenset(q.relevant_experts)).ap)
    return math.fsum(aps) / len(aps)


def tune_weights(valid, vectors: VectorMap, config: TuneConfig = TuneConfig()
                 ) -> tuple[WeightVector, float]:
    """Maximize validation MAP over the integer weight grid.

    Coordinate ascent accepts only strict improvements while scanning each
    coordinate in ascending order, which lands on the lexicographically
    smallest optimum among the vectors it visits; exhaustive mode makes the
    same guarantee over the whole grid.
    """
    queries = _queries_of(valid)
    if not queries:
        raise TuningError("validation split has no queries")
    if config.strategy not in ("ascent", "exhaustive"):
        raise TuningError(f"unknown strategy {config.strategy!r}")

    def objective(w: Sequence[int]) -> float:
        return mean_ap_for_weights(queries, vectors, w)

    if config.strategy == "exhaustive":
        best_w: tuple[int, ...] | None = None
        best_m = -math.inf
        for w in itertools.product(range(config.lo, config.hi + 1), repeat=5):
            m = objective(w)
            if m > best_m:
                best_m, best_w = m, w
        return WeightVector(*best_w), best_m

    w = [config.lo] * 5
    best_m = objective(w)
    for _ in range(config.max_sweeps):
        changed = False
        for coord in range(5):
            original = w[coord]
            best_v = original
            for val in range(config.lo, config.hi + 1):
                if val == original:
                    continue
                w[coord] = val
                m = objective(w)
                if m > best_m:
                    best_m, best_v = m, val
            w[coord] = best_v
            if best_v != original:
                changed = True
        if not changed:
            break
    return WeightVector(*w), best_m


def save_weights(w: WeightVector, metric: float, path: str | Path) -> None:
    """Two-line text config: the five weights, then the achieved metric."""
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(" ".join(str(v) for v in w.as_tuple()) + "\n")
        fh.write(f"map {metric:.17g}\n")


def load_weights(path: str | Path) -> tuple[WeightVector, float]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise TuningError(f"{path}: empty weights file")
    parts = lines[0].split()
    if len(parts) != 5:
        raise TuningError(f"{path}: expected 5 weights on the first line")
    w = WeightVector(*(int(p) for p in parts))
    metric = float(lines[1].split()[1]) if len(lines) > 1 else math.nan
    return w, metric
