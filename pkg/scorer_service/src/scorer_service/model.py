"""Pairwise relevance head: a linear layer over hashed interaction
features, trained with pairwise cross-entropy and Adam.

Training forms (positive, negative) duels within each query and minimizes
-log sigmoid(s_pos - s_neg). Scoring returns the raw scalar of the head;
an untrained head scores every pair 0.0. All randomness flows from the
training seed, so identical inputs produce identical weights.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .features import DIM, pair_features

MIN_TRAINING_PAIRS = 100


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledPair:
    query: str
    text: str
    label: int  # 1 relevant, 0 not


@dataclass
class TrainConfig:
    learning_rate: float = 0.05
    epochs: int = 10
    batch_size: int = 32
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0

    def as_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "seed": self.seed,
        }


class PairwiseHead:
    def __init__(self, weights: np.ndarray | None = None, meta: dict | None = None):
        self.weights = np.zeros(DIM) if weights is None else np.asarray(weights, dtype=float)
        if self.weights.shape != (DIM,):
            raise ValueError(f"expected weight shape ({DIM},), got {self.weights.shape}")
        self.meta = meta or {"trained_pairs": 0}

    def score(self, query: str, text: str) -> float:
        feats = pair_features(query, text)
        return float(sum(self.weights[i] * v for i, v in feats.items()))

    def score_many(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        return [self.score(q, t) for q, t in pairs]

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        np.savez(directory / "weights.npz", weights=self.weights)
        (directory / "config.json").write_text(
            json.dumps(self.meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, directory: str | Path) -> "PairwiseHead":
        directory = Path(directory)
        weights = np.load(directory / "weights.npz")["weights"]
        meta = json.loads((directory / "config.json").read_text(encoding="utf-8"))
        return cls(weights=weights, meta=meta)


def _duels(pairs: Iterable[LabeledPair], rng: random.Random
           ) -> list[tuple[LabeledPair, LabeledPair]]:
    """Within-query (positive, negative) duels; the shorter side cycles so
    every example participates."""
    by_query: dict[str, tuple[list[LabeledPair], list[LabeledPair]]] = {}
    for p in pairs:
        bucket = by_query.setdefault(p.query, ([], []))
        bucket[0 if p.label else 1].append(p)
    duels = []
    for query in sorted(by_query):
        pos, neg = by_query[query]
        if not pos or not neg:
            continue
        rng.shuffle(pos)
        rng.shuffle(neg)
        n = max(len(pos), len(neg))
        for i in range(n):
            duels.append((pos[i % len(pos)], neg[i % len(neg)]))
    rng.shuffle(duels)
    return duels


def finetune(pairs: Sequence[LabeledPair], config: TrainConfig = TrainConfig()
             ) -> PairwiseHead:
    """Train a head from labeled pairs. Refuses fewer than 100 pairs."""
    if len(pairs) < MIN_TRAINING_PAIRS:
        raise TrainingError(
            f"need at least {MIN_TRAINING_PAIRS} labeled pairs, got {len(pairs)}")
    rng = random.Random(config.seed)
    duels = _duels(pairs, rng)
    if not duels:
        raise TrainingError("no query has both positive and negative pairs")

    w = np.zeros(DIM)
    m = np.zeros(DIM)
    v = np.zeros(DIM)
    step = 0
    feat_cache: dict[tuple[str, str], dict[int, float]] = {}

    def feats_of(p: LabeledPair) -> dict[int, float]:
        key = (p.query, p.text)
        if key not in feat_cache:
            feat_cache[key] = pair_features(p.query, p.text)
        return feat_cache[key]

    for _ in range(config.epochs):
        rng.shuffle(duels)
        for start in range(0, len(duels), config.batch_size):
            batch = duels[start:start + config.batch_size]
            grad = np.zeros(DIM)
            for pos, neg in batch:
                f_pos, f_neg = feats_of(pos), feats_of(neg)
                margin = (sum(w[i] * x for i, x in f_pos.items())
                          - sum(w[i] * x for i, x in f_neg.items()))
                # d/dw of -log sigmoid(margin) = -sigmoid(-margin) * (f+ - f-)
                coeff = -1.0 / (1.0 + np.exp(margin))
                for i, x in f_pos.items():
                    grad[i] += coeff * x
                for i, x in f_neg.items():
                    grad[i] -= coeff * x
            grad /= len(batch)
            step += 1
            m = config.beta1 * m + (1 - config.beta1) * grad
            v = config.beta2 * v + (1 - config.beta2) * grad * grad
            m_hat = m / (1 - config.beta1 ** step)
            v_hat = v / (1 - config.beta2 ** step)
            w -= config.learning_rate * m_hat / (np.sqrt(v_hat) + config.eps)

    meta = {"trained_pairs": len(pairs), "duels": len(duels),
            "train_config": config.as_dict()}
    return PairwiseHead(weights=w, meta=meta)


def pairwise_accuracy(head: PairwiseHead, pairs: Sequence[LabeledPair]) -> float:
    """Fraction of within-query (positive, negative) combinations the head
    orders correctly."""
    by_query: dict[str, tuple[list[LabeledPair], list[LabeledPair]]] = {}
    for p in pairs:
        bucket = by_query.setdefault(p.query, ([], []))
        bucket[0 if p.label else 1].append(p)
    correct = 0
    total = 0
    for pos, neg in by_query.values():
        pos_scores = [head.score(p.query, p.text) for p in pos]
        neg_scores = [head.score(p.query, p.text) for p in neg]
        for ps in pos_scores:
            for ns in neg_scores:
                total += 1
                if ps > ns:
                    correct += 1
    if total == 0:
        raise TrainingError("no (positive, negative) combination to evaluate")
    return correct / total
