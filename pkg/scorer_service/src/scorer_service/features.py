"""Hashed query-text interaction features.

Each (query, text) pair maps to a sparse vector: a bias slot, a coverage
slot (fraction of distinct query tokens present in the text), a text-length
slot, and hashed per-token slots for matched query tokens (weighted
log(1 + tf)) and for missing ones. Text is truncated to the input limit
before featurization. Hashing uses crc32, so feature indices are stable
across processes.
"""
from __future__ import annotations

import math
import zlib
from collections import Counter

DIM = 4096
TEXT_TOKEN_LIMIT = 512
_RESERVED = 4  # dense slots: 0 bias, 1 coverage, 2 text length, 3 spare


def tokenize(text: str) -> list[str]:
    text = text.lower()
    text = "".join(ch if ch.isalnum() or ch.isspace() else " " for ch in text)
    return text.split()


def _slot(kind: str, token: str) -> int:
    key = f"{kind}:{token}".encode("utf-8")
    return _RESERVED + zlib.crc32(key) % (DIM - _RESERVED)


def pair_features(query: str, text: str) -> dict[int, float]:
    feats: dict[int, float] = {0: 1.0}
    q_tokens = set(tokenize(query))
    t_counts = Counter(tokenize(text)[:TEXT_TOKEN_LIMIT])
    feats[2] = math.log(1.0 + sum(t_counts.values()))
    if not q_tokens:
        return feats
    matched = 0
    for t in sorted(q_tokens):
        tf = t_counts.get(t, 0)
        if tf:
            matched += 1
            idx = _slot("m", t)
            feats[idx] = feats.get(idx, 0.0) + math.log(1.0 + tf)
        else:
            idx = _slot("x", t)
            feats[idx] = feats.get(idx, 0.0) + 1.0
    feats[1] = matched / len(q_tokens)
    return feats
