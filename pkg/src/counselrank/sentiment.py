"""Rule-based, lexicon-driven sentence sentiment.

Each matched token contributes its lexicon valence; an intensifier among
the three preceding tokens adds its boost toward the valence's sign, and a
negator in the same window damps and flips it (times -0.74). The raw sum S
is squashed to a compound score in (-1, 1):

    compound = S / sqrt(S^2 + 15)

Sentences label positive at compound >= +0.05, negative at <= -0.05,
neutral in between. The heavier punctuation/caps heuristics of full social
media sentiment models are out of scope here; only the coarse
positive/negative split is consumed downstream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .analyze import DEFAULT_ANALYZER, TextAnalyzer

NEGATION_WINDOW = 3
NEGATION_FACTOR = -0.74
SQUASH_ALPHA = 15.0
POSITIVE_THRESHOLD = 0.05
NEGATIVE_THRESHOLD = -0.05


@dataclass(frozen=True)
class SentimentLexicon:
    valence: Mapping[str, float]
    negators: frozenset[str]
    intensifiers: Mapping[str, float]

    def __post_init__(self):
        bad = {t: v for t, v in self.valence.items() if not -4.0 <= v <= 4.0}
        if bad:
            raise ValueError(f"valences outside [-4, 4]: {bad}")


@dataclass(frozen=True)
class SentenceSentiment:
    compound: float
    label: str

    @classmethod
    def from_compound(cls, compound: float) -> "SentenceSentiment":
        if compound >= POSITIVE_THRESHOLD:
            label = "positive"
        elif compound <= NEGATIVE_THRESHOLD:
            label = "negative"
        else:
            label = "neutral"
        return cls(compound, label)


def split_sentences(text: str) -> list[str]:
    """Split on '.', '!', '?' when followed by whitespace or end of text.
    Segments are stripped; empty segments are dropped. "3.5 rate" does not
    split; "Wait... ok" splits once after the ellipsis."""
    sentences: list[str] = []
    buf: list[str] = []
    n = len(text)
    for i, ch in enumerate(text):
        buf.append(ch)
        if ch in ".!?" and (i + 1 == n or text[i + 1].isspace()):
            seg = "".join(buf).strip()
            if seg:
                sentences.append(seg)
            buf = []
    tail = "".join(buf).strip()
    if tail:
        sentences.append(tail)
    return sentences


def score_sentence(sentence: str, lexicon: SentimentLexicon,
                   analyzer: TextAnalyzer = DEFAULT_ANALYZER) -> SentenceSentiment:
    tokens = analyzer.tokens(sentence)
    contributions = []
    for i, tok in enumerate(tokens):
        v = lexicon.valence.get(tok)
        if v is None:
            continue
        window = tokens[max(0, i - NEGATION_WINDOW):i]
        if v != 0.0:
            sign = 1.0 if v > 0 else -1.0
            for w in window:
                boost = lexicon.intensifiers.get(w)
                if boost is not None:
                    v += boost * sign
        if any(w in lexicon.negators for w in window):
            v *= NEGATION_FACTOR
        contributions.append(v)
    s = math.fsum(contributions)
    compound = s / math.sqrt(s * s + SQUASH_ALPHA)
    return SentenceSentiment.from_compound(compound)


def load_lexicon(valence_path: str | Path,
                 negators_path: str | Path | None = None,
                 intensifiers_path: str | Path | None = None) -> SentimentLexicon:
    """Lexicon file: ``token<TAB>valence`` lines; negators one token per
    line; intensifiers ``token<TAB>boost`` lines."""
    valence: dict[str, float] = {}
    with Path(valence_path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{valence_path}:{lineno}: expected 'token<TAB>valence'")
            valence[parts[0].lower()] = float(parts[1])

    negators: set[str] = set()
    if negators_path is not None:
        with Path(negators_path).open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line and not line.startswith("#"):
                    negators.add(line.lower())

    intensifiers: dict[str, float] = {}
    if intensifiers_path is not None:
        with Path(intensifiers_path).open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ValueError(
                        f"{intensifiers_path}:{lineno}: expected 'token<TAB>boost'"
                    )
                intensifiers[parts[0].lower()] = float(parts[1])

    return SentimentLexicon(valence, frozenset(negators), intensifiers)


# Compact built-in lexicon tuned to Q&A forum language; the full reference
# lexicon can be dropped in through load_lexicon.
_DEFAULT_VALENCE = {
    "thanks": 1.9, "thank": 1.5, "thankful": 1.9, "grateful": 2.0,
    "great": 3.1, "good": 1.9, "excellent": 2.7, "best": 3.2,
    "helpful": 1.8, "helped": 1.3, "helps": 1.3, "useful": 1.9,
    "clear": 1.1, "kind": 2.4, "appreciate": 2.0, "appreciated": 2.0,
    "glad": 2.0, "happy": 2.7, "perfect": 2.7, "wonderful": 2.7,
    "right": 1.0, "correct": 1.4, "recommend": 1.6, "win": 2.4,
    "won": 2.4, "success": 2.4, "relief": 1.6, "protect": 1.2,
    "free": 1.0, "easy": 1.5, "professional": 1.3, "luck": 1.8,
    "bad": -2.5, "wrong": -2.1, "terrible": -2.1, "awful": -2.0,
    "useless": -1.8, "confusing": -1.3, "confused": -1.1,
    "unfortunately": -1.0, "problem": -1.4, "problems": -1.4,
    "worst": -3.1, "scam": -2.2, "rude": -2.0, "fraud": -2.6,
    "fail": -2.3, "failed": -2.3, "lose": -2.0, "lost": -1.6,
    "risk": -1.1, "penalty": -1.6, "debt": -1.0, "worry": -1.3,
    "worried": -1.3, "afraid": -1.9, "unhappy": -1.8, "mistake": -1.6,
    "denied": -1.5, "dismissed": -1.1, "stress": -1.5, "difficult": -1.2,
}
_DEFAULT_NEGATORS = frozenset({
    "not", "no", "never", "none", "cannot", "cant", "dont", "wont",
    "isnt", "wasnt", "werent", "didnt", "doesnt", "neither", "nor",
    "without", "hardly", "rarely",
})
_DEFAULT_INTENSIFIERS = {
    "very": 0.293, "really": 0.293, "extremely": 0.293, "so": 0.293,
    "absolutely": 0.293, "incredibly": 0.293, "totally": 0.293,
    "highly": 0.293, "slightly": -0.293, "somewhat": -0.293,
    "barely": -0.293, "marginally": -0.293,
}


def default_lexicon() -> SentimentLexicon:
    return SentimentLexicon(
        valence=dict(_DEFAULT_VALENCE),
        negators=_DEFAULT_NEGATORS,
        intensifiers=dict(_DEFAULT_INTENSIFIERS),
    )
