"""Text analysis shared by the index, the rankers, and the profile builder.

One analyzer everywhere: lowercase, strip punctuation, split on whitespace.
No stemming and no stopword removal by default; both knobs exist so the
behaviour can be tightened per deployment without touching callers.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TextAnalyzer:
    """Unicode-aware tokenizer: drops non-alphanumeric characters, splits on
    whitespace. ``"Bankruptcy, exemption bankruptcy!"`` becomes
    ``["bankruptcy", "exemption", "bankruptcy"]``. Punctuation inside a word
    is removed, not replaced ("don't" -> "dont").
    """

    lowercase: bool = True
    strip_punctuation: bool = True

    def tokens(self, text: str) -> list[str]:
        if self.lowercase:
            text = text.lower()
        if self.strip_punctuation:
            text = "".join(ch for ch in text if ch.isalnum() or ch.isspace())
        return text.split()


DEFAULT_ANALYZER = TextAnalyzer()
