"""Synthetic Q&A corpus generator with planted experts.

Generated corpora exercise the whole pipeline at desk scale: each tag owns
a disjoint topic vocabulary, planted experts answer their tag's questions
mostly on-topic and win best answers at expert_skill rate, while everyone
else drifts off-topic and wins at noise_skill rate. Best answers attract
appreciative comments, other answers occasionally attract complaints, so
comment and sentiment profiles have material to work with. Generation is a
pure function of the config (one sequential RNG), so a fixed seed yields a
byte-identical corpus file.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Answer, Comment, Corpus, LawyerRef, Question
from .labeling import QueryTopic

_BACKGROUND = (
    "law court filing case advice petition counsel hearing statute claim "
    "motion clerk record notice deadline form fee document review consult"
).split()

_POSITIVE_SENTENCES = (
    "Glad to help and good luck.",
    "Happy to help with this.",
    "You are in a good position here.",
    "This is the best route and it works.",
)
_NEGATIVE_SENTENCES = (
    "This is a bad situation with real risk.",
    "Unfortunately the penalty is a problem.",
    "A mistake here can lose the case.",
    "The worst outcome is a denied filing.",
)
_POSITIVE_COMMENTS = (
    "Thanks so much, this is great. I will follow up.",
    "Very helpful answer, thank you. Much appreciated.",
    "Excellent and clear. Exactly what I needed.",
    "Thank you, this helped a lot. Good advice.",
)
_NEGATIVE_COMMENTS = (
    "This is wrong and not helpful. Please reconsider.",
    "Bad advice, it failed for me. Very disappointing.",
    "Useless answer unfortunately. It confused me more.",
)
_NEUTRAL_COMMENTS = (
    "Can you say more about the deadline?",
    "What form number applies here?",
)


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    n_lawyers: int = 30
    n_questions: int = 200
    n_tags: int = 5
    topic_vocab: Mapping[str, Sequence[str]] | None = None
    expert_skill: float = 0.9
    noise_skill: float = 0.1
    comment_rate: float = 0.5
    seed: int = 0
    experts_per_tag: int = 2
    answers_per_question: int = 5
    category: str = "synthlaw"
    n_cities: int = 1

    def __post_init__(self):
        if not 0.0 <= self.noise_skill < self.expert_skill <= 1.0:
            raise SynthError(
                f"need 0 <= noise_skill < expert_skill <= 1, got "
                f"{self.noise_skill} / {self.expert_skill}"
            )
        if not 0.0 <= self.comment_rate <= 1.0:
            raise SynthError(f"comment_rate outside [0, 1]: {self.comment_rate}")


def _vocab_for(config: SynthConfig) -> dict[str, list[str]]:
    if config.topic_vocab is not None:
        vocab = {t: list(v) for t, v in config.topic_vocab.items()}
    else:
        vocab = {
            f"topic{i:02d}": [f"topic{i:02d}"] + [f"topic{i:02d}w{j}" for j in range(5)]
            for i in range(config.n_tags)
        }
    seen: dict[str, str] = {}
    for tag, words in vocab.items():
        for w in words:
            if w in seen and seen[w] != tag:
                raise SynthError(f"vocabulary collision: {w!r} in {seen[w]!r} and {tag!r}")
            seen[w] = tag
    return vocab


def generate(config: SynthConfig) -> tuple[Corpus, dict[str, frozenset[str]]]:
    """Generate a corpus plus the planted tag -> experts map."""
    if config.n_questions == 0:
        return Corpus.from_records([], [], [], []), {}

    rng = random.Random(config.seed)
    vocab = _vocab_for(config)
    tags = sorted(vocab)

    n_experts = len(tags) * config.experts_per_tag
    if config.n_lawyers <= n_experts:
        raise SynthError(
            f"n_lawyers={config.n_lawyers} leaves no noise lawyers beside "
            f"{n_experts} planted experts"
        )
    lawyer_ids = [f"L{i:03d}" for i in range(config.n_lawyers)]
    cities = [f"city{i}" for i in range(max(1, config.n_cities))]
    lawyers = [
        LawyerRef(lawyer_id=lid, city=cities[i % len(cities)], state="CA")
        for i, lid in enumerate(lawyer_ids)
    ]
    planted: dict[str, frozenset[str]] = {}
    expert_of: dict[str, str] = {}
    for i, tag in enumerate(tags):
        members = lawyer_ids[i * config.experts_per_tag:(i + 1) * config.experts_per_tag]
        planted[tag] = frozenset(members)
        for lid in members:
            expert_of[lid] = tag
    noise_pool = lawyer_ids[n_experts:]
    if config.answers_per_question < 1 or config.answers_per_question - 1 > len(noise_pool):
        raise SynthError(
            f"answers_per_question={config.answers_per_question} needs at least "
            f"{config.answers_per_question - 1} noise lawyers, have {len(noise_pool)}"
        )

    def topic_text(tag: str, n_topic: int, n_background: int) -> str:
        words = [rng.choice(vocab[tag]) for _ in range(n_topic)]
        words += [rng.choice(_BACKGROUND) for _ in range(n_background)]
        rng.shuffle(words)
        return " ".join(words)

    def background_text(n: int) -> str:
        return " ".join(rng.choice(_BACKGROUND) for _ in range(n))

    questions: list[Question] = []
    answers: list[Answer] = []
    comments: list[Comment] = []
    base_ts = 1_600_000_000
    answer_no = 0
    comment_no = 0
    expert_turn = {tag: 0 for tag in tags}

    for qi in range(config.n_questions):
        tag = tags[qi % len(tags)]
        q_tags = {tag}
        if len(tags) > 1 and rng.random() < 0.3:
            q_tags.add(rng.choice([t for t in tags if t != tag]))
        q_ts = base_ts + qi * 3600
        questions.append(Question(
            id=f"Q{qi:05d}",
            text=topic_text(tag, 4, 6) + "?",
            category=config.category,
            tags=frozenset(q_tags),
            city=cities[qi % len(cities)],
            state="CA",
            timestamp=q_ts,
        ))

        experts = sorted(planted[tag])
        responder_ids = [experts[expert_turn[tag] % len(experts)]]
        expert_turn[tag] += 1
        while len(responder_ids) < config.answers_per_question:
            lid = rng.choice(noise_pool)
            if lid not in responder_ids:
                responder_ids.append(lid)

        for aj, lid in enumerate(responder_ids):
            is_expert = expert_of.get(lid) == tag
            skill = config.expert_skill if is_expert else config.noise_skill
            on_topic = rng.random() < skill
            body = topic_text(tag, 5, 5) if on_topic else background_text(10)
            sentences = [body.capitalize() + "."]
            if rng.random() < 0.5:
                sentences.append(rng.choice(_POSITIVE_SENTENCES))
            if rng.random() < 0.25:
                sentences.append(rng.choice(_NEGATIVE_SENTENCES))
            is_best = rng.random() < skill
            aid = f"A{answer_no:06d}"
            answer_no += 1
            answers.append(Answer(
                id=aid,
                question_id=f"Q{qi:05d}",
                lawyer_id=lid,
                text=" ".join(sentences),
                is_best=is_best,
                timestamp=q_ts + 60 * (aj + 1),
            ))
            if rng.random() < config.comment_rate:
                if is_best:
                    text = rng.choice(_POSITIVE_COMMENTS)
                elif rng.random() < 0.5:
                    text = rng.choice(_NEGATIVE_COMMENTS)
                else:
                    text = rng.choice(_NEUTRAL_COMMENTS)
                comments.append(Comment(
                    id=f"C{comment_no:06d}",
                    answer_id=aid,
                    text=text,
                    timestamp=q_ts + 60 * (aj + 1) + 30,
                ))
                comment_no += 1

    corpus = Corpus.from_records(questions, answers, comments, lawyers)
    return corpus, planted


def planted_queries(planted: Mapping[str, frozenset[str]]) -> list[QueryTopic]:
    """Query topics straight from the planted map (tag text is the tag)."""
    return [
        QueryTopic(query_id=tag, tag_text=tag, relevant_experts=experts)
        for tag, experts in sorted(planted.items())
    ]
