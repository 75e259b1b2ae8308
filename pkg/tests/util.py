"""Small corpus builders shared across the test suite."""
from __future__ import annotations

from counselrank.corpus import Answer, Comment, Corpus, LawyerRef, Question


def q(qid, tags, category="bankruptcy", text="a question about the topic",
      city="la", state="CA", ts=100):
    return Question(id=qid, text=text, category=category,
                    tags=frozenset(tags), city=city, state=state, timestamp=ts)


def a(aid, qid, lawyer, text="an answer with content", best=False, ts=200):
    return Answer(id=aid, question_id=qid, lawyer_id=lawyer, text=text,
                  is_best=best, timestamp=ts)


def c(cid, aid, text="a comment", ts=300):
    return Comment(id=cid, answer_id=aid, text=text, timestamp=ts)


def lw(lid, city="la", state="CA"):
    return LawyerRef(lawyer_id=lid, city=city, state=state)


def make_corpus(questions=(), answers=(), comments=(), lawyers=None) -> Corpus:
    """Assemble a corpus; lawyer refs are derived from answers when not
    given explicitly."""
    if lawyers is None:
        lawyers = [lw(lid) for lid in sorted({ans.lawyer_id for ans in answers})]
    return Corpus.from_records(questions, answers, comments, lawyers)
