import re
from collections import Counter

import pytest

from counselrank.analyze import TextAnalyzer
from counselrank.index import IndexStatsError, build_index, load_index, save_index
from counselrank.synth import SynthConfig, generate
from util import a, make_corpus, q


def test_analyzer_strips_punctuation_and_lowercases():
    analyzer = TextAnalyzer()
    assert analyzer.tokens("Bankruptcy, exemption bankruptcy!") == [
        "bankruptcy", "exemption", "bankruptcy",
    ]
    assert analyzer.tokens("Don't file. Chapter-7!") == ["dont", "file", "chapter7"]
    assert analyzer.tokens("") == []
    assert analyzer.tokens("  \n\t ") == []


def test_analyzer_options():
    keep_case = TextAnalyzer(lowercase=False)
    assert keep_case.tokens("Tax Law") == ["Tax", "Law"]
    keep_punct = TextAnalyzer(strip_punctuation=False)
    assert keep_punct.tokens("don't file.") == ["don't", "file."]


def test_single_answer_index():
    corpus = make_corpus(
        questions=[q("q1", {"t"})],
        answers=[a("a1", "q1", "l1", text="Bankruptcy, exemption bankruptcy!")],
    )
    index = build_index(corpus)
    assert index.doc_len["a1"] == 3
    assert index.collection_len == 3
    assert index.tf("bankruptcy", "a1") == 2
    assert index.term_prob_doc("bankruptcy", "a1") == pytest.approx(2 / 3)
    assert index.term_prob_doc("missing", "a1") == 0.0
    assert index.collection_prob("exemption") == pytest.approx(1 / 3)
    assert index.collection_prob("unseen") == 0.0
    assert index.doc_author["a1"] == "l1"
    assert index.author_docs["l1"] == ("a1",)


def test_empty_corpus_index():
    index = build_index(make_corpus())
    assert index.collection_len == 0
    assert index.n_docs == 0
    with pytest.raises(IndexStatsError):
        index.collection_prob("anything")


def test_zero_token_answer_indexed_with_len_zero():
    corpus = make_corpus(
        questions=[q("q1", {"t"})],
        answers=[a("a1", "q1", "l1", text="?!...")],
    )
    index = build_index(corpus)
    assert index.doc_len["a1"] == 0
    assert index.term_prob_doc("anything", "a1") == 0.0


def _oracle_tokens(text):
    """Independent tokenizer pass: regex strip, then split."""
    return re.sub(r"[^\w\s]", "", text.lower()).split()


def test_index_matches_brute_force_recount():
    config = SynthConfig(n_lawyers=8, n_questions=10, n_tags=2,
                         experts_per_tag=1, answers_per_question=5, seed=3)
    corpus, _ = generate(config)
    assert corpus.n_answers == 50
    index = build_index(corpus)

    total = 0
    for aid, ans in corpus.answers.items():
        tokens = _oracle_tokens(ans.text)
        assert index.doc_len[aid] == len(tokens)
        total += len(tokens)
        for term, n in Counter(tokens).items():
            assert index.tf(term, aid) == n
    assert index.collection_len == total

    global_counts = Counter()
    for ans in corpus.answers.values():
        global_counts.update(_oracle_tokens(ans.text))
    assert dict(index.collection_tf) == dict(global_counts)
    for term, n in global_counts.items():
        assert index.collection_prob(term) == pytest.approx(n / total)


def test_doc_and_collection_probabilities_sum_to_one():
    config = SynthConfig(n_lawyers=8, n_questions=10, n_tags=2,
                         experts_per_tag=1, answers_per_question=5, seed=5)
    corpus, _ = generate(config)
    index = build_index(corpus)
    for aid in corpus.answers:
        if index.doc_len[aid] == 0:
            continue
        terms = {t for t, _ in Counter(_oracle_tokens(corpus.answers[aid].text)).items()}
        assert sum(index.term_prob_doc(t, aid) for t in terms) == pytest.approx(1.0, abs=1e-9)
    assert sum(index.collection_prob(t) for t in index.collection_tf) == pytest.approx(
        1.0, abs=1e-9)


def test_author_docs_inverts_doc_author():
    config = SynthConfig(n_lawyers=8, n_questions=10, n_tags=2,
                         experts_per_tag=1, answers_per_question=5, seed=7)
    corpus, _ = generate(config)
    index = build_index(corpus)
    for author, docs in index.author_docs.items():
        for d in docs:
            assert index.doc_author[d] == author
    assert sum(len(d) for d in index.author_docs.values()) == len(index.doc_author)


def test_index_serialization_round_trip_and_determinism(tmp_path):
    config = SynthConfig(n_lawyers=8, n_questions=10, n_tags=2,
                         experts_per_tag=1, answers_per_question=5, seed=9)
    corpus, _ = generate(config)
    index = build_index(corpus)
    p1, p2 = tmp_path / "a.idx", tmp_path / "b.idx"
    save_index(index, p1)
    save_index(build_index(corpus), p2)
    assert p1.read_bytes() == p2.read_bytes()
    loaded = load_index(p1)
    assert loaded == index


def test_load_rejects_foreign_files(tmp_path):
    path = tmp_path / "bogus.idx"
    path.write_bytes(b"not an index")
    with pytest.raises(IndexStatsError, match="bad magic"):
        load_index(path)
