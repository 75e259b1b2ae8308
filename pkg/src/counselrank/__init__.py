"""counselrank: expert-lawyer ranking over legal community Q&A corpora.

The pipeline in one breath: ingest a Q&A corpus, label expert lawyers from
best-answer statistics, turn high-traffic category tags into queries, rank
candidates with probabilistic language models and BM25, re-rank the top
block with a pluggable (query, text) pair scorer over answers and four
query-dependent profiles, fuse the five scores with tuned integer weights,
and evaluate with MAP/MRR/P@k.
"""

from .analyze import DEFAULT_ANALYZER, TextAnalyzer
from .corpus import (Answer, Comment, Corpus, CorpusError, LawyerRef,
                     Question, ingest_corpus, write_corpus)
from .evaluation import (EvalReport, TTestResult, evaluate_run, paired_ttest,
                         seen_unseen_report)
from .fusion import TuneConfig, WeightVector, aggregate, tune_weights
from .index import IndexedCollection, build_index, load_index, save_index
from .labeling import (DatasetSplit, ExpertLabelSet, QueryTopic, label_experts,
                       select_queries, split_by_experts)
from .profiles import ProfileSet, build_profiles
from .rankers import (AnswerRanking, RankedList, SmoothingParams,
                      default_smoothing, filter_by_city, score_bm25_variants,
                      score_model1, score_model2)
from .rerank import (PairScorer, ScoreVector, build_score_vectors, remote_scorer,
                     rerank_vbd, score_profiles, stub_scorer, vbd_scores)
from .sentiment import (SentenceSentiment, SentimentLexicon, default_lexicon,
                        score_sentence, split_sentences)
from .synth import SynthConfig, generate

__version__ = "0.1.0"
