"""Command-line pipeline orchestration.

Every subcommand reads its settings from (in increasing precedence) built-in
defaults, a JSON config file (--config), COUNSELRANK_* environment
variables, and command-line flags. Each run writes a manifest next to its
primary output recording the config hash, seed, and input digests, so two
runs can be compared byte-for-byte.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import evaluation, fusion, labeling, profiles, rankers, rerank, synth
from .analyze import TextAnalyzer
from .corpus import CorpusError, ingest_corpus, write_corpus
from .index import build_index, load_index, save_index
from .labeling import QueryTopic
from .rerank import ScoreVector
from .sentiment import default_lexicon, load_lexicon

ENV_PREFIX = "COUNSELRANK_"


@dataclass
class PipelineConfig:
    category: str = "bankruptcy"
    seed: int = 0
    beta: float | None = None  # None -> mean answer length
    k1: float = 1.2
    b: float = 0.75
    k: int = 50
    scorer: str = "stub"
    endpoint: str | None = None
    doc_assoc: str = "uniform"
    vbd_agg: str = "sum"
    grid_strategy: str = "ascent"
    grid_lo: int = 1
    grid_hi: int = 100
    analyzer_lowercase: bool = True
    analyzer_strip_punctuation: bool = True
    lexicon: str | None = None
    ratios: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)

    def analyzer(self) -> TextAnalyzer:
        return TextAnalyzer(self.analyzer_lowercase, self.analyzer_strip_punctuation)

    def validate(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.beta is not None and self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.scorer not in ("stub", "remote"):
            raise ValueError(f"unknown scorer {self.scorer!r}")
        if self.scorer == "remote" and not self.endpoint:
            raise ValueError("remote scorer needs --endpoint")


_BOOL_FIELDS = {"analyzer_lowercase", "analyzer_strip_punctuation"}


def _coerce(name: str, value, current):
    if name == "ratios":
        parts = [float(p) for p in str(value).split(",")]
        if len(parts) != 3:
            raise ValueError("ratios must be three comma-separated numbers")
        return tuple(parts)
    if name in _BOOL_FIELDS:
        if isinstance(value, bool):
            return value
        return str(value).lower() in ("1", "true", "yes")
    if current is None or isinstance(current, str):
        return None if value is None else str(value)
    if isinstance(current, bool):
        return bool(value)
    if isinstance(current, int):
        return int(value)
    if isinstance(current, float):
        return float(value)
    return value


def load_config(config_path: str | None, overrides: dict) -> PipelineConfig:
    cfg = PipelineConfig()
    if config_path:
        data = json.loads(Path(config_path).read_text(encoding="utf-8"))
        for key, value in data.items():
            if key not in {f.name for f in fields(PipelineConfig)}:
                raise ValueError(f"unknown config key {key!r}")
            setattr(cfg, key, _coerce(key, value, getattr(cfg, key)))
    for f in fields(PipelineConfig):
        env = os.environ.get(ENV_PREFIX + f.name.upper())
        if env is not None:
            setattr(cfg, f.name, _coerce(f.name, env, getattr(cfg, f.name)))
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, _coerce(key, value, getattr(cfg, key)))
    cfg.validate()
    return cfg


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(command: str, cfg: PipelineConfig, inputs: list[str],
                   outputs: list[str], manifest_path: Path) -> None:
    cfg_json = json.dumps(asdict(cfg), sort_keys=True)
    manifest = {
        "command": command,
        "config": json.loads(cfg_json),
        "config_hash": hashlib.sha256(cfg_json.encode()).hexdigest(),
        "seed": cfg.seed,
        "inputs": {p: _sha256(Path(p)) for p in sorted(inputs)},
        "outputs": {p: _sha256(Path(p)) for p in sorted(outputs)},
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")


def _manifest_path(primary_output: str) -> Path:
    return Path(str(primary_output) + ".manifest.json")


def _load_lexicon(cfg: PipelineConfig):
    if cfg.lexicon:
        return load_lexicon(cfg.lexicon)
    return default_lexicon()


def _make_scorer(cfg: PipelineConfig, index, model: str = "vbd"):
    if cfg.scorer == "remote":
        return rerank.remote_scorer(cfg.endpoint, model=model)
    return rerank.stub_scorer(index)


def _read_queries(path: str) -> list[QueryTopic]:
    out = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            out.append(QueryTopic(
                query_id=obj["query_id"],
                tag_text=obj["tag_text"],
                relevant_experts=frozenset(obj["relevant_experts"]),
            ))
    return out


def _write_queries(queries: list[QueryTopic], path: str) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for q in queries:
            fh.write(json.dumps({
                "query_id": q.query_id,
                "tag_text": q.tag_text,
                "relevant_experts": sorted(q.relevant_experts),
            }, sort_keys=True) + "\n")


# -- subcommand bodies --

def cmd_ingest(args, cfg):
    corpus = ingest_corpus(args.corpus)
    print(f"questions={corpus.n_questions} answers={corpus.n_answers} "
          f"comments={corpus.n_comments} lawyers={corpus.n_lawyers} "
          f"posts={corpus.total_posts}")
    outputs = []
    if args.out:
        write_corpus(corpus, args.out)
        outputs.append(args.out)
        write_manifest("ingest", cfg, list(args.corpus), outputs, _manifest_path(args.out))
    return 0


def cmd_label(args, cfg):
    corpus = ingest_corpus(args.corpus)
    labels = labeling.label_experts(corpus, cfg.category)
    experts = labels.all_experts()
    answers = sum(labels.per_lawyer_stats[l].by_category[cfg.category][0] for l in experts)
    best = sum(labels.per_lawyer_stats[l].by_category[cfg.category][1] for l in experts)
    print(f"category={cfg.category} experts={len(experts)} "
          f"expert_answers={answers} expert_best_answers={best} "
          f"collection_avg_acceptance_ratio={labels.collection_avg_acceptance_ratio:.6f}")
    if args.out:
        payload = {
            "category": labels.category,
            "collection_avg_acceptance_ratio": labels.collection_avg_acceptance_ratio,
            "avg_best_answers_per_tag": dict(sorted(labels.avg_best_answers_per_tag.items())),
            "experts": {
                tag: sorted(labels.experts_on(tag))
                for tag in sorted({t for (_, t) in labels.labels})
                if labels.experts_on(tag)
            },
        }
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                                  encoding="utf-8")
        write_manifest("label", cfg, list(args.corpus), [args.out], _manifest_path(args.out))
    return 0


def cmd_select_queries(args, cfg):
    corpus = ingest_corpus(args.corpus)
    labels = labeling.label_experts(corpus, cfg.category)
    queries = labeling.select_queries(corpus, labels, cfg.category)
    mean_experts = (sum(len(q.relevant_experts) for q in queries) / len(queries)
                    if queries else 0.0)
    print(f"queries={len(queries)} mean_experts_per_query={mean_experts:.2f}")
    _write_queries(queries, args.out)
    outputs = [args.out]
    if args.qrels:
        labeling.write_qrels(queries, args.qrels)
        outputs.append(args.qrels)
    write_manifest("select-queries", cfg, list(args.corpus), outputs, _manifest_path(args.out))
    return 0


def cmd_split(args, cfg):
    corpus = ingest_corpus(args.corpus)
    labels = labeling.label_experts(corpus, cfg.category)
    queries = _read_queries(args.queries)
    if args.assignment:
        splits = labeling.splits_from_assignment(
            queries, labeling.read_split_assignment(args.assignment))
    else:
        splits = labeling.split_by_experts(queries, labels, cfg.seed, cfg.ratios)
    labeling.write_splits(splits, args.out)
    for s in splits:
        print(f"{s.name}: experts={len(s.expert_ids)} queries={len(s.queries)}")
    inputs = list(args.corpus) + [args.queries] + ([args.assignment] if args.assignment else [])
    write_manifest("split", cfg, inputs, [args.out], _manifest_path(args.out))
    return 0


def cmd_index(args, cfg):
    corpus = ingest_corpus(args.corpus)
    index = build_index(corpus, cfg.analyzer())
    save_index(index, args.out)
    print(f"docs={index.n_docs} terms={index.n_terms} collection_len={index.collection_len}")
    write_manifest("index", cfg, list(args.corpus), [args.out], _manifest_path(args.out))
    return 0


def cmd_stats(args, cfg):
    index = load_index(args.index)
    print(f"docs={index.n_docs}")
    print(f"terms={index.n_terms}")
    print(f"collection_len={index.collection_len}")
    print(f"mean_doc_len={index.mean_doc_len:.4f}")
    print(f"authors={len(index.author_docs)}")
    if args.top:
        top = sorted(index.collection_tf.items(), key=lambda kv: (-kv[1], kv[0]))[:args.top]
        for term, n in top:
            print(f"{term}\t{n}")
    return 0


def _rank_one(model: str, q: QueryTopic, index, cfg: PipelineConfig):
    sp = rankers.SmoothingParams(cfg.beta) if cfg.beta else rankers.default_smoothing(index)
    if model == "model1":
        return rankers.score_model1(q, index, sp, cfg.doc_assoc)
    if model == "model2":
        return rankers.score_model2(q, index, sp, cfg.doc_assoc)[0]
    if model == "bm25-cand":
        return rankers.score_bm25_candidate(q, index, cfg.k1, cfg.b)
    if model == "bm25-doc":
        return rankers.score_bm25_document(q, index, cfg.k1, cfg.b)[0]
    raise ValueError(f"unknown model {model!r}")


def cmd_rank(args, cfg):
    index = load_index(args.index)
    queries = _read_queries(args.queries)
    lists = [_rank_one(args.model, q, index, cfg) for q in queries]
    rankers.write_run(lists, args.out)
    print(f"model={args.model} queries={len(lists)} -> {args.out}")
    write_manifest(f"rank-{args.model}", cfg, [args.index, args.queries], [args.out],
                   _manifest_path(args.out))
    return 0


def cmd_filter_city(args, cfg):
    index = load_index(args.index)
    lists = rankers.read_run(args.run)
    filtered = [rankers.filter_by_city(rl, args.city, index) for rl in lists]
    for rl in filtered:
        for w in rl.warnings:
            print(f"warning: {rl.query_id}: {w}", file=sys.stderr)
    rankers.write_run(filtered, args.out)
    write_manifest("filter-city", cfg, [args.index, args.run], [args.out],
                   _manifest_path(args.out))
    return 0


def cmd_profiles(args, cfg):
    corpus = ingest_corpus(args.corpus)
    index = load_index(args.index)
    queries = _read_queries(args.queries)
    lexicon = _load_lexicon(cfg)
    first = True
    for q in queries:
        _, d_q = rankers.score_bm25_document(q, index, cfg.k1, cfg.b)
        built = profiles.build_profiles(q, d_q, corpus, lexicon, cfg.seed, cfg.analyzer())
        profiles.export_profiles(built, args.out, append=not first)
        first = False
    print(f"profiles for {len(queries)} queries -> {args.out}")
    write_manifest("profiles", cfg, list(args.corpus) + [args.index, args.queries],
                   [args.out], _manifest_path(args.out))
    return 0


def cmd_rerank(args, cfg):
    corpus = ingest_corpus(args.corpus)
    index = load_index(args.index)
    queries = _read_queries(args.queries)
    scorer = _make_scorer(cfg, index)
    lists = []
    for q in queries:
        initial, d_q = rankers.score_bm25_document(q, index, cfg.k1, cfg.b)
        lists.append(rerank.rerank_vbd(q, initial, d_q, corpus, scorer, cfg.k, cfg.vbd_agg))
    rankers.write_run(lists, args.out)
    print(f"reranked {len(lists)} queries with {scorer.scorer_id} -> {args.out}")
    write_manifest("rerank", cfg, list(args.corpus) + [args.index, args.queries],
                   [args.out], _manifest_path(args.out))
    return 0


def _score_vectors_for(queries, corpus, index, cfg, profiles_out=None
                       ) -> dict[tuple[str, str], ScoreVector]:
    lexicon = _load_lexicon(cfg)
    answer_scorer = _make_scorer(cfg, index, model="vbd")
    if cfg.scorer == "remote":
        profile_scorers = {k: _make_scorer(cfg, index, model=k) for k in profiles.PROFILE_KINDS}
    else:
        profile_scorers = None
    vectors: dict[tuple[str, str], ScoreVector] = {}
    for i, q in enumerate(queries):
        initial, d_q = rankers.score_bm25_document(q, index, cfg.k1, cfg.b)
        built = profiles.build_profiles(q, d_q, corpus, lexicon, cfg.seed, cfg.analyzer())
        if profiles_out:
            profiles.export_profiles(built, profiles_out, append=i > 0)
        vecs = rerank.build_score_vectors(q, initial, d_q, corpus, built, answer_scorer,
                                          profile_scorers, k=cfg.k, agg=cfg.vbd_agg)
        for lid, v in vecs.items():
            vectors[(q.query_id, lid)] = v
    return vectors


def _write_vectors(vectors, path):
    with Path(path).open("w", encoding="utf-8") as fh:
        for (qid, lid) in sorted(vectors):
            v = vectors[(qid, lid)]
            fh.write(json.dumps({
                "query_id": qid, "lawyer_id": lid,
                "s_bd": v.s_bd, "s_cp": v.s_cp, "s_pp": v.s_pp,
                "s_np": v.s_np, "s_rp": v.s_rp,
            }, sort_keys=True) + "\n")


def read_vectors(path) -> dict[tuple[str, str], ScoreVector]:
    out = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            out[(obj["query_id"], obj["lawyer_id"])] = ScoreVector(
                query_id=obj["query_id"], lawyer_id=obj["lawyer_id"],
                s_bd=obj["s_bd"], s_cp=obj["s_cp"], s_pp=obj["s_pp"],
                s_np=obj["s_np"], s_rp=obj["s_rp"],
            )
    return out


def cmd_tune(args, cfg):
    vectors = read_vectors(args.vectors)
    queries = _read_queries(args.queries)
    if args.splits:
        assignment = labeling.read_split_assignment(args.splits)
        valid_experts = frozenset(l for l, s in assignment.items() if s == "validation")
        queries = [
            QueryTopic(q.query_id, q.tag_text, q.relevant_experts & valid_experts)
            for q in queries if q.relevant_experts & valid_experts
        ]
    config = fusion.TuneConfig(strategy=cfg.grid_strategy, lo=cfg.grid_lo, hi=cfg.grid_hi)
    w, metric = fusion.tune_weights(queries, vectors, config)
    fusion.save_weights(w, metric, args.out)
    print(f"weights={w.as_tuple()} map={metric:.4f}")
    inputs = [args.vectors, args.queries] + ([args.splits] if args.splits else [])
    write_manifest("tune", cfg, inputs, [args.out], _manifest_path(args.out))
    return 0


def cmd_evaluate(args, cfg):
    lists = rankers.read_run(args.run)
    qrels = labeling.read_qrels(args.qrels)
    report = evaluation.evaluate_run(lists, qrels)
    print(evaluation.format_report(report))
    outputs = []
    if args.out:
        evaluation.write_report(report, args.out)
        outputs.append(args.out)
        write_manifest("evaluate", cfg, [args.run, args.qrels], outputs,
                       _manifest_path(args.out))
    return 0


def cmd_ttest(args, cfg):
    qrels = labeling.read_qrels(args.qrels)
    rep_a = evaluation.evaluate_run(rankers.read_run(args.run_a), qrels)
    rep_b = evaluation.evaluate_run(rankers.read_run(args.run_b), qrels)
    shared = sorted(set(rep_a.per_query) & set(rep_b.per_query))
    metric = args.metric
    a = [getattr(rep_a.per_query[q], metric) for q in shared]
    b = [getattr(rep_b.per_query[q], metric) for q in shared]
    result = evaluation.paired_ttest(a, b, args.alpha)
    print(f"metric={metric} n={len(shared)} t={result.t:.6f} p={result.p:.6f} "
          f"significant={result.significant}")
    return 0


def cmd_synth_gen(args, cfg):
    config = synth.SynthConfig(
        n_lawyers=args.lawyers, n_questions=args.questions, n_tags=args.tags,
        expert_skill=args.expert_skill, noise_skill=args.noise_skill,
        comment_rate=args.comment_rate, seed=cfg.seed,
        answers_per_question=args.answers_per_question,
    )
    corpus, planted = synth.generate(config)
    write_corpus(corpus, args.out)
    outputs = [args.out]
    if args.qrels:
        labeling.write_qrels(synth.planted_queries(planted), args.qrels)
        outputs.append(args.qrels)
    print(f"questions={corpus.n_questions} answers={corpus.n_answers} "
          f"lawyers={corpus.n_lawyers} tags={len(planted)}")
    write_manifest("synth-gen", cfg, [], outputs, _manifest_path(args.out))
    return 0


def cmd_end_to_end(args, cfg):
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus = ingest_corpus(args.corpus)
    labels = labeling.label_experts(corpus, cfg.category)
    queries = labeling.select_queries(corpus, labels, cfg.category)
    if not queries:
        print("no queries selected; nothing to rank", file=sys.stderr)
        return 1
    train, valid, test = labeling.split_by_experts(queries, labels, cfg.seed, cfg.ratios)
    labeling.write_splits((train, valid, test), out_dir / "splits.tsv")
    labeling.write_qrels(queries, out_dir / "qrels.txt")
    _write_queries(queries, str(out_dir / "queries.jsonl"))
    index = build_index(corpus, cfg.analyzer())
    save_index(index, out_dir / "index.bin")

    sp = rankers.SmoothingParams(cfg.beta) if cfg.beta else rankers.default_smoothing(index)
    runs = {
        "model1-lm": [rankers.score_model1(q, index, sp, cfg.doc_assoc) for q in queries],
        "model2-lm": [rankers.score_model2(q, index, sp, cfg.doc_assoc)[0] for q in queries],
        "model1-bm25": [rankers.score_bm25_candidate(q, index, cfg.k1, cfg.b) for q in queries],
        "model2-bm25": [rankers.score_bm25_document(q, index, cfg.k1, cfg.b)[0] for q in queries],
    }
    scorer = _make_scorer(cfg, index)
    vbd_lists = []
    for q in queries:
        initial, d_q = rankers.score_bm25_document(q, index, cfg.k1, cfg.b)
        vbd_lists.append(rerank.rerank_vbd(q, initial, d_q, corpus, scorer, cfg.k, cfg.vbd_agg))
    runs["vbd"] = vbd_lists
    for tag, lists in runs.items():
        rankers.write_run(lists, out_dir / f"run-{tag}.txt")

    vectors = _score_vectors_for(queries, corpus, index, cfg,
                                 profiles_out=out_dir / "profiles.jsonl")
    _write_vectors(vectors, out_dir / "vectors.jsonl")
    tune_cfg = fusion.TuneConfig(strategy=cfg.grid_strategy, lo=cfg.grid_lo, hi=cfg.grid_hi)
    weights, tuned_map = fusion.tune_weights(valid, vectors, tune_cfg)
    fusion.save_weights(weights, tuned_map, out_dir / "weights.txt")

    lawyers_by_query: dict[str, list[str]] = {}
    for (qid, lid) in vectors:
        lawyers_by_query.setdefault(qid, []).append(lid)
    agg_lists = []
    for q in queries:
        pool = sorted(lawyers_by_query.get(q.query_id, []))
        ranked = fusion.rank_by_aggregate(q.query_id, pool, vectors, weights.as_tuple())
        scores = {
            lid: fusion.aggregate(vectors[(q.query_id, lid)], weights) for lid in pool
        }
        agg_lists.append(rankers.RankedList(
            q.query_id,
            tuple((lid, scores[lid]) for lid in ranked),
            run_tag="aggregated",
        ))
    rankers.write_run(agg_lists, out_dir / "run-aggregated.txt")

    test_queries = {q.query_id for q in test.queries}
    qrels = {q.query_id: q.relevant_experts for q in queries}
    report = evaluation.evaluate_run(
        [rl for rl in agg_lists if rl.query_id in test_queries], qrels,
        run_tag="aggregated/test")
    evaluation.write_report(report, out_dir / "report.jsonl")
    print(evaluation.format_report(report))
    train_qids = {q.query_id for q in train.queries}
    seen, unseen = evaluation.seen_unseen_report(report, train_qids)
    print(f"seen queries: n={seen.n_queries} p5={seen.means.p5:.4f}")
    print(f"unseen queries: n={unseen.n_queries} p5={unseen.means.p5:.4f}")

    outputs = sorted(str(p) for p in out_dir.iterdir() if p.is_file())
    write_manifest("end-to-end", cfg, list(args.corpus), outputs,
                   out_dir / "manifest.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="counselrank",
        description="Expert-lawyer ranking pipeline for legal Q&A corpora.",
    )
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--k", type=int, help="re-rank cutoff")
    parser.add_argument("--beta", type=float, help="smoothing mass")
    parser.add_argument("--scorer", choices=["stub", "remote"])
    parser.add_argument("--endpoint", help="scorer service base URL")
    parser.add_argument("--category")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate corpus files")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--out", help="write normalized corpus here")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("label", help="label experts for a category")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--out", help="write label audit JSON here")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("select-queries", help="derive query topics and qrels")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--out", required=True, help="queries JSONL")
    p.add_argument("--qrels")
    p.set_defaults(func=cmd_select_queries)

    p = sub.add_parser("split", help="expert-level train/validation/test split")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--queries", required=True)
    p.add_argument("--out", required=True, help="splits TSV")
    p.add_argument("--assignment", help="authoritative partition file")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("index", help="build the inverted index")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("stats", help="dump index statistics")
    p.add_argument("index")
    p.add_argument("--top", type=int, default=0, help="print N most frequent terms")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("rank", help="rank lawyers for queries")
    p.add_argument("model", choices=["model1", "model2", "bm25-cand", "bm25-doc"])
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("filter-city", help="restrict a run to the asker's city")
    p.add_argument("--run", required=True)
    p.add_argument("--city", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter_city)

    p = sub.add_parser("profiles", help="build query-dependent lawyer profiles")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_profiles)

    p = sub.add_parser("rerank", help="re-rank top-k lawyers with the pair scorer")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rerank)

    p = sub.add_parser("tune", help="grid-search fusion weights")
    p.add_argument("--vectors", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--splits", help="restrict to the validation split")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("evaluate", help="score a run against qrels")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ttest", help="one-tailed paired t-test between two runs")
    p.add_argument("--run-a", required=True)
    p.add_argument("--run-b", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--metric", default="ap", choices=["ap", "rr", "p1", "p2", "p5"])
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_ttest)

    p = sub.add_parser("synth-gen", help="generate a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--qrels")
    p.add_argument("--lawyers", type=int, default=30)
    p.add_argument("--questions", type=int, default=200)
    p.add_argument("--tags", type=int, default=5)
    p.add_argument("--expert-skill", type=float, default=0.9)
    p.add_argument("--noise-skill", type=float, default=0.1)
    p.add_argument("--comment-rate", type=float, default=0.5)
    p.add_argument("--answers-per-question", type=int, default=5)
    p.set_defaults(func=cmd_synth_gen)

    p = sub.add_parser("end-to-end", help="run the full pipeline")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_end_to_end)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {
        "seed": args.seed,
        "k": args.k,
        "beta": args.beta,
        "scorer": args.scorer,
        "endpoint": args.endpoint,
        "category": args.category,
    }
    try:
        cfg = load_config(args.config, overrides)
        return args.func(args, cfg)
    except (CorpusError, labeling.LabelingError, evaluation.EvaluationError,
            fusion.TuningError, rerank.ScorerError, synth.SynthError,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
