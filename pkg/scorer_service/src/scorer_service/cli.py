"""Service entry points: serve the HTTP API, or fine-tune a model head
from a labeled-pairs file."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .data import pairs_from_profile_export, read_pairs
from .model import TrainConfig, TrainingError, finetune, pairwise_accuracy
from .store import ModelStore


def cmd_serve(args) -> int:
    import uvicorn

    from .app import create_app

    store = ModelStore(args.models, shared_weights=args.shared_weights)
    app = create_app(store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_finetune(args) -> int:
    if args.pairs:
        pairs = read_pairs(args.pairs)
    else:
        pairs = pairs_from_profile_export(args.profiles, args.qrels, args.model,
                                          seed=args.seed)
    config = TrainConfig(learning_rate=args.learning_rate, epochs=args.epochs,
                         seed=args.seed)
    try:
        head = finetune(pairs, config)
    except TrainingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    accuracy = pairwise_accuracy(head, pairs)
    store = ModelStore(args.models, shared_weights=args.shared_weights)
    version = store.save_version(args.model, head)
    print(f"model={args.model} version={version} pairs={len(pairs)} "
          f"train_pairwise_accuracy={accuracy:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scorer-service")
    parser.add_argument("--models", default="models", help="model storage root")
    parser.add_argument("--shared-weights", action="store_true",
                        help="serve one shared head for every model name")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8500)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("finetune", help="train one model head")
    p.add_argument("model", choices=["vbd", "cp", "pp", "np", "rp"])
    p.add_argument("--pairs", help="labeled pairs JSONL")
    p.add_argument("--profiles", help="profile export from the ranking pipeline")
    p.add_argument("--qrels", help="TREC qrels naming relevant lawyers")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--learning-rate", type=float, default=0.05)
    p.set_defaults(func=cmd_finetune)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "finetune" and not args.pairs and not (args.profiles and args.qrels):
        parser.error("finetune needs --pairs or both --profiles and --qrels")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
