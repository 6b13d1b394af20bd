"""Command-line wrapper: ``qa-harness train`` and ``qa-harness predict``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import HarnessConfig
from .predict import predict, write_predictions
from .train import train


def _config_from_args(args: argparse.Namespace) -> HarnessConfig:
    cfg = HarnessConfig(
        model_name=args.model,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        warmup_steps=args.warmup_steps,
        batch_size=args.batch_size,
        max_seq_length=args.max_seq_length,
        doc_stride=args.doc_stride,
        max_answer_length=args.max_answer_length,
        max_train_questions=args.limit,
        seed=args.seed,
        device=args.device,
    )
    if args.large_preset:
        cfg = cfg.for_large_model()
    return cfg


def _add_model_flags(sub: argparse.ArgumentParser) -> None:
    defaults = HarnessConfig()
    sub.add_argument("--model", default=defaults.model_name, help="model name or checkpoint path")
    sub.add_argument("--epochs", type=int, default=defaults.epochs)
    sub.add_argument("--learning-rate", type=float, default=defaults.learning_rate)
    sub.add_argument("--warmup-steps", type=int, default=defaults.warmup_steps)
    sub.add_argument("--batch-size", type=int, default=defaults.batch_size)
    sub.add_argument("--max-seq-length", type=int, default=defaults.max_seq_length)
    sub.add_argument("--doc-stride", type=int, default=defaults.doc_stride)
    sub.add_argument("--max-answer-length", type=int, default=defaults.max_answer_length)
    sub.add_argument("--limit", type=int, default=None,
                     help="truncate training to the first N questions")
    sub.add_argument("--seed", type=int, default=defaults.seed)
    sub.add_argument("--device", default=defaults.device)
    sub.add_argument("--large-preset", action="store_true",
                     help="apply the large-model recipe (lr 1.5e-5, warm-up 500, batch 32)")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="qa-harness",
                                     description="Toy-scale extractive-QA fine-tuning and inference.")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("train", help="fine-tune on a SQuAD-format file")
    _add_model_flags(sub)
    sub.add_argument("--train-file", required=True)
    sub.add_argument("--output-dir", required=True)
    sub.set_defaults(command_name="train")

    sub = commands.add_parser("predict", help="write a prediction JSON for a SQuAD-format file")
    _add_model_flags(sub)
    sub.add_argument("--checkpoint", required=True)
    sub.add_argument("--input", required=True, help="SQuAD-format dev file")
    sub.add_argument("--output", required=True, help="prediction JSON path")
    sub.add_argument("--no-answer", action="store_true",
                     help="emit empty answers when the no-answer score wins")
    sub.set_defaults(command_name="predict")

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = _config_from_args(args)
    try:
        if args.command_name == "train":
            train(cfg, args.train_file, args.output_dir)
        else:
            predictions = predict(args.checkpoint, args.input, args.no_answer, cfg)
            write_predictions(predictions, args.output)
    except (FileNotFoundError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
