"""Command-line entry point: one binary, one subcommand per pipeline stage.

Settings come from an optional JSON config file plus flag overrides (flags
win). Exit codes: 0 success, 1 validation failure (or answer not found for
``locate``), 2 configuration/IO/provider errors. Diagnostics go to stderr;
machine-readable output goes to files or stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from . import dataset as ds
from . import metrics, pipeline
from .errors import ConfigError, LexiconError, ParseError, SquadmtError, TranslationError, ValidationError
from .locate import LocateQuery, locate_answer
from .morph import Normalizer, load_derivation_forest, load_lemma_lexicon
from .translate import HttpProvider, HttpProviderConfig, IdentityProvider, file_cache_provider


@dataclass
class RunConfig:
    input: str | None = None
    output: str | None = None
    mode: str = "raw"
    cache: str | None = None
    endpoint: str | None = None
    src_lang: str = "en"
    tgt_lang: str = "cs"
    jobs: int | None = None  # None = available parallelism
    offline: bool = False
    lexicon: str | None = None
    forest: str | None = None
    predictions: str | None = None
    articles: tuple[str, ...] = ()
    label: str = ""
    provider: dict[str, Any] = field(default_factory=dict)


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def load_run_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {args.config}: invalid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {args.config}: expected a JSON object")
        unknown = sorted(set(raw) - _CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"config file {args.config}: unknown keys {unknown}")
        if "articles" in raw:
            raw["articles"] = tuple(raw["articles"])
        cfg = replace(cfg, **raw)
    overrides: dict[str, Any] = {}
    for name in _CONFIG_KEYS:
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if "articles" in overrides:
        overrides["articles"] = tuple(
            a for a in (s.strip() for s in overrides["articles"].split(",")) if a
        )
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


def make_normalizer(cfg: RunConfig) -> Normalizer:
    if cfg.mode == "raw":
        return Normalizer(mode="raw")
    if not cfg.lexicon:
        raise ConfigError(f"mode {cfg.mode!r} requires --lexicon")
    lexicon = load_lemma_lexicon(cfg.lexicon)
    if cfg.mode == "lemma":
        return Normalizer(mode="lemma", lexicon=lexicon)
    if not cfg.forest:
        raise ConfigError("mode 'root' requires --forest")
    return Normalizer(mode="root", lexicon=lexicon, forest=load_derivation_forest(cfg.forest))


def make_eval_config(cfg: RunConfig) -> metrics.EvalConfig:
    lexicon = load_lemma_lexicon(cfg.lexicon) if cfg.lexicon else None
    forest = load_derivation_forest(cfg.forest) if cfg.forest else None
    return metrics.EvalConfig(mode=cfg.mode, articles=cfg.articles, lexicon=lexicon, forest=forest)


def make_provider(cfg: RunConfig, *, default_cache: str | None = None):
    """Assemble the provider stack: optional remote wrapped by an optional cache."""
    remote = None
    if not cfg.offline:
        if cfg.endpoint == "identity" or cfg.provider.get("kind") == "identity":
            remote = IdentityProvider()
        elif cfg.endpoint:
            extras = {k: v for k, v in cfg.provider.items() if k != "kind"}
            if "retry_statuses" in extras:
                extras["retry_statuses"] = tuple(extras["retry_statuses"])
            try:
                remote = HttpProvider(HttpProviderConfig(url=cfg.endpoint, **extras))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad provider settings: {exc}") from exc
    cache_path = cfg.cache or default_cache
    if cache_path:
        return file_cache_provider(cache_path, remote, append=remote is not None)
    if remote is None:
        raise ConfigError("no provider: give --endpoint, or --cache with --offline")
    return remote


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _load_input(cfg: RunConfig, *, require_answers: bool = True) -> ds.Dataset:
    if not cfg.input:
        raise ConfigError("an input dataset is required (--input)")
    return ds.parse_dataset(_read_text(cfg.input), require_answers=require_answers)


def _load_predictions(path: str) -> dict[str, str]:
    try:
        raw = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"predictions file {path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict) or not all(isinstance(v, str) for v in raw.values()):
        raise ConfigError(f"predictions file {path}: expected an id -> answer string object")
    return raw


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    dataset = _load_input(cfg)
    stats = ds.dataset_stats(dataset)
    print(
        f"valid: {stats.articles} articles, {stats.paragraphs} paragraphs,"
        f" {stats.total} questions ({stats.unanswerable} unanswerable)",
        file=sys.stderr,
    )
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    dataset = _load_input(cfg)
    s = ds.dataset_stats(dataset)
    print(f"articles\t{s.articles}")
    print(f"paragraphs\t{s.paragraphs}")
    print(f"questions\t{s.total}")
    print(f"answerable\t{s.answerable}")
    print(f"unanswerable\t{s.unanswerable}")
    return 0


def cmd_translate(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    if not cfg.cache:
        raise ConfigError("translate fills a cache; give --cache")
    dataset = _load_input(cfg)
    provider = make_provider(cfg)
    try:
        table = pipeline.translate_dataset_strings(dataset, provider, cfg.src_lang, cfg.tgt_lang)
    finally:
        if hasattr(provider, "close"):
            provider.close()
    print(f"translated {len(table)} distinct strings into {cfg.cache}", file=sys.stderr)
    return 0


def cmd_build(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    if not cfg.output:
        raise ConfigError("build writes a run directory; give --output DIR")
    out_dir = Path(cfg.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = _load_input(cfg)
    normalizer = make_normalizer(cfg)
    provider = make_provider(cfg, default_cache=str(out_dir / "cache.tsv"))
    jobs = cfg.jobs if cfg.jobs else (os.cpu_count() or 1)
    try:
        result = pipeline.build_target_dataset(
            dataset,
            provider,
            normalizer,
            pipeline.BuildConfig(
                src_lang=cfg.src_lang, tgt_lang=cfg.tgt_lang, jobs=jobs, label=cfg.label
            ),
        )
    finally:
        if hasattr(provider, "close"):
            provider.close()
    ds.save_dataset(result.dataset, out_dir / "dataset.json")
    (out_dir / "stats.txt").write_text(pipeline.report_stats(result.stats), encoding="utf-8")
    (out_dir / "drops.tsv").write_text(pipeline.drops_tsv(result.drops), encoding="utf-8")
    print(
        f"kept {result.stats.kept_total}/{result.stats.source_total} questions"
        f" ({result.stats.percentage_kept}) -> {out_dir}",
        file=sys.stderr,
    )
    return 0


def cmd_locate(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    if not cfg.input:
        raise ConfigError("locate needs a context file (--input)")
    context = _read_text(cfg.input)
    normalizer = make_normalizer(cfg)
    query = LocateQuery(context=context, answer=args.answer, original_rel_pos=args.rel_pos)
    span = locate_answer(query, normalizer)
    if span is None:
        print("NOT FOUND")
        return 1
    print(f"{span.start}\t{span.end}\t{span.text}")
    return 0


def cmd_roundtrip_forward(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    if not cfg.output:
        raise ConfigError("roundtrip-forward needs --output for the forward dataset")
    dev = _load_input(cfg)
    provider = make_provider(cfg)
    try:
        bundle = pipeline.round_trip_forward(dev, provider, cfg.src_lang, cfg.tgt_lang)
    finally:
        if hasattr(provider, "close"):
            provider.close()
    ds.save_dataset(bundle.forward_dataset, cfg.output, require_answers=False)
    print(f"forward dataset with {len(bundle.id_map)} questions -> {cfg.output}", file=sys.stderr)
    return 0


def cmd_roundtrip_back(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    if not cfg.predictions:
        raise ConfigError("roundtrip-back needs --predictions")
    if not cfg.output:
        raise ConfigError("roundtrip-back needs --output for the translated predictions")
    predictions = _load_predictions(cfg.predictions)
    known_ids = None
    if cfg.input:
        known_ids = [q.id for q in ds.iter_questions(_load_input(cfg))]
    provider = make_provider(cfg)
    try:
        back = pipeline.round_trip_back(
            predictions, provider, cfg.src_lang, cfg.tgt_lang, known_ids=known_ids
        )
    finally:
        if hasattr(provider, "close"):
            provider.close()
    Path(cfg.output).write_text(
        json.dumps(back, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )
    print(f"translated {sum(1 for v in back.values() if v)} predictions", file=sys.stderr)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    if not cfg.predictions:
        raise ConfigError("evaluate needs --predictions")
    dataset = _load_input(cfg)
    predictions = _load_predictions(cfg.predictions)
    report = metrics.evaluate(dataset, predictions, make_eval_config(cfg))
    text = metrics.render_report(report)
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    if args.per_question:
        Path(args.per_question).write_text(metrics.per_question_tsv(report), encoding="utf-8")
    return 0


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; flags override its values")
    sub.add_argument("--input", help="input dataset path ('-' for stdin)")
    sub.add_argument("--output", help="output path (file or directory, per subcommand)")
    sub.add_argument("--mode", choices=["raw", "lemma", "root"], help="normalization mode")
    sub.add_argument("--cache", help="translation cache TSV path")
    sub.add_argument("--endpoint", help="translation endpoint URL, or 'identity'")
    sub.add_argument("--src-lang", dest="src_lang", help="source language code")
    sub.add_argument("--tgt-lang", dest="tgt_lang", help="target language code")
    sub.add_argument("--jobs", type=int, help="worker threads for projection")
    sub.add_argument("--offline", action="store_true", default=None,
                     help="never contact a remote service; cache misses fail")
    sub.add_argument("--lexicon", help="surface-form -> lemma TSV")
    sub.add_argument("--forest", help="lemma -> parent-lemma TSV")
    sub.add_argument("--label", help="split label used in statistics output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="squadmt",
        description="Build and evaluate machine-translated SQuAD-style datasets.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("validate", help="schema and answer-offset check")
    _add_common(sub)
    sub.set_defaults(func=cmd_validate)

    sub = commands.add_parser("stats", help="split-level question statistics")
    _add_common(sub)
    sub.set_defaults(func=cmd_stats)

    sub = commands.add_parser("translate", help="translate all dataset strings into the cache")
    _add_common(sub)
    sub.set_defaults(func=cmd_translate)

    sub = commands.add_parser("build", help="construct the translated dataset with retention stats")
    _add_common(sub)
    sub.set_defaults(func=cmd_build)

    sub = commands.add_parser("locate", help="locate one answer in a context file")
    _add_common(sub)
    sub.add_argument("--answer", required=True, help="answer text to locate")
    sub.add_argument("--rel-pos", dest="rel_pos", type=float, required=True,
                     help="relative position of the original answer in [0, 1]")
    sub.set_defaults(func=cmd_locate)

    sub = commands.add_parser("roundtrip-forward", help="translate a dev set into the pivot language")
    _add_common(sub)
    sub.set_defaults(func=cmd_roundtrip_forward)

    sub = commands.add_parser("roundtrip-back", help="translate predictions back from the pivot")
    _add_common(sub)
    sub.add_argument("--predictions", help="prediction JSON (id -> answer)")
    sub.set_defaults(func=cmd_roundtrip_back)

    sub = commands.add_parser("evaluate", help="exact-match / F1 scoring")
    _add_common(sub)
    sub.add_argument("--predictions", help="prediction JSON (id -> answer)")
    sub.add_argument("--articles", help="comma-separated article list to strip (e.g. 'a,an,the')")
    sub.add_argument("--per-question", dest="per_question", help="write per-question scores TSV here")
    sub.set_defaults(func=cmd_evaluate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, LexiconError, TranslationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SquadmtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
