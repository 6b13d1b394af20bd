"""Exact-match and token-bag F1 with configurable morphological normalization.

Answers are reduced to token lists before comparison: lower-case, strip
punctuation characters, drop configured articles, split on whitespace, then
map every token per the mode (surface, lemma, or derivation root). With
mode="raw" and the English article profile this reproduces the official
SQuAD v1.1 normalization token for token, which the oracle-equivalence tests
rely on. Czech evaluation uses an empty article list.

Exact match compares token sequences; F1 compares token bags, maximized over
the gold answers. Unanswerable questions score 1 exactly when the normalized
prediction is empty.
"""

from __future__ import annotations

import logging
import re
import string
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from .dataset import Dataset, iter_questions
from .errors import ConfigError
from .morph import DerivationForest, LemmaLexicon

logger = logging.getLogger(__name__)

ENGLISH_ARTICLES = ("a", "an", "the")

_PUNCT_TABLE = {ord(ch): None for ch in string.punctuation}


@lru_cache(maxsize=None)
def _article_pattern(articles: tuple[str, ...]) -> re.Pattern[str]:
    joined = "|".join(re.escape(a) for a in articles)
    return re.compile(rf"\b(?:{joined})\b")


@dataclass(frozen=True)
class EvalConfig:
    mode: str = "raw"
    articles: tuple[str, ...] = ()
    lexicon: LemmaLexicon | None = None
    forest: DerivationForest | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("raw", "lemma", "root"):
            raise ConfigError(f"unknown normalization mode {self.mode!r}")
        if self.mode in ("lemma", "root") and self.lexicon is None:
            raise ConfigError(f"mode {self.mode!r} requires a loaded lemma lexicon")
        if self.mode == "root" and self.forest is None:
            raise ConfigError("mode 'root' requires a loaded derivation forest")


@dataclass(frozen=True)
class EvalReport:
    exact_match: float
    f1: float
    total: int
    missing_predictions: int
    extra_predictions: int
    per_question: dict[str, tuple[int, float]] = field(default_factory=dict)


def normalize_answer(text: str, cfg: EvalConfig) -> list[str]:
    """Reduce answer text to the token list used by both metrics."""
    s = text.lower().translate(_PUNCT_TABLE)
    if cfg.articles:
        s = _article_pattern(cfg.articles).sub(" ", s)
    tokens = s.split()
    if cfg.mode == "raw":
        return tokens
    assert cfg.lexicon is not None
    lemmas = [cfg.lexicon.lemma(t) for t in tokens]
    if cfg.mode == "lemma":
        return lemmas
    assert cfg.forest is not None
    return [cfg.forest.root_of(lemma) for lemma in lemmas]


def _bag_f1(pred: Sequence[str], gold: Sequence[str]) -> float:
    if not pred and not gold:
        return 1.0
    if not pred or not gold:
        return 0.0
    common = Counter(pred) & Counter(gold)
    same = sum(common.values())
    if same == 0:
        return 0.0
    precision = same / len(pred)
    recall = same / len(gold)
    return 2 * precision * recall / (precision + recall)


def score_question(
    pred: str,
    golds: Sequence[str],
    unanswerable: bool,
    cfg: EvalConfig,
) -> tuple[int, float]:
    """Score one prediction: (exact match 0/1, token-bag F1 in [0, 1])."""
    pred_tokens = normalize_answer(pred, cfg)
    if unanswerable:
        correct = 1 if not pred_tokens else 0
        return correct, float(correct)
    gold_token_lists = [normalize_answer(g, cfg) for g in golds]
    em = int(any(pred_tokens == g for g in gold_token_lists))
    f1 = max((_bag_f1(pred_tokens, g) for g in gold_token_lists), default=0.0)
    return em, f1


def evaluate(dataset: Dataset, predictions: Mapping[str, str], cfg: EvalConfig) -> EvalReport:
    """Score every dataset question against the prediction map.

    Questions missing from the predictions score 0 and are counted
    separately; prediction ids absent from the dataset are warned about and
    ignored. Aggregates are unweighted means scaled to percentages.
    """
    per_question: dict[str, tuple[int, float]] = {}
    missing = 0
    em_sum = 0
    f1_sum = 0.0
    for question in iter_questions(dataset):
        pred = predictions.get(question.id)
        if pred is None:
            missing += 1
            per_question[question.id] = (0, 0.0)
            continue
        golds = [a.text for a in question.answers]
        em, f1 = score_question(pred, golds, question.unanswerable, cfg)
        em_sum += em
        f1_sum += f1
        per_question[question.id] = (em, f1)
    extra = [pid for pid in predictions if pid not in per_question]
    if extra:
        logger.warning(
            "%d prediction ids are not in the dataset and were ignored (first: %r)",
            len(extra), extra[0],
        )
    total = len(per_question)
    scale = 100.0 / total if total else 0.0
    return EvalReport(
        exact_match=em_sum * scale,
        f1=f1_sum * scale,
        total=total,
        missing_predictions=missing,
        extra_predictions=len(extra),
        per_question=per_question,
    )


def render_report(report: EvalReport) -> str:
    lines = [
        f"exact_match: {report.exact_match:.2f}",
        f"f1: {report.f1:.2f}",
        f"total: {report.total}",
        f"missing_predictions: {report.missing_predictions}",
    ]
    if report.extra_predictions:
        lines.append(f"ignored_predictions: {report.extra_predictions}")
    return "\n".join(lines) + "\n"


def per_question_tsv(report: EvalReport) -> str:
    """One row per question: id, exact match, F1."""
    rows = ["id\tem\tf1"]
    for qid, (em, f1) in report.per_question.items():
        rows.append(f"{qid}\t{em}\t{f1:.6f}")
    return "\n".join(rows) + "\n"
