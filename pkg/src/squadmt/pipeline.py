"""Dataset construction, retention accounting, and round-trip orchestration.

The build walks every paragraph, translates its context, questions, and
answers, then projects each question into the translated context. Questions
whose answers cannot be located are dropped (unanswerable questions are
always preserved); paragraphs and articles left empty are removed. The
retention statistics mirror the published split-size table: source questions,
kept questions, percentage kept to one decimal place.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .dataset import (
    Article,
    Dataset,
    Paragraph,
    Question,
    iter_questions,
    validate_dataset,
)
from .errors import TranslationError, ValidationError
from .locate import Dropped, project_question
from .morph import Normalizer

DROP_LOG_HEADER = "id\treason"


@dataclass(frozen=True)
class BuildConfig:
    src_lang: str = "en"
    tgt_lang: str = "cs"
    jobs: int = 1
    label: str = ""


@dataclass(frozen=True)
class RetentionStats:
    """Per-split retention accounting; percentages use half-up rounding to one decimal."""

    label: str
    source_total: int
    kept_total: int
    source_answerable: int
    kept_answerable: int
    source_unanswerable: int
    kept_unanswerable: int
    drop_reasons: dict[str, int] = field(default_factory=dict)

    @property
    def percentage_kept(self) -> str:
        return format_percentage(self.kept_total, self.source_total)


@dataclass(frozen=True)
class BuildResult:
    dataset: Dataset
    stats: RetentionStats
    drops: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class RoundTripBundle:
    """Forward half of the pivot-language evaluation flow."""

    forward_dataset: Dataset
    id_map: dict[str, str]


def format_percentage(kept: int, source: int) -> str:
    """``kept/source`` as a percentage with one decimal, or "n/a" for empty splits.

    Integer arithmetic with half-up tie-breaking keeps the rendering exact
    and platform-independent.
    """
    if source == 0:
        return "n/a"
    tenths = (2 * kept * 1000 + source) // (2 * source)
    return f"{tenths // 10}.{tenths % 10}%"


def _translated_paragraph_texts(
    paragraph: Paragraph, provider, src_lang: str, tgt_lang: str
) -> tuple[str, list[str], list[list[str]]]:
    """Translate one paragraph's context, question texts, and answer texts."""
    batch = [paragraph.context]
    for question in paragraph.questions:
        batch.append(question.question)
        if not question.unanswerable:
            batch.extend(a.text for a in question.answers)
    translated = provider.translate_batch(batch, src_lang, tgt_lang)
    if len(translated) != len(batch):
        raise TranslationError(
            f"provider returned {len(translated)} translations for {len(batch)} sources"
        )
    cursor = iter(translated)
    context = next(cursor)
    questions: list[str] = []
    answers: list[list[str]] = []
    for question in paragraph.questions:
        questions.append(next(cursor))
        if question.unanswerable:
            answers.append([])
        else:
            answers.append([next(cursor) for _ in question.answers])
    return context, questions, answers


def build_target_dataset(
    src: Dataset,
    provider,
    normalizer: Normalizer,
    config: BuildConfig = BuildConfig(),
) -> BuildResult:
    """Translate and project a whole dataset; returns the dataset, stats, and drop log.

    Translation runs paragraph by paragraph in dataset order (the provider
    may parallelize internally), so cache files grow deterministically.
    Projection is pure and parallelized across paragraphs when
    ``config.jobs > 1``; results are order-stable regardless of worker count.
    """
    issues = validate_dataset(src)
    if issues:
        raise ValidationError("source dataset invalid: " + "; ".join(issues[:5]))

    translated: list[tuple[str, list[str], list[list[str]]]] = []
    flat_paragraphs: list[Paragraph] = []
    for ai, article in enumerate(src.articles):
        for pi, paragraph in enumerate(article.paragraphs):
            try:
                translated.append(
                    _translated_paragraph_texts(paragraph, provider, config.src_lang, config.tgt_lang)
                )
            except TranslationError as exc:
                raise TranslationError(
                    f"article {ai} paragraph {pi} ({article.title!r}): {exc}"
                ) from exc
            flat_paragraphs.append(paragraph)

    def project(job: tuple[Paragraph, tuple[str, list[str], list[list[str]]]]):
        paragraph, (t_context, t_questions, t_answers) = job
        tokens = normalizer.annotate(t_context)
        outcomes: list[Question | Dropped] = []
        for question, t_question, answers in zip(paragraph.questions, t_questions, t_answers):
            outcomes.append(
                project_question(
                    question,
                    t_question,
                    t_context,
                    answers,
                    len(paragraph.context),
                    normalizer,
                    context_tokens=tokens,
                )
            )
        return t_context, outcomes

    jobs = list(zip(flat_paragraphs, translated))
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            projected = list(pool.map(project, jobs))
    else:
        projected = [project(job) for job in jobs]

    drops: list[tuple[str, str]] = []
    kept_answerable = 0
    kept_unanswerable = 0
    out_articles: list[Article] = []
    cursor = 0
    for article in src.articles:
        out_paragraphs: list[Paragraph] = []
        for _ in article.paragraphs:
            t_context, outcomes = projected[cursor]
            cursor += 1
            kept_questions: list[Question] = []
            for outcome in outcomes:
                if isinstance(outcome, Dropped):
                    drops.append((outcome.question_id, outcome.reason))
                    continue
                kept_questions.append(outcome)
                if outcome.unanswerable:
                    kept_unanswerable += 1
                else:
                    kept_answerable += 1
            if kept_questions:
                out_paragraphs.append(Paragraph(context=t_context, questions=tuple(kept_questions)))
        if out_paragraphs:
            out_articles.append(Article(title=article.title, paragraphs=tuple(out_paragraphs)))

    out = Dataset(version=src.version, articles=tuple(out_articles))
    issues = validate_dataset(out)
    if issues:
        raise ValidationError("built dataset failed validation: " + "; ".join(issues[:5]))

    source_answerable = sum(1 for q in iter_questions(src) if not q.unanswerable)
    source_unanswerable = sum(1 for q in iter_questions(src) if q.unanswerable)
    reason_counts: dict[str, int] = {}
    for _, reason in drops:
        reason_counts[reason] = reason_counts.get(reason, 0) + 1
    stats = RetentionStats(
        label=config.label,
        source_total=source_answerable + source_unanswerable,
        kept_total=kept_answerable + kept_unanswerable,
        source_answerable=source_answerable,
        kept_answerable=kept_answerable,
        source_unanswerable=source_unanswerable,
        kept_unanswerable=kept_unanswerable,
        drop_reasons=reason_counts,
    )
    return BuildResult(dataset=out, stats=stats, drops=tuple(drops))


def translate_dataset_strings(
    dataset: Dataset, provider, src_lang: str, tgt_lang: str
) -> dict[str, str]:
    """Translate every context, question, and answer string once (cache warming)."""
    ordered: dict[str, None] = {}
    for article in dataset.articles:
        for paragraph in article.paragraphs:
            ordered.setdefault(paragraph.context)
            for question in paragraph.questions:
                ordered.setdefault(question.question)
                for answer in question.answers:
                    ordered.setdefault(answer.text)
    sources = list(ordered)
    translated = provider.translate_batch(sources, src_lang, tgt_lang)
    if len(translated) != len(sources):
        raise TranslationError(
            f"provider returned {len(translated)} translations for {len(sources)} sources"
        )
    return dict(zip(sources, translated))


def round_trip_forward(
    dev: Dataset, provider, src_lang: str = "cs", tgt_lang: str = "en"
) -> RoundTripBundle:
    """Translate contexts and questions into the pivot language.

    The forward dataset is a prediction input: every question keeps its id
    and unanswerable flag but carries no answers.
    """
    out_articles: list[Article] = []
    id_map: dict[str, str] = {}
    for ai, article in enumerate(dev.articles):
        out_paragraphs: list[Paragraph] = []
        for pi, paragraph in enumerate(article.paragraphs):
            batch = [paragraph.context] + [q.question for q in paragraph.questions]
            try:
                translated = provider.translate_batch(batch, src_lang, tgt_lang)
            except TranslationError as exc:
                raise TranslationError(
                    f"article {ai} paragraph {pi} ({article.title!r}): {exc}"
                ) from exc
            if len(translated) != len(batch):
                raise TranslationError(
                    f"provider returned {len(translated)} translations for {len(batch)} sources"
                )
            questions = []
            for question, t_question in zip(paragraph.questions, translated[1:]):
                id_map[question.id] = question.id
                questions.append(
                    Question(
                        id=question.id,
                        question=t_question,
                        answers=(),
                        unanswerable=question.unanswerable,
                    )
                )
            out_paragraphs.append(Paragraph(context=translated[0], questions=tuple(questions)))
        out_articles.append(Article(title=article.title, paragraphs=tuple(out_paragraphs)))
    forward = Dataset(version=dev.version, articles=tuple(out_articles))
    return RoundTripBundle(forward_dataset=forward, id_map=id_map)


def round_trip_back(
    predictions: Mapping[str, str],
    provider,
    src_lang: str = "en",
    tgt_lang: str = "cs",
    known_ids: Sequence[str] | None = None,
) -> dict[str, str]:
    """Translate predicted answers back to the target language.

    Empty predictions (no-answer) pass through unchanged. The id set is
    preserved exactly; when ``known_ids`` is given, unknown prediction ids
    are rejected.
    """
    if known_ids is not None:
        known = set(known_ids)
        unknown = [pid for pid in predictions if pid not in known]
        if unknown:
            raise ValidationError(
                f"{len(unknown)} prediction ids are not in the dev set (first: {unknown[0]!r})"
            )
    ordered: dict[str, None] = {}
    for text in predictions.values():
        if text:
            ordered.setdefault(text)
    sources = list(ordered)
    translated = provider.translate_batch(sources, src_lang, tgt_lang) if sources else []
    if len(translated) != len(sources):
        raise TranslationError(
            f"provider returned {len(translated)} translations for {len(sources)} sources"
        )
    mapping = dict(zip(sources, translated))
    return {pid: (mapping[text] if text else "") for pid, text in predictions.items()}


def report_stats(stats: RetentionStats | Sequence[RetentionStats]) -> str:
    """Render the retention table: source questions, kept questions, percentage kept."""
    rows = [stats] if isinstance(stats, RetentionStats) else list(stats)
    lines = [f"{'Split':<24}{'Source':>12}{'Kept':>12}{'Kept %':>9}"]
    for row in rows:
        label = row.label or "all"
        lines.append(
            f"{label:<24}{row.source_total:>12,}{row.kept_total:>12,}{row.percentage_kept:>9}"
        )
        lines.append(
            f"{'  answerable':<24}{row.source_answerable:>12,}{row.kept_answerable:>12,}"
            f"{format_percentage(row.kept_answerable, row.source_answerable):>9}"
        )
        lines.append(
            f"{'  unanswerable':<24}{row.source_unanswerable:>12,}{row.kept_unanswerable:>12,}"
            f"{format_percentage(row.kept_unanswerable, row.source_unanswerable):>9}"
        )
        if row.drop_reasons:
            breakdown = ", ".join(f"{k}={v}" for k, v in sorted(row.drop_reasons.items()))
            lines.append(f"  drops: {breakdown}")
    return "\n".join(lines) + "\n"


def drops_tsv(drops: Sequence[tuple[str, str]]) -> str:
    lines = [DROP_LOG_HEADER]
    lines.extend(f"{qid}\t{reason}" for qid, reason in drops)
    return "\n".join(lines) + "\n"
