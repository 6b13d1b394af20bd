"""SQuAD 1.1/2.0 interchange files: parsing, validation, serialization, statistics.

The in-memory model mirrors the published JSON layout (articles that hold
paragraphs that hold questions). Values are immutable after construction and
safe to share across threads. Answer offsets are always stored as 0-based
Unicode scalar (code point) indexes into the enclosing context, regardless of
whether the source file counted bytes or UTF-16 units.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import ParseError, ValidationError


@dataclass(frozen=True, eq=True)
class Answer:
    """A gold answer: exact substring of the context starting at ``start``."""

    text: str
    start: int
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, eq=True)
class Question:
    id: str
    question: str
    answers: tuple[Answer, ...] = ()
    unanswerable: bool = False
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, eq=True)
class Paragraph:
    context: str
    questions: tuple[Question, ...] = ()
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, eq=True)
class Article:
    title: str
    paragraphs: tuple[Paragraph, ...] = ()
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, eq=True)
class Dataset:
    version: str
    articles: tuple[Article, ...] = ()
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def is_v2(self) -> bool:
        """True for files declaring a 2.0 version or containing unanswerable questions.

        Files labelled 1.1 that carry ``is_impossible`` entries are accepted
        and treated as 2.0.
        """
        if "2.0" in self.version:
            return True
        return any(q.unanswerable for q in iter_questions(self))

    def question_ids(self) -> list[str]:
        return [q.id for q in iter_questions(self)]


@dataclass(frozen=True)
class SplitStats:
    articles: int
    paragraphs: int
    total: int
    answerable: int
    unanswerable: int


def iter_questions(dataset: Dataset) -> Iterable[Question]:
    for article in dataset.articles:
        for paragraph in article.paragraphs:
            yield from paragraph.questions


def iter_paragraphs(dataset: Dataset) -> Iterable[tuple[Article, Paragraph]]:
    for article in dataset.articles:
        for paragraph in article.paragraphs:
            yield article, paragraph


def _require(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        raise ParseError(f"{path}: missing required field {key!r}")
    return obj[key]


def _require_str(obj: dict, key: str, path: str) -> str:
    value = _require(obj, key, path)
    if not isinstance(value, str):
        raise ParseError(f"{path}.{key}: expected a string, got {type(value).__name__}")
    return value


def _require_list(obj: dict, key: str, path: str) -> list:
    value = _require(obj, key, path)
    if not isinstance(value, list):
        raise ParseError(f"{path}.{key}: expected a list, got {type(value).__name__}")
    return value


def _extras(obj: dict, known: Sequence[str]) -> dict[str, Any]:
    return {k: v for k, v in obj.items() if k not in known}


def _codepoint_offset(context: str, start: int, text: str) -> int | None:
    """Re-express ``start`` in Unicode scalar values, whatever the file counted.

    Tries code points first, then UTF-8 bytes, then UTF-16 code units.
    Returns None when no convention makes the answer text match the context.
    """
    if start < 0:
        return None
    if context[start : start + len(text)] == text:
        return start
    encoded = context.encode("utf-8")
    target = text.encode("utf-8")
    if encoded[start : start + len(target)] == target:
        try:
            return len(encoded[:start].decode("utf-8"))
        except UnicodeDecodeError:
            return None
    encoded = context.encode("utf-16-le")
    target = text.encode("utf-16-le")
    if encoded[2 * start : 2 * start + len(target)] == target:
        try:
            return len(encoded[: 2 * start].decode("utf-16-le"))
        except UnicodeDecodeError:
            return None
    return None


def parse_dataset(serialized: str, *, require_answers: bool = True) -> Dataset:
    """Parse a SQuAD JSON interchange string into a validated Dataset.

    Raises ParseError for schema violations (naming the JSON path) and
    ValidationError when answer offsets cannot be reconciled with their
    context or question ids repeat (listing the offending question ids).
    ``require_answers=False`` relaxes the "answerable questions carry at
    least one answer" invariant; round-trip forward files rely on this.
    """
    try:
        obj = json.loads(serialized)
    except json.JSONDecodeError as exc:
        raise ParseError(f"input is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("top level: expected a JSON object")

    version = obj.get("version", "1.1")
    if not isinstance(version, str):
        raise ParseError("version: expected a string")
    data = _require_list(obj, "data", "top level")

    offset_failures: list[str] = []
    articles: list[Article] = []
    for ai, article_obj in enumerate(data):
        apath = f"data[{ai}]"
        if not isinstance(article_obj, dict):
            raise ParseError(f"{apath}: expected an object")
        title = _require_str(article_obj, "title", apath)
        paragraphs: list[Paragraph] = []
        for pi, para_obj in enumerate(_require_list(article_obj, "paragraphs", apath)):
            ppath = f"{apath}.paragraphs[{pi}]"
            if not isinstance(para_obj, dict):
                raise ParseError(f"{ppath}: expected an object")
            context = _require_str(para_obj, "context", ppath)
            questions: list[Question] = []
            for qi, qa_obj in enumerate(_require_list(para_obj, "qas", ppath)):
                qpath = f"{ppath}.qas[{qi}]"
                if not isinstance(qa_obj, dict):
                    raise ParseError(f"{qpath}: expected an object")
                qid = _require(qa_obj, "id", qpath)
                if not isinstance(qid, str):
                    qid = str(qid)
                question_text = _require_str(qa_obj, "question", qpath)
                unanswerable = bool(qa_obj.get("is_impossible", False))
                answers: list[Answer] = []
                for xi, ans_obj in enumerate(_require_list(qa_obj, "answers", qpath)):
                    xpath = f"{qpath}.answers[{xi}]"
                    if not isinstance(ans_obj, dict):
                        raise ParseError(f"{xpath}: expected an object")
                    text = _require_str(ans_obj, "text", xpath)
                    raw_start = _require(ans_obj, "answer_start", xpath)
                    if not isinstance(raw_start, int) or isinstance(raw_start, bool):
                        raise ParseError(f"{xpath}.answer_start: expected an integer")
                    start = _codepoint_offset(context, raw_start, text)
                    if start is None:
                        offset_failures.append(qid)
                        start = raw_start
                    answers.append(
                        Answer(text=text, start=start, extra=_extras(ans_obj, ("text", "answer_start")))
                    )
                questions.append(
                    Question(
                        id=qid,
                        question=question_text,
                        answers=tuple(answers),
                        unanswerable=unanswerable,
                        extra=_extras(qa_obj, ("id", "question", "answers", "is_impossible")),
                    )
                )
            paragraphs.append(
                Paragraph(
                    context=context,
                    questions=tuple(questions),
                    extra=_extras(para_obj, ("context", "qas")),
                )
            )
        articles.append(
            Article(
                title=title,
                paragraphs=tuple(paragraphs),
                extra=_extras(article_obj, ("title", "paragraphs")),
            )
        )

    dataset = Dataset(
        version=version,
        articles=tuple(articles),
        extra=_extras(obj, ("version", "data")),
    )
    if offset_failures:
        shown = ", ".join(offset_failures[:10])
        more = "" if len(offset_failures) <= 10 else f" (and {len(offset_failures) - 10} more)"
        raise ValidationError(
            f"answer offsets do not match their context for question ids: {shown}{more}"
        )
    issues = validate_dataset(dataset, require_answers=require_answers)
    if issues:
        raise ValidationError("; ".join(issues[:10]))
    return dataset


def load_dataset(path: str | Path, *, require_answers: bool = True) -> Dataset:
    return parse_dataset(Path(path).read_text(encoding="utf-8"), require_answers=require_answers)


def validate_dataset(dataset: Dataset, *, require_answers: bool = True) -> list[str]:
    """Return human-readable invariant violations; empty list means valid."""
    issues: list[str] = []
    seen: dict[str, int] = {}
    for article in dataset.articles:
        if not article.paragraphs:
            issues.append(f"article {article.title!r} has no paragraphs")
        for paragraph in article.paragraphs:
            if not paragraph.context:
                issues.append(f"article {article.title!r} contains an empty context")
            for question in paragraph.questions:
                seen[question.id] = seen.get(question.id, 0) + 1
                if not question.unanswerable and not question.answers and require_answers:
                    issues.append(f"question {question.id} is answerable but has no answers")
                for answer in question.answers:
                    end = answer.start + len(answer.text)
                    if answer.start < 0 or paragraph.context[answer.start : end] != answer.text:
                        issues.append(
                            f"question {question.id}: answer offset {answer.start} does not"
                            f" match text {answer.text!r}"
                        )
    duplicates = sorted(qid for qid, count in seen.items() if count > 1)
    if duplicates:
        shown = ", ".join(duplicates[:10])
        issues.append(f"duplicate question ids: {shown}")
    return issues


def serialize_dataset(dataset: Dataset, *, require_answers: bool = True) -> str:
    """Serialize to the SQuAD JSON interchange format.

    Key order is canonical and deterministic, so serialize(parse(serialize(d)))
    is byte-identical to serialize(d). Unanswerable questions are emitted with
    ``is_impossible: true`` and an empty answer list; the flag is written for
    every question of a 2.0 dataset, mirroring the published files.
    """
    issues = validate_dataset(dataset, require_answers=require_answers)
    if issues:
        raise ValidationError("refusing to serialize: " + "; ".join(issues[:10]))
    emit_flag = dataset.is_v2
    data = []
    for article in dataset.articles:
        paragraphs = []
        for paragraph in article.paragraphs:
            qas = []
            for question in paragraph.questions:
                entry: dict[str, Any] = {"id": question.id, "question": question.question}
                if question.unanswerable:
                    entry["answers"] = []
                else:
                    entry["answers"] = [
                        {"text": a.text, "answer_start": a.start, **a.extra}
                        for a in question.answers
                    ]
                if emit_flag:
                    entry["is_impossible"] = question.unanswerable
                entry.update(question.extra)
                qas.append(entry)
            paragraphs.append({"context": paragraph.context, "qas": qas, **paragraph.extra})
        data.append({"title": article.title, "paragraphs": paragraphs, **article.extra})
    obj = {"version": dataset.version, "data": data, **dataset.extra}
    return json.dumps(obj, ensure_ascii=False, separators=(",", ": ")) + "\n"


def save_dataset(dataset: Dataset, path: str | Path, *, require_answers: bool = True) -> None:
    Path(path).write_text(serialize_dataset(dataset, require_answers=require_answers), encoding="utf-8")


def dataset_stats(dataset: Dataset) -> SplitStats:
    """Exact split-level counts; answerable + unanswerable == total."""
    paragraphs = 0
    answerable = 0
    unanswerable = 0
    for article in dataset.articles:
        paragraphs += len(article.paragraphs)
        for paragraph in article.paragraphs:
            for question in paragraph.questions:
                if question.unanswerable:
                    unanswerable += 1
                else:
                    answerable += 1
    return SplitStats(
        articles=len(dataset.articles),
        paragraphs=paragraphs,
        total=answerable + unanswerable,
        answerable=answerable,
        unanswerable=unanswerable,
    )
