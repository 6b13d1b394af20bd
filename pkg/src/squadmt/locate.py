"""Locate independently translated answers inside translated contexts.

An answer matches any contiguous run of word tokens whose normalized-root
multiset equals the answer's, in any word order. Non-word tokens inside the
run are absorbed into the character span. When several runs match, the one
whose relative character position is closest to the original answer's
relative position wins; exact ties go to the leftmost start.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .dataset import Answer, Question
from .morph import Normalizer, Token

DROP_NO_CANDIDATE = "no-candidate"
DROP_EMPTY_ANSWER = "empty-answer-normalization"


@dataclass(frozen=True)
class LocateQuery:
    context: str
    answer: str
    original_rel_pos: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.original_rel_pos <= 1.0:
            raise ValueError(f"original_rel_pos must lie in [0, 1], got {self.original_rel_pos}")


@dataclass(frozen=True)
class Span:
    """A located answer: character offsets into the context and the covered text."""

    start: int
    end: int
    text: str


@dataclass(frozen=True)
class Dropped:
    question_id: str
    reason: str


def locate_answer(query: LocateQuery, normalizer: Normalizer) -> Span | None:
    """Find the best-matching window for the answer, or None when nothing matches."""
    words = normalizer.annotate(query.context)
    roots = normalizer.normalize_text(query.answer)
    return locate_in_tokens(query.context, words, roots, query.original_rel_pos)


def locate_in_tokens(
    context: str,
    words: Sequence[Token],
    answer_roots: Sequence[str],
    original_rel_pos: float,
) -> Span | None:
    """Core matcher over pre-annotated word tokens (roots filled in).

    Slides a window of exactly len(answer_roots) word tokens and keeps a
    running multiset difference, so each candidate test is O(1).
    """
    k = len(answer_roots)
    if k == 0 or len(words) < k:
        return None
    context_len = len(context)

    # diff > 0: still needed by the answer; diff < 0: surplus in the window.
    diff: Counter[str] = Counter(answer_roots)
    mismatched = len(diff)

    def shift(root: str, delta: int) -> None:
        nonlocal mismatched
        before = diff[root]
        after = before + delta
        diff[root] = after
        if before == 0:
            mismatched += 1
        elif after == 0:
            mismatched -= 1

    best_start = -1
    best_end = -1
    best_dist = 0.0
    for right, token in enumerate(words):
        shift(token.root or "", -1)
        if right >= k:
            shift(words[right - k].root or "", +1)
        if right >= k - 1 and mismatched == 0:
            start = words[right - k + 1].start
            dist = abs(start / context_len - original_rel_pos)
            if best_start < 0 or dist < best_dist:
                best_start = start
                best_end = token.end
                best_dist = dist
    if best_start < 0:
        return None
    return Span(start=best_start, end=best_end, text=context[best_start:best_end])


def project_question(
    src_question: Question,
    translated_question: str,
    translated_context: str,
    translated_answers: Sequence[str],
    src_context_len: int,
    normalizer: Normalizer,
    *,
    context_tokens: Sequence[Token] | None = None,
) -> Question | Dropped:
    """Project one question into the translated context.

    Unanswerable questions are always kept, with an empty answer list. Each
    translated answer is located independently, taking its original relative
    position from the matching source answer; a question whose answers all
    fail to locate is dropped with a reason.
    """
    if src_question.unanswerable:
        return Question(
            id=src_question.id,
            question=translated_question,
            answers=(),
            unanswerable=True,
        )
    if len(translated_answers) != len(src_question.answers):
        raise ValueError(
            f"question {src_question.id}: {len(translated_answers)} translated answers for"
            f" {len(src_question.answers)} source answers"
        )
    if context_tokens is None:
        context_tokens = normalizer.annotate(translated_context)
    kept: list[Answer] = []
    any_roots = False
    for src_answer, translated in zip(src_question.answers, translated_answers):
        roots = normalizer.normalize_text(translated)
        if not roots:
            continue
        any_roots = True
        rel = src_answer.start / src_context_len if src_context_len else 0.0
        rel = min(max(rel, 0.0), 1.0)
        span = locate_in_tokens(translated_context, context_tokens, roots, rel)
        if span is not None:
            kept.append(Answer(text=span.text, start=span.start))
    if not kept:
        reason = DROP_NO_CANDIDATE if any_roots else DROP_EMPTY_ANSWER
        return Dropped(question_id=src_question.id, reason=reason)
    return Question(
        id=src_question.id,
        question=translated_question,
        answers=tuple(kept),
        unanswerable=False,
    )
