"""Offset-preserving tokenization and lemma/derivation-root normalization.

Word tokens are maximal runs of Unicode letters/digits; runs of other
non-space characters become non-word tokens; whitespace separates tokens and
is not kept. Normalization maps each word surface to a case-folded form, a
lemma, or the root of its word-formation tree, depending on the mode.

Lexicon and forest are immutable after load. Root resolution happens once at
construction (with path compression), so lookups are constant-time and safe
under concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Iterable, Mapping

from .errors import CycleError, LexiconError

MODES = ("raw", "lemma", "root")


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int
    is_word: bool
    root: str | None = None


def tokenize(text: str) -> list[Token]:
    """Split text into word and non-word tokens with character offsets.

    Token surfaces plus the skipped whitespace gaps reconstruct the input
    exactly; every token satisfies text[start:end] == surface.
    """
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        j = i + 1
        if ch.isalnum():
            while j < n and text[j].isalnum():
                j += 1
            tokens.append(Token(text[i:j], i, j, True))
        else:
            while j < n and not text[j].isalnum() and not text[j].isspace():
                j += 1
            tokens.append(Token(text[i:j], i, j, False))
        i = j
    return tokens


def _open_lines(source: str | Path | IO[str]) -> Iterable[tuple[int, str]]:
    if isinstance(source, (str, Path)):
        stream: IO[str] = open(source, encoding="utf-8")
    else:
        stream = source
    try:
        for lineno, line in enumerate(stream, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if line:
                yield lineno, line
    finally:
        if isinstance(source, (str, Path)):
            stream.close()


class LemmaLexicon:
    """Case-folded surface form -> lemma map with identity fallback.

    When a form is listed several times the first entry wins; lexicon files
    are expected to be pre-sorted by preference. Unknown forms lemmatize to
    their own case-folded surface, so lookup is total.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[str, str] | Iterable[tuple[str, str]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        folded: dict[str, str] = {}
        for form, lemma in items:
            key = form.casefold()
            if key not in folded:
                folded[key] = lemma.casefold()
        self._entries = folded

    def lemma(self, form: str) -> str:
        folded = form.casefold()
        return self._entries.get(folded, folded)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, form: str) -> bool:
        return form.casefold() in self._entries


def load_lemma_lexicon(source: str | Path | IO[str]) -> LemmaLexicon:
    """Load a two-column TSV (surface form, lemma), no header."""
    pairs: list[tuple[str, str]] = []
    for lineno, line in _open_lines(source):
        cols = line.split("\t")
        if len(cols) != 2:
            raise LexiconError(f"lexicon line {lineno}: expected 2 tab-separated columns, got {len(cols)}")
        pairs.append((cols[0], cols[1]))
    return LemmaLexicon(pairs)


class DerivationForest:
    """Acyclic lemma -> parent-lemma relation with precomputed roots.

    A lemma absent from the relation is its own root. Acyclicity is verified
    at construction; after that the instance is read-only and lookups are
    dictionary hits.
    """

    __slots__ = ("_parent", "_root")

    def __init__(self, parent: Mapping[str, str] | Iterable[tuple[str, str]] = ()):
        items = parent.items() if isinstance(parent, Mapping) else parent
        links: dict[str, str] = {}
        for lemma, par in items:
            lemma = lemma.casefold()
            par = par.casefold()
            existing = links.get(lemma)
            if existing is not None and existing != par:
                raise LexiconError(
                    f"conflicting parents for lemma {lemma!r}: {existing!r} and {par!r}"
                )
            links[lemma] = par
        self._parent = links
        self._root = self._resolve_roots(links)

    @staticmethod
    def _resolve_roots(links: dict[str, str]) -> dict[str, str]:
        roots: dict[str, str] = {}
        for start in links:
            if start in roots:
                continue
            path: list[str] = []
            on_path: set[str] = set()
            cur = start
            while True:
                if cur in on_path:
                    raise CycleError(cur)
                if cur in roots:
                    root = roots[cur]
                    break
                if cur not in links:
                    root = cur
                    break
                on_path.add(cur)
                path.append(cur)
                cur = links[cur]
            for lemma in path:
                roots[lemma] = root
        return roots

    def root_of(self, lemma: str) -> str:
        """The parent-chain fixed point; lemmas outside the forest return themselves."""
        folded = lemma.casefold()
        return self._root.get(folded, folded)

    def parent_of(self, lemma: str) -> str | None:
        return self._parent.get(lemma.casefold())

    def __len__(self) -> int:
        return len(self._parent)

    def __contains__(self, lemma: str) -> bool:
        return lemma.casefold() in self._parent


def load_derivation_forest(source: str | Path | IO[str]) -> DerivationForest:
    """Load a TSV of ``lemma<TAB>parent`` rows; a lone lemma declares a root.

    Duplicate rows must agree: a lemma declared both as a root and as a child
    (or with two different parents) is an error. Cycles are rejected.
    """
    declared: dict[str, str | None] = {}
    order: list[tuple[str, str]] = []
    for lineno, line in _open_lines(source):
        cols = line.split("\t")
        if len(cols) == 1:
            lemma, parent = cols[0], None
        elif len(cols) == 2:
            lemma, parent = cols[0], (cols[1] or None)
        else:
            raise LexiconError(f"forest line {lineno}: expected 1 or 2 columns, got {len(cols)}")
        key = lemma.casefold()
        value = parent.casefold() if parent is not None else None
        if key in declared and declared[key] != value:
            raise LexiconError(f"forest line {lineno}: conflicting entries for lemma {lemma!r}")
        declared[key] = value
        if value is not None:
            order.append((key, value))
    return DerivationForest(order)


@dataclass(frozen=True)
class Normalizer:
    """Maps text to root strings: raw surfaces, lemmas, or derivation roots.

    mode=raw ignores the lexicon and forest; mode=lemma ignores the forest.
    Instances are immutable and shareable across worker threads.
    """

    mode: str = "raw"
    lexicon: LemmaLexicon = field(default_factory=LemmaLexicon)
    forest: DerivationForest = field(default_factory=DerivationForest)

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown normalization mode {self.mode!r}; expected one of {MODES}")

    def normalize_word(self, surface: str) -> str:
        folded = surface.casefold()
        if self.mode == "raw":
            return folded
        lemma = self.lexicon.lemma(folded)
        if self.mode == "lemma":
            return lemma
        return self.forest.root_of(lemma)

    def normalize_text(self, text: str) -> list[str]:
        """Normalized word tokens, in order; non-word tokens are dropped."""
        return [self.normalize_word(t.surface) for t in tokenize(text) if t.is_word]

    def annotate(self, text: str) -> list[Token]:
        """Word tokens of ``text`` with the ``root`` field filled in."""
        return [
            replace(t, root=self.normalize_word(t.surface))
            for t in tokenize(text)
            if t.is_word
        ]


def normalize_text(text: str, normalizer: Normalizer) -> list[str]:
    return normalizer.normalize_text(text)
