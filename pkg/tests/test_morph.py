from __future__ import annotations

import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from squadmt import (
    CycleError,
    DerivationForest,
    LemmaLexicon,
    LexiconError,
    Normalizer,
    load_derivation_forest,
    load_lemma_lexicon,
    tokenize,
)

TEXT_ALPHABET = "abcdefghxyzáčďéěíňóřšťúůý ABC 0123456789 .,!?-–„“()'\"\t\n"


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_example_words_and_punctuation():
    tokens = tokenize("modrá obloha.")
    assert [(t.surface, t.start, t.end, t.is_word) for t in tokens] == [
        ("modrá", 0, 5, True),
        ("obloha", 6, 12, True),
        (".", 12, 13, False),
    ]


def test_tokenize_numbers_are_word_tokens():
    tokens = tokenize("rok 1918!")
    assert [(t.surface, t.is_word) for t in tokens] == [("rok", True), ("1918", True), ("!", False)]


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet=TEXT_ALPHABET, max_size=80))
def test_tokenize_offsets_reconstruct_input(text):
    tokens = tokenize(text)
    # Offsets are exact and tokens are ordered and non-overlapping.
    pos = 0
    rebuilt = []
    for token in tokens:
        assert token.start >= pos
        assert text[token.start : token.end] == token.surface
        assert token.start < token.end
        rebuilt.append(text[pos : token.start])
        rebuilt.append(token.surface)
        pos = token.end
    rebuilt.append(text[pos:])
    assert "".join(rebuilt) == text
    # Everything skipped between tokens is whitespace.
    gap_chars = set()
    pos = 0
    for token in tokens:
        gap_chars.update(text[pos : token.start])
        pos = token.end
    gap_chars.update(text[pos:])
    assert all(ch.isspace() for ch in gap_chars)
    # Word tokens are maximal alphanumeric runs.
    for token in tokens:
        if token.is_word:
            assert all(ch.isalnum() for ch in token.surface)
            if token.start > 0:
                assert not text[token.start - 1].isalnum()
            if token.end < len(text):
                assert not text[token.end].isalnum()


def test_tokenize_reconstruction_fuzz_10k():
    # Oracle: string identity after splicing surfaces back between the gaps.
    rng = random.Random(60606)
    alphabet = TEXT_ALPHABET + "𝄞"
    for _ in range(10_000):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
        pos = 0
        parts = []
        for token in tokenize(text):
            parts.append(text[pos : token.start])
            parts.append(token.surface)
            pos = token.end
        parts.append(text[pos:])
        assert "".join(parts) == text


def test_lexicon_lookup_and_identity_fallback():
    lexicon = LemmaLexicon({"Kočky": "kočka"})
    assert lexicon.lemma("kočky") == "kočka"
    assert lexicon.lemma("KOČKY") == "kočka"
    assert lexicon.lemma("pes") == "pes"
    assert lexicon.lemma("Pes") == "pes"


def test_lexicon_first_entry_wins():
    lexicon = LemmaLexicon([("je", "být"), ("je", "on")])
    assert lexicon.lemma("je") == "být"


def test_load_lemma_lexicon_rejects_bad_rows():
    with pytest.raises(LexiconError, match="line 2"):
        load_lemma_lexicon(io.StringIO("kočky\tkočka\nbroken row\n"))


def test_load_lemma_lexicon_from_stream():
    lexicon = load_lemma_lexicon(io.StringIO("Kočky\tkočka\npsi\tpes\n"))
    assert len(lexicon) == 2
    assert lexicon.lemma("PSI") == "pes"


def test_forest_chain_and_identity():
    forest = load_derivation_forest(io.StringIO("b\ta\nc\tb\n"))
    assert forest.root_of("c") == "a"
    assert forest.root_of("b") == "a"
    assert forest.root_of("a") == "a"
    assert forest.root_of("zzz") == "zzz"


def test_forest_two_cycle_rejected():
    with pytest.raises(CycleError) as excinfo:
        load_derivation_forest(io.StringIO("a\tb\nb\ta\n"))
    assert excinfo.value.lemma in ("a", "b")


def test_forest_self_loop_rejected():
    with pytest.raises(CycleError):
        DerivationForest({"a": "a"})


def test_forest_root_only_row():
    forest = load_derivation_forest(io.StringIO("x\n"))
    assert forest.root_of("x") == "x"


def test_forest_conflicting_parents_rejected():
    with pytest.raises(LexiconError, match="conflict"):
        load_derivation_forest(io.StringIO("a\tb\na\tc\n"))
    with pytest.raises(LexiconError, match="conflict"):
        DerivationForest([("a", "b"), ("a", "c")])


def test_forest_duplicate_identical_rows_allowed():
    forest = load_derivation_forest(io.StringIO("a\tb\na\tb\n"))
    assert forest.root_of("a") == "b"


def test_forest_bad_column_count():
    with pytest.raises(LexiconError, match="line 1"):
        load_derivation_forest(io.StringIO("a\tb\tc\n"))


def _random_acyclic_forest(rng: random.Random, size: int) -> dict[str, str]:
    lemmas = [f"l{i}" for i in range(size)]
    parent: dict[str, str] = {}
    for i in range(1, size):
        if rng.random() < 0.8:
            parent[lemmas[i]] = lemmas[rng.randrange(i)]
    return parent


def _naive_root(lemma: str, parent: dict[str, str]) -> str:
    while lemma in parent:
        lemma = parent[lemma]
    return lemma


def test_root_of_matches_naive_walk_on_random_forests():
    rng = random.Random(20240)
    for _ in range(200):
        parent = _random_acyclic_forest(rng, rng.randint(1, 30))
        forest = DerivationForest(parent)
        for lemma in list(parent) + ["unknown"]:
            expected = _naive_root(lemma, parent)
            assert forest.root_of(lemma) == expected
            # Idempotence and the no-parent postcondition.
            assert forest.root_of(forest.root_of(lemma)) == forest.root_of(lemma)
            assert forest.root_of(lemma) not in parent


def test_seeded_cycles_always_detected():
    rng = random.Random(777)
    for _ in range(200):
        parent = _random_acyclic_forest(rng, rng.randint(2, 25))
        lemmas = sorted({*parent, *parent.values()} | {"c0", "c1"})
        # Seed a cycle by linking a chain root back to a random descendant.
        cycle_members = [lemmas[rng.randrange(len(lemmas))]]
        root = _naive_root(cycle_members[0], parent)
        parent[root] = cycle_members[0] if root != cycle_members[0] else root
        with pytest.raises(CycleError):
            DerivationForest(parent)


def _czech_normalizer(mode: str) -> Normalizer:
    lexicon = LemmaLexicon({"učitelka": "učitelka", "kočky": "kočka", "the": "the"})
    forest = DerivationForest({"učitelka": "učit", "kočka": "kočka-root"})
    return Normalizer(mode=mode, lexicon=lexicon, forest=forest)


def test_normalize_empty_text():
    for mode in ("raw", "lemma", "root"):
        assert _czech_normalizer(mode).normalize_text("") == []


def test_normalize_raw_casefolds_and_drops_punctuation():
    assert Normalizer().normalize_text("The Cat!") == ["the", "cat"]


def test_normalize_root_composes_lexicon_and_forest():
    # Oracle: manual composition of the two lookups.
    normalizer = Normalizer(
        mode="root",
        lexicon=LemmaLexicon({"učitelka": "učitelka"}),
        forest=DerivationForest({"učitelka": "učit"}),
    )
    assert normalizer.normalize_text("Učitelka!") == ["učit"]


def test_normalize_lemma_ignores_forest():
    assert _czech_normalizer("lemma").normalize_text("Kočky!") == ["kočka"]
    assert _czech_normalizer("root").normalize_text("Kočky!") == ["kočka-root"]


def test_normalize_preserves_word_token_count():
    for mode in ("raw", "lemma", "root"):
        normalizer = _czech_normalizer(mode)
        text = "Učitelka má kočky, 12 psů a žirafu!"
        words = [t for t in tokenize(text) if t.is_word]
        assert len(normalizer.normalize_text(text)) == len(words)


def test_annotate_fills_roots():
    tokens = _czech_normalizer("root").annotate("Učitelka spí.")
    assert [(t.surface, t.root) for t in tokens] == [("Učitelka", "učit"), ("spí", "spí")]


def test_unknown_mode_rejected():
    with pytest.raises(ValueError, match="mode"):
        Normalizer(mode="stem")


@st.composite
def coherent_resources(draw):
    """Lexicon/forest pair where every lemma is its own lexicon entry.

    Real lexicons list base forms as entries of themselves, which is what
    makes root-level normalization idempotent.
    """
    lemmas = draw(
        st.lists(
            st.text(alphabet="abcdefპრž", min_size=1, max_size=6).map(str.casefold),
            min_size=1,
            max_size=8,
            unique=True,
        )
    )
    parent = {}
    for i in range(1, len(lemmas)):
        if draw(st.booleans()):
            parent[lemmas[i]] = lemmas[draw(st.integers(0, i - 1))]
    entries = {lemma: lemma for lemma in lemmas}
    for i, lemma in enumerate(lemmas):
        form = f"{lemma}ou"
        entries.setdefault(form, lemma)
    return LemmaLexicon(entries), DerivationForest(parent), lemmas


@settings(max_examples=120, deadline=None)
@given(coherent_resources(), st.integers(0, 5))
def test_normalize_text_idempotent_all_modes(resources, n_words):
    lexicon, forest, lemmas = resources
    rng = random.Random(n_words * 31 + len(lemmas))
    words = [rng.choice(lemmas) + rng.choice(["", "ou"]) for _ in range(n_words)]
    text = " ".join(words)
    for mode in ("raw", "lemma", "root"):
        normalizer = Normalizer(mode=mode, lexicon=lexicon, forest=forest)
        once = normalizer.normalize_text(text)
        assert normalizer.normalize_text(" ".join(once)) == once
