from __future__ import annotations

import json
import random
import string
from pathlib import Path

import pytest

torch = pytest.importorskip("torch")
transformers = pytest.importorskip("transformers")

from transformers import BertConfig, BertForQuestionAnswering, BertTokenizerFast

# Synthetic vocabulary: subjects and code values the tiny model can learn to
# associate ("the code of SUBJECT is VALUE").
SUBJECTS = [f"sub{c}" for c in string.ascii_lowercase[:12]]
VALUES = [f"val{c}{d}" for c in "xyzw" for d in "01234"]
FILLER = ["lorem", "ipsum", "dolor", "amet", "porta", "vitae", "magna", "augue"]


def _synthetic_squad(n_questions: int, seed: int, unanswerable_every: int = 0) -> dict:
    """SQuAD-format object whose answers are code values at varied positions."""
    rng = random.Random(seed)
    paragraphs = []
    for i in range(n_questions):
        subject = rng.choice(SUBJECTS)
        value = rng.choice(VALUES)
        lead = " ".join(rng.choice(FILLER) for _ in range(rng.randint(0, 6)))
        tail = " ".join(rng.choice(FILLER) for _ in range(rng.randint(0, 6)))
        core = f"the code of {subject} is {value} ."
        context = " ".join(part for part in (lead, core, tail) if part)
        qa = {
            "id": f"syn{seed}-{i}",
            "question": f"what is the code of {subject} ?",
            "answers": [{"text": value, "answer_start": context.index(value)}],
        }
        if unanswerable_every and i % unanswerable_every == 0:
            qa = {
                "id": f"syn{seed}-{i}",
                "question": f"what is the code of {subject} ?",
                "answers": [],
                "is_impossible": True,
            }
        paragraphs.append({"context": context, "qas": [qa]})
    version = "v2.0" if unanswerable_every else "1.1"
    return {"version": version, "data": [{"title": "synthetic", "paragraphs": paragraphs}]}


@pytest.fixture(scope="session")
def squad_file_factory(tmp_path_factory):
    """Factory writing synthetic SQuAD files; returns their paths."""
    directory = tmp_path_factory.mktemp("squad-files")
    counter = {"n": 0}

    def make(n_questions: int, seed: int, unanswerable_every: int = 0,
             mutate=None) -> Path:
        obj = _synthetic_squad(n_questions, seed, unanswerable_every)
        if mutate is not None:
            mutate(obj)
        counter["n"] += 1
        path = directory / f"squad-{counter['n']}.json"
        path.write_text(json.dumps(obj), encoding="utf-8")
        return path

    return make


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory) -> Path:
    """A miniature pretrained-style QA encoder built entirely offline."""
    directory = tmp_path_factory.mktemp("tiny-model")
    specials = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    words = sorted({*SUBJECTS, *VALUES, *FILLER, "the", "code", "of", "is", "what", "?", "."})
    pieces = [f"##{c}" for c in string.ascii_lowercase + string.digits]
    vocab = specials + words + pieces + list(string.ascii_lowercase + string.digits)
    (directory / "vocab.txt").write_text("\n".join(vocab), encoding="utf-8")
    tokenizer = BertTokenizerFast(str(directory / "vocab.txt"), do_lower_case=True)
    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=48,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=96,
        max_position_embeddings=160,
    )
    model = BertForQuestionAnswering(config)
    model.save_pretrained(directory)
    tokenizer.save_pretrained(directory)
    return directory


@pytest.fixture(scope="session")
def train_file(squad_file_factory) -> Path:
    return squad_file_factory(200, seed=11)


@pytest.fixture(scope="session")
def heldout_file(squad_file_factory) -> Path:
    return squad_file_factory(200, seed=23)
