from __future__ import annotations

import json
import os
from pathlib import Path

import pytest

from squadmt import parse_dataset

REPO_ROOT = Path(__file__).resolve().parent.parent

# Real files enable the full acceptance criteria. Place (or symlink) the
# official dev-v1.1.json / dev-v2.0.json there, or point SQUAD_DATA_DIR at a
# directory that has them.
DATA_DIR = Path(os.environ.get("SQUAD_DATA_DIR", REPO_ROOT / "data"))


def data_file(name: str) -> Path:
    path = DATA_DIR / name
    if not path.exists():
        pytest.skip(
            f"real dataset {name} not present (looked in {DATA_DIR}); "
            f"set SQUAD_DATA_DIR or drop the file into data/ to enable this check"
        )
    return path


@pytest.fixture
def dev11_path() -> Path:
    return data_file("dev-v1.1.json")


@pytest.fixture
def dev20_path() -> Path:
    return data_file("dev-v2.0.json")


def minimal_v11_obj() -> dict:
    return {
        "version": "1.1",
        "data": [
            {
                "title": "Sky",
                "paragraphs": [
                    {
                        "context": "The sky is blue in summer.",
                        "qas": [
                            {
                                "id": "q1",
                                "question": "What colour is the sky?",
                                "answers": [{"text": "blue", "answer_start": 11}],
                            }
                        ],
                    }
                ],
            }
        ],
    }


def small_v2_obj() -> dict:
    return {
        "version": "v2.0",
        "data": [
            {
                "title": "Rivers",
                "paragraphs": [
                    {
                        "context": "The Vltava flows through Prague and joins the Elbe.",
                        "qas": [
                            {
                                "id": "r1",
                                "question": "Which river flows through Prague?",
                                "answers": [{"text": "Vltava", "answer_start": 4}],
                                "is_impossible": False,
                            },
                            {
                                "id": "r2",
                                "question": "Which river flows through Paris?",
                                "answers": [],
                                "is_impossible": True,
                                "plausible_answers": [{"text": "Vltava", "answer_start": 4}],
                            },
                        ],
                    },
                    {
                        "context": "Brno lies on the Svratka river in Moravia.",
                        "qas": [
                            {
                                "id": "r3",
                                "question": "Where does Brno lie?",
                                "answers": [
                                    {"text": "on the Svratka river", "answer_start": 10},
                                    {"text": "Svratka", "answer_start": 17},
                                ],
                                "is_impossible": False,
                            }
                        ],
                    },
                ],
            }
        ],
    }


@pytest.fixture
def minimal_v11():
    return parse_dataset(json.dumps(minimal_v11_obj()))


@pytest.fixture
def small_v2():
    return parse_dataset(json.dumps(small_v2_obj()))
