"""SQuAD-format file reading and feature encoding for span-prediction models.

The harness talks to the rest of the toolchain through files only: SQuAD JSON
in, prediction JSON out. Long contexts become overlapping windows (documents
strided by ``doc_stride``); answers that fall outside a window are labelled
with the CLS position, as are unanswerable questions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import torch


@dataclass(frozen=True)
class QaExample:
    qid: str
    question: str
    context: str
    answer_text: str
    answer_start: int  # -1 for unanswerable
    unanswerable: bool


def read_squad_file(path: str | Path, limit: int | None = None) -> list[QaExample]:
    """Flatten a SQuAD JSON file into examples; duplicate ids are an error."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    obj = json.loads(path.read_text(encoding="utf-8"))
    examples: list[QaExample] = []
    seen: set[str] = set()
    for article in obj["data"]:
        for paragraph in article["paragraphs"]:
            context = paragraph["context"]
            for qa in paragraph["qas"]:
                qid = qa["id"]
                if qid in seen:
                    raise ValueError(f"duplicate question id {qid!r} in {path}")
                seen.add(qid)
                unanswerable = bool(qa.get("is_impossible", False))
                answers = qa.get("answers", [])
                if unanswerable or not answers:
                    examples.append(
                        QaExample(qid, qa["question"], context, "", -1, unanswerable or not answers)
                    )
                else:
                    first = answers[0]
                    examples.append(
                        QaExample(
                            qid, qa["question"], context,
                            first["text"], int(first["answer_start"]), False,
                        )
                    )
                if limit is not None and len(examples) >= limit:
                    return examples
    return examples


def encode_training_features(examples, tokenizer, max_seq_length: int, doc_stride: int):
    """Tokenize into windows and label token-level answer spans."""
    encoded = tokenizer(
        [e.question for e in examples],
        [e.context for e in examples],
        truncation="only_second",
        max_length=max_seq_length,
        stride=doc_stride,
        return_overflowing_tokens=True,
        return_offsets_mapping=True,
        padding="max_length",
    )
    start_positions: list[int] = []
    end_positions: list[int] = []
    for window, sample_index in enumerate(encoded["overflow_to_sample_mapping"]):
        example = examples[sample_index]
        offsets = encoded["offset_mapping"][window]
        sequence_ids = encoded.sequence_ids(window)
        cls_index = encoded["input_ids"][window].index(tokenizer.cls_token_id)
        if example.unanswerable or not example.answer_text:
            start_positions.append(cls_index)
            end_positions.append(cls_index)
            continue
        start_char = example.answer_start
        end_char = start_char + len(example.answer_text)
        context_start = sequence_ids.index(1)
        context_end = len(sequence_ids) - 1 - sequence_ids[::-1].index(1)
        if offsets[context_start][0] > start_char or offsets[context_end][1] < end_char:
            start_positions.append(cls_index)
            end_positions.append(cls_index)
            continue
        token_start = context_start
        while token_start <= context_end and offsets[token_start][1] <= start_char:
            token_start += 1
        token_end = context_end
        while token_end >= context_start and offsets[token_end][0] >= end_char:
            token_end -= 1
        if token_start > token_end:
            start_positions.append(cls_index)
            end_positions.append(cls_index)
        else:
            start_positions.append(token_start)
            end_positions.append(token_end)
    return {
        "input_ids": torch.tensor(encoded["input_ids"], dtype=torch.long),
        "attention_mask": torch.tensor(encoded["attention_mask"], dtype=torch.long),
        "start_positions": torch.tensor(start_positions, dtype=torch.long),
        "end_positions": torch.tensor(end_positions, dtype=torch.long),
    }


def encode_eval_features(examples, tokenizer, max_seq_length: int, doc_stride: int):
    """Tokenize into windows, keeping everything needed to map spans back to text."""
    encoded = tokenizer(
        [e.question for e in examples],
        [e.context for e in examples],
        truncation="only_second",
        max_length=max_seq_length,
        stride=doc_stride,
        return_overflowing_tokens=True,
        return_offsets_mapping=True,
        padding="max_length",
    )
    windows = []
    for window, sample_index in enumerate(encoded["overflow_to_sample_mapping"]):
        sequence_ids = encoded.sequence_ids(window)
        windows.append(
            {
                "sample_index": sample_index,
                "offsets": encoded["offset_mapping"][window],
                "context_mask": [sid == 1 for sid in sequence_ids],
                "cls_index": encoded["input_ids"][window].index(tokenizer.cls_token_id),
            }
        )
    tensors = {
        "input_ids": torch.tensor(encoded["input_ids"], dtype=torch.long),
        "attention_mask": torch.tensor(encoded["attention_mask"], dtype=torch.long),
    }
    return tensors, windows
