"""Inference: best-span extraction with optional no-answer decisions."""

from __future__ import annotations

import json
from pathlib import Path

import torch
from transformers import AutoModelForQuestionAnswering, AutoTokenizer

from .config import HarnessConfig
from .data import encode_eval_features, read_squad_file


def _best_span_in_window(start_logits, end_logits, window, max_answer_length: int):
    """Best (score, start_char, end_char) inside one window, plus the null score."""
    context = torch.tensor(window["context_mask"], dtype=torch.bool)
    offsets = window["offsets"]
    # Padding rows carry (0, 0) offsets; exclude them from candidate spans.
    real = torch.tensor([o[1] > o[0] for o in offsets], dtype=torch.bool)
    valid = context & real
    cls_index = window["cls_index"]
    null_score = (start_logits[cls_index] + end_logits[cls_index]).item()
    if not bool(valid.any()):
        return None, null_score
    scores = start_logits[:, None] + end_logits[None, :]
    n = scores.shape[0]
    # end >= start and span length <= max_answer_length tokens
    length_ok = torch.triu(torch.ones(n, n, dtype=torch.bool)) & ~torch.triu(
        torch.ones(n, n, dtype=torch.bool), diagonal=max_answer_length
    )
    mask = length_ok & valid[:, None] & valid[None, :]
    scores = scores.masked_fill(~mask, float("-inf"))
    flat = torch.argmax(scores)
    start_token = int(flat // n)
    end_token = int(flat % n)
    best = scores[start_token, end_token].item()
    if best == float("-inf"):
        return None, null_score
    return (best, offsets[start_token][0], offsets[end_token][1]), null_score


def predict(
    checkpoint: str | Path,
    dev_file: str | Path,
    no_answer: bool = False,
    cfg: HarnessConfig = HarnessConfig(),
    batch_size: int = 32,
) -> dict[str, str]:
    """One prediction per question id, ready for the dataset evaluator.

    With ``no_answer`` enabled a question answers with the empty string when
    its best null score beats the best span score; disabled, every question
    gets its best non-null span.
    """
    try:
        tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        model = AutoModelForQuestionAnswering.from_pretrained(checkpoint)
    except Exception as exc:
        raise RuntimeError(f"could not load checkpoint {checkpoint!r}: {exc}") from exc
    device = torch.device(cfg.device)
    model.to(device)
    model.eval()

    examples = read_squad_file(dev_file)
    tensors, windows = encode_eval_features(examples, tokenizer, cfg.max_seq_length, cfg.doc_stride)

    best_span: dict[int, tuple[float, int, int]] = {}
    best_null: dict[int, float] = {}
    with torch.no_grad():
        for begin in range(0, tensors["input_ids"].shape[0], batch_size):
            batch_ids = tensors["input_ids"][begin : begin + batch_size].to(device)
            batch_mask = tensors["attention_mask"][begin : begin + batch_size].to(device)
            out = model(input_ids=batch_ids, attention_mask=batch_mask)
            for row in range(batch_ids.shape[0]):
                window = windows[begin + row]
                sample = window["sample_index"]
                span, null_score = _best_span_in_window(
                    out.start_logits[row].cpu(),
                    out.end_logits[row].cpu(),
                    window,
                    cfg.max_answer_length,
                )
                if sample not in best_null or null_score < best_null[sample]:
                    best_null[sample] = null_score
                if span is not None and (sample not in best_span or span > best_span[sample]):
                    best_span[sample] = span

    predictions: dict[str, str] = {}
    for index, example in enumerate(examples):
        span = best_span.get(index)
        if span is None:
            predictions[example.qid] = ""
            continue
        score, start_char, end_char = span
        text = example.context[start_char:end_char]
        if no_answer and best_null[index] > score:
            text = ""
        predictions[example.qid] = text
    return predictions


def write_predictions(predictions: dict[str, str], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(predictions, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )
