"""Fine-tune a pretrained span-prediction encoder on a SQuAD-format file."""

from __future__ import annotations

import logging
import random
from pathlib import Path

import torch
from torch.optim import AdamW
from torch.optim.lr_scheduler import LambdaLR
from torch.utils.data import DataLoader, TensorDataset
from transformers import AutoModelForQuestionAnswering, AutoTokenizer

from .config import HarnessConfig
from .data import encode_training_features, read_squad_file

logger = logging.getLogger(__name__)


def set_seed(seed: int) -> None:
    random.seed(seed)
    torch.manual_seed(seed)


def load_model_and_tokenizer(model_name: str):
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_name)
        model = AutoModelForQuestionAnswering.from_pretrained(model_name)
    except Exception as exc:
        raise RuntimeError(f"could not load model {model_name!r}: {exc}") from exc
    return model, tokenizer


def _linear_warmup_then_decay(warmup_steps: int, total_steps: int):
    def factor(step: int) -> float:
        if step < warmup_steps:
            return step / max(1, warmup_steps)
        remaining = max(1, total_steps - warmup_steps)
        return max(0.0, (total_steps - step) / remaining)

    return factor


def train(cfg: HarnessConfig, train_file: str | Path, output_dir: str | Path) -> Path:
    """Fine-tune and save a checkpoint directory; returns its path.

    ``cfg.max_train_questions`` truncates the dataset for desk-scale runs.
    With ``epochs=0`` the checkpoint is the pretrained initialization. The
    per-step training loss is logged and written next to the checkpoint.
    """
    set_seed(cfg.seed)
    examples = read_squad_file(train_file, limit=cfg.max_train_questions)
    model, tokenizer = load_model_and_tokenizer(cfg.model_name)
    device = torch.device(cfg.device)
    model.to(device)

    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    losses: list[float] = []

    if cfg.epochs > 0:
        features = encode_training_features(
            examples, tokenizer, cfg.max_seq_length, cfg.doc_stride
        )
        dataset = TensorDataset(
            features["input_ids"],
            features["attention_mask"],
            features["start_positions"],
            features["end_positions"],
        )
        generator = torch.Generator().manual_seed(cfg.seed)
        loader = DataLoader(
            dataset, batch_size=cfg.batch_size, shuffle=True, generator=generator
        )
        total_steps = max(1, len(loader) * cfg.epochs)
        optimizer = AdamW(model.parameters(), lr=cfg.learning_rate)
        scheduler = LambdaLR(
            optimizer, _linear_warmup_then_decay(cfg.warmup_steps, total_steps)
        )
        model.train()
        step = 0
        for epoch in range(cfg.epochs):
            for input_ids, attention_mask, starts, ends in loader:
                optimizer.zero_grad()
                out = model(
                    input_ids=input_ids.to(device),
                    attention_mask=attention_mask.to(device),
                    start_positions=starts.to(device),
                    end_positions=ends.to(device),
                )
                out.loss.backward()
                optimizer.step()
                scheduler.step()
                step += 1
                loss = out.loss.item()
                losses.append(loss)
                logger.info("epoch %d step %d/%d loss %.4f", epoch + 1, step, total_steps, loss)

    model.save_pretrained(output_dir)
    tokenizer.save_pretrained(output_dir)
    log_path = output_dir / "loss_log.tsv"
    log_path.write_text(
        "step\tloss\n" + "".join(f"{i + 1}\t{loss:.6f}\n" for i, loss in enumerate(losses)),
        encoding="utf-8",
    )
    logger.info("checkpoint saved to %s (%d training steps)", output_dir, len(losses))
    return output_dir
