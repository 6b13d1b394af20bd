"""Run configuration for fine-tuning and inference."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class HarnessConfig:
    """Hyperparameters; the defaults are the base-model recipe.

    Large models conventionally train with a lower learning rate and longer
    warm-up: use ``for_large_model`` (lr 1.5e-5, warm-up 500, batch 32).
    """

    model_name: str = "bert-base-multilingual-cased"
    epochs: int = 2
    learning_rate: float = 2e-5
    warmup_steps: int = 256
    batch_size: int = 16
    max_seq_length: int = 384
    doc_stride: int = 128
    max_answer_length: int = 30
    max_train_questions: int | None = None
    seed: int = 42
    device: str = "cpu"

    def for_large_model(self) -> "HarnessConfig":
        return replace(self, learning_rate=1.5e-5, warmup_steps=500, batch_size=32)
