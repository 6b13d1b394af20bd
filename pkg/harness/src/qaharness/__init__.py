"""Toy-scale fine-tuning and inference for extractive QA encoders."""

from .config import HarnessConfig
from .data import QaExample, read_squad_file
from .predict import predict, write_predictions
from .train import train

__version__ = "0.1.0"
