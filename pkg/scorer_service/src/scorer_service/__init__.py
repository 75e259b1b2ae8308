"""Relevance scoring microservice: one trainable pairwise head per model
name (vbd, cp, pp, np, rp), served over POST /score."""

from .app import create_app
from .model import (LabeledPair, PairwiseHead, TrainConfig, TrainingError,
                    finetune, pairwise_accuracy)
from .store import ModelStore, UnknownModelError

__version__ = "0.1.0"
