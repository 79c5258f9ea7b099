"""Encoder-decoder transducer: configuration, numpy network with manual
gradients, training, decoding, checkpointing, and gradient verification.
"""

from .checkpoint import (
    checkpoint_meta,
    load_checkpoint,
    save_checkpoint,
    verify_vocab_compatible,
)
from .config import ModelConfig, TrainConfig
from .decoding import DecodeResult, beam_decode, greedy_decode
from .gradcheck import GradCheckResult, gradient_check
from .network import TransducerModel, build_model, forward, parameter_count
from .training import EpochStats, TrainResult, next_token_accuracy, train

__all__ = [
    "ModelConfig",
    "TrainConfig",
    "TransducerModel",
    "build_model",
    "forward",
    "parameter_count",
    "train",
    "TrainResult",
    "EpochStats",
    "next_token_accuracy",
    "greedy_decode",
    "beam_decode",
    "DecodeResult",
    "save_checkpoint",
    "load_checkpoint",
    "checkpoint_meta",
    "verify_vocab_compatible",
    "gradient_check",
    "GradCheckResult",
]
