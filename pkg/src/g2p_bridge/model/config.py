"""Model and training hyperparameter containers.

Defaults mirror the production-scale recipe (5+5 layers, 8 heads, FFN 1024,
hidden 512, positional dimension 256, dropout 0.3, batch 32, lr 2e-4, 50
epochs with early stopping); tests and demos shrink them.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from ..errors import InvalidConfig

_DTYPES = ("float32", "float64")


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    encoder_layers: int = 5
    decoder_layers: int = 5
    attention_heads: int = 8
    feedforward_dim: int = 1024
    hidden_size: int = 512
    pos_embedding_dim: int = 256
    dropout: float = 0.3
    max_sequence_length: int = 256
    dtype: str = "float32"

    def __post_init__(self):
        counts = {
            "vocab_size": self.vocab_size,
            "encoder_layers": self.encoder_layers,
            "decoder_layers": self.decoder_layers,
            "attention_heads": self.attention_heads,
            "feedforward_dim": self.feedforward_dim,
            "hidden_size": self.hidden_size,
            "pos_embedding_dim": self.pos_embedding_dim,
            "max_sequence_length": self.max_sequence_length,
        }
        for name, value in counts.items():
            if not isinstance(value, int) or value < 1:
                raise InvalidConfig(f"{name} must be a positive integer, got {value!r}")
        if self.hidden_size % self.attention_heads != 0:
            raise InvalidConfig(
                f"hidden_size {self.hidden_size} is not divisible by "
                f"attention_heads {self.attention_heads}"
            )
        if not 0.0 <= self.dropout < 1.0:
            raise InvalidConfig(f"dropout must be in [0, 1), got {self.dropout}")
        if self.dtype not in _DTYPES:
            raise InvalidConfig(f"dtype must be one of {_DTYPES}, got {self.dtype!r}")

    @property
    def head_dim(self) -> int:
        return self.hidden_size // self.attention_heads

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        return cls(**data)


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 32
    learning_rate: float = 2e-4
    max_epochs: int = 50
    early_stop_patience: int = 5
    seed: int = 0
    label_smoothing: float = 0.0

    def __post_init__(self):
        if self.batch_size < 1:
            raise InvalidConfig(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise InvalidConfig(
                f"learning_rate must be positive, got {self.learning_rate}"
            )
        if self.max_epochs < 1:
            raise InvalidConfig(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.early_stop_patience < 1:
            raise InvalidConfig(
                f"early_stop_patience must be >= 1, got {self.early_stop_patience}"
            )
        if not 0.0 <= self.label_smoothing < 1.0:
            raise InvalidConfig(
                f"label_smoothing must be in [0, 1), got {self.label_smoothing}"
            )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        return cls(**data)
