"""Teacher-forced training with adaptive moment estimation and early
stopping on validation loss.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import DivergedLoss, SequenceTooLong
from ..tokenizer import BOS_ID, EOS_ID, PAD_ID
from .config import ModelConfig, TrainConfig
from .network import TransducerModel, loss_and_grads

log = logging.getLogger("g2p_bridge.train")

Pair = tuple[list[int], list[int]]


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float


@dataclass
class TrainResult:
    model: TransducerModel
    history: list[EpochStats] = field(default_factory=list)
    best_epoch: int = 0
    stopped_early: bool = False


def make_batch(pairs: list[Pair], cfg: ModelConfig):
    """Pad a list of (src, tgt) id pairs into (src_ids, dec_in, labels).

    The source is framed with a trailing EOS, the decoder input with a
    leading BOS, and labels are the target shifted left with EOS appended.
    """
    s_max = max(len(s) for s, _ in pairs) + 1
    t_max = max(len(t) for _, t in pairs) + 1
    if s_max > cfg.max_sequence_length:
        raise SequenceTooLong(s_max, cfg.max_sequence_length)
    if t_max > cfg.max_sequence_length:
        raise SequenceTooLong(t_max, cfg.max_sequence_length)
    b = len(pairs)
    src = np.full((b, s_max), PAD_ID, dtype=np.int64)
    dec_in = np.full((b, t_max), PAD_ID, dtype=np.int64)
    labels = np.full((b, t_max), PAD_ID, dtype=np.int64)
    for i, (s, t) in enumerate(pairs):
        src[i, :len(s)] = s
        src[i, len(s)] = EOS_ID
        dec_in[i, 0] = BOS_ID
        dec_in[i, 1:len(t) + 1] = t
        labels[i, :len(t)] = t
        labels[i, len(t)] = EOS_ID
    return src, dec_in, labels


class AdamState:
    """Per-parameter first/second moment accumulators."""

    def __init__(self, params: dict[str, np.ndarray]):
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params, grads, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.t += 1
        b1c = 1.0 - beta1 ** self.t
        b2c = 1.0 - beta2 ** self.t
        for name, g in grads.items():
            m = self.m[name]
            v = self.v[name]
            m *= beta1
            m += (1.0 - beta1) * g
            v *= beta2
            v += (1.0 - beta2) * (g * g)
            params[name] -= lr * (m / b1c) / (np.sqrt(v / b2c) + eps)


def dataset_loss(params, cfg, pairs: list[Pair], batch_size: int) -> float:
    """Mean token cross-entropy over a dataset in eval mode."""
    total = 0.0
    count = 0
    for lo in range(0, len(pairs), batch_size):
        chunk = pairs[lo:lo + batch_size]
        src, dec_in, labels = make_batch(chunk, cfg)
        loss, _, n = loss_and_grads(
            params, cfg, src, dec_in, labels, train=False, compute_grads=False
        )
        total += loss * n
        count += n
    return total / max(count, 1)


def train(
    model: TransducerModel,
    train_pairs: list[Pair],
    tc: TrainConfig,
    val_pairs: list[Pair],
) -> TrainResult:
    """Minimize teacher-forced cross-entropy; keep the best-validation model.

    Stops at max_epochs or after ``early_stop_patience`` epochs without a
    validation improvement. Deterministic for a fixed TrainConfig.seed. The
    input model is left untouched; the result holds fresh parameters.
    """
    if not train_pairs or not val_pairs:
        raise ValueError("train and validation sets must be non-empty")
    cfg = model.config
    params = {k: v.copy() for k, v in model.params.items()}
    opt = AdamState(params)
    root = np.random.default_rng(tc.seed)
    shuffle_rng, dropout_rng = root.spawn(2)

    best_val = np.inf
    best_params = {k: v.copy() for k, v in params.items()}
    best_epoch = 0
    bad_epochs = 0
    history: list[EpochStats] = []
    stopped_early = False

    for epoch in range(1, tc.max_epochs + 1):
        order = shuffle_rng.permutation(len(train_pairs))
        total = 0.0
        count = 0
        for lo in range(0, len(order), tc.batch_size):
            chunk = [train_pairs[i] for i in order[lo:lo + tc.batch_size]]
            src, dec_in, labels = make_batch(chunk, cfg)
            loss, grads, n = loss_and_grads(
                params, cfg, src, dec_in, labels,
                train=True, rng=dropout_rng,
                label_smoothing=tc.label_smoothing,
            )
            if not np.isfinite(loss):
                raise DivergedLoss(f"non-finite loss at epoch {epoch}")
            opt.step(params, grads, tc.learning_rate)
            total += loss * n
            count += n
        train_loss = total / max(count, 1)
        val_loss = dataset_loss(params, cfg, val_pairs, tc.batch_size)
        if not np.isfinite(val_loss):
            raise DivergedLoss(f"non-finite validation loss at epoch {epoch}")
        history.append(EpochStats(epoch, train_loss, val_loss))
        log.info("epoch %d train %.4f val %.4f", epoch, train_loss, val_loss)

        if val_loss < best_val:
            best_val = val_loss
            best_params = {k: v.copy() for k, v in params.items()}
            best_epoch = epoch
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= tc.early_stop_patience:
                stopped_early = True
                break

    return TrainResult(
        model=TransducerModel(config=cfg, params=best_params),
        history=history,
        best_epoch=best_epoch,
        stopped_early=stopped_early,
    )


def next_token_accuracy(model: TransducerModel, pairs: list[Pair]) -> float:
    """Teacher-forced argmax accuracy over non-PAD label positions."""
    from .network import forward_logits

    cfg = model.config
    correct = 0
    total = 0
    for lo in range(0, len(pairs), 32):
        chunk = pairs[lo:lo + 32]
        src, dec_in, labels = make_batch(chunk, cfg)
        logits, _ = forward_logits(model.params, cfg, src, dec_in)
        pred = logits.argmax(axis=-1)
        valid = labels != PAD_ID
        correct += int(((pred == labels) & valid).sum())
        total += int(valid.sum())
    return correct / max(total, 1)
