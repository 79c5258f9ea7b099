"""Finite-difference verification of the hand-written backward pass.

Central differences are always evaluated in float64 (casting a copy of the
parameters up) so the oracle's own noise never masks an implementation bug;
the analytic gradients under test stay at the model's dtype. Per-coordinate
relative error is |a - n| / max(|a|, |n|, floor), the floor acknowledging
that near-zero gradients can only be checked to absolute precision.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .config import ModelConfig
from .network import TransducerModel, loss_and_grads
from .training import Pair, make_batch


@dataclass
class GradCheckResult:
    max_rel_error: float
    worst_param: str | None
    per_param: dict[str, float]
    samples: int


def _loss(params, cfg: ModelConfig, batch) -> float:
    src, dec_in, labels = batch
    loss, _, _ = loss_and_grads(
        params, cfg, src, dec_in, labels, train=False, compute_grads=False
    )
    return loss


def gradient_check(
    model: TransducerModel,
    pairs: list[Pair],
    epsilon: float = 1e-5,
    n_samples: int = 200,
    seed: int = 0,
    floor: float | None = None,
    analytic_grads: dict[str, np.ndarray] | None = None,
) -> GradCheckResult:
    """Compare analytic gradients against central differences on a random
    subsample of parameter coordinates.

    ``analytic_grads`` may be supplied to audit an external gradient dict
    (tests corrupt one tensor and expect it named). A zero-coordinate
    request is defined as error 0.
    """
    cfg = model.config
    batch = make_batch(pairs, cfg)
    if analytic_grads is None:
        src, dec_in, labels = batch
        _, analytic_grads, _ = loss_and_grads(
            model.params, cfg, src, dec_in, labels, train=False
        )
    if floor is None:
        floor = 1e-2 if cfg.dtype == "float32" else 1e-4

    if n_samples <= 0:
        return GradCheckResult(0.0, None, {}, 0)

    params64 = {k: v.astype(np.float64) for k, v in model.params.items()}
    cfg64 = replace(cfg, dtype="float64")

    names = sorted(params64)
    sizes = np.array([params64[n].size for n in names], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    rng = np.random.default_rng(seed)
    k = min(n_samples, total)
    flat_indices = rng.choice(total, size=k, replace=False)

    per_param: dict[str, float] = {}
    max_err = 0.0
    worst: str | None = None
    for flat in sorted(int(i) for i in flat_indices):
        which = int(np.searchsorted(offsets, flat, side="right") - 1)
        name = names[which]
        idx = flat - int(offsets[which])
        original = params64[name].flat[idx]
        params64[name].flat[idx] = original + epsilon
        loss_plus = _loss(params64, cfg64, batch)
        params64[name].flat[idx] = original - epsilon
        loss_minus = _loss(params64, cfg64, batch)
        params64[name].flat[idx] = original
        numeric = (loss_plus - loss_minus) / (2.0 * epsilon)
        analytic = float(analytic_grads[name].flat[idx])
        denom = max(abs(analytic), abs(numeric), floor)
        err = abs(analytic - numeric) / denom
        if err > per_param.get(name, 0.0):
            per_param[name] = err
        if err > max_err:
            max_err = err
            worst = name
    return GradCheckResult(
        max_rel_error=max_err, worst_param=worst, per_param=per_param, samples=k
    )
