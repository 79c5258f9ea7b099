"""Greedy and length-normalized beam decoding.

Both run the encoder once and re-run the decoder per emitted token (no state
caching; sequences here are short). Beam width 1 reproduces greedy decoding
exactly, including tie-breaking toward the lowest token id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidBeamWidth, SequenceTooLong
from ..tokenizer import BOS_ID, EOS_ID
from .network import (
    TransducerModel,
    _softmax,
    decoder_forward,
    encoder_forward,
)


@dataclass
class DecodeResult:
    ids: list[int] = field(default_factory=list)
    truncated: bool = False
    log_prob: float = 0.0

    @property
    def normalized_score(self) -> float:
        # EOS counts as an emission; truncated outputs normalize by length.
        steps = len(self.ids) + (0 if self.truncated else 1)
        return self.log_prob / max(steps, 1)


def _prepare(model: TransducerModel, source_ids: list[int], max_len: int):
    cfg = model.config
    if len(source_ids) + 1 > cfg.max_sequence_length:
        raise SequenceTooLong(len(source_ids) + 1, cfg.max_sequence_length)
    if max_len + 1 > cfg.max_sequence_length:
        raise SequenceTooLong(max_len + 1, cfg.max_sequence_length)
    src = np.array([list(source_ids) + [EOS_ID]], dtype=np.int64)
    memory, src_mask, _ = encoder_forward(model.params, cfg, src)
    return memory, src_mask


def _next_log_probs(model, dec_ids: list[int], memory, src_mask) -> np.ndarray:
    dec_in = np.array([dec_ids], dtype=np.int64)
    logits, _ = decoder_forward(
        model.params, model.config, dec_in, memory, src_mask
    )
    probs = _softmax(logits[0, -1])
    return np.log(np.maximum(probs, np.finfo(probs.dtype).tiny))


def greedy_decode(
    model: TransducerModel, source_ids: list[int], max_len: int
) -> DecodeResult:
    """Argmax decoding until EOS or ``max_len`` tokens (then truncated=True)."""
    memory, src_mask = _prepare(model, source_ids, max_len)
    out: list[int] = []
    log_prob = 0.0
    for _ in range(max_len):
        logp = _next_log_probs(model, [BOS_ID] + out, memory, src_mask)
        token = int(np.argmax(logp))
        log_prob += float(logp[token])
        if token == EOS_ID:
            return DecodeResult(ids=out, truncated=False, log_prob=log_prob)
        out.append(token)
    return DecodeResult(ids=out, truncated=True, log_prob=log_prob)


def beam_decode(
    model: TransducerModel,
    source_ids: list[int],
    beam_width: int,
    max_len: int,
) -> DecodeResult:
    """Beam search with per-length log-probability normalization.

    Candidates are ranked by cumulative log-probability during search and by
    normalized score at the end; ties prefer lower token ids, which makes
    beam_width=1 bit-identical to greedy_decode.
    """
    if beam_width < 1:
        raise InvalidBeamWidth(beam_width)
    memory, src_mask = _prepare(model, source_ids, max_len)

    beams: list[tuple[list[int], float]] = [([], 0.0)]
    finished: list[DecodeResult] = []
    for _ in range(max_len):
        candidates: list[tuple[float, int, int, list[int]]] = []
        for b_idx, (ids, logp) in enumerate(beams):
            row = _next_log_probs(model, [BOS_ID] + ids, memory, src_mask)
            top = np.argsort(-row, kind="stable")[:beam_width]
            for token in top:
                candidates.append(
                    (logp + float(row[token]), int(token), b_idx, ids)
                )
        candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
        beams = []
        for logp, token, _, ids in candidates[:beam_width]:
            if token == EOS_ID:
                finished.append(
                    DecodeResult(ids=ids, truncated=False, log_prob=logp)
                )
            else:
                beams.append((ids + [token], logp))
        if not beams:
            break

    for ids, logp in beams:
        finished.append(DecodeResult(ids=ids, truncated=True, log_prob=logp))
    finished.sort(
        key=lambda r: (-r.normalized_score, r.truncated, r.ids)
    )
    return finished[0]
