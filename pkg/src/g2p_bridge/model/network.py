"""Attention-based encoder-decoder transducer in plain numpy, with manual
forward and backward passes.

Architecture: token embeddings plus a learned positional table (dimension
``pos_embedding_dim``) linearly projected to the residual width, pre-norm
encoder layers (self-attention, feed-forward), pre-norm decoder layers
(causal self-attention, cross-attention, feed-forward), final layer norms,
and an output projection. Dropout applies to embeddings and sublayer
outputs in train mode only.

Conventions: the source sequence is framed with a trailing EOS, the decoder
input with a leading BOS; batches are padded with PAD, which is masked out
of attention keys and of the loss.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SequenceTooLong
from ..tokenizer import BOS_ID, EOS_ID, PAD_ID
from .config import ModelConfig

_LN_EPS = 1e-5
_MASK_VALUE = -1e9


@dataclass
class TransducerModel:
    config: ModelConfig
    params: dict[str, np.ndarray]


# -- parameter table -----------------------------------------------------------

def param_specs(cfg: ModelConfig) -> list[tuple[str, tuple[int, ...], str]]:
    """Canonical (name, shape, init kind) list; order fixes rng consumption."""
    V, H = cfg.vocab_size, cfg.hidden_size
    P, F = cfg.pos_embedding_dim, cfg.feedforward_dim
    L = cfg.max_sequence_length
    specs: list[tuple[str, tuple[int, ...], str]] = [
        ("src_embed", (V, H), "embed"),
        ("tgt_embed", (V, H), "embed"),
        ("pos_table", (L, P), "embed"),
        ("pos_proj.w", (P, H), "linear"),
        ("pos_proj.b", (H,), "zero"),
    ]

    def attention(prefix: str):
        for part in ("wq", "wk", "wv", "wo"):
            specs.append((f"{prefix}.{part}", (H, H), "linear"))
        for part in ("bq", "bk", "bv", "bo"):
            specs.append((f"{prefix}.{part}", (H,), "zero"))

    def layernorm(prefix: str):
        specs.append((f"{prefix}.g", (H,), "one"))
        specs.append((f"{prefix}.b", (H,), "zero"))

    def ffn(prefix: str):
        specs.append((f"{prefix}.w1", (H, F), "linear"))
        specs.append((f"{prefix}.b1", (F,), "zero"))
        specs.append((f"{prefix}.w2", (F, H), "linear"))
        specs.append((f"{prefix}.b2", (H,), "zero"))

    for i in range(cfg.encoder_layers):
        layernorm(f"enc{i}.ln1")
        attention(f"enc{i}.attn")
        layernorm(f"enc{i}.ln2")
        ffn(f"enc{i}.ffn")
    layernorm("enc.lnf")
    for i in range(cfg.decoder_layers):
        layernorm(f"dec{i}.ln1")
        attention(f"dec{i}.self")
        layernorm(f"dec{i}.ln2")
        attention(f"dec{i}.cross")
        layernorm(f"dec{i}.ln3")
        ffn(f"dec{i}.ffn")
    layernorm("dec.lnf")
    specs.append(("out.w", (H, V), "linear"))
    specs.append(("out.b", (V,), "zero"))
    return specs


def init_params(cfg: ModelConfig, seed: int) -> dict[str, np.ndarray]:
    """Seeded init: Glorot-uniform projections, normal(0, 0.02) embeddings."""
    rng = np.random.default_rng(seed)
    dtype = np.dtype(cfg.dtype)
    params: dict[str, np.ndarray] = {}
    for name, shape, kind in param_specs(cfg):
        if kind == "embed":
            arr = rng.normal(0.0, 0.02, size=shape)
        elif kind == "linear":
            bound = np.sqrt(6.0 / (shape[0] + shape[1]))
            arr = rng.uniform(-bound, bound, size=shape)
        elif kind == "one":
            arr = np.ones(shape)
        else:
            arr = np.zeros(shape)
        params[name] = arr.astype(dtype)
    return params


def build_model(cfg: ModelConfig, seed: int) -> TransducerModel:
    """Construct a model with reproducible parameters (same seed, same bits)."""
    return TransducerModel(config=cfg, params=init_params(cfg, seed))


def parameter_count(model: TransducerModel) -> int:
    return sum(int(p.size) for p in model.params.values())


# -- primitive ops with explicit backward ---------------------------------------

def _linear_fwd(x, w, b):
    return x @ w + b, (x, w)


def _linear_bwd(dy, cache):
    x, w = cache
    x2 = x.reshape(-1, x.shape[-1])
    dy2 = dy.reshape(-1, dy.shape[-1])
    dw = x2.T @ dy2
    db = dy2.sum(axis=0)
    dx = (dy2 @ w.T).reshape(x.shape)
    return dx, dw, db


def _layernorm_fwd(x, g, b):
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + _LN_EPS)
    xhat = (x - mu) * inv
    return xhat * g + b, (xhat, inv, g)


def _layernorm_bwd(dy, cache):
    xhat, inv, g = cache
    h = xhat.shape[-1]
    dg = (dy * xhat).reshape(-1, h).sum(axis=0)
    db = dy.reshape(-1, h).sum(axis=0)
    dxhat = dy * g
    dx = inv * (
        dxhat
        - dxhat.mean(axis=-1, keepdims=True)
        - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
    )
    return dx, dg, db


def _softmax(scores):
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _dropout_fwd(x, p, train, rng):
    if not train or p <= 0.0:
        return x, None
    keep = (rng.random(x.shape) >= p).astype(x.dtype) / (1.0 - p)
    return x * keep, keep


def _dropout_bwd(dy, keep):
    return dy if keep is None else dy * keep


def _split_heads(x, n_heads):
    b, length, h = x.shape
    return x.reshape(b, length, n_heads, h // n_heads).transpose(0, 2, 1, 3)


def _merge_heads(x):
    b, n_heads, length, hd = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, length, n_heads * hd)


def _attention_fwd(params, prefix, q_in, kv_in, add_mask, n_heads):
    q, cq = _linear_fwd(q_in, params[f"{prefix}.wq"], params[f"{prefix}.bq"])
    k, ck = _linear_fwd(kv_in, params[f"{prefix}.wk"], params[f"{prefix}.bk"])
    v, cv = _linear_fwd(kv_in, params[f"{prefix}.wv"], params[f"{prefix}.bv"])
    qh = _split_heads(q, n_heads)
    kh = _split_heads(k, n_heads)
    vh = _split_heads(v, n_heads)
    scale = 1.0 / np.sqrt(qh.shape[-1])
    scores = (qh @ kh.transpose(0, 1, 3, 2)) * scale
    if add_mask is not None:
        scores = scores + add_mask
    probs = _softmax(scores)
    ctx = probs @ vh
    merged = _merge_heads(ctx)
    out, co = _linear_fwd(merged, params[f"{prefix}.wo"], params[f"{prefix}.bo"])
    return out, (cq, ck, cv, co, qh, kh, vh, probs, scale)


def _attention_bwd(dout, cache, grads, prefix):
    cq, ck, cv, co, qh, kh, vh, probs, scale = cache
    dmerged, dwo, dbo = _linear_bwd(dout, co)
    grads[f"{prefix}.wo"] += dwo
    grads[f"{prefix}.bo"] += dbo
    n_heads = qh.shape[1]
    dctx = _split_heads(dmerged, n_heads)
    dprobs = dctx @ vh.transpose(0, 1, 3, 2)
    dvh = probs.transpose(0, 1, 3, 2) @ dctx
    dscores = probs * (dprobs - (dprobs * probs).sum(axis=-1, keepdims=True))
    dqh = (dscores @ kh) * scale
    dkh = (dscores.transpose(0, 1, 3, 2) @ qh) * scale
    dq_in, dwq, dbq = _linear_bwd(_merge_heads(dqh), cq)
    dk_in, dwk, dbk = _linear_bwd(_merge_heads(dkh), ck)
    dv_in, dwv, dbv = _linear_bwd(_merge_heads(dvh), cv)
    grads[f"{prefix}.wq"] += dwq
    grads[f"{prefix}.bq"] += dbq
    grads[f"{prefix}.wk"] += dwk
    grads[f"{prefix}.bk"] += dbk
    grads[f"{prefix}.wv"] += dwv
    grads[f"{prefix}.bv"] += dbv
    return dq_in, dk_in + dv_in


def _ffn_fwd(params, prefix, x):
    h1, c1 = _linear_fwd(x, params[f"{prefix}.w1"], params[f"{prefix}.b1"])
    mask = h1 > 0
    a = h1 * mask
    h2, c2 = _linear_fwd(a, params[f"{prefix}.w2"], params[f"{prefix}.b2"])
    return h2, (c1, mask, c2)


def _ffn_bwd(dy, cache, grads, prefix):
    c1, mask, c2 = cache
    da, dw2, db2 = _linear_bwd(dy, c2)
    grads[f"{prefix}.w2"] += dw2
    grads[f"{prefix}.b2"] += db2
    dh1 = da * mask
    dx, dw1, db1 = _linear_bwd(dh1, c1)
    grads[f"{prefix}.w1"] += dw1
    grads[f"{prefix}.b1"] += db1
    return dx


# -- embedding with shared positional projection --------------------------------

def _embed_fwd(params, cfg, ids, table_name, train, rng):
    length = ids.shape[1]
    rows = params["pos_table"][:length]
    pe, c_proj = _linear_fwd(rows, params["pos_proj.w"], params["pos_proj.b"])
    x = params[table_name][ids] + pe[None, :, :]
    x, keep = _dropout_fwd(x, cfg.dropout, train, rng)
    return x, (ids, table_name, c_proj, keep, length)


def _embed_bwd(dx, cache, grads):
    ids, table_name, c_proj, keep, length = cache
    dx = _dropout_bwd(dx, keep)
    np.add.at(grads[table_name], ids, dx)
    dpe = dx.sum(axis=0)
    drows, dw, db = _linear_bwd(dpe, c_proj)
    grads["pos_proj.w"] += dw
    grads["pos_proj.b"] += db
    grads["pos_table"][:length] += drows
    return None


# -- encoder / decoder stacks ----------------------------------------------------

def _sublayer_fwd(x, sub_out, cfg, train, rng):
    dropped, keep = _dropout_fwd(sub_out, cfg.dropout, train, rng)
    return x + dropped, keep


def encoder_forward(params, cfg, src_ids, train=False, rng=None):
    """Return (memory, src_key_mask, caches). ``src_ids`` is (B, S) int."""
    src_mask = _key_mask(src_ids, cfg)
    x, c_embed = _embed_fwd(params, cfg, src_ids, "src_embed", train, rng)
    layer_caches = []
    for i in range(cfg.encoder_layers):
        h, c_ln1 = _layernorm_fwd(x, params[f"enc{i}.ln1.g"], params[f"enc{i}.ln1.b"])
        a, c_attn = _attention_fwd(
            params, f"enc{i}.attn", h, h, src_mask, cfg.attention_heads
        )
        x, keep1 = _sublayer_fwd(x, a, cfg, train, rng)
        h2, c_ln2 = _layernorm_fwd(x, params[f"enc{i}.ln2.g"], params[f"enc{i}.ln2.b"])
        f, c_ffn = _ffn_fwd(params, f"enc{i}.ffn", h2)
        x, keep2 = _sublayer_fwd(x, f, cfg, train, rng)
        layer_caches.append((c_ln1, c_attn, keep1, c_ln2, c_ffn, keep2))
    memory, c_lnf = _layernorm_fwd(x, params["enc.lnf.g"], params["enc.lnf.b"])
    return memory, src_mask, (c_embed, layer_caches, c_lnf)


def encoder_backward(dmemory, caches, cfg, grads):
    c_embed, layer_caches, c_lnf = caches
    dx, dg, db = _layernorm_bwd(dmemory, c_lnf)
    grads["enc.lnf.g"] += dg
    grads["enc.lnf.b"] += db
    for i in reversed(range(cfg.encoder_layers)):
        c_ln1, c_attn, keep1, c_ln2, c_ffn, keep2 = layer_caches[i]
        df = _dropout_bwd(dx, keep2)
        dh2 = _ffn_bwd(df, c_ffn, grads, f"enc{i}.ffn")
        dres, dg, db = _layernorm_bwd(dh2, c_ln2)
        grads[f"enc{i}.ln2.g"] += dg
        grads[f"enc{i}.ln2.b"] += db
        dx = dx + dres
        da = _dropout_bwd(dx, keep1)
        dq, dkv = _attention_bwd(da, c_attn, grads, f"enc{i}.attn")
        dh = dq + dkv
        dres, dg, db = _layernorm_bwd(dh, c_ln1)
        grads[f"enc{i}.ln1.g"] += dg
        grads[f"enc{i}.ln1.b"] += db
        dx = dx + dres
    _embed_bwd(dx, c_embed, grads)


def decoder_forward(params, cfg, dec_in, memory, src_mask, train=False, rng=None):
    """Return (logits, caches) for decoder input (B, T) over memory (B, S, H)."""
    t = dec_in.shape[1]
    causal = _causal_mask(t, cfg)
    x, c_embed = _embed_fwd(params, cfg, dec_in, "tgt_embed", train, rng)
    layer_caches = []
    for i in range(cfg.decoder_layers):
        h, c_ln1 = _layernorm_fwd(x, params[f"dec{i}.ln1.g"], params[f"dec{i}.ln1.b"])
        a, c_self = _attention_fwd(
            params, f"dec{i}.self", h, h, causal, cfg.attention_heads
        )
        x, keep1 = _sublayer_fwd(x, a, cfg, train, rng)
        h2, c_ln2 = _layernorm_fwd(x, params[f"dec{i}.ln2.g"], params[f"dec{i}.ln2.b"])
        c, c_cross = _attention_fwd(
            params, f"dec{i}.cross", h2, memory, src_mask, cfg.attention_heads
        )
        x, keep2 = _sublayer_fwd(x, c, cfg, train, rng)
        h3, c_ln3 = _layernorm_fwd(x, params[f"dec{i}.ln3.g"], params[f"dec{i}.ln3.b"])
        f, c_ffn = _ffn_fwd(params, f"dec{i}.ffn", h3)
        x, keep3 = _sublayer_fwd(x, f, cfg, train, rng)
        layer_caches.append(
            (c_ln1, c_self, keep1, c_ln2, c_cross, keep2, c_ln3, c_ffn, keep3)
        )
    x, c_lnf = _layernorm_fwd(x, params["dec.lnf.g"], params["dec.lnf.b"])
    logits, c_out = _linear_fwd(x, params["out.w"], params["out.b"])
    return logits, (c_embed, layer_caches, c_lnf, c_out)


def decoder_backward(dlogits, caches, cfg, grads):
    """Backward through the decoder; returns dmemory."""
    c_embed, layer_caches, c_lnf, c_out = caches
    dx, dw, db = _linear_bwd(dlogits, c_out)
    grads["out.w"] += dw
    grads["out.b"] += db
    dx, dg, db = _layernorm_bwd(dx, c_lnf)
    grads["dec.lnf.g"] += dg
    grads["dec.lnf.b"] += db
    dmemory = None
    for i in reversed(range(cfg.decoder_layers)):
        (c_ln1, c_self, keep1, c_ln2, c_cross, keep2, c_ln3, c_ffn, keep3) = \
            layer_caches[i]
        df = _dropout_bwd(dx, keep3)
        dh3 = _ffn_bwd(df, c_ffn, grads, f"dec{i}.ffn")
        dres, dg, db = _layernorm_bwd(dh3, c_ln3)
        grads[f"dec{i}.ln3.g"] += dg
        grads[f"dec{i}.ln3.b"] += db
        dx = dx + dres
        dc = _dropout_bwd(dx, keep2)
        dq, dmem = _attention_bwd(dc, c_cross, grads, f"dec{i}.cross")
        dmemory = dmem if dmemory is None else dmemory + dmem
        dres, dg, db = _layernorm_bwd(dq, c_ln2)
        grads[f"dec{i}.ln2.g"] += dg
        grads[f"dec{i}.ln2.b"] += db
        dx = dx + dres
        da = _dropout_bwd(dx, keep1)
        dq, dkv = _attention_bwd(da, c_self, grads, f"dec{i}.self")
        dh = dq + dkv
        dres, dg, db = _layernorm_bwd(dh, c_ln1)
        grads[f"dec{i}.ln1.g"] += dg
        grads[f"dec{i}.ln1.b"] += db
        dx = dx + dres
    _embed_bwd(dx, c_embed, grads)
    return dmemory


def _key_mask(ids, cfg):
    """Additive mask hiding PAD keys: (B, 1, 1, L)."""
    dtype = np.dtype(cfg.dtype)
    mask = np.where(ids == PAD_ID, _MASK_VALUE, 0.0).astype(dtype)
    return mask[:, None, None, :]


def _causal_mask(t, cfg):
    dtype = np.dtype(cfg.dtype)
    mask = np.triu(np.full((t, t), _MASK_VALUE, dtype=dtype), k=1)
    return mask[None, None, :, :]


# -- full passes -----------------------------------------------------------------

def forward_logits(params, cfg, src_ids, dec_in, train=False, rng=None):
    if train and cfg.dropout > 0.0 and rng is None:
        rng = np.random.default_rng(0)
    memory, src_mask, enc_caches = encoder_forward(params, cfg, src_ids, train, rng)
    logits, dec_caches = decoder_forward(
        params, cfg, dec_in, memory, src_mask, train, rng
    )
    return logits, (enc_caches, dec_caches)


def zero_grads(params) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(p) for name, p in params.items()}


def backward_logits(params, cfg, caches, dlogits) -> dict[str, np.ndarray]:
    enc_caches, dec_caches = caches
    grads = zero_grads(params)
    dmemory = decoder_backward(dlogits, dec_caches, cfg, grads)
    encoder_backward(dmemory, enc_caches, cfg, grads)
    return grads


def loss_and_grads(
    params,
    cfg,
    src_ids,
    dec_in,
    labels,
    train=False,
    rng=None,
    label_smoothing=0.0,
    compute_grads=True,
):
    """Teacher-forced token cross-entropy over non-PAD label positions.

    Returns (loss, grads_or_None, n_tokens).
    """
    logits, caches = forward_logits(params, cfg, src_ids, dec_in, train, rng)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    logp = shifted - lse
    valid = labels != PAD_ID
    n = int(valid.sum())
    picked = np.take_along_axis(logp, labels[..., None], axis=-1)[..., 0]
    nll = -picked
    if label_smoothing > 0.0:
        smooth = -logp.mean(axis=-1)
        token_loss = (1.0 - label_smoothing) * nll + label_smoothing * smooth
    else:
        token_loss = nll
    loss = float((token_loss * valid).sum() / max(n, 1))
    if not compute_grads:
        return loss, None, n

    probs = np.exp(logp)
    target = np.zeros_like(probs)
    np.put_along_axis(target, labels[..., None], 1.0, axis=-1)
    if label_smoothing > 0.0:
        v = probs.shape[-1]
        target = (1.0 - label_smoothing) * target + label_smoothing / v
    dlogits = (probs - target) * valid[..., None] / max(n, 1)
    dlogits = dlogits.astype(probs.dtype)
    grads = backward_logits(params, cfg, caches, dlogits)
    return loss, grads, n


# -- public single-sequence forward ------------------------------------------------

def forward(
    model: TransducerModel,
    source_ids: list[int],
    target_prefix_ids: list[int],
    train_mode: bool = False,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Next-token distributions for one source/target-prefix pair.

    Row t is the distribution over the token at target position t given the
    prefix before it (the decoder input is BOS + prefix, the source gets a
    trailing EOS), so the output has ``len(target_prefix_ids) + 1`` rows,
    each non-negative and summing to 1. Dropout fires only in train mode.
    """
    cfg = model.config
    _check_length(len(source_ids) + 1, cfg)
    _check_length(len(target_prefix_ids) + 1, cfg)
    if train_mode and rng is None:
        rng = np.random.default_rng(0)
    src = np.array([list(source_ids) + [EOS_ID]], dtype=np.int64)
    dec_in = np.array([[BOS_ID] + list(target_prefix_ids)], dtype=np.int64)
    logits, _ = forward_logits(model.params, cfg, src, dec_in, train_mode, rng)
    return _softmax(logits[0])


def _check_length(length: int, cfg: ModelConfig) -> None:
    if length > cfg.max_sequence_length:
        raise SequenceTooLong(length, cfg.max_sequence_length)
