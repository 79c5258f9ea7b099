"""Versioned binary checkpoints.

Layout: magic ``G2PM``, u32 format version, u32-length JSON block (model
config plus provenance meta), u32 tensor count, then per tensor a u16-length
UTF-8 name, u8 dtype code, u8 rank, u32 dims, and raw little-endian data.
Parameter bytes roundtrip exactly.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from ..errors import CorruptFile, FormatVersionMismatch, ShapeMismatch
from .config import ModelConfig
from .network import TransducerModel, param_specs

MAGIC = b"G2PM"
FORMAT_VERSION = 1

_DTYPE_CODES = {"float32": 0, "float64": 1}
_CODE_DTYPES = {0: "<f4", 1: "<f8"}


def save_checkpoint(model: TransducerModel, path, meta: dict | None = None) -> None:
    cfg = model.config
    code = _DTYPE_CODES[cfg.dtype]
    wire_dtype = _CODE_DTYPES[code]
    header = json.dumps(
        {"config": cfg.to_dict(), "meta": meta or {}}, ensure_ascii=False
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        names = [name for name, _, _ in param_specs(cfg)]
        fh.write(struct.pack("<I", len(names)))
        for name in names:
            arr = model.params[name]
            name_b = name.encode("utf-8")
            fh.write(struct.pack("<H", len(name_b)))
            fh.write(name_b)
            fh.write(struct.pack("<BB", code, arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(np.ascontiguousarray(arr, dtype=wire_dtype).tobytes())


def _read_exact(fh, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise CorruptFile(f"truncated checkpoint: wanted {n} bytes, got {len(data)}")
    return data


def load_checkpoint(path) -> TransducerModel:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise CorruptFile(f"bad magic {magic!r}")
        (version,) = struct.unpack("<I", _read_exact(fh, 4))
        if version != FORMAT_VERSION:
            raise FormatVersionMismatch(str(version), str(FORMAT_VERSION))
        (header_len,) = struct.unpack("<I", _read_exact(fh, 4))
        try:
            header = json.loads(_read_exact(fh, header_len).decode("utf-8"))
            cfg = ModelConfig.from_dict(header["config"])
        except (json.JSONDecodeError, KeyError, TypeError, UnicodeDecodeError) as exc:
            raise CorruptFile(f"unreadable config block: {exc}") from exc

        expected = {name: shape for name, shape, _ in param_specs(cfg)}
        native = np.dtype(cfg.dtype)
        (count,) = struct.unpack("<I", _read_exact(fh, 4))
        params: dict[str, np.ndarray] = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<H", _read_exact(fh, 2))
            name = _read_exact(fh, name_len).decode("utf-8")
            code, ndim = struct.unpack("<BB", _read_exact(fh, 2))
            if code not in _CODE_DTYPES:
                raise CorruptFile(f"unknown dtype code {code} for {name!r}")
            shape = struct.unpack(f"<{ndim}I", _read_exact(fh, 4 * ndim))
            if name not in expected:
                raise CorruptFile(f"unexpected tensor {name!r}")
            if tuple(shape) != tuple(expected[name]):
                raise ShapeMismatch(
                    f"tensor {name!r} has shape {tuple(shape)}, "
                    f"config implies {tuple(expected[name])}"
                )
            wire = np.dtype(_CODE_DTYPES[code])
            if wire.itemsize != native.itemsize:
                raise CorruptFile(
                    f"tensor {name!r} stored as {wire}, config dtype {cfg.dtype}"
                )
            nbytes = int(np.prod(shape, dtype=np.int64)) * wire.itemsize
            data = _read_exact(fh, nbytes)
            params[name] = (
                np.frombuffer(data, dtype=wire).reshape(shape).astype(native)
            )
        missing = set(expected) - set(params)
        if missing:
            raise CorruptFile(f"missing tensors: {sorted(missing)[:3]}...")
    return TransducerModel(config=cfg, params=params)


def checkpoint_meta(path) -> dict:
    """Read only the provenance block of a checkpoint."""
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise CorruptFile("bad magic")
        (version,) = struct.unpack("<I", _read_exact(fh, 4))
        if version != FORMAT_VERSION:
            raise FormatVersionMismatch(str(version), str(FORMAT_VERSION))
        (header_len,) = struct.unpack("<I", _read_exact(fh, 4))
        header = json.loads(_read_exact(fh, header_len).decode("utf-8"))
    return header


def verify_vocab_compatible(model: TransducerModel, tokenizer) -> None:
    """Raise ShapeMismatch when the checkpoint and tokenizer disagree."""
    if model.config.vocab_size != len(tokenizer.vocab):
        raise ShapeMismatch(
            f"model vocab {model.config.vocab_size} vs tokenizer vocab "
            f"{len(tokenizer.vocab)}"
        )
