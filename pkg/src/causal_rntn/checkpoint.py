"""Versioned, checksummed model checkpoints.

Layout::

    b"RNTNCKPT"                  magic
    uint32 (LE)                  format version
    uint64 (LE)                  header length
    header                       UTF-8 JSON, sorted keys
    arrays                       float64 little-endian, C order, header order
    32 bytes                     SHA-256 of everything above
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingTable, PosWeighting, Vocab
from .labels import Label
from .rntn import AdagradState, RntnParams

MAGIC = b"RNTNCKPT"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


class VersionMismatch(CheckpointError):
    pass


class CorruptChecksum(CheckpointError):
    pass


@dataclass
class Checkpoint:
    params: RntnParams
    accumulators: AdagradState | None = None
    meta: dict = field(default_factory=dict)


def _array_bytes(arr: np.ndarray) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f8").tobytes()


def dumps(ckpt: Checkpoint) -> bytes:
    params = ckpt.params
    emb = params.embeddings
    arrays = [("V", params.V), ("W", params.W), ("C", params.C), ("L", emb.matrix)]
    if ckpt.accumulators is not None:
        arrays += [(f"acc.{k}", v) for k, v in sorted(ckpt.accumulators.acc.items())]
    header = {
        "format_version": FORMAT_VERSION,
        "d": params.d,
        "n_labels": params.n_labels,
        "labels": [lab.display for lab in Label],
        "vocab": emb.vocab.itos,
        "embedding_trainable": emb.trainable,
        "pos_weighting": None if emb.weighting is None
        else [emb.weighting.pos_dims, emb.weighting.pretrained_dims],
        "tensors": [{"name": name, "shape": list(arr.shape)} for name, arr in arrays],
        "meta": ckpt.meta,
    }
    head = json.dumps(header, sort_keys=True, ensure_ascii=False).encode("utf-8")
    body = b"".join([MAGIC, struct.pack("<I", FORMAT_VERSION), struct.pack("<Q", len(head)),
                     head] + [_array_bytes(arr) for _, arr in arrays])
    return body + hashlib.sha256(body).digest()


def loads(data: bytes) -> Checkpoint:
    if len(data) < len(MAGIC) + 12 + 32 or data[:len(MAGIC)] != MAGIC:
        raise VersionMismatch("not a checkpoint file (bad magic)")
    (version,) = struct.unpack_from("<I", data, len(MAGIC))
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"checkpoint format {version}, expected {FORMAT_VERSION}")
    body, digest = data[:-32], data[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise CorruptChecksum("checkpoint checksum does not match its contents")
    (head_len,) = struct.unpack_from("<Q", data, len(MAGIC) + 4)
    offset = len(MAGIC) + 12
    header = json.loads(body[offset:offset + head_len].decode("utf-8"))
    offset += head_len

    arrays = {}
    for spec in header["tensors"]:
        shape = tuple(spec["shape"])
        count = int(np.prod(shape))
        arr = np.frombuffer(body, dtype="<f8", count=count, offset=offset).reshape(shape)
        arrays[spec["name"]] = arr.astype(np.float64)
        offset += 8 * count
    if offset != len(body):
        raise CorruptChecksum("trailing bytes after tensors")

    weighting = header["pos_weighting"]
    table = EmbeddingTable(
        Vocab(header["vocab"][1:]), arrays["L"], header["embedding_trainable"],
        None if weighting is None else PosWeighting(*weighting))
    params = RntnParams(arrays["V"], arrays["W"], arrays["C"], table)
    accumulators = None
    acc = {k[4:]: v for k, v in arrays.items() if k.startswith("acc.")}
    if acc:
        accumulators = AdagradState(params)
        accumulators.acc.update(acc)
    return Checkpoint(params, accumulators, header["meta"])


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    Path(path).write_bytes(dumps(ckpt))


def load_checkpoint(path) -> Checkpoint:
    return loads(Path(path).read_bytes())
