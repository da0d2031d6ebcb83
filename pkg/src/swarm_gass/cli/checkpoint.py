"""Binary optimizer checkpoints.

Layout (little-endian)::

    offset  size  field
    0       4     magic b"SGSS"
    4       2     format version (u16)
    6       1     mode tag (u8): 0 ES, 1 GASS, 2 CEM
    7       8     dimension n (u64)
    15      8     completed iterations k (u64)
    23      8     ADAM step count (u64, 0 outside ES)
    31      8*m   f64 payload: ES theta, m, v; GASS/CEM mu, sigma
    end-4   4     CRC-32 of every preceding byte (u32)

Files are written to a temporary sibling and renamed into place, so an
interrupted write never replaces a good checkpoint with a partial one.
"""

from __future__ import annotations

import os
import struct
import tempfile
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import CheckpointError
from ..search.es import AdamState
from ..search.optimizer import Optimizer, OptimizerConfig

MAGIC = b"SGSS"
VERSION = 1
MODE_TAGS = {"ES": 0, "GASS": 1, "CEM": 2}
TAG_MODES = {v: k for k, v in MODE_TAGS.items()}
_HEADER = struct.Struct("<4sHBQQQ")


@dataclass(frozen=True)
class Checkpoint:
    mode: str
    k: int
    center: np.ndarray
    stddev: Optional[np.ndarray] = None
    first_moment: Optional[np.ndarray] = None
    second_moment: Optional[np.ndarray] = None
    adam_step: int = 0

    @property
    def dim(self) -> int:
        return int(np.size(self.center))

    @classmethod
    def from_optimizer(cls, opt: Optimizer) -> "Checkpoint":
        if opt.config.mode == "ES":
            return cls("ES", opt.k, opt.center.copy(), None, opt.adam.first_moment.copy(),
                       opt.adam.second_moment.copy(), int(opt.adam.step_count))
        return cls(opt.config.mode, opt.k, opt.center.copy(), opt.stddev.copy())

    def to_optimizer(self, config: OptimizerConfig, seed: int, stream=()) -> Optimizer:
        if config.mode != self.mode:
            raise CheckpointError(f"checkpoint holds a {self.mode} state, run is {config.mode}")
        if self.mode == "ES":
            adam = AdamState(self.first_moment.copy(), self.second_moment.copy(), self.adam_step)
            return Optimizer(config, self.center.copy(), seed, adam=adam, k=self.k, stream=stream)
        return Optimizer(config, self.center.copy(), seed, stddev=self.stddev.copy(), k=self.k,
                         stream=stream)

    def arrays(self):
        if self.mode == "ES":
            return (self.center, self.first_moment, self.second_moment)
        return (self.center, self.stddev)


def encode(ckpt: Checkpoint) -> bytes:
    if ckpt.mode not in MODE_TAGS:
        raise CheckpointError(f"unknown mode {ckpt.mode!r}")
    n = ckpt.dim
    arrays = ckpt.arrays()
    if any(a is None or np.size(a) != n for a in arrays):
        raise CheckpointError("checkpoint arrays have inconsistent lengths")
    head = _HEADER.pack(MAGIC, VERSION, MODE_TAGS[ckpt.mode], n, ckpt.k, ckpt.adam_step)
    body = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in arrays)
    data = head + body
    return data + struct.pack("<I", zlib.crc32(data) & 0xFFFFFFFF)


def decode(data: bytes) -> Checkpoint:
    if len(data) < _HEADER.size + 4:
        raise CheckpointError("corrupt checkpoint: file too short")
    (crc,) = struct.unpack("<I", data[-4:])
    if zlib.crc32(data[:-4]) & 0xFFFFFFFF != crc:
        raise CheckpointError("corrupt checkpoint: checksum mismatch")
    magic, version, tag, n, k, adam_step = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CheckpointError("corrupt checkpoint: bad magic")
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    if tag not in TAG_MODES:
        raise CheckpointError(f"corrupt checkpoint: unknown mode tag {tag}")
    mode = TAG_MODES[tag]
    count = 3 if mode == "ES" else 2
    if len(data) != _HEADER.size + 8 * n * count + 4:
        raise CheckpointError("corrupt checkpoint: payload length does not match dimension")
    flat = np.frombuffer(data, dtype="<f8", count=n * count, offset=_HEADER.size)
    parts = [flat[i * n:(i + 1) * n].astype(np.float64) for i in range(count)]
    if mode == "ES":
        return Checkpoint(mode, k, parts[0], None, parts[1], parts[2], adam_step)
    return Checkpoint(mode, k, parts[0], parts[1])


def save(path, ckpt: Checkpoint) -> None:
    path = Path(path)
    data = encode(ckpt)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load(path, expected_dim: Optional[int] = None) -> Checkpoint:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc.strerror}") from None
    ckpt = decode(data)
    if expected_dim is not None and ckpt.dim != expected_dim:
        raise CheckpointError(
            f"checkpoint dimension {ckpt.dim} does not match the policy ({expected_dim})"
        )
    return ckpt
