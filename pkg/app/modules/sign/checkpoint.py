"""
模型检查点

布局（小端）: magic(8) | d, h, l, r: int64×4 | Θ₀..Θᵣ, W, Φ 按行主序 float64
            | 末尾 8 字节 blake2b 校验和（覆盖之前的全部字节）
"""
import hashlib
import struct
from pathlib import Path
from typing import Union

import numpy as np

from app.modules.cli.errors import ArtifactError, DataValidationError
from app.modules.sign.models import ModelParams

CHECKPOINT_MAGIC = b"DRCVCKPT"
DIMS = struct.Struct("<qqqq")
CHECKSUM_SIZE = 8


def _checksum(payload: bytes) -> bytes:
    return hashlib.blake2b(payload, digest_size=CHECKSUM_SIZE).digest()


def checkpoint_bytes(params: ModelParams) -> bytes:
    parts = [CHECKPOINT_MAGIC, DIMS.pack(params.d, params.h, params.l, params.r)]
    parts.extend(np.ascontiguousarray(t, dtype="<f8").tobytes(order="C") for t in params.tensors())
    payload = b"".join(parts)
    return payload + _checksum(payload)


def save_checkpoint(path: Union[str, Path], params: ModelParams) -> Path:
    path = Path(path)
    path.write_bytes(checkpoint_bytes(params))
    return path


def load_checkpoint(path: Union[str, Path]) -> ModelParams:
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"检查点不存在: {path}")
    data = path.read_bytes()
    header = len(CHECKPOINT_MAGIC) + DIMS.size
    if len(data) < header + CHECKSUM_SIZE or not data.startswith(CHECKPOINT_MAGIC):
        raise DataValidationError(f"不是有效的检查点文件: {path}")

    payload, checksum = data[:-CHECKSUM_SIZE], data[-CHECKSUM_SIZE:]
    if _checksum(payload) != checksum:
        raise DataValidationError(f"检查点校验和不匹配: {path}")

    d, h, l, r = DIMS.unpack_from(payload, len(CHECKPOINT_MAGIC))
    shapes = [(d, h)] * (r + 1) + [((r + 1) * h, l), (l, l)]
    expected = header + sum(a * b for a, b in shapes) * 8
    if len(payload) != expected:
        raise DataValidationError(f"检查点长度与维度 d={d}, h={h}, l={l}, r={r} 不符")

    tensors = []
    offset = header
    for shape in shapes:
        size = shape[0] * shape[1]
        tensors.append(np.frombuffer(payload, dtype="<f8", count=size, offset=offset).reshape(shape).astype(np.float64))
        offset += size * 8
    return ModelParams.from_tensors(tensors)
