import hashlib
import logging
import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np

from app.modules.cli.errors import ArtifactError, DataValidationError
from app.modules.graph.models import HeteroGraph

logger = logging.getLogger(__name__)

# 二进制特征文件头：magic, N, d（均为小端 int64）
FEATURE_MAGIC = int.from_bytes(b"DRCVFEAT", "little")
HEADER = struct.Struct("<qqq")
NAMES_SUFFIX = ".names"


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """节点名 → d 维特征向量"""
    names: Sequence[str]
    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(self.names):
            raise DataValidationError(
                f"特征维度不一致: {len(self.names)} 个节点名对应形状 {vectors.shape} 的矩阵"
            )
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @cached_property
    def index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def get(self, name: str):
        row = self.index.get(name)
        return None if row is None else self.vectors[row]


def missing_feature_vector(name: str, dim: int) -> np.ndarray:
    """缺失特征的填充向量：以节点名哈希为种子的伪随机单位向量"""
    seed = int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8], "little")
    vector = np.random.default_rng(seed).standard_normal(dim)
    return vector / np.linalg.norm(vector)


class FeatureReader:
    """特征文件读取（二进制 + 名称旁路文件，或纯文本回退格式）"""

    @staticmethod
    def names_path(path: Path) -> Path:
        return path.with_name(path.name + NAMES_SUFFIX)

    @staticmethod
    def is_binary(path: Path) -> bool:
        with open(path, "rb") as f:
            head = f.read(8)
        return len(head) == 8 and int.from_bytes(head, "little") == FEATURE_MAGIC

    @staticmethod
    def read_binary(path: Path) -> FeatureTable:
        data = path.read_bytes()
        if len(data) < HEADER.size:
            raise DataValidationError(f"特征文件头不完整: {path}")
        magic, n, d = HEADER.unpack_from(data, 0)
        if magic != FEATURE_MAGIC:
            raise DataValidationError(f"特征文件 magic 不匹配: {path}")
        expected = HEADER.size + n * d * 8
        if len(data) != expected:
            raise DataValidationError(f"特征文件长度错误: {path}，应为 {expected} 字节，实际 {len(data)}")
        if n * d:
            vectors = np.frombuffer(data, dtype="<f8", count=n * d, offset=HEADER.size).reshape(n, d)
        else:
            vectors = np.zeros((n, d))

        names_file = FeatureReader.names_path(path)
        if not names_file.exists():
            raise ArtifactError(f"缺少特征名称文件: {names_file}")
        names = [line for line in names_file.read_text(encoding="utf-8").splitlines() if line]
        if len(names) != n:
            raise DataValidationError(f"名称文件行数 {len(names)} 与特征行数 {n} 不一致")
        return FeatureTable(names, vectors.astype(np.float64))

    @staticmethod
    def split_text_line(line: str):
        """
        纯文本行：`name v1 ... vd`

        节点名本身可能含空格（如 Disease::SARS-CoV2 E），从行尾开始取
        能解析为实数的连续字段作为向量。
        """
        tokens = line.split()
        values: List[float] = []
        while len(tokens) > 1:
            try:
                values.append(float(tokens[-1]))
            except ValueError:
                break
            tokens.pop()
        values.reverse()
        return " ".join(tokens), values

    @staticmethod
    def read_text(path: Path) -> FeatureTable:
        names: List[str] = []
        rows: List[List[float]] = []
        dim = None
        for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            name, values = FeatureReader.split_text_line(line)
            if not values:
                raise DataValidationError(f"特征文件 {path} 第 {line_no} 行没有数值")
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise DataValidationError(
                    f"特征维度不一致: {path} 第 {line_no} 行为 {len(values)} 维，前文为 {dim} 维"
                )
            names.append(name)
            rows.append(values)
        vectors = np.asarray(rows, dtype=np.float64).reshape(len(rows), dim or 0)
        return FeatureTable(names, vectors)

    @staticmethod
    def read(path: Union[str, Path]) -> FeatureTable:
        path = Path(path)
        if not path.exists():
            raise ArtifactError(f"特征文件不存在: {path}")
        table = FeatureReader.read_binary(path) if FeatureReader.is_binary(path) else FeatureReader.read_text(path)
        logger.info("特征文件 %s 读取完成: %d 个节点, d=%d", path, len(table.names), table.dim)
        return table


def write_feature_file(path: Union[str, Path], names: Sequence[str], matrix: np.ndarray) -> None:
    """写出二进制特征文件及名称旁路文件"""
    path = Path(path)
    matrix = np.ascontiguousarray(matrix, dtype="<f8")
    n, d = matrix.shape
    with open(path, "wb") as f:
        f.write(HEADER.pack(FEATURE_MAGIC, n, d))
        f.write(matrix.tobytes(order="C"))
    FeatureReader.names_path(path).write_text("".join(f"{name}\n" for name in names), encoding="utf-8")


def build_feature_matrix(graph: HeteroGraph, table: FeatureTable) -> np.ndarray:
    """
    按全局编号对齐特征矩阵

    特征表中缺失的节点用 missing_feature_vector 填充并告警。
    """
    if table.dim <= 0:
        raise DataValidationError("特征维度必须为正")
    names = graph.global_names()
    matrix = np.empty((len(names), table.dim), dtype=np.float64)
    missing: List[str] = []
    for row, name in enumerate(names):
        vector = table.get(name)
        if vector is None:
            missing.append(name)
            vector = missing_feature_vector(name, table.dim)
        matrix[row] = vector
    if missing:
        logger.warning(
            "%d 个节点没有特征，已用伪随机单位向量填充（示例: %s）",
            len(missing),
            ", ".join(missing[:5]),
        )
    return matrix
