from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from app.modules.cli.errors import StructuralError


@dataclass(frozen=True, eq=False)
class DiffusionFeatures:
    """预计算的扩散特征 [X, ÃX, Ã²X, ...]"""
    matrices: Tuple[np.ndarray, ...]

    def __post_init__(self):
        matrices = tuple(np.asarray(m, dtype=np.float64) for m in self.matrices)
        if not matrices:
            raise StructuralError("扩散特征至少包含 X 本身")
        shape = matrices[0].shape
        if len(shape) != 2 or any(m.shape != shape for m in matrices):
            raise StructuralError(f"扩散特征形状不一致: {[m.shape for m in matrices]}")
        object.__setattr__(self, "matrices", matrices)

    @property
    def r(self) -> int:
        return len(self.matrices) - 1

    @property
    def n_nodes(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[1]


@dataclass(eq=False)
class ModelParams:
    """
    可学习参数

    thetas: r+1 个 d×h 矩阵（每个扩散分支一个）
    W: (r+1)h×l 输出层
    Phi: l×l 双线性打分矩阵
    """
    thetas: List[np.ndarray]
    W: np.ndarray
    Phi: np.ndarray

    def __post_init__(self):
        self.thetas = [np.asarray(t, dtype=np.float64) for t in self.thetas]
        self.W = np.asarray(self.W, dtype=np.float64)
        self.Phi = np.asarray(self.Phi, dtype=np.float64)
        if not self.thetas:
            raise StructuralError("至少需要一个分支参数 Θ₀")
        d, h = self.thetas[0].shape
        if any(t.shape != (d, h) for t in self.thetas):
            raise StructuralError("各分支 Θ 的形状必须一致")
        if self.W.shape[0] != len(self.thetas) * h:
            raise StructuralError(f"W 的行数应为 {len(self.thetas) * h}，实际 {self.W.shape[0]}")
        l = self.W.shape[1]
        if self.Phi.shape != (l, l):
            raise StructuralError(f"Φ 的形状应为 {(l, l)}，实际 {self.Phi.shape}")

    @property
    def d(self) -> int:
        return self.thetas[0].shape[0]

    @property
    def h(self) -> int:
        return self.thetas[0].shape[1]

    @property
    def l(self) -> int:
        return self.W.shape[1]

    @property
    def r(self) -> int:
        return len(self.thetas) - 1

    def tensors(self) -> List[np.ndarray]:
        """按 Θ₀..Θᵣ, W, Φ 的固定顺序返回全部张量"""
        return [*self.thetas, self.W, self.Phi]

    @classmethod
    def from_tensors(cls, tensors: List[np.ndarray]):
        return cls(thetas=list(tensors[:-2]), W=tensors[-2], Phi=tensors[-1])

    def copy(self):
        return type(self).from_tensors([t.copy() for t in self.tensors()])

    def is_finite(self) -> bool:
        return all(np.isfinite(t).all() for t in self.tensors())


class Gradients(ModelParams):
    """与 ModelParams 同形状的梯度，对应某一次前向计算"""


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    """
    编码结果

    Y: 最终嵌入 (行数 × l)
    Z: tanh 之后的分支拼接 (行数 × (r+1)h)，反向传播使用
    P: LeakyReLU 之前的 ZW
    rows: 对应的全局节点编号；None 表示全部节点
    """
    Y: np.ndarray
    Z: np.ndarray
    P: np.ndarray
    rows: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.Y.shape[0]
