"""
稀疏矩阵与图上的线性代数内核

所有矩阵都以规范 CSR 形式保存（行内列号严格递增、无重复项），
数值统一为 float64。
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from app.modules.cli.errors import StructuralError
from app.modules.graph.models import HeteroGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """对 scipy CSR 矩阵的只读封装"""
    csr: sp.csr_matrix

    def __post_init__(self):
        csr = sp.csr_matrix(self.csr, dtype=np.float64, copy=True)
        csr.sum_duplicates()
        csr.sort_indices()
        object.__setattr__(self, "csr", csr)

    @classmethod
    def from_coo(cls, rows, cols, values, shape) -> "SparseMatrix":
        coo = sp.coo_matrix(
            (np.asarray(values, dtype=np.float64), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=shape,
        )
        return cls(coo.tocsr())

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(sp.identity(n, dtype=np.float64, format="csr"))

    @property
    def n_rows(self) -> int:
        return self.csr.shape[0]

    @property
    def n_cols(self) -> int:
        return self.csr.shape[1]

    @property
    def shape(self):
        return self.csr.shape

    @property
    def row_offsets(self) -> np.ndarray:
        return self.csr.indptr

    @property
    def col_indices(self) -> np.ndarray:
        return self.csr.indices

    @property
    def values(self) -> np.ndarray:
        return self.csr.data

    @property
    def nnz(self) -> int:
        return int(self.csr.indptr[-1])

    def row_indices(self) -> np.ndarray:
        """每个存储项对应的行号"""
        return np.repeat(np.arange(self.n_rows, dtype=np.int64), np.diff(self.csr.indptr))

    def is_symmetric(self) -> bool:
        if self.n_rows != self.n_cols:
            return False
        return (self.csr != self.csr.T).nnz == 0

    def to_dense(self) -> np.ndarray:
        return self.csr.toarray()

    def submatrix(self, start: int, stop: int) -> "SparseMatrix":
        """取主对角线上 [start, stop) 的方块"""
        return SparseMatrix(self.csr[start:stop, start:stop])


def build_adjacency(graph: HeteroGraph) -> SparseMatrix:
    """
    构建对称二值邻接矩阵 A

    任意关系的边都折叠为一条无权无向边，自环被丢弃，对角线为零。
    """
    n = graph.num_nodes
    heads, tails = graph.global_edges()
    keep = heads != tails
    heads, tails = heads[keep], tails[keep]
    rows = np.concatenate([heads, tails])
    cols = np.concatenate([tails, heads])
    coo = sp.coo_matrix((np.ones(len(rows), dtype=np.float64), (rows, cols)), shape=(n, n))
    csr = coo.tocsr()
    csr.sum_duplicates()
    # 重复边与双向边求和后可能大于 1，这里统一成二值
    csr.data[:] = 1.0
    logger.debug("邻接矩阵构建完成: N=%d, nnz=%d", n, csr.nnz)
    return SparseMatrix(csr)


def degrees(A: SparseMatrix) -> np.ndarray:
    """每行非零项个数"""
    return np.diff(A.row_offsets).astype(np.int64)


def normalize_adjacency(A: SparseMatrix) -> SparseMatrix:
    """对称归一化 Ã = D^{-1/2} A D^{-1/2}，度为 0 的节点对应行列全为 0"""
    if not A.is_symmetric():
        raise StructuralError("归一化要求输入矩阵对称")
    deg = np.asarray(A.csr.sum(axis=1)).ravel()
    inv_sqrt = np.zeros_like(deg)
    nonzero = deg > 0
    inv_sqrt[nonzero] = 1.0 / np.sqrt(deg[nonzero])
    values = A.values * inv_sqrt[A.row_indices()] * inv_sqrt[A.col_indices]
    return SparseMatrix(sp.csr_matrix((values, A.col_indices.copy(), A.row_offsets.copy()), shape=A.shape))


def add_self_loops(A: SparseMatrix) -> SparseMatrix:
    """Ā = I + Ã"""
    if A.n_rows != A.n_cols:
        raise StructuralError(f"添加自环要求方阵，实际为 {A.n_rows}×{A.n_cols}")
    return SparseMatrix(A.csr + sp.identity(A.n_rows, dtype=np.float64, format="csr"))


def spmm(S: SparseMatrix, X: np.ndarray) -> np.ndarray:
    """
    稀疏 × 稠密乘积

    CSR 行内列号升序存储，scipy 逐行按列号升序累加，结果可逐位复现。
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or S.n_cols != X.shape[0]:
        raise StructuralError(f"维度不匹配: S 为 {S.n_rows}×{S.n_cols}, X 为 {X.shape}")
    return np.asarray(S.csr @ X)
