"""
SIGN 编码器与双线性打分器

    Z = tanh([X·Θ₀ ∥ ÃX·Θ₁ ∥ ... ∥ ÃʳX·Θᵣ])
    Y = LeakyReLU(Z·W)
    logit(c, d) = y_cᵀ Φ y_d

扩散特征在训练前一次算好，前向与反向都不再接触 Ã。
反向传播按这一固定结构手工推导。
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from app.modules.cli.errors import DataValidationError, NumericError, StructuralError
from app.modules.graph.models import HeteroGraph, NodeId
from app.modules.graph.sparse import SparseMatrix, build_adjacency, normalize_adjacency, spmm
from app.modules.sign import config
from app.modules.sign.models import DiffusionFeatures, EmbeddingMatrix, Gradients, ModelParams
from app.modules.trainer.loss import weighted_bce, weighted_bce_grad

logger = logging.getLogger(__name__)


def precompute_diffusion(A_norm: SparseMatrix, X: np.ndarray, r: int = config.HOPS) -> DiffusionFeatures:
    """第 k 项 = Ã 作用于第 k-1 项；不显式构造 Ãᵏ"""
    if r < 0:
        raise DataValidationError(f"扩散阶数 r 不能为负: {r}")
    X = np.asarray(X, dtype=np.float64)
    if A_norm.n_rows != A_norm.n_cols:
        raise StructuralError(f"扩散算子必须是方阵，实际为 {A_norm.n_rows}×{A_norm.n_cols}")
    matrices = [X]
    for _ in range(r):
        matrices.append(spmm(A_norm, matrices[-1]))
    return DiffusionFeatures(tuple(matrices))


def message_passing_diffusion(
    graph: HeteroGraph,
    features: np.ndarray,
    held_out: Sequence[Tuple[NodeId, NodeId]],
    r: int = config.HOPS,
) -> DiffusionFeatures:
    """在去掉测试集药物-疾病边的图上做归一化扩散"""
    visible = graph.without_pairs(held_out)
    A_norm = normalize_adjacency(build_adjacency(visible))
    logger.info("扩散预计算: N=%d, 边 %d（已移除 %d 个测试对）, r=%d", graph.num_nodes, visible.num_edges, len(held_out), r)
    return precompute_diffusion(A_norm, features, r)


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def init_params(d: int, h: int, l: int, r: int, seed) -> ModelParams:
    """按 Θ₀..Θᵣ, W, Φ 的顺序从同一随机流做 Glorot 均匀初始化"""
    if min(d, h, l) <= 0 or r < 0:
        raise DataValidationError(f"模型维度必须为正: d={d}, h={h}, l={l}, r={r}")
    rng = np.random.default_rng(seed)
    thetas = [_glorot(rng, d, h) for _ in range(r + 1)]
    W = _glorot(rng, (r + 1) * h, l)
    Phi = _glorot(rng, l, l)
    return ModelParams(thetas=thetas, W=W, Phi=Phi)


def _check_compatible(params: ModelParams, diffusion: DiffusionFeatures) -> None:
    if diffusion.r != params.r:
        raise StructuralError(f"扩散阶数 {diffusion.r} 与模型分支数 {params.r + 1} 不匹配")
    if diffusion.dim != params.d:
        raise StructuralError(f"特征维度 {diffusion.dim} 与模型输入维度 {params.d} 不匹配")


def leaky_relu(P: np.ndarray, slope: float = config.LEAKY_SLOPE) -> np.ndarray:
    return np.where(P > 0, P, slope * P)


def encode_rows(
    params: ModelParams,
    diffusion: DiffusionFeatures,
    rows: Optional[np.ndarray] = None,
    slope: float = config.LEAKY_SLOPE,
) -> EmbeddingMatrix:
    """只对给定的全局行编号做前向计算（rows 为 None 时计算全部节点）"""
    _check_compatible(params, diffusion)
    if rows is not None:
        rows = np.asarray(rows, dtype=np.int64)

    branches = []
    for k, (H, theta) in enumerate(zip(diffusion.matrices, params.thetas)):
        Q = (H if rows is None else H[rows]) @ theta
        if not np.isfinite(Q).all():
            raise NumericError(f"第 {k} 个扩散分支出现非有限值")
        branches.append(np.tanh(Q))
    Z = np.hstack(branches)
    P = Z @ params.W
    Y = leaky_relu(P, slope)
    if not np.isfinite(Y).all():
        raise NumericError("输出层出现非有限值")
    return EmbeddingMatrix(Y=Y, Z=Z, P=P, rows=rows)


def encode(params: ModelParams, diffusion: DiffusionFeatures, slope: float = config.LEAKY_SLOPE) -> EmbeddingMatrix:
    return encode_rows(params, diffusion, None, slope)


def score(params: ModelParams, y_c: np.ndarray, y_d: np.ndarray) -> float:
    """原始双线性 logit；sigmoid 只在损失函数里使用一次"""
    y_c = np.asarray(y_c, dtype=np.float64).ravel()
    y_d = np.asarray(y_d, dtype=np.float64).ravel()
    if len(y_c) != params.l or len(y_d) != params.l:
        raise StructuralError(f"嵌入长度应为 {params.l}，实际为 {len(y_c)} 和 {len(y_d)}")
    return float(y_c @ params.Phi @ y_d)


def score_pairs(params: ModelParams, Yc: np.ndarray, Yd: np.ndarray) -> np.ndarray:
    """逐行 logit：Yc[i]ᵀ Φ Yd[i]"""
    return np.einsum("ij,ij->i", Yc @ params.Phi, Yd)


def _batch_forward(params, diffusion, pairs, slope):
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    rows, inverse = np.unique(pairs.ravel(), return_inverse=True)
    inverse = inverse.reshape(-1, 2)
    embedding = encode_rows(params, diffusion, rows, slope)
    yc = embedding.Y[inverse[:, 0]]
    yd = embedding.Y[inverse[:, 1]]
    return embedding, inverse, yc, yd, score_pairs(params, yc, yd)


def pair_logits(
    params: ModelParams,
    diffusion: DiffusionFeatures,
    pairs: np.ndarray,
    slope: float = config.LEAKY_SLOPE,
) -> np.ndarray:
    """(药物, 疾病) 全局编号对的 logit，只编码涉及的行"""
    return _batch_forward(params, diffusion, pairs, slope)[-1]


def backward(
    params: ModelParams,
    diffusion: DiffusionFeatures,
    pairs: np.ndarray,
    labels: np.ndarray,
    w: float,
    slope: float = config.LEAKY_SLOPE,
) -> Tuple[float, Gradients]:
    """
    批内平均加权交叉熵及其对全部参数的解析梯度

    Args:
        pairs: B×2 全局编号 (药物, 疾病)
        labels: 长度 B 的 0/1 标签
        w: 正样本权重
    """
    labels = np.asarray(labels, dtype=np.float64)
    embedding, inverse, yc, yd, logits = _batch_forward(params, diffusion, pairs, slope)
    batch = len(labels)
    if batch == 0 or batch != len(logits):
        raise StructuralError(f"批大小不一致: {len(logits)} 个样本对, {batch} 个标签")

    loss = float(weighted_bce(logits, labels, w).mean())
    if not np.isfinite(loss):
        raise NumericError("损失出现非有限值")

    g = weighted_bce_grad(logits, labels, w) / batch
    dPhi = (yc * g[:, None]).T @ yd

    dY = np.zeros_like(embedding.Y)
    np.add.at(dY, inverse[:, 0], g[:, None] * (yd @ params.Phi.T))
    np.add.at(dY, inverse[:, 1], g[:, None] * (yc @ params.Phi))

    dP = dY * np.where(embedding.P > 0, 1.0, slope)
    dW = embedding.Z.T @ dP
    dQ = (dP @ params.W.T) * (1.0 - embedding.Z ** 2)

    h = params.h
    dthetas = [
        H[embedding.rows].T @ dQ[:, k * h:(k + 1) * h]
        for k, H in enumerate(diffusion.matrices)
    ]
    return loss, Gradients(thetas=dthetas, W=dW, Phi=dPhi)
