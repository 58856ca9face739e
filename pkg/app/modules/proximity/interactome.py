import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Optional, Sequence

import numpy as np

from app.modules.graph.models import EntityKind, HeteroGraph, NodeId
from app.modules.graph.sparse import SparseMatrix, build_adjacency, degrees

logger = logging.getLogger(__name__)


def degree_bin(deg) -> np.ndarray:
    """log₂ 分桶：[1]→0, [2,3]→1, [4,7]→2, ...；度为 0 的孤立基因单独成桶 -1"""
    deg = np.asarray(deg, dtype=np.int64)
    bins = np.full(deg.shape, -1, dtype=np.int64)
    positive = deg > 0
    bins[positive] = np.floor(np.log2(deg[positive])).astype(np.int64)
    return bins


@dataclass(frozen=True, eq=False)
class GeneInteractome:
    """基因-基因子图（按基因局部编号索引）"""
    adjacency: SparseMatrix

    @property
    def n_genes(self) -> int:
        return self.adjacency.n_rows

    @cached_property
    def degree(self) -> np.ndarray:
        return degrees(self.adjacency)

    @cached_property
    def bins(self) -> np.ndarray:
        return degree_bin(self.degree)

    @cached_property
    def bin_members(self) -> Dict[int, np.ndarray]:
        return {int(b): np.flatnonzero(self.bins == b) for b in np.unique(self.bins)}


def build_interactome(graph: HeteroGraph, adjacency: Optional[SparseMatrix] = None) -> GeneInteractome:
    """取邻接矩阵中基因块的主对角子阵"""
    A = adjacency if adjacency is not None else build_adjacency(graph)
    start = graph.offset(EntityKind.GENE)
    interactome = GeneInteractome(A.submatrix(start, start + graph.count(EntityKind.GENE)))
    logger.info("基因相互作用网络: %d 个基因, %d 条边", interactome.n_genes, interactome.adjacency.nnz // 2)
    return interactome


def target_genes(graph: HeteroGraph, node: NodeId) -> np.ndarray:
    """药物或疾病直接相连的基因（局部编号，升序）"""
    return np.asarray([gene.local_index for gene in graph.neighbours(node, EntityKind.GENE)], dtype=np.int64)


def target_gene_sets(
    graph: HeteroGraph,
    nodes: Sequence[NodeId],
    adjacency: Optional[SparseMatrix] = None,
) -> Dict[NodeId, np.ndarray]:
    """批量版 target_genes：直接读邻接矩阵的行"""
    A = adjacency if adjacency is not None else build_adjacency(graph)
    start = graph.offset(EntityKind.GENE)
    stop = start + graph.count(EntityKind.GENE)
    result = {}
    for node in nodes:
        cols = A.col_indices[A.row_offsets[node.global_index]:A.row_offsets[node.global_index + 1]]
        result[node] = cols[(cols >= start) & (cols < stop)] - start
    return result
