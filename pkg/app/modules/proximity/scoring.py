"""
网络邻近度基线

    P(C, T) = ( Σ_{p∈C} min_{q∈T} d(p,q) + Σ_{q∈T} min_{p∈C} d(p,q) ) / (|C| + |T|)
    Z = (P − μ) / ω

μ、ω 为两个集合同时做度匹配重采样后 P 的均值与总体标准差。
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import dijkstra
from tqdm import tqdm

from app.modules.cli.errors import DataValidationError
from app.modules.evaluator.models import RankReport
from app.modules.graph.models import NodeId
from app.modules.proximity import config
from app.modules.proximity.interactome import GeneInteractome

logger = logging.getLogger(__name__)

UNREACHABLE = np.inf


@dataclass(frozen=True)
class ProximityScore:
    drug: Optional[NodeId]
    disease: Optional[NodeId]
    P: Optional[float]
    Z: Optional[float]

    @property
    def computable(self) -> bool:
        return self.Z is not None


def _gene_set(genes) -> np.ndarray:
    return np.unique(np.asarray(genes, dtype=np.int64))


def shortest_paths(interactome: GeneInteractome, sources) -> np.ndarray:
    """多源 BFS 跳数；不可达为 +inf"""
    sources = _gene_set(sources)
    if not len(sources):
        raise DataValidationError("最短路径的源节点集合为空")
    return dijkstra(interactome.adjacency.csr, directed=False, indices=sources, unweighted=True, min_only=True)


def proximity(interactome: GeneInteractome, C, T) -> Optional[float]:
    """任一集合为空或存在不可达的最近距离时返回 None（无法计算）"""
    C, T = _gene_set(C), _gene_set(T)
    if not len(C) or not len(T):
        return None
    to_T = shortest_paths(interactome, T)
    to_C = shortest_paths(interactome, C)
    total = to_T[C].sum() + to_C[T].sum()
    if not np.isfinite(total):
        return None
    return float(total / (len(C) + len(T)))


def _bin_counts(interactome: GeneInteractome, template) -> List[Tuple[int, int]]:
    bins, counts = np.unique(interactome.bins[_gene_set(template)], return_counts=True)
    plan = []
    for b, count in zip(bins.tolist(), counts.tolist()):
        available = len(interactome.bin_members[b])
        if available < count:
            raise DataValidationError(f"度分桶 {b} 只有 {available} 个基因，无法抽取 {count} 个")
        plan.append((b, count))
    return plan


def sample_degree_matched(interactome: GeneInteractome, template, seed) -> np.ndarray:
    """
    度匹配的随机基因集合

    模板中每个基因换成同一 log₂ 度分桶中的随机基因，结果内不重复。
    seed 可以是整数、整数序列或 numpy Generator。
    """
    rng = np.random.default_rng(seed)
    picked = [
        rng.choice(interactome.bin_members[b], size=count, replace=False)
        for b, count in _bin_counts(interactome, template)
    ]
    return np.sort(np.concatenate(picked)) if picked else np.zeros(0, dtype=np.int64)


def enumerate_degree_matched(interactome: GeneInteractome, template) -> Iterator[np.ndarray]:
    """枚举全部度匹配集合（小网络上做精确置换检验）"""
    per_bin = [
        itertools.combinations(interactome.bin_members[b].tolist(), count)
        for b, count in _bin_counts(interactome, template)
    ]
    for combo in itertools.product(*per_bin):
        yield np.sort(np.asarray([g for part in combo for g in part], dtype=np.int64))


def _null_distribution(interactome, C, T, n_perm, seed, exhaustive) -> np.ndarray:
    if exhaustive:
        C_sets = list(enumerate_degree_matched(interactome, C))
        T_sets = list(enumerate_degree_matched(interactome, T))
        samples = (proximity(interactome, c, t) for c in C_sets for t in T_sets)
    else:
        rng = np.random.default_rng(seed)
        samples = (
            proximity(interactome, sample_degree_matched(interactome, C, rng), sample_degree_matched(interactome, T, rng))
            for _ in range(n_perm)
        )
    # 不可计算的重采样直接丢弃
    return np.asarray([p for p in samples if p is not None], dtype=np.float64)


def z_score(
    interactome: GeneInteractome,
    C,
    T,
    n_perm: int = config.N_PERM,
    seed=0,
    exhaustive: bool = False,
    drug: Optional[NodeId] = None,
    disease: Optional[NodeId] = None,
) -> ProximityScore:
    """置换检验 Z 分数；P 无法计算或零方差时 Z 为 None"""
    P = proximity(interactome, C, T)
    if P is None:
        return ProximityScore(drug=drug, disease=disease, P=None, Z=None)

    null = _null_distribution(interactome, C, T, n_perm, seed, exhaustive)
    if not len(null):
        return ProximityScore(drug=drug, disease=disease, P=P, Z=None)
    mu = float(np.mean(null))
    omega = float(np.std(null))
    if omega < config.MIN_STD:
        return ProximityScore(drug=drug, disease=disease, P=P, Z=None)
    return ProximityScore(drug=drug, disease=disease, P=P, Z=(P - mu) / omega)


def rank_by_proximity(
    interactome: GeneInteractome,
    drugs: Mapping[NodeId, np.ndarray],
    disease: NodeId,
    disease_genes,
    n_perm: int = config.N_PERM,
    seed: int = 0,
    exhaustive: bool = False,
    target: Optional[NodeId] = None,
    progress: bool = False,
) -> Tuple[RankReport, List[ProximityScore]]:
    """
    按 Z 升序排列药物（越负越近），无法计算的排在最后，相同按药物编号

    每个药物的置换种子为 (seed, 药物全局编号)，与遍历顺序无关。
    """
    scores: Dict[NodeId, ProximityScore] = {}
    for drug, genes in tqdm(drugs.items(), desc="proximity", unit="drug", disable=not progress, leave=False):
        scores[drug] = z_score(
            interactome, genes, disease_genes, n_perm,
            seed=(seed, drug.global_index), exhaustive=exhaustive, drug=drug, disease=disease,
        )

    ordered = sorted(
        scores.values(),
        key=lambda s: (s.Z is None, s.Z if s.Z is not None else 0.0, s.drug.global_index),
    )
    ranked = tuple(s.drug for s in ordered)
    report = RankReport(
        disease=disease,
        drugs=ranked,
        scores=np.asarray([np.nan if s.Z is None else s.Z for s in ordered], dtype=np.float64),
        target=target,
        target_rank=ranked.index(target) + 1 if target is not None and target in scores else None,
    )
    return report, ordered
