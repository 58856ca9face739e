from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.modules.graph.models import NodeId


@dataclass(frozen=True, eq=False)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auroc: float

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


@dataclass(frozen=True, eq=False)
class RankReport:
    """
    某个疾病下的药物排名

    drugs 按得分降序排列，得分相同按药物全局编号升序；
    target 为待定位的已知治疗药物，target_rank 从 1 开始。
    """
    disease: NodeId
    drugs: Tuple[NodeId, ...]
    scores: np.ndarray
    target: Optional[NodeId] = None
    target_rank: Optional[int] = None

    def __len__(self) -> int:
        return len(self.drugs)

    def rank_of(self, drug: NodeId) -> int:
        return self.drugs.index(drug) + 1

    def top(self, k: int) -> Tuple[NodeId, ...]:
        return self.drugs[:k]


@dataclass(frozen=True, eq=False)
class CovidReport:
    """
    COVID-19 预测报告

    ranks 为 (候选药物 × 目标节点) 的完整排名矩阵，行顺序同 drugs；
    union 为各目标前 K 名的去重并集，按最好名次、再按药物编号排序。
    """
    k: int
    targets: Tuple[NodeId, ...]
    reports: Tuple[RankReport, ...]
    union: Tuple[NodeId, ...]
    drugs: Tuple[NodeId, ...]
    ranks: np.ndarray

    def row_of(self, drug: NodeId) -> int:
        return self.drugs.index(drug)

    def cell(self, drug: NodeId, column: int) -> Optional[int]:
        """并集表中的单元格：名次不超过 K 时返回名次，否则为空"""
        rank = int(self.ranks[self.row_of(drug), column])
        return rank if rank <= self.k else None


@dataclass(frozen=True)
class RankComparison:
    """同一个已知治疗对在模型与网络邻近度下的名次"""
    disease: NodeId
    drug: NodeId
    model_rank: int
    proximity_rank: Optional[int]
    proximity_z: Optional[float]


RankSummary = Dict[str, float]
