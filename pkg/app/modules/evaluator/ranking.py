import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.modules.cli.errors import DataValidationError
from app.modules.evaluator import config
from app.modules.evaluator.metrics import auroc
from app.modules.evaluator.models import CovidReport, RankComparison, RankReport, RocCurve
from app.modules.graph.models import NodeId
from app.modules.ingest.builder import CovidTargetSet
from app.modules.ingest.split import DatasetSplit
from app.modules.sign.encoder import score_pairs
from app.modules.sign.models import EmbeddingMatrix, ModelParams

logger = logging.getLogger(__name__)


def _embedding_rows(embeddings) -> np.ndarray:
    Y = embeddings.Y if isinstance(embeddings, EmbeddingMatrix) else embeddings
    if isinstance(embeddings, EmbeddingMatrix) and embeddings.rows is not None:
        raise DataValidationError("排名需要全部节点的嵌入")
    return np.asarray(Y, dtype=np.float64)


def order_by_score(scores: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """得分降序、全局编号升序的排列"""
    return np.lexsort((indices, -scores))


def rank_drugs(
    params: ModelParams,
    embeddings,
    disease: NodeId,
    drugs: Sequence[NodeId],
    target: Optional[NodeId] = None,
) -> RankReport:
    """用双线性 logit 对候选药物排序，并定位 target 的名次"""
    Y = _embedding_rows(embeddings)
    if disease.global_index >= len(Y):
        raise DataValidationError(f"缺少疾病节点的嵌入: 全局编号 {disease.global_index}")
    if not drugs:
        raise DataValidationError("候选药物为空")

    indices = np.asarray([drug.global_index for drug in drugs], dtype=np.int64)
    logits = Y[indices] @ (params.Phi @ Y[disease.global_index])
    order = order_by_score(logits, indices)
    ranked = tuple(drugs[i] for i in order)

    target_rank = None
    if target is not None:
        target_rank = ranked.index(target) + 1
    return RankReport(disease=disease, drugs=ranked, scores=logits[order], target=target, target_rank=target_rank)


def evaluate_test_set(
    params: ModelParams,
    embeddings,
    split: DatasetSplit,
    drugs: Sequence[NodeId],
) -> Tuple[RocCurve, List[RankReport]]:
    """
    测试集 AUROC，以及每个测试正样本在其疾病下的全药物排名

    同一疾病的排名只计算一次，多个测试正样本共用。
    """
    Y = _embedding_rows(embeddings)
    pairs, labels = split.fold("test")
    if not len(labels):
        raise DataValidationError("测试集为空")
    logits = score_pairs(params, Y[pairs[:, 0]], Y[pairs[:, 1]])
    curve, value = auroc(logits, labels)
    logger.info("测试集 AUROC = %.4f（正 %d, 负 %d）", value, len(split.test_pos), len(split.test_neg))

    by_disease: Dict[NodeId, RankReport] = {}
    reports = []
    for drug, disease in split.test_pos:
        if disease not in by_disease:
            by_disease[disease] = rank_drugs(params, Y, disease, drugs)
        base = by_disease[disease]
        reports.append(RankReport(
            disease=disease,
            drugs=base.drugs,
            scores=base.scores,
            target=drug,
            target_rank=base.rank_of(drug),
        ))
    return curve, reports


def covid_report(
    params: ModelParams,
    embeddings,
    targets: CovidTargetSet,
    drugs: Sequence[NodeId],
    k: int = config.TOP_K,
) -> CovidReport:
    """每个 COVID-19 目标节点的全药物排名、前 K 名与去重并集"""
    if not len(targets):
        raise DataValidationError("没有 COVID-19 目标节点，请在 ingest 时提供 --covid")
    if k <= 0:
        raise DataValidationError(f"K 必须为正: {k}")

    reports = tuple(rank_drugs(params, embeddings, target, drugs) for target in targets.targets)
    ranks = np.zeros((len(drugs), len(reports)), dtype=np.int64)
    position = {drug: i for i, drug in enumerate(drugs)}
    for column, report in enumerate(reports):
        for rank, drug in enumerate(report.drugs, start=1):
            ranks[position[drug], column] = rank

    best: Dict[NodeId, int] = {}
    for report in reports:
        for rank, drug in enumerate(report.top(k), start=1):
            best[drug] = min(best.get(drug, rank), rank)
    union = tuple(sorted(best, key=lambda drug: (best[drug], drug.global_index)))
    logger.info("%d 个目标节点的前 %d 名去重后共 %d 个药物", len(reports), k, len(union))
    return CovidReport(k=k, targets=tuple(targets.targets), reports=reports, union=union, drugs=tuple(drugs), ranks=ranks)


def compare_rankings(
    model_reports: Sequence[RankReport],
    proximity_reports: Dict[NodeId, RankReport],
    proximity_z: Dict[Tuple[NodeId, NodeId], Optional[float]],
) -> List[RankComparison]:
    """
    已知治疗对在两种方法下的名次

    网络邻近度无法计算（Z 为空）的药物记为 None。
    """
    rows = []
    for report in model_reports:
        if report.target is None:
            continue
        z = proximity_z.get((report.target, report.disease))
        proximity_rank = None
        if z is not None and report.disease in proximity_reports:
            proximity_rank = proximity_reports[report.disease].rank_of(report.target)
        rows.append(RankComparison(
            disease=report.disease,
            drug=report.target,
            model_rank=report.target_rank,
            proximity_rank=proximity_rank,
            proximity_z=z,
        ))
    return rows
