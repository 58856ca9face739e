import logging
from typing import Sequence, Tuple

import numpy as np
from scipy.stats import rankdata
from sklearn.metrics import roc_curve

from app.modules.cli.errors import DataValidationError
from app.modules.evaluator import config
from app.modules.evaluator.models import RankReport, RankSummary, RocCurve

logger = logging.getLogger(__name__)


def auroc(scores, labels) -> Tuple[RocCurve, float]:
    """
    AUROC（Mann–Whitney 秩统计量，并列取平均秩）与 ROC 曲线

    曲线逐个唯一阈值扫描，首尾分别为 (0,0) 和 (1,1)；
    起点阈值取最高得分加 1（sklearn 给出的是 inf）。
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel().astype(bool)
    if len(scores) != len(labels):
        raise DataValidationError(f"得分数 {len(scores)} 与标签数 {len(labels)} 不一致")
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataValidationError(f"AUROC 需要同时包含正负样本（正 {n_pos}, 负 {n_neg}）")

    ranks = rankdata(scores, method="average")
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    value = float(u / (n_pos * n_neg))

    fpr, tpr, thresholds = roc_curve(labels, scores, drop_intermediate=False)
    thresholds = np.where(np.isfinite(thresholds), thresholds, scores.max() + 1.0)
    return RocCurve(fpr=fpr, tpr=tpr, thresholds=thresholds, auroc=value), value


def rank_summary(reports: Sequence[RankReport], cutoff: int = config.TOP_RANK_CUTOFF) -> RankSummary:
    """已知治疗药物名次的中位数、进入前 cutoff 名的比例，以及相对药物总数的中位分位"""
    ranks = np.asarray([r.target_rank for r in reports if r.target_rank is not None], dtype=np.float64)
    if not len(ranks):
        return {"count": 0, "median_rank": float("nan"), "top_fraction": float("nan"), "median_percentile": float("nan")}
    n_drugs = len(reports[0])
    return {
        "count": int(len(ranks)),
        "median_rank": float(np.median(ranks)),
        "top_fraction": float(np.mean(ranks <= cutoff)),
        "median_percentile": float(np.median(ranks) / n_drugs),
    }
