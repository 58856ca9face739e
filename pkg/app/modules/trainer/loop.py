import csv
import logging
import time
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from tqdm import tqdm

from app.modules.cli.errors import NumericError, StructuralError
from app.modules.graph.models import HeteroGraph
from app.modules.ingest.split import DatasetSplit, held_out_count
from app.modules.sign import config as sign_config
from app.modules.sign.checkpoint import save_checkpoint
from app.modules.sign.encoder import backward, init_params, pair_logits
from app.modules.sign.models import DiffusionFeatures, Gradients, ModelParams
from app.modules.trainer.batches import make_batches
from app.modules.trainer.loss import weighted_bce
from app.modules.trainer.schemas import EpochRecord, TrainConfig, TrainReport

logger = logging.getLogger(__name__)

LOG_HEADER = ["epoch", "mean_loss", "seconds"]


def sgd_step(params: ModelParams, grads: Gradients, learning_rate: float) -> ModelParams:
    """θ ← θ − lr·g（返回新的参数对象）"""
    updated = []
    for name, (theta, g) in zip(_tensor_names(params), zip(params.tensors(), grads.tensors())):
        if theta.shape != g.shape:
            raise StructuralError(f"{name} 的梯度形状 {g.shape} 与参数形状 {theta.shape} 不一致")
        if not np.isfinite(g).all():
            raise NumericError(f"{name} 的梯度出现非有限值")
        updated.append(theta - learning_rate * g)
    result = ModelParams.from_tensors(updated)
    if not result.is_finite():
        raise NumericError(f"学习率 {learning_rate} 下参数更新溢出")
    return result


def _tensor_names(params: ModelParams):
    return [f"Θ{k}" for k in range(params.r + 1)] + ["W", "Φ"]


def _check_test_fraction(split: DatasetSplit, config: TrainConfig) -> None:
    # 划分在 ingest 时已写入 split.tsv，训练阶段只能提示不一致
    if "test_fraction" not in config.model_fields_set:
        return
    n = len(split.positives)
    if held_out_count(n, config.test_fraction) != len(split.test_pos):
        logger.warning(
            "配置的 test_fraction=%s 与已有划分不符（%d 个正样本中 %d 个在测试集），沿用已有划分；如需修改请重新运行 ingest --test-fraction",
            config.test_fraction, n, len(split.test_pos),
        )


def batch_loss(
    params: ModelParams,
    diffusion: DiffusionFeatures,
    pairs: np.ndarray,
    labels: np.ndarray,
    w: float,
) -> float:
    """不求梯度的平均加权交叉熵"""
    if not len(labels):
        return 0.0
    logits = pair_logits(params, diffusion, pairs)
    return float(weighted_bce(logits, labels, w).mean())


def train(
    graph: HeteroGraph,
    diffusion: DiffusionFeatures,
    split: DatasetSplit,
    config: TrainConfig,
    checkpoint_path: Optional[Union[str, Path]] = None,
    log_path: Optional[Union[str, Path]] = None,
) -> Tuple[ModelParams, TrainReport]:
    """
    SGD 训练

    每个 epoch 用 (seed, epoch) 作为批次随机种子；数值错误带上轮次与批次重新抛出。
    """
    if diffusion.n_nodes != graph.num_nodes:
        raise StructuralError(f"扩散特征行数 {diffusion.n_nodes} 与图节点数 {graph.num_nodes} 不一致")
    if config.hops != diffusion.r:
        raise StructuralError(f"配置的扩散阶数 {config.hops} 与预计算的 {diffusion.r} 不一致")

    _check_test_fraction(split, config)

    started = time.perf_counter()
    params = init_params(diffusion.dim, config.branch_width, config.embed_dim, diffusion.r, config.seed)
    train_pairs, train_labels = split.fold("train")
    report = TrainReport(initial_loss=batch_loss(params, diffusion, train_pairs, train_labels, config.pos_weight))
    logger.info("初始训练损失 %.6f", report.initial_loss)

    log_file = open(log_path, "w", newline="", encoding="utf-8") if log_path else None
    try:
        writer = csv.writer(log_file, lineterminator="\n") if log_file else None
        if writer:
            writer.writerow(LOG_HEADER)

        for epoch in range(config.epochs):
            epoch_started = time.perf_counter()
            batches = make_batches(split, config, (config.seed, epoch))
            losses = []
            progress = tqdm(batches, desc=f"epoch {epoch + 1}/{config.epochs}", unit="batch", disable=not config.progress, leave=False)
            for b, batch in enumerate(progress, start=1):
                try:
                    loss, grads = backward(params, diffusion, batch.pairs, batch.labels, config.pos_weight, sign_config.LEAKY_SLOPE)
                    params = sgd_step(params, grads, config.learning_rate)
                except NumericError as e:
                    raise NumericError(f"第 {epoch + 1} 轮第 {b} 批: {e.detail}")
                losses.append(loss)
                progress.set_postfix(loss=f"{loss:.4f}")

            record = EpochRecord(
                epoch=epoch + 1,
                mean_loss=float(np.mean(losses)),
                seconds=round(time.perf_counter() - epoch_started, 3),
            )
            report.epochs.append(record)
            if writer:
                writer.writerow([record.epoch, repr(record.mean_loss), record.seconds])
            logger.info("第 %d 轮: 平均损失 %.6f, %d 批, 用时 %.2fs", record.epoch, record.mean_loss, len(batches), record.seconds)
    finally:
        if log_file:
            log_file.close()

    if checkpoint_path:
        report.checkpoint = str(save_checkpoint(checkpoint_path, params))
    report.seconds = round(time.perf_counter() - started, 3)
    return params, report
