import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from app.modules.cli.errors import DataValidationError
from app.modules.ingest.split import DatasetSplit, pairs_to_array

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Batch:
    drugs: np.ndarray
    diseases: np.ndarray
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def pairs(self) -> np.ndarray:
        return np.column_stack([self.drugs, self.diseases])

    @property
    def n_pos(self) -> int:
        return int(self.labels.sum())


def _batch(pos: np.ndarray, neg: np.ndarray) -> Batch:
    pairs = np.vstack([pos, neg])
    labels = np.concatenate([np.ones(len(pos)), np.zeros(len(neg))])
    return Batch(drugs=pairs[:, 0], diseases=pairs[:, 1], labels=labels)


def positives_per_batch(batch_size: int, ratio: float) -> int:
    """满批中的正样本数：batch_size / (1 + ratio) 四舍五入"""
    return int(np.floor(batch_size / (1.0 + ratio) + 0.5))


def make_batches(split: DatasetSplit, config, epoch_seed) -> List[Batch]:
    """
    构造一个 epoch 的批次

    负样本打乱后每个 epoch 恰好用一次；正样本有放回地过采样，使每批的
    负/正比例保持在 batch_neg_pos_ratio。比例为 0 时每批只有正样本。
    """
    pos = pairs_to_array(split.train_pos)
    neg = pairs_to_array(split.train_neg)
    if not len(pos):
        raise DataValidationError("训练集没有正样本")

    rng = np.random.default_rng(epoch_seed)
    batch_size, ratio = config.batch_size, config.batch_neg_pos_ratio

    if ratio == 0:
        order = rng.permutation(len(pos))
        return [
            _batch(pos[order[start:start + batch_size]], neg[:0])
            for start in range(0, len(pos), batch_size)
        ]

    if not len(neg):
        raise DataValidationError("训练集没有负样本，无法保持批内类别比例")

    n_pos = positives_per_batch(batch_size, ratio)
    n_neg = max(batch_size - n_pos, 1)
    n_pos = batch_size - n_neg

    order = rng.permutation(len(neg))
    batches = []
    for start in range(0, len(neg), n_neg):
        chunk = order[start:start + n_neg]
        # 末尾的短批按同样比例取整
        k = n_pos if len(chunk) == n_neg else max(1, int(np.floor(len(chunk) / ratio + 0.5)))
        drawn = rng.integers(0, len(pos), size=k)
        batches.append(_batch(pos[drawn], neg[chunk]))
    return batches
