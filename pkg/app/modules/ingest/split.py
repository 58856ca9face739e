import csv
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from app.modules.cli.errors import ArtifactError, DataValidationError
from app.modules.graph.models import EntityKind, HeteroGraph, NodeId
from app.modules.ingest import config

logger = logging.getLogger(__name__)

Pair = Tuple[NodeId, NodeId]

# 随机流编号：正样本划分 / 负样本采样 / 负样本划分
POSITIVE_STREAM = 0
NEGATIVE_STREAM = 1
NEGATIVE_SPLIT_STREAM = 2


@dataclass(frozen=True)
class DatasetSplit:
    train_pos: Tuple[Pair, ...]
    test_pos: Tuple[Pair, ...]
    train_neg: Tuple[Pair, ...] = ()
    test_neg: Tuple[Pair, ...] = ()
    seed: int = 0

    @property
    def positives(self) -> Tuple[Pair, ...]:
        return self.train_pos + self.test_pos

    @property
    def negatives(self) -> Tuple[Pair, ...]:
        return self.train_neg + self.test_neg

    def fold(self, name: str) -> Tuple[np.ndarray, np.ndarray]:
        """返回某一折的 (pairs, labels)，pairs 为 (药物全局编号, 疾病全局编号) 的 M×2 数组"""
        pos, neg = (self.train_pos, self.train_neg) if name == "train" else (self.test_pos, self.test_neg)
        pairs = pairs_to_array(pos + neg)
        labels = np.concatenate([np.ones(len(pos)), np.zeros(len(neg))])
        return pairs, labels


def pairs_to_array(pairs: Sequence[Pair]) -> np.ndarray:
    return np.asarray(
        [(drug.global_index, disease.global_index) for drug, disease in pairs], dtype=np.int64
    ).reshape(len(pairs), 2)


def held_out_count(n: int, test_fraction: float) -> int:
    # 四舍五入（非银行家舍入）
    return int(np.floor(n * test_fraction + 0.5))


def _partition(items: Sequence[Pair], test_fraction: float, rng: np.random.Generator):
    order = rng.permutation(len(items))
    n_test = held_out_count(len(items), test_fraction)
    test = tuple(items[i] for i in order[:n_test])
    train = tuple(items[i] for i in order[n_test:])
    return train, test


def _check_fraction(test_fraction: float) -> None:
    if not 0.0 < test_fraction < 1.0:
        raise DataValidationError(f"test_fraction 必须在 (0, 1) 内，实际为 {test_fraction}")


def split_links(
    graph: HeteroGraph,
    seed: int,
    test_fraction: float = config.TEST_FRACTION,
    relations: Sequence[str] = config.POSITIVE_RELATIONS,
) -> DatasetSplit:
    """
    正样本（药物-疾病治疗连接）的 90/10 随机划分

    同一 (药物, 疾病) 对在多种关系下出现只计一次；给定种子时结果确定。
    """
    _check_fraction(test_fraction)
    positives = graph.drug_disease_pairs(relations)
    rng = np.random.default_rng([seed, POSITIVE_STREAM])
    train, test = _partition(positives, test_fraction, rng)
    logger.info("正样本 %d 个: 训练 %d, 测试 %d", len(positives), len(train), len(test))
    return DatasetSplit(train_pos=train, test_pos=test, seed=seed)


def _negative_grid(graph: HeteroGraph, positives: Iterable[Pair], excluded_diseases: Iterable[NodeId]):
    """候选疾病列表，以及正样本在「药物 × 候选疾病」网格中的线性编号（升序）"""
    excluded = {node.local_index for node in excluded_diseases}
    diseases = np.asarray(
        [i for i in range(graph.count(EntityKind.DISEASE)) if i not in excluded], dtype=np.int64
    )
    column = {local: j for j, local in enumerate(diseases.tolist())}
    blocked = np.unique(np.asarray(
        [drug.local_index * len(diseases) + column[disease.local_index]
         for drug, disease in positives if disease.local_index in column],
        dtype=np.int64,
    ))
    return diseases, blocked


def negative_pool_size(
    graph: HeteroGraph,
    positives: Iterable[Pair],
    excluded_diseases: Iterable[NodeId] = (),
) -> int:
    """可供采样的无连接 (药物, 疾病) 对总数"""
    diseases, blocked = _negative_grid(graph, positives, excluded_diseases)
    return graph.count(EntityKind.DRUG) * len(diseases) - len(blocked)


def sample_negatives(
    graph: HeteroGraph,
    count: int,
    seed: int,
    positives: Iterable[Pair],
    excluded_diseases: Iterable[NodeId] = (),
) -> List[Pair]:
    """
    均匀采样 count 个互不相同的无连接 (药物, 疾病) 对

    正样本对与排除的疾病（COVID-19 目标节点）不会被采到。
    """
    if count < 0:
        raise DataValidationError(f"负样本数不能为负: {count}")

    diseases, blocked = _negative_grid(graph, positives, excluded_diseases)
    n_drugs, n_diseases = graph.count(EntityKind.DRUG), len(diseases)
    available = n_drugs * n_diseases - len(blocked)
    if count > available:
        raise DataValidationError(f"负样本数 {count} 超过可用的无连接对数 {available}")
    if count == 0:
        return []

    rng = np.random.default_rng([seed, NEGATIVE_STREAM])
    ranks = rng.choice(available, size=count, replace=False)
    # 第 k 个未被占用的编号 = k + (不超过它的被占用编号个数)
    shifted = blocked - np.arange(len(blocked), dtype=np.int64)
    linear = ranks + np.searchsorted(shifted, ranks, side="right")

    drug_locals, disease_cols = np.divmod(linear, n_diseases)
    return [
        (graph.node(EntityKind.DRUG, int(d)), graph.node(EntityKind.DISEASE, int(diseases[c])))
        for d, c in zip(drug_locals, disease_cols)
    ]


def with_negatives(
    split: DatasetSplit,
    negatives: Sequence[Pair],
    test_fraction: float = config.TEST_FRACTION,
) -> DatasetSplit:
    """负样本按同样比例独立划分后并入 DatasetSplit"""
    _check_fraction(test_fraction)
    rng = np.random.default_rng([split.seed, NEGATIVE_SPLIT_STREAM])
    train, test = _partition(list(negatives), test_fraction, rng)
    logger.info("负样本 %d 个: 训练 %d, 测试 %d", len(negatives), len(train), len(test))
    return replace(split, train_neg=train, test_neg=test)


def write_split(path: Union[str, Path], graph: HeteroGraph, split: DatasetSplit) -> None:
    """drug<TAB>disease<TAB>label<TAB>fold，每行一个样本"""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, delimiter="\t", lineterminator="\n")
        for fold, label, pairs in (
            ("train", 1, split.train_pos),
            ("train", 0, split.train_neg),
            ("test", 1, split.test_pos),
            ("test", 0, split.test_neg),
        ):
            for drug, disease in pairs:
                writer.writerow([graph.name_of(drug), graph.name_of(disease), label, fold])


def read_split(path: Union[str, Path], graph: HeteroGraph, seed: int = 0) -> DatasetSplit:
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"划分文件不存在: {path}")
    buckets = {("train", "1"): [], ("train", "0"): [], ("test", "1"): [], ("test", "0"): []}
    with open(path, newline="", encoding="utf-8") as f:
        for line_no, row in enumerate(csv.reader(f, delimiter="\t"), start=1):
            if len(row) != 4 or (row[3], row[2]) not in buckets:
                raise DataValidationError(f"划分文件 {path} 第 {line_no} 行格式错误")
            buckets[(row[3], row[2])].append((graph.node_by_name(row[0]), graph.node_by_name(row[1])))
    return DatasetSplit(
        train_pos=tuple(buckets[("train", "1")]),
        test_pos=tuple(buckets[("test", "1")]),
        train_neg=tuple(buckets[("train", "0")]),
        test_neg=tuple(buckets[("test", "0")]),
        seed=seed,
    )
