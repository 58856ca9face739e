import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from app.modules.cli.errors import DataValidationError
from app.modules.graph.models import EntityKind, HeteroGraph, NodeId, dedup_edges
from app.modules.ingest import config
from app.modules.ingest.edge_parser import EdgeRecord
from app.modules.ingest.features import FeatureTable, build_feature_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CovidTargetSet:
    """注入的 COVID-19 目标节点及其基因连接（NodeId 相对注入后的图）"""
    targets: Tuple[NodeId, ...]
    links: Tuple[Tuple[NodeId, NodeId], ...]

    def __len__(self) -> int:
        return len(self.targets)


class _Vocabulary:
    """按首次出现顺序分配局部编号"""

    def __init__(self, graph: HeteroGraph = None):
        base = graph.names if graph is not None else ((), (), (), ())
        self.names: List[List[str]] = [list(names) for names in base]
        self.index: List[Dict[str, int]] = [{n: i for i, n in enumerate(names)} for names in base]
        self.relations: List[str] = list(graph.relations) if graph is not None else []
        self.relation_index = {r: i for i, r in enumerate(self.relations)}

    def node(self, name: str) -> Tuple[int, int]:
        kind = EntityKind.from_name(name)
        local = self.index[kind].get(name)
        if local is None:
            local = len(self.names[kind])
            self.names[kind].append(name)
            self.index[kind][name] = local
        return kind, local

    def relation(self, label: str) -> int:
        rel = self.relation_index.get(label)
        if rel is None:
            rel = len(self.relations)
            self.relations.append(label)
            self.relation_index[label] = rel
        return rel

    def edge_rows(self, records: Sequence[EdgeRecord]) -> np.ndarray:
        rows = np.empty((len(records), 5), dtype=np.int64)
        for i, record in enumerate(records):
            h_kind, h_local = self.node(record.head_name)
            rel = self.relation(record.relation)
            t_kind, t_local = self.node(record.tail_name)
            rows[i] = (h_kind, h_local, rel, t_kind, t_local)
        return rows


def build_graph(
    records: Sequence[EdgeRecord],
    features: FeatureTable,
    strict_counts: bool = False,
) -> Tuple[HeteroGraph, np.ndarray]:
    """
    由边记录构建异构图并对齐特征矩阵

    词表与关系注册表都按首次出现顺序分配；重复三元组被去除。
    strict_counts 打开时校验全量 DRKG 的节点数与边数。
    """
    vocab = _Vocabulary()
    edges = dedup_edges(vocab.edge_rows(records))
    graph = HeteroGraph(
        names=tuple(tuple(names) for names in vocab.names),
        relations=tuple(vocab.relations),
        edges=edges,
    )
    logger.info(
        "异构图构建完成: 药物 %d, 疾病 %d, 基因 %d, 解剖部位 %d, 边 %d",
        *graph.counts,
        graph.num_edges,
    )

    if strict_counts:
        if graph.counts != config.EXPECTED_NODE_COUNTS:
            raise DataValidationError(
                f"节点数与全量数据不符: 实际 {graph.counts}，期望 {config.EXPECTED_NODE_COUNTS}"
            )
        if graph.num_edges != config.EXPECTED_LINKS:
            raise DataValidationError(
                f"边数与全量数据不符: 实际 {graph.num_edges}，期望 {config.EXPECTED_LINKS}"
            )

    return graph, build_feature_matrix(graph, features)


def inject_covid_nodes(
    graph: HeteroGraph,
    records: Sequence[EdgeRecord],
    strict_counts: bool = False,
) -> Tuple[HeteroGraph, CovidTargetSet]:
    """
    注入 COVID-19 目标节点（病毒蛋白与冠状病毒疾病）

    这些节点只有「疾病侧 → 基因」的连接，不存在任何药物连接。
    返回注入后的新图和目标集合；注入疾病节点会改变基因与解剖部位的全局编号，
    特征矩阵需要重新对齐。
    """
    if not records:
        return graph, CovidTargetSet(targets=(), links=())

    for line_no, record in enumerate(records, start=1):
        if record.head_kind != EntityKind.DISEASE:
            raise DataValidationError(f"COVID 边第 {line_no} 条的头节点不是疾病: {record.head_name}")
        if record.tail_kind != EntityKind.GENE:
            raise DataValidationError(f"COVID 边第 {line_no} 条的尾节点不是基因: {record.tail_name}")

    vocab = _Vocabulary(graph)
    before = graph.counts
    rows = vocab.edge_rows(records)
    new_genes = len(vocab.names[EntityKind.GENE]) - before[EntityKind.GENE]
    if new_genes:
        logger.warning("COVID 边引用了 %d 个原图中不存在的基因，已追加", new_genes)

    injected = graph.with_additions(
        names={kind: vocab.names[kind][before[kind]:] for kind in EntityKind},
        relations=vocab.relations[len(graph.relations):],
        edges=rows,
    )

    target_names: List[str] = []
    for record in records:
        if record.head_name not in target_names:
            target_names.append(record.head_name)
    reused = [name for name in target_names if name in graph.vocabularies[EntityKind.DISEASE]]
    if reused:
        logger.warning("%d 个 COVID 目标节点已存在于原图中: %s", len(reused), ", ".join(reused))

    links = []
    seen = set()
    for record in records:
        key = (record.head_name, record.tail_name)
        if key not in seen:
            seen.add(key)
            links.append((injected.node_by_name(record.head_name), injected.node_by_name(record.tail_name)))
    targets = CovidTargetSet(
        targets=tuple(injected.node_by_name(name) for name in target_names),
        links=tuple(links),
    )
    logger.info("注入 COVID-19 目标节点 %d 个，基因连接 %d 条", len(targets.targets), len(targets.links))

    if strict_counts:
        if len(targets.targets) != config.EXPECTED_COVID_TARGETS:
            raise DataValidationError(
                f"COVID 目标节点数不符: 实际 {len(targets.targets)}，期望 {config.EXPECTED_COVID_TARGETS}"
            )
        if len(targets.links) != config.EXPECTED_COVID_LINKS:
            raise DataValidationError(
                f"COVID 基因连接数不符: 实际 {len(targets.links)}，期望 {config.EXPECTED_COVID_LINKS}"
            )

    return injected, targets
