from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.modules.cli.errors import DataValidationError


class EntityKind(IntEnum):
    """四种实体类型（顺序即全局编号的偏移顺序）"""
    DRUG = 0
    DISEASE = 1
    GENE = 2
    ANATOMY = 3

    @property
    def prefix(self) -> str:
        return ENTITY_PREFIXES[self]

    @classmethod
    def from_name(cls, name: str) -> "EntityKind":
        """根据节点名前缀（如 Compound::）识别实体类型"""
        head, sep, _ = name.partition("::")
        if not sep or head not in PREFIX_TO_KIND:
            raise DataValidationError(f"无法识别的实体前缀: {name!r}")
        return PREFIX_TO_KIND[head]


ENTITY_PREFIXES = {
    EntityKind.DRUG: "Compound",
    EntityKind.DISEASE: "Disease",
    EntityKind.GENE: "Gene",
    EntityKind.ANATOMY: "Anatomy",
}
PREFIX_TO_KIND = {prefix: kind for kind, prefix in ENTITY_PREFIXES.items()}


@dataclass(frozen=True, order=True)
class NodeId:
    # 排序按全局编号，放在第一位
    global_index: int
    kind: EntityKind = field(compare=False)
    local_index: int = field(compare=False)


@dataclass(frozen=True)
class TypedEdge:
    head: NodeId
    relation: str
    tail: NodeId


# 边数组的列：头类型、头局部编号、关系编号、尾类型、尾局部编号
EDGE_COLUMNS = 5


@dataclass(frozen=True, eq=False)
class HeteroGraph:
    """
    四层异构图（药物 / 疾病 / 基因 / 解剖部位）

    节点以「类型 + 局部编号」存储，全局编号按 Drug, Disease, Gene, Anatomy
    的固定顺序拼接，因此追加疾病节点会移动基因和解剖部位的全局编号。
    构造后不可变。
    """
    names: Tuple[Tuple[str, ...], ...]
    relations: Tuple[str, ...]
    edges: np.ndarray

    def __post_init__(self):
        if len(self.names) != len(EntityKind):
            raise DataValidationError("节点词表必须覆盖全部四种实体类型")
        edges = np.ascontiguousarray(self.edges, dtype=np.int64).reshape(-1, EDGE_COLUMNS)
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        if len(edges):
            if edges[:, 2].min() < 0 or edges[:, 2].max() >= len(self.relations):
                raise DataValidationError("边引用了未注册的关系")
            for col in (0, 3):
                kinds = edges[:, col]
                if kinds.min() < 0 or kinds.max() >= len(EntityKind):
                    raise DataValidationError("边引用了未知的实体类型")
                locals_ = edges[:, col + 1]
                counts = np.asarray(self.counts)[kinds]
                if (locals_ < 0).any() or (locals_ >= counts).any():
                    raise DataValidationError("边引用了不存在的节点")

    @classmethod
    def empty(cls) -> "HeteroGraph":
        return cls(names=((), (), (), ()), relations=(), edges=np.zeros((0, EDGE_COLUMNS)))

    # ---- 节点 ----

    @property
    def counts(self) -> Tuple[int, ...]:
        return tuple(len(names) for names in self.names)

    @property
    def num_nodes(self) -> int:
        return sum(self.counts)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def count(self, kind: EntityKind) -> int:
        return len(self.names[kind])

    def offset(self, kind: EntityKind) -> int:
        return sum(self.counts[:kind])

    @cached_property
    def vocabularies(self) -> Tuple[Dict[str, int], ...]:
        return tuple({name: i for i, name in enumerate(names)} for names in self.names)

    def node(self, kind: EntityKind, local_index: int) -> NodeId:
        if not 0 <= local_index < self.count(kind):
            raise DataValidationError(f"{kind.name} 节点编号越界: {local_index}")
        return NodeId(self.offset(kind) + local_index, kind, local_index)

    def node_by_name(self, name: str) -> NodeId:
        kind = EntityKind.from_name(name)
        local = self.vocabularies[kind].get(name)
        if local is None:
            raise DataValidationError(f"节点不存在: {name}")
        return self.node(kind, local)

    def name_of(self, node: NodeId) -> str:
        return self.names[node.kind][node.local_index]

    def nodes(self, kind: EntityKind) -> List[NodeId]:
        offset = self.offset(kind)
        return [NodeId(offset + i, kind, i) for i in range(self.count(kind))]

    def global_names(self) -> List[str]:
        """按全局编号排列的节点名"""
        return [name for names in self.names for name in names]

    # ---- 边 ----

    def relation_id(self, relation: str) -> int:
        try:
            return self.relations.index(relation)
        except ValueError:
            raise DataValidationError(f"未注册的关系: {relation}")

    def global_edges(self) -> Tuple[np.ndarray, np.ndarray]:
        """返回 (head_global, tail_global) 两个数组"""
        offsets = np.cumsum((0,) + self.counts[:-1]).astype(np.int64)
        heads = offsets[self.edges[:, 0]] + self.edges[:, 1]
        tails = offsets[self.edges[:, 3]] + self.edges[:, 4]
        return heads, tails

    def typed_edges(self, relations: Optional[Sequence[str]] = None) -> Iterable[TypedEdge]:
        """按存储顺序逐条给出边；指定 relations 时只给出这些关系的边"""
        edges = self.edges
        if relations is not None:
            wanted = [self.relations.index(r) for r in relations if r in self.relations]
            edges = edges[np.isin(edges[:, 2], wanted)]
        for h_kind, h_local, rel, t_kind, t_local in edges.tolist():
            yield TypedEdge(
                head=self.node(EntityKind(h_kind), h_local),
                relation=self.relations[rel],
                tail=self.node(EntityKind(t_kind), t_local),
            )

    def drug_disease_pairs(self, relations: Sequence[str]) -> List[Tuple[NodeId, NodeId]]:
        """
        给定关系下的 (药物, 疾病) 对，按首次出现顺序去重

        疾病→药物方向的边同样计入。
        """
        pairs = []
        seen = set()
        for edge in self.typed_edges(relations):
            kinds = (edge.head.kind, edge.tail.kind)
            if kinds == (EntityKind.DRUG, EntityKind.DISEASE):
                pair = (edge.head, edge.tail)
            elif kinds == (EntityKind.DISEASE, EntityKind.DRUG):
                pair = (edge.tail, edge.head)
            else:
                continue
            if pair not in seen:
                seen.add(pair)
                pairs.append(pair)
        return pairs

    def neighbours(self, node: NodeId, kind: Optional[EntityKind] = None) -> List[NodeId]:
        """无向邻居（可按类型过滤），按全局编号升序"""
        edges = self.edges
        result = set()
        head_mask = (edges[:, 0] == node.kind) & (edges[:, 1] == node.local_index)
        tail_mask = (edges[:, 3] == node.kind) & (edges[:, 4] == node.local_index)
        for k, local in edges[head_mask][:, 3:5].tolist() + edges[tail_mask][:, 0:2].tolist():
            if kind is None or k == kind:
                result.add(self.node(EntityKind(k), local))
        result.discard(node)
        return sorted(result)

    # ---- 变换 ----

    def with_additions(
        self,
        names: Dict[EntityKind, Sequence[str]],
        relations: Sequence[str],
        edges: np.ndarray,
    ) -> "HeteroGraph":
        """追加节点、关系与边（局部编号不变），并对三元组去重"""
        new_names = tuple(
            self.names[kind] + tuple(names.get(kind, ())) for kind in EntityKind
        )
        new_relations = self.relations + tuple(r for r in relations if r not in self.relations)
        merged = np.vstack([self.edges, np.asarray(edges, dtype=np.int64).reshape(-1, EDGE_COLUMNS)])
        return HeteroGraph(names=new_names, relations=new_relations, edges=dedup_edges(merged))

    def without_pairs(self, pairs: Iterable[Tuple[NodeId, NodeId]]) -> "HeteroGraph":
        """删除给定 (药物, 疾病) 对之间的全部边（两个方向、任意关系）"""
        drop = {(drug.local_index, disease.local_index) for drug, disease in pairs}
        if not drop or not len(self.edges):
            return self
        keep = np.ones(len(self.edges), dtype=bool)
        for i, (h_kind, h_local, _, t_kind, t_local) in enumerate(self.edges.tolist()):
            if h_kind == EntityKind.DRUG and t_kind == EntityKind.DISEASE:
                keep[i] = (h_local, t_local) not in drop
            elif h_kind == EntityKind.DISEASE and t_kind == EntityKind.DRUG:
                keep[i] = (t_local, h_local) not in drop
        return HeteroGraph(names=self.names, relations=self.relations, edges=self.edges[keep])


def dedup_edges(edges: np.ndarray) -> np.ndarray:
    """按三元组去重，保留首次出现的顺序"""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, EDGE_COLUMNS)
    if not len(edges):
        return edges
    _, first = np.unique(edges, axis=0, return_index=True)
    return edges[np.sort(first)]
