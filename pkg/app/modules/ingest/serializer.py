"""
ingest 阶段产物的读写：graph.bin、targets.tsv，以及下游命令使用的产物加载

graph.bin 布局（全部小端）:
    magic(8 字节) | version:int64 | 四种实体的节点数:int64×4
    | 每个节点名: 长度:int64 + UTF-8 字节 | 关系数:int64 | 每个关系名同上
    | 边数:int64 | 边数组 int64×(E×5)
"""
import csv
import io
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from app.modules.cli.errors import ArtifactError, DataValidationError
from app.modules.graph.models import EDGE_COLUMNS, HeteroGraph
from app.modules.ingest.builder import CovidTargetSet
from app.modules.ingest.features import FeatureReader
from app.modules.ingest.split import DatasetSplit, read_split
from storage import FEATURES_FILE, GRAPH_FILE, SPLIT_FILE, TARGETS_FILE, StageDir

GRAPH_MAGIC = b"DRCVGRPH"
GRAPH_VERSION = 1
INT64 = struct.Struct("<q")


def _write_string(buffer: io.BytesIO, text: str) -> None:
    data = text.encode("utf-8")
    buffer.write(INT64.pack(len(data)))
    buffer.write(data)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def int64(self) -> int:
        if self.pos + 8 > len(self.data):
            raise DataValidationError("graph.bin 数据被截断")
        (value,) = INT64.unpack_from(self.data, self.pos)
        self.pos += 8
        return value

    def string(self) -> str:
        length = self.int64()
        raw = self.data[self.pos:self.pos + length]
        if len(raw) != length:
            raise DataValidationError("graph.bin 数据被截断")
        self.pos += length
        return raw.decode("utf-8")


def write_graph(path: Union[str, Path], graph: HeteroGraph) -> None:
    buffer = io.BytesIO()
    buffer.write(GRAPH_MAGIC)
    buffer.write(INT64.pack(GRAPH_VERSION))
    for count in graph.counts:
        buffer.write(INT64.pack(count))
    for names in graph.names:
        for name in names:
            _write_string(buffer, name)
    buffer.write(INT64.pack(len(graph.relations)))
    for relation in graph.relations:
        _write_string(buffer, relation)
    buffer.write(INT64.pack(graph.num_edges))
    buffer.write(np.ascontiguousarray(graph.edges, dtype="<i8").tobytes(order="C"))
    Path(path).write_bytes(buffer.getvalue())


def read_graph(path: Union[str, Path]) -> HeteroGraph:
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"图文件不存在: {path}")
    data = path.read_bytes()
    if not data.startswith(GRAPH_MAGIC):
        raise DataValidationError(f"不是 graph.bin 文件: {path}")

    reader = _Reader(data)
    reader.pos = len(GRAPH_MAGIC)
    version = reader.int64()
    if version != GRAPH_VERSION:
        raise DataValidationError(f"不支持的 graph.bin 版本: {version}")
    counts = [reader.int64() for _ in range(4)]
    names = tuple(tuple(reader.string() for _ in range(count)) for count in counts)
    relations = tuple(reader.string() for _ in range(reader.int64()))
    n_edges = reader.int64()
    expected = reader.pos + n_edges * EDGE_COLUMNS * 8
    if len(data) != expected:
        raise DataValidationError(f"graph.bin 长度错误: 应为 {expected} 字节，实际 {len(data)}")
    if n_edges:
        edges = np.frombuffer(data, dtype="<i8", count=n_edges * EDGE_COLUMNS, offset=reader.pos)
    else:
        edges = np.zeros(0, dtype=np.int64)
    return HeteroGraph(names=names, relations=relations, edges=edges.reshape(n_edges, EDGE_COLUMNS))


def write_targets(path: Union[str, Path], graph: HeteroGraph, targets: CovidTargetSet) -> None:
    """target<TAB>gene，每行一条基因连接；没有连接的目标不会出现"""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, delimiter="\t", lineterminator="\n")
        for target, gene in targets.links:
            writer.writerow([graph.name_of(target), graph.name_of(gene)])


def read_targets(path: Union[str, Path], graph: HeteroGraph) -> CovidTargetSet:
    path = Path(path)
    if not path.exists():
        return CovidTargetSet(targets=(), links=())
    target_names: List[str] = []
    links = []
    with open(path, newline="", encoding="utf-8") as f:
        for line_no, row in enumerate(csv.reader(f, delimiter="\t"), start=1):
            if len(row) != 2:
                raise DataValidationError(f"目标文件 {path} 第 {line_no} 行格式错误")
            if row[0] not in target_names:
                target_names.append(row[0])
            links.append((graph.node_by_name(row[0]), graph.node_by_name(row[1])))
    return CovidTargetSet(
        targets=tuple(graph.node_by_name(name) for name in target_names),
        links=tuple(links),
    )


@dataclass(frozen=True, eq=False)
class IngestArtifacts:
    """ingest 阶段产物（下游命令共用）"""
    graph: HeteroGraph
    features: np.ndarray
    split: DatasetSplit
    targets: CovidTargetSet
    paths: Tuple[Path, ...]


def load_artifacts(stage_dir: Union[str, Path], seed: int = 0) -> IngestArtifacts:
    """读取 graph.bin / features.bin / split.tsv / targets.tsv 并校验特征与图对齐"""
    stage = StageDir(stage_dir)
    paths = tuple(stage.require(name, "ingest") for name in (GRAPH_FILE, FEATURES_FILE, SPLIT_FILE))

    graph = read_graph(paths[0])
    table = FeatureReader.read(paths[1])
    if list(table.names) != graph.global_names():
        raise DataValidationError(f"{paths[1]} 的行顺序与 {paths[0]} 的全局编号不一致")
    return IngestArtifacts(
        graph=graph,
        features=table.vectors,
        split=read_split(paths[2], graph, seed),
        targets=read_targets(stage / TARGETS_FILE, graph),
        paths=paths,
    )
