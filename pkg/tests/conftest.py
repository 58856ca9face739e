import json
from pathlib import Path

import numpy as np
import pytest

import main
from app.modules.graph.models import HeteroGraph
from app.modules.graph.sparse import SparseMatrix
from app.modules.ingest.builder import build_graph
from app.modules.ingest.edge_parser import EdgeRecord
from app.modules.ingest.features import FeatureTable

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def graph_from_triples(triples) -> HeteroGraph:
    graph, _ = build_graph([EdgeRecord(*t) for t in triples], FeatureTable([], np.zeros((0, 2))))
    return graph


def random_symmetric(rng: np.random.Generator, n: int, density: float = 0.35) -> SparseMatrix:
    """随机无向二值图（无自环）"""
    upper = np.triu(rng.random((n, n)) < density, k=1)
    dense = (upper | upper.T).astype(np.float64)
    rows, cols = np.nonzero(dense)
    return SparseMatrix.from_coo(rows, cols, np.ones(len(rows)), (n, n))


def write_planted_dataset(directory: Path, seed: int):
    """
    40 药物 / 20 疾病 / 60 基因 / 5 解剖部位，分成 10 个社区

    同社区的药物-疾病对全部标为 treats，不同社区之间没有治疗关系；
    每个社区 6 个基因连成环，药物和疾病各连社区内 2 个基因。
    特征为社区 one-hot 加少量噪声。
    """
    rng = np.random.default_rng(seed)
    n_comm = 10
    drugs = [f"Compound::P{i:03d}" for i in range(40)]
    diseases = [f"Disease::P{j:03d}" for j in range(20)]
    genes = [f"Gene::P{g:03d}" for g in range(60)]
    anatomies = [f"Anatomy::P{a:03d}" for a in range(5)]

    lines = []
    for i, drug in enumerate(drugs):
        c = i % n_comm
        for j, disease in enumerate(diseases):
            if j % n_comm == c:
                lines.append((drug, "treats", disease))
        for g in rng.choice(6, size=2, replace=False):
            lines.append((drug, "targets", genes[c * 6 + int(g)]))
    for j, disease in enumerate(diseases):
        c = j % n_comm
        for g in rng.choice(6, size=2, replace=False):
            lines.append((disease, "associates", genes[c * 6 + int(g)]))
        lines.append((disease, "localizes", anatomies[int(rng.integers(5))]))
    for c in range(n_comm):
        for g in range(6):
            lines.append((genes[c * 6 + g], "interacts", genes[c * 6 + (g + 1) % 6]))
    for g, gene in enumerate(genes):
        lines.append((anatomies[g % 5], "expresses", gene))

    edges = directory / "planted_edges.tsv"
    edges.write_text("".join("\t".join(line) + "\n" for line in lines), encoding="utf-8")

    def community(name: str) -> int:
        kind, _, local = name.partition("::")
        index = int(local[1:])
        return {"Compound": index % n_comm, "Disease": index % n_comm, "Gene": index // 6}.get(kind, -1)

    feature_lines = []
    for name in drugs + diseases + genes + anatomies:
        vector = np.zeros(n_comm + 2)
        if community(name) >= 0:
            vector[community(name)] = 1.0
        vector += 0.05 * rng.standard_normal(len(vector))
        feature_lines.append(name + " " + " ".join(f"{v:.6f}" for v in vector))
    features = directory / "planted_features.txt"
    features.write_text("\n".join(feature_lines) + "\n", encoding="utf-8")
    return edges, features


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def make_graph():
    return graph_from_triples


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def run_cli(capsys):
    """运行命令行，返回 (退出码, 输出的 JSON 或 None)"""

    def run(*argv):
        code = main.main([str(a) for a in argv])
        out = capsys.readouterr().out
        return int(code), (json.loads(out) if out.strip() else None)

    return run


@pytest.fixture
def ingested(tmp_path, run_cli):
    """在 bundled 小数据集上跑完 ingest 的产物目录"""
    out = tmp_path / "run"
    code, _ = run_cli(
        "--out", out, "--seed", 7, "ingest",
        "--edges", FIXTURES / "edges.tsv",
        "--features", FIXTURES / "features.txt",
        "--covid", FIXTURES / "covid.tsv",
    )
    assert code == 0
    return out


@pytest.fixture
def random_graph():
    return random_symmetric


@pytest.fixture
def planted_dataset():
    return write_planted_dataset
