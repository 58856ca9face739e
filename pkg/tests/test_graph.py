import numpy as np
import pytest

from app.modules.cli.errors import DataValidationError, StructuralError
from app.modules.graph import (
    EntityKind,
    HeteroGraph,
    SparseMatrix,
    add_self_loops,
    build_adjacency,
    degrees,
    normalize_adjacency,
    spmm,
)

PATH_TRIPLES = [
    ("Compound::a", "treats", "Disease::b"),
    ("Disease::b", "associates", "Gene::c"),
]


def dense(matrix: SparseMatrix) -> np.ndarray:
    return matrix.to_dense()


class TestHeteroGraph:
    def test_global_index_follows_kind_order(self, make_graph):
        graph = make_graph([
            ("Gene::g1", "interacts", "Gene::g2"),
            ("Compound::d1", "targets", "Gene::g1"),
            ("Anatomy::a1", "expresses", "Gene::g2"),
            ("Disease::x", "associates", "Gene::g1"),
        ])
        assert graph.counts == (1, 1, 2, 1)
        assert graph.node_by_name("Compound::d1").global_index == 0
        assert graph.node_by_name("Disease::x").global_index == 1
        assert graph.node_by_name("Gene::g2").global_index == 3
        assert graph.node_by_name("Anatomy::a1").global_index == 4

    def test_unknown_node_and_relation_rejected(self, make_graph):
        graph = make_graph(PATH_TRIPLES)
        with pytest.raises(DataValidationError):
            graph.node_by_name("Gene::missing")
        with pytest.raises(DataValidationError):
            graph.relation_id("resembles")
        with pytest.raises(DataValidationError):
            EntityKind.from_name("Protein::p1")

    def test_edges_must_reference_known_relations(self):
        edges = np.array([[0, 0, 3, 1, 0]])
        with pytest.raises(DataValidationError):
            HeteroGraph(names=(("Compound::a",), ("Disease::b",), (), ()), relations=("treats",), edges=edges)

    def test_drug_disease_pairs_accept_both_directions(self, make_graph):
        graph = make_graph([
            ("Compound::a", "treats", "Disease::x"),
            ("Disease::y", "palliates", "Compound::a"),
            ("Compound::a", "palliates", "Disease::x"),
            ("Compound::a", "targets", "Gene::g"),
        ])
        pairs = graph.drug_disease_pairs(["treats", "palliates"])
        names = [(graph.name_of(d), graph.name_of(x)) for d, x in pairs]
        assert names == [("Compound::a", "Disease::x"), ("Compound::a", "Disease::y")]

    def test_without_pairs_drops_every_relation_between_pair(self, make_graph):
        graph = make_graph([
            ("Compound::a", "treats", "Disease::x"),
            ("Disease::x", "palliates", "Compound::a"),
            ("Compound::a", "targets", "Gene::g"),
        ])
        pair = (graph.node_by_name("Compound::a"), graph.node_by_name("Disease::x"))
        reduced = graph.without_pairs([pair])
        assert reduced.num_edges == 1
        assert reduced.counts == graph.counts
        assert graph.num_edges == 3

    def test_neighbours_filtered_by_kind(self, make_graph):
        graph = make_graph([
            ("Compound::a", "targets", "Gene::g2"),
            ("Compound::a", "targets", "Gene::g1"),
            ("Compound::a", "treats", "Disease::x"),
        ])
        genes = graph.neighbours(graph.node_by_name("Compound::a"), EntityKind.GENE)
        assert [graph.name_of(g) for g in genes] == ["Gene::g2", "Gene::g1"]


class TestAdjacency:
    def test_single_edge_is_symmetric(self, make_graph):
        graph = make_graph([("Compound::a", "treats", "Disease::b")])
        assert dense(build_adjacency(graph)).tolist() == [[0, 1], [1, 0]]

    def test_no_edges_gives_zero_matrix(self):
        graph = HeteroGraph(names=(("Compound::a", "Compound::b", "Compound::c"), (), (), ()), relations=(), edges=np.zeros((0, 5)))
        A = build_adjacency(graph)
        assert A.shape == (3, 3)
        assert A.nnz == 0

    def test_empty_graph(self):
        assert build_adjacency(HeteroGraph.empty()).shape == (0, 0)

    def test_duplicate_triples_collapse(self, make_graph):
        graph = make_graph([
            ("Compound::a", "targets", "Gene::g"),
            ("Compound::a", "targets", "Gene::g"),
            ("Gene::g", "binds", "Compound::a"),
        ])
        A = build_adjacency(graph)
        assert A.nnz == 2
        assert set(A.values.tolist()) == {1.0}

    def test_order_independent(self, make_graph, rng):
        triples = [(f"Gene::{i}", "interacts", f"Gene::{j}") for i in range(8) for j in range(i + 1, 8) if (i * j) % 3 == 1]
        base = build_adjacency(make_graph(triples))
        graph = make_graph(triples)
        permuted = HeteroGraph(names=graph.names, relations=graph.relations, edges=graph.edges[rng.permutation(graph.num_edges)])
        other = build_adjacency(permuted)
        np.testing.assert_array_equal(base.row_offsets, other.row_offsets)
        np.testing.assert_array_equal(base.col_indices, other.col_indices)
        np.testing.assert_array_equal(base.values, other.values)

    def test_csr_rows_strictly_increasing(self, random_graph, rng):
        A = random_graph(rng, 15)
        assert A.row_offsets[-1] == A.nnz
        assert (np.diff(A.row_offsets) >= 0).all()
        for i in range(A.n_rows):
            cols = A.col_indices[A.row_offsets[i]:A.row_offsets[i + 1]]
            assert (np.diff(cols) > 0).all()


class TestNormalize:
    def test_two_nodes(self):
        A = SparseMatrix.from_coo([0, 1], [1, 0], [1, 1], (2, 2))
        assert dense(normalize_adjacency(A)).tolist() == [[0, 1], [1, 0]]

    def test_isolated_node(self):
        A = SparseMatrix.from_coo([], [], [], (1, 1))
        assert dense(normalize_adjacency(A)).tolist() == [[0.0]]

    def test_path(self, make_graph):
        norm = dense(normalize_adjacency(build_adjacency(make_graph(PATH_TRIPLES))))
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(norm, [[0, s, 0], [s, 0, s], [0, s, 0]], atol=1e-15)

    def test_non_symmetric_rejected(self):
        with pytest.raises(StructuralError):
            normalize_adjacency(SparseMatrix.from_coo([0], [1], [1], (2, 2)))

    def test_symmetry_preserved(self, random_graph, rng):
        for _ in range(10):
            norm = normalize_adjacency(random_graph(rng, 12))
            assert norm.is_symmetric()

    def test_spectral_radius_bounded(self, random_graph, rng):
        A = random_graph(rng, 12, density=0.5)
        # 保证连通：追加一条链
        chain = SparseMatrix.from_coo(np.arange(11), np.arange(1, 12), np.ones(11), (12, 12))
        csr = A.csr + chain.csr + chain.csr.T
        csr.data[:] = 1.0
        norm = normalize_adjacency(SparseMatrix(csr))
        x = rng.standard_normal(12)
        for _ in range(300):
            y = spmm(norm, x[:, None]).ravel()
            estimate = np.linalg.norm(y) / np.linalg.norm(x)
            x = y / np.linalg.norm(y)
        assert estimate <= 1 + 1e-9


class TestSelfLoopsAndDegrees:
    def test_add_self_loops(self):
        assert dense(add_self_loops(SparseMatrix.from_coo([], [], [], (1, 1)))).tolist() == [[1.0]]
        A = SparseMatrix.from_coo([0, 1], [1, 0], [1, 1], (2, 2))
        assert dense(add_self_loops(A)).tolist() == [[1, 1], [1, 1]]

    def test_self_loops_keep_off_diagonal(self, make_graph):
        norm = normalize_adjacency(build_adjacency(make_graph(PATH_TRIPLES)))
        looped = dense(add_self_loops(norm))
        np.testing.assert_array_equal(np.diag(looped), [1.0, 1.0, 1.0])
        off = ~np.eye(3, dtype=bool)
        np.testing.assert_array_equal(looped[off], dense(norm)[off])

    def test_non_square_rejected(self):
        with pytest.raises(StructuralError):
            add_self_loops(SparseMatrix.from_coo([0], [1], [1], (1, 2)))

    def test_degrees(self, make_graph):
        assert degrees(SparseMatrix.from_coo([0, 1], [1, 0], [1, 1], (2, 2))).tolist() == [1, 1]
        assert degrees(SparseMatrix.from_coo([], [], [], (3, 3))).tolist() == [0, 0, 0]
        assert degrees(build_adjacency(make_graph(PATH_TRIPLES))).tolist() == [1, 2, 1]


class TestSpmm:
    def test_identity_and_zero(self, rng):
        X = rng.standard_normal((4, 3))
        np.testing.assert_array_equal(spmm(SparseMatrix.identity(4), X), X)
        assert not spmm(SparseMatrix.from_coo([], [], [], (4, 4)), X).any()

    def test_matches_dense_oracle(self, random_graph, rng):
        for _ in range(50):
            n = int(rng.integers(1, 21))
            S = random_graph(rng, n)
            S = SparseMatrix(S.csr.multiply(rng.standard_normal((n, n))).tocsr())
            X = rng.standard_normal((n, 3))
            np.testing.assert_allclose(spmm(S, X), S.to_dense() @ X, rtol=0, atol=1e-12)

    def test_identity_composition_is_exact(self, random_graph, rng):
        S = normalize_adjacency(random_graph(rng, 10))
        X = rng.standard_normal((10, 4))
        np.testing.assert_array_equal(spmm(S, spmm(SparseMatrix.identity(10), X)), spmm(S, X))

    def test_dimension_mismatch(self):
        with pytest.raises(StructuralError):
            spmm(SparseMatrix.identity(3), np.ones((4, 2)))
