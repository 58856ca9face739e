import numpy as np
import pytest

from app.modules.cli.errors import ArtifactError, DataValidationError, NumericError, StructuralError
from app.modules.graph.sparse import SparseMatrix, normalize_adjacency
from app.modules.sign import (
    DiffusionFeatures,
    ModelParams,
    backward,
    checkpoint_bytes,
    encode,
    encode_rows,
    init_params,
    load_checkpoint,
    message_passing_diffusion,
    pair_logits,
    precompute_diffusion,
    save_checkpoint,
    score,
)
from app.modules.trainer.loss import weighted_bce


def zero_params(d, h, l, r):
    return ModelParams(thetas=[np.zeros((d, h))] * (r + 1), W=np.zeros(((r + 1) * h, l)), Phi=np.zeros((l, l)))


def random_diffusion(rng, n=7, d=3, r=2):
    upper = np.triu(rng.random((n, n)) < 0.5, k=1)
    rows, cols = np.nonzero(upper | upper.T)
    A = normalize_adjacency(SparseMatrix.from_coo(rows, cols, np.ones(len(rows)), (n, n)))
    return precompute_diffusion(A, rng.standard_normal((n, d)), r)


def mean_loss(params, diffusion, pairs, labels, w):
    return float(weighted_bce(pair_logits(params, diffusion, pairs), labels, w).mean())


class TestPrecompute:
    def test_zero_hops(self):
        X = np.arange(6.0).reshape(3, 2)
        diffusion = precompute_diffusion(SparseMatrix.identity(3), X, 0)
        assert diffusion.r == 0
        np.testing.assert_array_equal(diffusion.matrices[0], X)

    def test_identity_operator(self):
        X = np.arange(6.0).reshape(3, 2)
        diffusion = precompute_diffusion(SparseMatrix.identity(3), X, 3)
        for H in diffusion.matrices:
            np.testing.assert_array_equal(H, X)

    def test_two_node_swap(self):
        A = SparseMatrix.from_coo([0, 1], [1, 0], [1.0, 1.0], (2, 2))
        diffusion = precompute_diffusion(A, np.array([[1.0], [2.0]]), 2)
        np.testing.assert_array_equal(diffusion.matrices[1], [[2.0], [1.0]])
        np.testing.assert_array_equal(diffusion.matrices[2], [[1.0], [2.0]])

    def test_matches_dense_powers(self, rng, random_graph):
        for _ in range(50):
            n = int(rng.integers(2, 12))
            A = normalize_adjacency(random_graph(rng, n))
            X = rng.standard_normal((n, 3))
            diffusion = precompute_diffusion(A, X, 3)
            dense = A.to_dense()
            for k, H in enumerate(diffusion.matrices):
                np.testing.assert_allclose(H, np.linalg.matrix_power(dense, k) @ X, rtol=0, atol=1e-12)

    def test_negative_hops(self):
        with pytest.raises(DataValidationError):
            precompute_diffusion(SparseMatrix.identity(2), np.ones((2, 1)), -1)

    def test_held_out_pairs_do_not_leak(self, make_graph):
        graph = make_graph([
            ("Compound::a", "treats", "Disease::x"),
            ("Compound::a", "targets", "Gene::g"),
        ])
        held_out = graph.drug_disease_pairs(["treats"])
        X = np.eye(graph.num_nodes)
        diffusion = message_passing_diffusion(graph, X, held_out, 1)
        # 疾病 x 只有被移除的治疗边，一阶扩散后为零
        disease = graph.node_by_name("Disease::x").global_index
        np.testing.assert_array_equal(diffusion.matrices[1][disease], 0.0)


class TestInitParams:
    def test_deterministic(self):
        a = init_params(5, 4, 3, 2, seed=11)
        b = init_params(5, 4, 3, 2, seed=11)
        assert checkpoint_bytes(a) == checkpoint_bytes(b)
        assert checkpoint_bytes(a) != checkpoint_bytes(init_params(5, 4, 3, 2, seed=12))

    def test_glorot_bounds(self):
        params = init_params(400, 250, 250, 2, seed=0)
        assert np.abs(params.thetas[0]).max() <= np.sqrt(6.0 / 650)
        assert np.abs(params.W).max() <= np.sqrt(6.0 / 1000)
        assert [t.shape for t in params.tensors()] == [(400, 250)] * 3 + [(750, 250), (250, 250)]

    def test_scalar_phi_bound(self):
        params = init_params(1, 1, 1, 0, seed=3)
        assert abs(params.Phi[0, 0]) <= np.sqrt(3.0)

    def test_bad_dims(self):
        with pytest.raises(DataValidationError):
            init_params(0, 4, 3, 2, seed=0)


class TestEncode:
    def test_zero_params_give_zero_embeddings(self, rng):
        diffusion = random_diffusion(rng)
        embedding = encode(zero_params(3, 4, 5, 2), diffusion)
        assert embedding.Y.shape == (7, 5)
        np.testing.assert_array_equal(embedding.Y, 0.0)

    def test_scalar_tanh(self):
        diffusion = DiffusionFeatures((np.array([[1.0]]),))
        params = ModelParams(thetas=[np.ones((1, 1))], W=np.ones((1, 1)), Phi=np.ones((1, 1)))
        assert encode(params, diffusion).Y[0, 0] == pytest.approx(0.76159, abs=1e-5)

    def test_negative_branch_uses_leaky_slope(self):
        diffusion = DiffusionFeatures((np.array([[1.0]]),))
        params = ModelParams(thetas=[np.ones((1, 1))], W=-np.ones((1, 1)), Phi=np.ones((1, 1)))
        assert encode(params, diffusion).Y[0, 0] == pytest.approx(-0.01 * np.tanh(1.0))

    def test_rows_match_full_encoding(self, rng):
        diffusion = random_diffusion(rng)
        params = init_params(3, 4, 5, 2, seed=1)
        rows = np.array([5, 0, 3])
        np.testing.assert_array_equal(encode_rows(params, diffusion, rows).Y, encode(params, diffusion).Y[rows])

    def test_mismatched_hops(self, rng):
        with pytest.raises(StructuralError):
            encode(init_params(3, 4, 5, 1, seed=0), random_diffusion(rng, r=2))

    def test_non_finite_branch(self):
        diffusion = DiffusionFeatures((np.array([[np.inf]]),))
        params = ModelParams(thetas=[np.ones((1, 1))], W=np.ones((1, 1)), Phi=np.ones((1, 1)))
        with pytest.raises(NumericError, match="第 0 个扩散分支"):
            encode(params, diffusion)


class TestScore:
    def test_identity_phi(self):
        params = ModelParams(thetas=[np.zeros((1, 2))], W=np.zeros((2, 2)), Phi=np.eye(2))
        assert score(params, [1.0, 0.0], [1.0, 0.0]) == 1.0
        assert score(params, [1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_asymmetric_phi(self):
        params = ModelParams(thetas=[np.zeros((1, 2))], W=np.zeros((2, 2)), Phi=np.array([[0.0, 2.0], [0.0, 0.0]]))
        assert score(params, [1.0, 0.0], [0.0, 1.0]) == 2.0
        assert score(params, [0.0, 1.0], [1.0, 0.0]) == 0.0

    def test_length_mismatch(self):
        params = ModelParams(thetas=[np.zeros((1, 2))], W=np.zeros((2, 2)), Phi=np.eye(2))
        with pytest.raises(StructuralError):
            score(params, [1.0], [1.0, 0.0])


class TestBackward:
    def test_zero_params(self, rng):
        diffusion = random_diffusion(rng)
        pairs = np.array([[0, 1], [2, 3], [4, 5]])
        loss, grads = backward(zero_params(3, 4, 5, 2), diffusion, pairs, np.ones(3), 1.5)
        assert loss == pytest.approx(1.5 * np.log(2.0))
        np.testing.assert_array_equal(grads.Phi, 0.0)

    def test_empty_batch(self, rng):
        with pytest.raises(StructuralError):
            backward(init_params(3, 4, 5, 2, seed=0), random_diffusion(rng), np.zeros((0, 2)), np.zeros(0), 1.5)

    def test_finite_differences(self, rng):
        eps = 1e-5
        for instance in range(20):
            diffusion = random_diffusion(rng, n=8, d=3, r=2)
            params = init_params(3, 2, 2, 2, seed=instance)
            pairs = rng.integers(0, 8, size=(6, 2))
            labels = (rng.random(6) < 0.5).astype(float)
            _, grads = backward(params, diffusion, pairs, labels, 1.5)

            for t_index, analytic in enumerate(grads.tensors()):
                numeric = np.zeros_like(analytic)
                for idx in np.ndindex(analytic.shape):
                    tensors = [t.copy() for t in params.tensors()]
                    tensors[t_index][idx] += eps
                    up = mean_loss(ModelParams.from_tensors(tensors), diffusion, pairs, labels, 1.5)
                    tensors[t_index][idx] -= 2 * eps
                    down = mean_loss(ModelParams.from_tensors(tensors), diffusion, pairs, labels, 1.5)
                    numeric[idx] = (up - down) / (2 * eps)
                error = np.abs(analytic - numeric) / np.maximum(np.abs(analytic) + np.abs(numeric), 1e-6)
                assert error.max() < 1e-4, (instance, t_index)


class TestCheckpoint:
    def test_roundtrip(self, tmp_path):
        params = init_params(4, 3, 2, 1, seed=5)
        loaded = load_checkpoint(save_checkpoint(tmp_path / "model.ckpt", params))
        assert checkpoint_bytes(loaded) == checkpoint_bytes(params)
        assert (loaded.d, loaded.h, loaded.l, loaded.r) == (4, 3, 2, 1)

    def test_corrupted_payload(self, tmp_path):
        path = save_checkpoint(tmp_path / "model.ckpt", init_params(4, 3, 2, 1, seed=5))
        data = bytearray(path.read_bytes())
        data[40] ^= 0xFF
        path.write_bytes(bytes(data))
        with pytest.raises(DataValidationError, match="校验和"):
            load_checkpoint(path)

    def test_missing(self, tmp_path):
        with pytest.raises(ArtifactError):
            load_checkpoint(tmp_path / "model.ckpt")
