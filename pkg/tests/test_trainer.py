import numpy as np
import pytest

from app.modules.cli.errors import DataValidationError, NumericError, StructuralError
from app.modules.ingest import (
    EdgeParser,
    FeatureReader,
    build_graph,
    sample_negatives,
    split_links,
    with_negatives,
)
from app.modules.ingest.split import DatasetSplit
from app.modules.sign import checkpoint_bytes, init_params, message_passing_diffusion
from app.modules.sign.models import Gradients, ModelParams
from app.modules.trainer import TrainConfig, make_batches, positives_per_batch, weighted_bce, weighted_bce_grad
from app.modules.trainer import loop
from app.modules.trainer.loop import batch_loss, sgd_step, train


@pytest.fixture
def fixture_setup(fixtures_dir):
    graph, features = build_graph(
        EdgeParser.parse_edge_file(fixtures_dir / "edges.tsv"),
        FeatureReader.read(fixtures_dir / "features.txt"),
    )
    split = split_links(graph, seed=3)
    split = with_negatives(split, sample_negatives(graph, 60, 3, split.positives))
    diffusion = message_passing_diffusion(graph, features, split.test_pos, 2)
    return graph, diffusion, split


def small_config(**overrides):
    values = dict(batch_size=16, epochs=2, learning_rate=0.1, branch_width=8, embed_dim=8, hops=2, seed=3, progress=False)
    values.update(overrides)
    return TrainConfig(**values)


def synthetic_split(make_graph, n_pos, n_neg):
    n = max(n_pos, n_neg) + 1
    triples = [(f"Compound::d{i}", "treats", f"Disease::x{i}") for i in range(n)]
    graph = make_graph(triples)
    pairs = graph.drug_disease_pairs(["treats"])
    negatives = [(pairs[i][0], pairs[(i + 1) % n][1]) for i in range(n)]
    return DatasetSplit(train_pos=tuple(pairs[:n_pos]), test_pos=(), train_neg=tuple(negatives[:n_neg]))


class TestLoss:
    def test_known_values(self):
        assert weighted_bce(0.0, 1, 1.5) == pytest.approx(1.5 * np.log(2.0))
        assert weighted_bce(0.0, 0, 1.5) == pytest.approx(np.log(2.0))
        assert weighted_bce(2.0, 1, 1.0) == pytest.approx(np.log1p(np.exp(-2.0)))

    def test_non_negative(self, rng):
        logits = rng.normal(scale=10, size=1000)
        labels = rng.integers(0, 2, size=1000)
        assert (weighted_bce(logits, labels, 1.5) >= 0).all()

    def test_matches_naive_formula(self, rng):
        logits = rng.normal(scale=3, size=500)
        labels = rng.integers(0, 2, size=500)
        sigma = 1.0 / (1.0 + np.exp(-logits))
        naive = -(1.5 * labels * np.log(sigma) + (1 - labels) * np.log(1 - sigma))
        np.testing.assert_allclose(weighted_bce(logits, labels, 1.5), naive, rtol=0, atol=1e-10)

    def test_large_logits_stay_finite(self):
        values = weighted_bce(np.array([700.0, -700.0, 700.0, -700.0]), np.array([1, 1, 0, 0]), 1.5)
        assert np.isfinite(values).all()
        assert values[1] == pytest.approx(1.5 * 700.0)
        assert values[2] == pytest.approx(700.0)

    def test_gradient_matches_difference(self, rng):
        logits = rng.normal(size=50)
        labels = rng.integers(0, 2, size=50)
        eps = 1e-6
        numeric = (weighted_bce(logits + eps, labels, 1.5) - weighted_bce(logits - eps, labels, 1.5)) / (2 * eps)
        np.testing.assert_allclose(weighted_bce_grad(logits, labels, 1.5), numeric, atol=1e-7)


class TestBatches:
    def test_default_proportions(self):
        assert positives_per_batch(512, 1.5) == 205

    def test_full_batch_layout(self, make_graph):
        split = synthetic_split(make_graph, 20, 40)
        batches = make_batches(split, small_config(batch_size=10), epoch_seed=(0, 0))
        # 40 个负样本: 6 个满批 (4 正 6 负)，末批 4 负配 3 正
        assert [len(b) for b in batches] == [10] * 6 + [7]
        assert batches[-1].n_pos == 3
        batches = batches[:-1]
        assert all(b.n_pos == 4 for b in batches)

    def test_every_negative_once(self, make_graph):
        split = synthetic_split(make_graph, 20, 37)
        batches = make_batches(split, small_config(batch_size=10), epoch_seed=(1, 0))
        used = [tuple(pair) for b in batches for pair, label in zip(b.pairs.tolist(), b.labels) if label == 0]
        assert sorted(used) == sorted((d.global_index, x.global_index) for d, x in split.train_neg)

    def test_short_tail_batch(self, make_graph):
        split = synthetic_split(make_graph, 5, 10)
        batches = make_batches(split, small_config(batch_size=512, batch_neg_pos_ratio=1.5), epoch_seed=(0, 0))
        assert len(batches) == 1
        assert (batches[0].n_pos, len(batches[0]) - batches[0].n_pos) == (7, 10)

    def test_ratio_zero_uses_only_positives(self, make_graph):
        split = synthetic_split(make_graph, 25, 10)
        batches = make_batches(split, small_config(batch_size=10, batch_neg_pos_ratio=0), epoch_seed=(0, 0))
        assert [len(b) for b in batches] == [10, 10, 5]
        assert all(b.n_pos == len(b) for b in batches)

    def test_deterministic(self, make_graph):
        split = synthetic_split(make_graph, 20, 40)
        first = make_batches(split, small_config(batch_size=10), epoch_seed=(4, 2))
        second = make_batches(split, small_config(batch_size=10), epoch_seed=(4, 2))
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.pairs, b.pairs)

    def test_no_positives(self, make_graph):
        split = synthetic_split(make_graph, 0, 5)
        with pytest.raises(DataValidationError):
            make_batches(split, small_config(), epoch_seed=(0, 0))

    def test_no_negatives_with_ratio(self, make_graph):
        split = synthetic_split(make_graph, 5, 0)
        with pytest.raises(DataValidationError):
            make_batches(split, small_config(), epoch_seed=(0, 0))


class TestSgdStep:
    def test_zero_learning_rate_keeps_params(self):
        params = init_params(3, 2, 2, 1, seed=0)
        grads = Gradients.from_tensors([np.ones_like(t) for t in params.tensors()])
        assert checkpoint_bytes(sgd_step(params, grads, 0.0)) == checkpoint_bytes(params)

    def test_update(self):
        params = ModelParams(thetas=[np.ones((1, 1))], W=np.ones((1, 1)), Phi=np.ones((1, 1)))
        grads = Gradients(thetas=[np.array([[2.0]])], W=np.zeros((1, 1)), Phi=np.zeros((1, 1)))
        assert sgd_step(params, grads, 0.1).thetas[0][0, 0] == pytest.approx(0.8)

    def test_non_finite_gradient_names_tensor(self):
        params = init_params(2, 2, 2, 0, seed=0)
        tensors = [np.zeros_like(t) for t in params.tensors()]
        tensors[1][0, 0] = np.nan
        with pytest.raises(NumericError, match="W"):
            sgd_step(params, Gradients.from_tensors(tensors), 0.1)

    def test_overflowing_update(self):
        params = init_params(2, 2, 2, 0, seed=0)
        grads = Gradients.from_tensors([np.full_like(t, 1e308) for t in params.tensors()])
        with np.errstate(over="ignore"), pytest.raises(NumericError, match="溢出"):
            sgd_step(params, grads, 10.0)

    def test_shape_mismatch(self):
        params = init_params(2, 2, 2, 0, seed=0)
        with pytest.raises(StructuralError):
            sgd_step(params, init_params(3, 2, 2, 0, seed=0), 0.1)


class TestTrain:
    def test_zero_epochs_returns_initialisation(self, fixture_setup, tmp_path):
        graph, diffusion, split = fixture_setup
        params, report = train(graph, diffusion, split, small_config(epochs=0), tmp_path / "model.ckpt")
        expected = checkpoint_bytes(init_params(8, 8, 8, 2, 3))
        assert checkpoint_bytes(params) == expected
        assert (tmp_path / "model.ckpt").read_bytes() == expected
        assert report.epochs == []

    def test_loss_decreases(self, fixture_setup):
        graph, diffusion, split = fixture_setup
        config = small_config(epochs=5, learning_rate=0.1)
        params, report = train(graph, diffusion, split, config)
        pairs, labels = split.fold("train")
        assert batch_loss(params, diffusion, pairs, labels, config.pos_weight) < report.initial_loss

    def test_one_epoch_on_toy_graph(self, make_graph, rng):
        graph = make_graph([
            ("Compound::c0", "treats", "Disease::x0"),
            ("Compound::c0", "targets", "Gene::g0"),
            ("Disease::x0", "associates", "Gene::g0"),
            ("Compound::c1", "targets", "Gene::g1"),
            ("Disease::x1", "associates", "Gene::g1"),
        ])
        assert graph.num_nodes == 6
        c0, c1, x0, x1 = (graph.node_by_name(n) for n in ("Compound::c0", "Compound::c1", "Disease::x0", "Disease::x1"))
        split = DatasetSplit(train_pos=((c0, x0),), test_pos=(), train_neg=((c0, x1), (c1, x0), (c1, x1)))
        diffusion = message_passing_diffusion(graph, rng.normal(size=(6, 4)), (), 2)
        # 比例 3 时唯一的一批恰好是 1 正 3 负，即整个训练折
        config = small_config(epochs=1, learning_rate=0.1, branch_width=4, embed_dim=4, batch_neg_pos_ratio=3.0)
        params, report = train(graph, diffusion, split, config)
        pairs, labels = split.fold("train")
        assert batch_loss(params, diffusion, pairs, labels, config.pos_weight) < report.initial_loss

    def test_deterministic(self, fixture_setup, tmp_path):
        graph, diffusion, split = fixture_setup
        train(graph, diffusion, split, small_config(), tmp_path / "a.ckpt")
        train(graph, diffusion, split, small_config(), tmp_path / "b.ckpt")
        assert (tmp_path / "a.ckpt").read_bytes() == (tmp_path / "b.ckpt").read_bytes()

    def test_log_rows(self, fixture_setup, tmp_path):
        graph, diffusion, split = fixture_setup
        _, report = train(graph, diffusion, split, small_config(epochs=3), log_path=tmp_path / "train_log.csv")
        lines = (tmp_path / "train_log.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "epoch,mean_loss,seconds"
        assert [line.split(",")[0] for line in lines[1:]] == ["1", "2", "3"]
        assert len(report.epoch_losses) == 3

    def test_numeric_error_carries_position(self, fixture_setup, monkeypatch):
        graph, diffusion, split = fixture_setup

        def explode(*args, **kwargs):
            raise NumericError("损失出现非有限值")

        monkeypatch.setattr(loop, "backward", explode)
        with pytest.raises(NumericError, match="第 1 轮第 1 批"):
            train(graph, diffusion, split, small_config())

    @pytest.mark.parametrize("fraction, warned", [(0.5, True), (0.1, False)])
    def test_test_fraction_is_owned_by_ingest(self, fixture_setup, caplog, fraction, warned):
        graph, diffusion, split = fixture_setup
        with caplog.at_level("WARNING", logger="app.modules.trainer.loop"):
            train(graph, diffusion, split, small_config(epochs=0, test_fraction=fraction))
        assert ("ingest --test-fraction" in caplog.text) is warned

    def test_hops_must_match_diffusion(self, fixture_setup):
        graph, diffusion, split = fixture_setup
        with pytest.raises(StructuralError):
            train(graph, diffusion, split, small_config(hops=1))
