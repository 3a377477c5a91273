import allure
import numpy as np
import pytest

from harness.builders import BUMP_TRACKED
from network import Dataset, Mlp
from numerics import ConfigError, DomainError
from trainer import (
    ConvergenceState,
    FixedOrder,
    LayerArrays,
    ParameterMask,
    TrainerConfig,
    convergence_check,
    perturb,
    train,
)


def _all_arrays(mlp: Mlp):
    return list(mlp.weights) + list(mlp.biases)


ACTIVATIONS = ("logsig", "tansig", "purelin")


def _random_problem(seed: int):
    """Up to three layers, widths 1 to 4, activations drawn per layer."""
    rng = np.random.default_rng(seed)
    depth = int(rng.integers(1, 4))
    widths = [int(w) for w in rng.integers(1, 5, size=depth + 1)]
    weights = [rng.uniform(-1.0, 1.0, size=(widths[m + 1], widths[m])) for m in range(depth)]
    biases = [rng.uniform(-0.5, 0.5, size=widths[m + 1]) for m in range(depth)]
    activations = [ACTIVATIONS[i] for i in rng.integers(0, 3, size=depth)]
    mlp = Mlp.from_arrays(weights=weights, biases=biases, activations=activations)
    data = Dataset(rng.uniform(-1.0, 1.0, size=(5, widths[0])), rng.uniform(0.1, 0.9, size=(5, widths[-1])))
    return mlp, data


@allure.suite("Trainer")
class TestConvergenceCheck:
    @allure.story("Convergence")
    @allure.title("Converged, saddle and continue")
    @pytest.mark.smoke
    def test_states(self):
        zeros = [np.zeros((2, 1)), np.zeros(2)]
        assert convergence_check(zeros, 0.0, 1e-12, 1e-12) is ConvergenceState.CONVERGED
        assert convergence_check(zeros, 0.3, 1e-12, 1e-12) is ConvergenceState.SADDLE
        assert convergence_check([np.array([0.0, 1.0])], 0.3, 1e-12, 1e-12) is ConvergenceState.CONTINUE

    @allure.story("Convergence")
    @allure.title("Layer arrays and tolerances")
    def test_layer_arrays(self):
        partials = LayerArrays([np.array([[1e-13]])], [np.array([-2e-13])])
        assert convergence_check(partials, 1e-13, 1e-12, 1e-12) is ConvergenceState.CONVERGED
        assert convergence_check(partials, 1e-13, 1e-12, 1e-14) is ConvergenceState.CONTINUE
        assert convergence_check([], 0.5, 0.0, 0.0) is ConvergenceState.SADDLE


@allure.suite("Trainer")
class TestPerturb:
    @allure.story("Saddle escape")
    @allure.title("Perturbation is seeded, bounded and masked")
    def test_perturb(self, bump_optimal):
        mask = ParameterMask.from_names(bump_optimal, list(BUMP_TRACKED))
        first = perturb(bump_optimal, mask, np.random.default_rng(5), 1e-3)
        second = perturb(bump_optimal, mask, np.random.default_rng(5), 1e-3)
        for a, b in zip(_all_arrays(first), _all_arrays(second)):
            np.testing.assert_array_equal(a, b)
        for name in bump_optimal.parameter_names():
            delta = first.parameter(name) - bump_optimal.parameter(name)
            if name in BUMP_TRACKED:
                assert 0.0 < abs(delta) <= 1e-3
            else:
                assert delta == 0.0


@allure.suite("Trainer")
class TestTrain:
    @allure.story("Training loop")
    @allure.title("Zero learning rate keeps every parameter")
    @pytest.mark.parametrize("mode", ["classic", "fsdm"])
    def test_zero_learning_rate(self, bump_optimal, bump_data, mode):
        start = bump_optimal.with_parameters({"w1_1_1": 3.0, "w2_1_1": 2.0})
        config = TrainerConfig(mode=mode, learning_rate=0.0, max_iterations=20, track=list(BUMP_TRACKED))
        final, trace = train(start, bump_data, config)
        assert trace.status == "completed"
        assert len(trace) == 20
        for a, b in zip(_all_arrays(start), _all_arrays(final)):
            np.testing.assert_array_equal(a, b)
        assert np.all(trace.f_hat == trace.f_hat[0])
        assert trace.param_history("w1_1_1").tolist() == [3.0] * 20

    @allure.story("Training loop")
    @allure.title("Fixed order one reproduces classic training")
    @pytest.mark.parametrize("seed", range(20))
    def test_reduction(self, seed):
        mlp, data = _random_problem(seed)
        names = mlp.parameter_names()
        common = dict(learning_rate=0.1, max_iterations=100, track=names)
        _, classic = train(mlp, data, TrainerConfig(mode="classic", **common))
        _, fsdm = train(mlp, data, TrainerConfig(mode="fsdm", order_policy=FixedOrder(value=1.0), **common))
        assert classic.status == fsdm.status
        assert len(classic) == len(fsdm)
        np.testing.assert_array_equal(fsdm.f_hat, classic.f_hat)
        for name in names:
            np.testing.assert_allclose(fsdm.param_history(name), classic.param_history(name), rtol=0, atol=1e-12)
        assert np.all(fsdm.orders == 1.0)

    @allure.story("Training loop")
    @allure.title("Fixed order zero at a perfect fit converges immediately")
    def test_identity_order(self, bump_optimal, bump_data):
        config = TrainerConfig(order_policy={"kind": "fixed", "value": 0.0}, max_iterations=50)
        final, trace = train(bump_optimal, bump_data, config)
        assert trace.converged
        assert len(trace) == 1
        for a, b in zip(_all_arrays(bump_optimal), _all_arrays(final)):
            np.testing.assert_array_equal(a, b)

    @allure.story("Training loop")
    @allure.title("Frozen parameters stay bitwise unchanged")
    @pytest.mark.parametrize("batch", ["full", "per_sample"])
    def test_mask_invariance(self, bump_optimal, bump_data, batch):
        start = bump_optimal.with_parameters({"w1_1_1": 2.0, "w2_1_1": 3.0})
        config = TrainerConfig(
            learning_rate=0.01,
            max_iterations=30,
            trainable=list(BUMP_TRACKED),
            track=list(BUMP_TRACKED),
            batch=batch,
        )
        final, trace = train(start, bump_data, config)
        for name in start.parameter_names():
            if name not in BUMP_TRACKED:
                assert final.parameter(name) == start.parameter(name)
        assert trace.status != "running"
        assert np.all(trace.f_hat >= 0.0)
        assert np.all(np.isfinite(trace.f_hat))

    @allure.story("Training loop")
    @allure.title("Saddles are always followed by a parameter change")
    def test_saddle_non_termination(self, bump_optimal, bump_data):
        start = bump_optimal.with_parameters({"w1_1_1": 2.0})
        names = start.parameter_names()
        config = TrainerConfig(
            mode="classic",
            max_iterations=6,
            saddle_epsilon=1e6,
            perturbation_scale=1e-3,
            rng_seed=3,
            track=names,
        )
        _, trace = train(start, bump_data, config)
        assert len(trace) == 6
        assert all(row.saddle_perturbed for row in trace.rows)
        for before, after in zip(trace.rows, trace.rows[1:]):
            assert before.params != after.params

    @allure.story("Training loop")
    @allure.title("Saddle perturbations next to the lower bound stay above it")
    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_saddle_at_bound(self, single_linear, seed):
        w_inf = 0.9995
        config = TrainerConfig(
            order_policy=FixedOrder(value=0.5),
            w_inf=w_inf,
            b_inf=-1.0,
            max_iterations=20,
            saddle_epsilon=1e9,
            perturbation_scale=1e-3,
            rng_seed=seed,
            track=["w1_1_1"],
        )
        final, trace = train(single_linear, Dataset.from_pairs([(1.0, 0.0)]), config)
        assert trace.status == "completed"
        assert len(trace) == 20
        assert all(row.saddle_perturbed for row in trace.rows)
        assert np.all(trace.param_history("w1_1_1") > w_inf)
        assert final.parameter("w1_1_1") > w_inf

    @allure.story("Training loop")
    @allure.title("Classic training lowers the error of a small problem")
    def test_classic_progress(self):
        rng = np.random.default_rng(21)
        mlp = Mlp.from_arrays(
            weights=[rng.uniform(-1.0, 1.0, size=(3, 1)), rng.uniform(-1.0, 1.0, size=(1, 3))],
            biases=[rng.uniform(-0.5, 0.5, size=3), rng.uniform(-0.5, 0.5, size=1)],
            activations=["tansig", "logsig"],
        )
        data = Dataset(rng.uniform(-1.0, 1.0, size=(5, 1)), rng.uniform(0.1, 0.9, size=(5, 1)))
        _, trace = train(mlp, data, TrainerConfig(mode="classic", learning_rate=0.5, max_iterations=200))
        assert trace.f_hat[-1] < trace.f_hat[0]
        assert np.all(trace.orders == 1.0)

    @allure.story("Training loop")
    @allure.title("Numeric failure aborts with the partial trace")
    def test_abort(self, single_linear):
        data = Dataset.from_pairs([(1.0, 0.0)])
        config = TrainerConfig(mode="classic", learning_rate=1e308, max_iterations=10)
        final, trace = train(single_linear, data, config)
        assert trace.status == "aborted"
        assert len(trace) == 1
        assert "w1_1_1" in trace.message
        assert final.parameter("w1_1_1") == 1.0

    @allure.story("Training loop")
    @allure.title("Invalid starts")
    def test_invalid_start(self, single_linear, bump_optimal, bump_data):
        data = Dataset.from_pairs([(1.0, 0.0)])
        with pytest.raises(DomainError):
            train(single_linear, data, TrainerConfig(w_inf=1.0, b_inf=-1.0, max_iterations=1))
        with pytest.raises(ConfigError):
            train(bump_optimal, bump_data, TrainerConfig(track=["w3_1_1"], max_iterations=1))
        with pytest.raises(ConfigError):
            train(bump_optimal, bump_data, TrainerConfig(trainable=["b9_1"], max_iterations=1))
