import allure
import pytest

from numerics import ConfigError
from trainer import AdaptiveKernel, FixedOrder, TraceRow, TrainerConfig, TrainTrace


@allure.suite("Trainer")
class TestTrainerConfig:
    @allure.story("Configuration")
    @allure.title("Defaults")
    @pytest.mark.smoke
    def test_defaults(self):
        config = TrainerConfig()
        assert config.mode == "fsdm"
        assert config.n_max == 3
        assert config.batch == "full"
        assert isinstance(config.order_policy, AdaptiveKernel)
        assert config.order_policy.epsilon_phi == 1e-12
        assert config.w_inf is None and config.b_inf is None
        assert config.trainable is None

    @allure.story("Configuration")
    @allure.title("Order policy is selected by its kind")
    def test_order_policy(self):
        fixed = TrainerConfig.from_dict({"order_policy": {"kind": "fixed", "value": 0.5}})
        assert fixed.order_policy == FixedOrder(value=0.5)
        adaptive = TrainerConfig.from_dict({"order_policy": {"kind": "adaptive", "epsilon_phi": 1e-6}})
        assert adaptive.order_policy.epsilon_phi == 1e-6

    @allure.story("Configuration")
    @allure.title("Invalid configurations raise ConfigError")
    @pytest.mark.parametrize(
        "data",
        [
            {"n_max": 2},
            {"learning_rate": -0.1},
            {"max_iterations": 0},
            {"mode": "momentum"},
            {"batch": "mini"},
            {"order_policy": {"kind": "fixed", "value": -1.0}},
            {"order_policy": {"kind": "adaptive", "epsilon_phi": 0.0}},
            {"order_policy": {"kind": "schedule"}},
            {"trainable": ["w1_1_1", "w1_1_1"]},
            {"unknown": 1},
        ],
    )
    def test_invalid(self, data):
        with pytest.raises(ConfigError):
            TrainerConfig.from_dict(data)

    @allure.story("Configuration")
    @allure.title("Overrides skip None values and revalidate")
    def test_with_overrides(self):
        config = TrainerConfig(learning_rate=0.3)
        changed = config.with_overrides(learning_rate=None, max_iterations=10, mode="classic")
        assert changed.learning_rate == 0.3
        assert changed.max_iterations == 10
        assert changed.mode == "classic"
        with pytest.raises(ConfigError):
            config.with_overrides(n_max=4)


@allure.suite("Trainer")
class TestTrainTrace:
    @allure.story("Trace")
    @allure.title("Column accessors")
    def test_accessors(self):
        trace = TrainTrace(tracked=("w1_1_1", "b1_1"))
        assert trace.last is None
        trace.append(TraceRow(0, 0.5, 0.9, (1.0, 2.0)))
        trace.append(TraceRow(1, 0.25, 0.8, (1.5, 2.5), saddle_perturbed=True))
        assert len(trace) == 2
        assert trace.f_hat.tolist() == [0.5, 0.25]
        assert trace.orders.tolist() == [0.9, 0.8]
        assert trace.param_history("b1_1").tolist() == [2.0, 2.5]
        assert trace.last.saddle_perturbed
        assert not trace.converged
        trace.status = "converged"
        assert trace.converged
