import allure
import pytest

from harness import RunFactory, get_experiment
from numerics import ConfigError
from trainer import AdaptiveKernel, FixedOrder


@allure.suite("Harness")
class TestRunFactory:
    @allure.story("Run factory")
    @allure.title("Experiment defaults")
    @pytest.mark.smoke
    def test_defaults(self, run_settings):
        plan = RunFactory(run_settings).plan(get_experiment("ex1"))
        assert plan.modes == ("classic", "fsdm")
        assert plan.initial == (-4.0, -4.0)
        for mode, config in plan.configs.items():
            assert config.mode == mode
            assert config.learning_rate == 5.5
            assert config.max_iterations == 2000
            assert config.trainable == ["w1_1_1", "w2_1_1"]
            assert config.track == ["w1_1_1", "w2_1_1"]
            assert isinstance(config.order_policy, AdaptiveKernel)
            assert config.stop_tolerance == run_settings.core.training.stop_tolerance

    @allure.story("Run factory")
    @allure.title("Config file, environment and CLI layers in order")
    def test_layering(self, run_settings, monkeypatch):
        run_settings.data.experiments["ex2"] = {"learning_rate": 1.0, "max_iterations": 50, "mode": "classic"}
        monkeypatch.setenv("FBPNN_ITERS", "7")
        monkeypatch.setenv("FBPNN_MODE", "fsdm")
        cli = {"max_iterations": None, "fixed_order": 0.5, "initial": [1.0, 2.0]}
        plan = RunFactory(run_settings, cli).plan(get_experiment("ex2"))
        assert plan.modes == ("fsdm",)
        assert plan.initial == (1.0, 2.0)
        config = plan.configs["fsdm"]
        assert config.learning_rate == 1.0
        assert config.max_iterations == 7
        assert config.order_policy == FixedOrder(value=0.5)

    @allure.story("Run factory")
    @allure.title("CLI beats the environment")
    def test_cli_wins(self, run_settings, monkeypatch):
        monkeypatch.setenv("FBPNN_MU", "0.5")
        plan = RunFactory(run_settings, {"learning_rate": 0.25}).plan(get_experiment("ex3"))
        assert all(c.learning_rate == 0.25 for c in plan.configs.values())

    @allure.story("Run factory")
    @allure.title("Invalid overrides")
    def test_invalid(self, run_settings, monkeypatch):
        ex1 = get_experiment("ex1")
        with pytest.raises(ConfigError):
            RunFactory(run_settings, {"momentum": 0.9}).plan(ex1)
        with pytest.raises(ConfigError):
            RunFactory(run_settings, {"mode": "adam"}).plan(ex1)
        with pytest.raises(ConfigError):
            RunFactory(run_settings, {"initial": [1.0]}).plan(ex1)
        with pytest.raises(ConfigError):
            RunFactory(run_settings, {"n_max": 2}).plan(ex1)
        run_settings.data.experiments["ex1"] = {"unknown": 1}
        with pytest.raises(ConfigError):
            RunFactory(run_settings).plan(ex1)
        run_settings.data.experiments["ex1"] = {}
        monkeypatch.setenv("FBPNN_ITERS", "many")
        with pytest.raises(ConfigError):
            RunFactory(run_settings).plan(ex1)

    @allure.story("Run factory")
    @allure.title("Custom trainer sections keep their own mode")
    def test_custom_config(self, run_settings, monkeypatch):
        config = RunFactory(run_settings).custom_config({"mode": "classic", "learning_rate": 0.2})
        assert config.mode == "classic"
        assert config.learning_rate == 0.2
        monkeypatch.setenv("FBPNN_MODE", "both")
        with pytest.raises(ConfigError):
            RunFactory(run_settings).custom_config({})
