import allure
import pytest

from harness import EXPERIMENTS, get_experiment, run_experiment, run_experiments
from harness.artifacts import read_summary_json, read_trace_csv
from harness.builders import EX5_TRACKED, BUMP_LOCAL_EXTREMUM, BUMP_TRACKED
from numerics import ConfigError

EXPECTED = {
    "ex1": ((-4.0, -4.0), 5.5, 2000),
    "ex2": ((5.0, 30.0), 5.5, 9000),
    "ex3": ((-8.0, 9.0), 5.5, 6000),
    "ex4": (BUMP_LOCAL_EXTREMUM, 5.5, 9000),
    "ex5a": ((108.0, 116.0), 3.5, 3000),
    "ex5b": ((-110.0, -106.0), 3.5, 3000),
    "ex5c": ((-95.0, 100.0), 3.5, 3000),
    "ex5d": ((-9.0, 8.2676), 3.5, 3000),
}


@allure.suite("Harness")
class TestRegistry:
    @allure.story("Experiments")
    @allure.title("Built-in constants")
    @pytest.mark.smoke
    @pytest.mark.parametrize("experiment_id", sorted(EXPECTED))
    def test_constants(self, experiment_id):
        spec = get_experiment(experiment_id)
        initial, mu, iterations = EXPECTED[experiment_id]
        assert spec.initial == initial
        assert spec.learning_rate == mu
        assert spec.max_iterations == iterations
        assert spec.modes == "both"
        assert spec.tracked == (EX5_TRACKED if experiment_id.startswith("ex5") else BUMP_TRACKED)
        start = spec.build_network()
        assert tuple(start.parameter(n) for n in spec.tracked) == initial

    @allure.story("Experiments")
    @allure.title("Registry ids and unknown ids")
    def test_ids(self):
        assert set(EXPERIMENTS) == set(EXPECTED)
        with pytest.raises(ConfigError):
            get_experiment("ex6")


@allure.suite("Harness")
class TestRunExperiment:
    @allure.story("Experiments")
    @allure.title("Both modes write matching traces and summaries")
    def test_short_run(self, run_settings, tmp_path):
        outcomes = run_experiment(get_experiment("ex1"), {"max_iterations": 5}, run_settings, tmp_path)
        assert [o.summary.mode for o in outcomes] == ["classic", "fsdm"]
        classic, fsdm = outcomes
        assert classic.trace.f_hat[0] == fsdm.trace.f_hat[0]
        for outcome in outcomes:
            paths = outcome.paths
            assert set(paths) == {"trace", "summary", "response"}
            assert all(p.exists() for p in paths.values())
            assert paths["trace"].name == f"ex1_{outcome.summary.mode}_trace.csv"

            reread = read_trace_csv(paths["trace"], tracked=BUMP_TRACKED, status=outcome.trace.status)
            assert reread == outcome.trace

            summary = read_summary_json(paths["summary"])
            last = outcome.trace.last
            assert summary["iterations"] == len(outcome.trace) == 5
            assert summary["final_f_hat"] == last.f_hat
            assert summary["final_params"] == dict(zip(BUMP_TRACKED, last.params))
            assert summary["converged"] is False

    @allure.story("Experiments")
    @allure.title("Runs default to the configured output directory")
    def test_default_out_dir(self, run_settings, tmp_path):
        run_experiment(get_experiment("ex4"), {"max_iterations": 2, "mode": "classic"}, run_settings)
        assert (tmp_path / "runs" / "ex4_classic_summary.json").exists()

    @allure.story("Experiments")
    @allure.title("Without writing no files are produced")
    def test_no_write(self, run_settings, tmp_path):
        outcomes = run_experiment(
            get_experiment("ex5a"), {"max_iterations": 2, "mode": "fsdm"}, run_settings, tmp_path, write=False
        )
        assert outcomes[0].paths == {}
        assert not any(tmp_path.iterdir())

    @allure.story("Experiments")
    @allure.title("Concurrent runs return results in input order")
    def test_concurrent(self, run_settings, tmp_path):
        results = run_experiments(
            ["ex3", "ex1"], {"max_iterations": 3}, run_settings, tmp_path, concurrent=True
        )
        assert list(results) == ["ex3", "ex1"]
        assert all(len(outcomes) == 2 for outcomes in results.values())
        assert len(list(tmp_path.glob("*_trace.csv"))) == 4
