import json

import allure
import pytest

from configs import configure_logging
from harness.artifacts import read_surface_csv
from harness.cli import build_parser, main


@pytest.fixture(autouse=True)
def _restore_logging(test_config):
    """main() reconfigures loguru; put the session sinks back afterwards."""
    yield
    configure_logging(test_config)


@pytest.fixture
def config_files(tmp_path):
    """Core and data configs that keep every artifact under tmp_path."""
    core = tmp_path / "core_config.yml"
    core.write_text(
        "logging:\n"
        f"  file_path: \"{tmp_path / 'logs' / 'fbpnn.log'}\"\n"
        "parallel:\n"
        "  workers: 2\n",
        encoding="utf-8",
    )
    data = tmp_path / "data_config.yml"
    data.write_text(
        "output:\n"
        f"  runs_dir: \"{tmp_path / 'runs'}\"\n"
        f"  surfaces_dir: \"{tmp_path / 'surfaces'}\"\n",
        encoding="utf-8",
    )
    return ["--core-config", str(core), "--data-config", str(data)]


@allure.suite("Harness")
class TestParser:
    @allure.story("CLI")
    @allure.title("Run options")
    def test_run_options(self):
        args = build_parser().parse_args(["run", "ex2", "--mu", "1.5", "--mode", "fsdm", "--n-max", "1"])
        assert (args.experiment, args.mu, args.mode, args.n_max) == ("ex2", 1.5, "fsdm", 1)
        assert args.iters is None

    @allure.story("CLI")
    @allure.title("Bad option values exit through argparse")
    @pytest.mark.parametrize("argv", [["run", "ex1", "--mode", "adam"], ["run", "ex1", "--n-max", "2"], []])
    def test_bad_options(self, argv):
        with pytest.raises(SystemExit):
            build_parser().parse_args(argv)


@allure.suite("Harness")
class TestMain:
    @allure.story("CLI")
    @allure.title("list and sizing")
    @pytest.mark.smoke
    def test_list_and_sizing(self, config_files, capsys):
        assert main([*config_files, "list"]) == 0
        assert "ex5d" in capsys.readouterr().out
        assert main([*config_files, "sizing", "--c", "2", "--samples", "100", "--inputs", "1"]) == 0
        assert capsys.readouterr().out.strip() == "10"

    @allure.story("CLI")
    @allure.title("run writes artifacts for each mode")
    def test_run(self, config_files, tmp_path):
        out = tmp_path / "out"
        assert main([*config_files, "run", "ex1", "--iters", "3", "--out", str(out)]) == 0
        for mode in ("classic", "fsdm"):
            summary = json.loads((out / f"ex1_{mode}_summary.json").read_text(encoding="utf-8"))
            assert summary["iterations"] == 3
            assert (out / f"ex1_{mode}_trace.csv").exists()

    @allure.story("CLI")
    @allure.title("surface writes a grid with its optimum")
    def test_surface(self, config_files, tmp_path):
        argv = [
            *config_files, "surface", "--experiment", "ex1",
            "--param-a", "w1_1_1", "--range-a", "0:20:5",
            "--param-b", "w2_1_1", "--range-b", "0:2:5",
        ]
        assert main(argv) == 0
        surface = read_surface_csv(tmp_path / "surfaces" / "ex1_w1_1_1_w2_1_1.csv")
        assert surface.argmin() == (10.0, 1.0, 0.0)

    @allure.story("CLI")
    @allure.title("train and kernel")
    def test_train_and_kernel(self, config_files, tmp_path):
        document = {
            "name": "tiny",
            "trainer": {"mode": "classic", "learning_rate": 0.1, "max_iterations": 4},
            "network": {"input_width": 1, "layers": [{"width": 1, "activation": "purelin"}]},
            "dataset": {"pairs": [[0.0, 1.0], [1.0, 2.0]]},
        }
        config = tmp_path / "tiny.json"
        config.write_text(json.dumps(document), encoding="utf-8")
        assert main([*config_files, "train", "--config", str(config)]) == 0
        assert (tmp_path / "runs" / "tiny_classic_trace.csv").exists()

        kernel = tmp_path / "kernel.csv"
        assert main([*config_files, "kernel", "--steps", "11", "--out", str(kernel)]) == 0
        assert len(kernel.read_text(encoding="utf-8").splitlines()) == 12

    @allure.story("CLI")
    @allure.title("Errors return exit code 2")
    @pytest.mark.parametrize(
        "argv",
        [
            ["run", "ex9"],
            ["surface", "--experiment", "ex1", "--param-a", "w9_1_1", "--range-a", "0:1:2",
             "--param-b", "w2_1_1", "--range-b", "0:1:2"],
            ["sizing", "--c", "1", "--samples", "1", "--inputs", "1"],
            ["train", "--config", "does-not-exist.json"],
            ["kernel", "--steps", "1"],
        ],
    )
    def test_errors(self, config_files, argv):
        assert main([*config_files, *argv]) == 2
