"""
Session settings, shared networks and datasets, and allure hooks for the suite.

CLI Options:
    --core-config       Path to core_config.yml
    --data-config       Path to data_config.yml
"""
import os
import sys
import json
import pytest
import allure
import numpy as np
from pathlib import Path
from loguru import logger

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from configs import Settings, configure_logging, get_settings
from harness.builders import build_bump_network, build_bump_dataset
from network.mlp import ActivationKind, Dataset, Mlp


# ---------------------------------------------------------------------------
# Pytest CLI Options
# ---------------------------------------------------------------------------

def pytest_addoption(parser):
    """Add custom command line options for test configuration."""
    parser.addoption(
        "--core-config",
        action="store",
        default=None,
        help="Path to core configuration YAML file",
    )
    parser.addoption(
        "--data-config",
        action="store",
        default=None,
        help="Path to data configuration YAML file",
    )


def _settings_from(config) -> Settings:
    """Cached settings; CORE_CONFIG_PATH and DATA_CONFIG_PATH apply when an option is absent."""
    return get_settings(config.getoption("--core-config"), config.getoption("--data-config"))


# ---------------------------------------------------------------------------
# Configuration Fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def test_config(request) -> Settings:
    """
    Get test configuration settings from core_config.yml and data_config.yml.

    Config file priority:
    1. CLI options (--core-config, --data-config)
    2. Environment variables (CORE_CONFIG_PATH, DATA_CONFIG_PATH)
    3. Default locations (configs/core_config.yml, configs/data_config.yml)
    """
    return _settings_from(request.config)


@pytest.fixture
def run_settings(test_config: Settings, tmp_path) -> Settings:
    """Session settings with artifact directories redirected into tmp_path."""
    settings = test_config.model_copy(deep=True)
    settings.data.output.runs_dir = str(tmp_path / "runs")
    settings.data.output.surfaces_dir = str(tmp_path / "surfaces")
    return settings


@pytest.fixture(scope="session")
def gl_partitions(test_config: Settings) -> int:
    """Grid size of the numeric Grünwald-Letnikov oracle (numerics.gl_partitions)."""
    return test_config.core.numerics.gl_partitions


@pytest.fixture(autouse=True)
def _clear_fbpnn_env(monkeypatch):
    """Runs must not pick up FBPNN_* overrides from the developer's shell."""
    for name in list(os.environ):
        if name.startswith("FBPNN_"):
            monkeypatch.delenv(name, raising=False)


# ---------------------------------------------------------------------------
# Network and Dataset Fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def bump_optimal() -> Mlp:
    return build_bump_network(optimal=True)


@pytest.fixture(scope="session")
def bump_data() -> Dataset:
    return build_bump_dataset()


@pytest.fixture
def single_linear() -> Mlp:
    """One Linear neuron with w = 1, b = 0."""
    return Mlp.from_arrays([[[1.0]]], [[0.0]], [ActivationKind.LINEAR])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


# ---------------------------------------------------------------------------
# Pytest Hooks
# ---------------------------------------------------------------------------

def pytest_configure(config):
    """Configure pytest with settings from config files and CLI options."""
    settings = _settings_from(config)
    configure_logging(settings)

    logger.info("Test Configuration:")
    logger.info(f"  Log level: {settings.core.logging.level}")
    logger.info(f"  Workers: {settings.workers}")
    logger.info(f"  GL partitions: {settings.core.numerics.gl_partitions}")

    # Create reports directory
    allure_config = settings.core.allure
    Path(allure_config.results_dir).mkdir(parents=True, exist_ok=True)

    # Clean previous results if configured
    if allure_config.clean_results:
        results_path = Path(allure_config.results_dir)
        if results_path.exists():
            for file in results_path.glob("*"):
                if file.is_file():
                    file.unlink()


def pytest_collection_modifyitems(config, items):
    """Modify collected tests."""
    for item in items:
        # Auto-add markers based on test path
        path = str(item.fspath)
        for package in ("numerics", "network", "trainer", "harness"):
            if f"/{package}/" in path:
                item.add_marker(getattr(pytest.mark, package))


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Hook for processing test results and attaching artifacts on failure."""
    outcome = yield
    report = outcome.get_result()

    if report.when == "call" and report.failed and hasattr(item, "funcargs"):
        _attach_run_artifacts(item, item.name)


def _attach_run_artifacts(item, test_name: str) -> None:
    """Attach CSV/JSON files a failing test wrote under its tmp_path."""
    tmp_path = item.funcargs.get("tmp_path")
    if tmp_path is None:
        return
    for path in sorted(Path(tmp_path).rglob("*")):
        if path.suffix not in (".csv", ".json") or not path.is_file():
            continue
        try:
            text = path.read_text(encoding="utf-8")
            if path.suffix == ".json":
                attachment_type = allure.attachment_type.JSON
                text = json.dumps(json.loads(text), indent=2)
            else:
                attachment_type = allure.attachment_type.CSV
            allure.attach(text, name=f"{test_name}:{path.name}", attachment_type=attachment_type)
            logger.info(f"Attached {path.name} for: {test_name}")
        except (OSError, ValueError) as e:
            logger.warning(f"Failed to attach {path}: {e}")
