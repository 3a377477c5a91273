"""
Settings for runs and the test session, read from two YAML files.

core_config.yml holds framework behaviour (logging, reporting, parallelism,
numerical defaults, training defaults); data_config.yml holds where results
go and per-experiment overrides. Missing files and missing keys fall back to
the model defaults below.
"""
import os
from pathlib import Path
from typing import Any, ClassVar, Dict, Literal, Optional

import yaml
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from numerics.errors import ConfigError

CONFIG_ENV_VARS = {"core_config.yml": "CORE_CONFIG_PATH", "data_config.yml": "DATA_CONFIG_PATH"}


def load_yaml_file(file_path: Path) -> dict:
    """Parsed mapping of one YAML file; {} for an empty or missing file."""
    if not file_path.exists():
        return {}
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            content = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Cannot parse {file_path}: {e}") from e
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ConfigError(f"{file_path} must hold a mapping at the top level")
    return content


def find_config_file(filename: str, config_path: Optional[str] = None) -> Optional[Path]:
    """
    Locate a config file.

    An explicit path (file or directory) wins, then CORE_CONFIG_PATH or
    DATA_CONFIG_PATH, then the working directory, ./configs and this package.
    An explicit path that does not exist yields None rather than a fallback.
    """
    config_path = config_path or os.environ.get(CONFIG_ENV_VARS.get(filename, ""))
    if config_path:
        path = Path(config_path)
        if path.is_dir():
            path = path / filename
        return path if path.exists() else None

    for candidate in (Path(filename), Path("configs") / filename, Path(__file__).parent / filename):
        if candidate.exists():
            return candidate
    return None


def load_configs(
    core_config_path: Optional[str] = None,
    data_config_path: Optional[str] = None,
) -> Dict[str, dict]:
    """Raw {'core': ..., 'data': ...} mappings, before validation."""
    loaded = {}
    for key, filename, explicit in (
        ("core", "core_config.yml", core_config_path),
        ("data", "data_config.yml", data_config_path),
    ):
        path = find_config_file(filename, explicit)
        loaded[key] = load_yaml_file(path) if path else {}
        if path:
            logger.debug(f"Loaded {key} config from: {path}")
    return loaded


class _Section(BaseModel):
    """One YAML section; null values mean "use the default"."""

    model_config = ConfigDict(extra="ignore")
    section: ClassVar[str] = "config"

    @model_validator(mode="before")
    @classmethod
    def _drop_nulls(cls, data: Any) -> Any:
        if isinstance(data, dict):
            return {k: v for k, v in data.items() if v is not None}
        return data

    @classmethod
    def from_yaml(cls, data: Optional[dict]):
        try:
            return cls.model_validate(data or {})
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(p) for p in (cls.section, *first["loc"]))
            raise ConfigError(f"Invalid setting {where}: {first['msg']}") from e


# -----------------------------------------------------------------------------
# core_config.yml
# -----------------------------------------------------------------------------

class LoggingConfig(_Section):
    section: ClassVar[str] = "logging"

    level: str = "INFO"
    format: str = (
        "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
        "<level>{level: <8}</level> | "
        "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
        "<level>{message}</level>"
    )
    file_path: Optional[str] = "reports/logs/fbpnn.log"
    rotation: str = "10 MB"
    retention: str = "1 week"


class AllureConfig(_Section):
    """Result directory the test session prepares for allure-pytest."""

    section: ClassVar[str] = "allure"

    results_dir: str = "reports/allure-results"
    clean_results: bool = True


class ParallelConfig(_Section):
    """Thread pool used for surface cells and concurrent experiments."""

    section: ClassVar[str] = "parallel"

    enabled: bool = True
    workers: int = Field(default=4, gt=0)


class NumericsConfig(_Section):
    """Fractional-calculus defaults."""

    section: ClassVar[str] = "numerics"

    gl_partitions: int = Field(default=100_000, ge=2)
    epsilon_phi: float = Field(default=1e-12, gt=0.0)
    bound_offset: float = Field(default=200.0, gt=0.0)
    clamp_fraction: float = Field(default=1e-6, gt=0.0, lt=1.0)


class TrainingConfig(_Section):
    """Defaults applied to every run before experiment and user overrides."""

    section: ClassVar[str] = "training"

    stop_tolerance: float = Field(default=1e-12, ge=0.0)
    saddle_epsilon: float = Field(default=1e-12, ge=0.0)
    perturbation_scale: float = Field(default=1e-3, ge=0.0)
    rng_seed: int = 0
    n_max: Literal[1, 3] = 3
    batch: Literal["full", "per_sample"] = "full"
    log_every: int = Field(default=500, gt=0)


class CoreConfig(_Section):
    debug: bool = False
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    allure: AllureConfig = Field(default_factory=AllureConfig)
    parallel: ParallelConfig = Field(default_factory=ParallelConfig)
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    training: TrainingConfig = Field(default_factory=TrainingConfig)

    @classmethod
    def from_yaml(cls, data: Optional[dict]) -> "CoreConfig":
        data = data or {}
        return cls(
            debug=bool(data.get("debug") or False),
            logging=LoggingConfig.from_yaml(data.get("logging")),
            allure=AllureConfig.from_yaml(data.get("allure")),
            parallel=ParallelConfig.from_yaml(data.get("parallel")),
            numerics=NumericsConfig.from_yaml(data.get("numerics")),
            training=TrainingConfig.from_yaml(data.get("training")),
        )


# -----------------------------------------------------------------------------
# data_config.yml
# -----------------------------------------------------------------------------

class OutputConfig(_Section):
    """Where run and surface artifacts are written."""

    section: ClassVar[str] = "output"

    runs_dir: str = "results/runs"
    surfaces_dir: str = "results/surfaces"


class DataConfig(_Section):
    """
    Run outputs and per-experiment overrides.

    `experiments` maps an experiment id to override keys understood by the
    run factory (learning_rate, max_iterations, mode, w_inf, b_inf, n_max,
    fixed_order, rng_seed).
    """

    output: OutputConfig = Field(default_factory=OutputConfig)
    experiments: Dict[str, dict] = Field(default_factory=dict)

    @field_validator("experiments", mode="before")
    @classmethod
    def _empty_entries(cls, value: Any) -> Any:
        if isinstance(value, dict):
            return {k: dict(v or {}) for k, v in value.items()}
        return value

    @classmethod
    def from_yaml(cls, data: Optional[dict]) -> "DataConfig":
        data = data or {}
        output = OutputConfig.from_yaml(data.get("output"))
        try:
            return cls(output=output, experiments=data.get("experiments") or {})
        except (ValidationError, TypeError) as e:
            raise ConfigError(f"Invalid setting experiments: {e}") from e


class Settings(BaseModel):
    """
    Core and data configuration together.

    Attributes:
        core: logging, reporting, parallelism, numerics and training defaults
        data: output locations and experiment overrides
    """

    model_config = ConfigDict(extra="ignore")

    core: CoreConfig = Field(default_factory=CoreConfig)
    data: DataConfig = Field(default_factory=DataConfig)

    @classmethod
    def from_yaml(
        cls,
        core_config_path: Optional[str] = None,
        data_config_path: Optional[str] = None,
    ) -> "Settings":
        configs = load_configs(core_config_path, data_config_path)
        return cls(
            core=CoreConfig.from_yaml(configs["core"]),
            data=DataConfig.from_yaml(configs["data"]),
        )

    @property
    def workers(self) -> int:
        """Worker count, 1 when parallel execution is disabled."""
        return self.core.parallel.workers if self.core.parallel.enabled else 1

    def experiment_overrides(self, experiment_id: str) -> dict:
        return dict(self.data.experiments.get(experiment_id, {}))


_settings_instance: Optional[Settings] = None


def get_settings(
    core_config_path: Optional[str] = None,
    data_config_path: Optional[str] = None,
    reload: bool = False,
) -> Settings:
    """Process-wide settings, loaded on first use or when reload is set."""
    global _settings_instance

    if _settings_instance is None or reload:
        _settings_instance = Settings.from_yaml(core_config_path, data_config_path)
    return _settings_instance


def load_config(
    core_config_path: Optional[str] = None,
    data_config_path: Optional[str] = None,
) -> Settings:
    """Fresh settings from the given files, bypassing the cache."""
    return Settings.from_yaml(core_config_path, data_config_path)
