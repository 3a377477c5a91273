"""
Run Factory
Default run parameters are overridden by below items
1. Experiment definition (μ, iterations, initial condition)
2. Config file (data_config.yml experiments section)
3. Environment variables (for CI)
4. CLI parameters
"""
import os
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from loguru import logger

from configs import Settings
from numerics.errors import ConfigError
from trainer.schemas import TrainerConfig

OVERRIDE_KEYS = (
    "learning_rate",
    "max_iterations",
    "mode",
    "w_inf",
    "b_inf",
    "n_max",
    "fixed_order",
    "rng_seed",
    "batch",
    "initial",
)

MODES = {
    "classic": ("classic",),
    "fsdm": ("fsdm",),
    "both": ("classic", "fsdm"),
}


@dataclass(frozen=True)
class RunPlan:
    experiment_id: str
    initial: Tuple[float, ...]
    configs: Dict[str, TrainerConfig]

    @property
    def modes(self) -> Tuple[str, ...]:
        return tuple(self.configs)


class RunFactory:
    ENV_MAPPINGS = {
        "FBPNN_MU": ("learning_rate", float),
        "FBPNN_ITERS": ("max_iterations", int),
        "FBPNN_MODE": ("mode", str),
        "FBPNN_W_INF": ("w_inf", float),
        "FBPNN_B_INF": ("b_inf", float),
        "FBPNN_N_MAX": ("n_max", int),
        "FBPNN_SEED": ("rng_seed", int),
    }

    def __init__(self, settings: Settings, cli_overrides: Optional[Dict[str, Any]] = None):
        """
        Initialize RunFactory with configuration.

        Args:
            settings: Loaded settings (training and numerics defaults, experiment overrides)
            cli_overrides: Optional CLI parameter overrides; None values are ignored
        """
        self.settings = settings
        self.cli_overrides = dict(cli_overrides or {})

    def base_fields(self) -> Dict[str, Any]:
        """TrainerConfig fields taken from core_config.yml."""
        training = self.settings.core.training
        numerics = self.settings.core.numerics
        return {
            "stop_tolerance": training.stop_tolerance,
            "saddle_epsilon": training.saddle_epsilon,
            "perturbation_scale": training.perturbation_scale,
            "rng_seed": training.rng_seed,
            "n_max": training.n_max,
            "batch": training.batch,
            "log_every": training.log_every,
            "bound_offset": numerics.bound_offset,
            "clamp_fraction": numerics.clamp_fraction,
            "order_policy": {"kind": "adaptive", "epsilon_phi": numerics.epsilon_phi},
        }

    def merge(self, defaults: Dict[str, Any], experiment_id: Optional[str] = None) -> Dict[str, Any]:
        merged = dict(defaults)
        if experiment_id is not None:
            file_overrides = self.settings.experiment_overrides(experiment_id)
            self._check_keys(file_overrides, f"data_config experiments.{experiment_id}")
            merged.update(file_overrides)
        self._apply_env_overrides(merged)
        self._apply_cli_overrides(merged, self.cli_overrides)
        return merged

    @staticmethod
    def _check_keys(overrides: Dict[str, Any], where: str) -> None:
        unknown = set(overrides) - set(OVERRIDE_KEYS)
        if unknown:
            raise ConfigError(f"Unknown override keys in {where}: {sorted(unknown)}")

    def _apply_env_overrides(self, config: Dict[str, Any]) -> None:
        """Apply environment variable overrides."""
        for env_var, (config_key, converter) in self.ENV_MAPPINGS.items():
            value = os.environ.get(env_var)
            if value:
                try:
                    config[config_key] = converter(value)
                except ValueError as e:
                    raise ConfigError(f"Invalid {env_var}={value!r}: {e}") from e
                logger.info(f"Environment override: {env_var}={value}")

    def _apply_cli_overrides(self, config: Dict[str, Any], cli_overrides: Dict[str, Any]) -> None:
        """Apply CLI parameter overrides."""
        self._check_keys(cli_overrides, "CLI overrides")
        for key, value in cli_overrides.items():
            if value is not None:
                config[key] = value
                logger.info(f"CLI override: {key}={value}")

    def trainer_config(
        self,
        merged: Dict[str, Any],
        mode: str,
        names: Tuple[str, ...] = (),
        fields: Optional[Dict[str, Any]] = None,
    ) -> TrainerConfig:
        """TrainerConfig for one mode, restricting training and tracking to names when given."""
        fields = dict(fields) if fields is not None else self.base_fields()
        for key in ("learning_rate", "max_iterations", "w_inf", "b_inf", "n_max", "rng_seed", "batch"):
            if merged.get(key) is not None:
                fields[key] = merged[key]
        if merged.get("fixed_order") is not None:
            fields["order_policy"] = {"kind": "fixed", "value": merged["fixed_order"]}
        fields["mode"] = mode
        if names:
            fields["trainable"] = list(names)
            fields["track"] = list(names)
        return TrainerConfig.from_dict(fields)

    def custom_config(self, trainer_fields: Dict[str, Any]) -> TrainerConfig:
        """TrainerConfig from a config file's trainer section, then env and CLI overrides."""
        fields = {**self.base_fields(), **trainer_fields}
        merged = self.merge({})
        mode = merged.get("mode") or fields.get("mode", "fsdm")
        if mode not in ("classic", "fsdm"):
            raise ConfigError(f"A train config runs one mode, got {mode!r}")
        return self.trainer_config(merged, mode, fields=fields)

    def plan(self, experiment) -> RunPlan:
        """Resolve every override layer for a registered experiment."""
        defaults = {
            "learning_rate": experiment.learning_rate,
            "max_iterations": experiment.max_iterations,
            "mode": experiment.modes,
            "initial": experiment.initial,
        }
        merged = self.merge(defaults, experiment.id)
        mode = merged.get("mode")
        if mode not in MODES:
            raise ConfigError(f"Unknown mode {mode!r}, expected one of {sorted(MODES)}")
        initial = tuple(float(x) for x in merged["initial"])
        if len(initial) != len(experiment.tracked):
            raise ConfigError(
                f"{experiment.id}: initial condition needs {len(experiment.tracked)} values, got {initial}"
            )
        configs = {m: self.trainer_config(merged, m, experiment.tracked) for m in MODES[mode]}
        logger.info(
            f"Run plan {experiment.id}: modes={list(configs)}, initial={initial}, "
            f"mu={merged['learning_rate']}, iterations={merged['max_iterations']}"
        )
        return RunPlan(experiment.id, initial, configs)
