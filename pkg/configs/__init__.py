# Configuration module
from .config import (
    Settings,
    CoreConfig,
    DataConfig,
    NumericsConfig,
    TrainingConfig,
    get_settings,
    load_config,
    load_configs,
)
from .log_setup import configure_logging

__all__ = [
    "Settings",
    "CoreConfig",
    "DataConfig",
    "NumericsConfig",
    "TrainingConfig",
    "get_settings",
    "load_config",
    "load_configs",
    "configure_logging",
]
