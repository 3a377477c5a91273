"""Custom training runs described by a JSON document."""
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
from loguru import logger

from configs import Settings
from harness.builders import DATASETS
from harness.factory import RunFactory
from harness.schemas import validate_document
from network.mlp import ActivationKind, Dataset, LayerParams, Mlp
from numerics.errors import ConfigError, ShapeError
from trainer.schemas import TrainerConfig


@dataclass(frozen=True)
class TrainJob:
    name: str
    network: Mlp
    dataset: Dataset
    config: TrainerConfig


def build_network(spec: Dict[str, Any]) -> Mlp:
    """
    Network from the document's network section.

    Layers without explicit weights and biases draw them from a uniform
    distribution on [-init_scale, init_scale] seeded by `seed`.
    """
    rng = np.random.default_rng(spec.get("seed", 0))
    scale = float(spec.get("init_scale", 1.0))
    width = spec["input_width"]
    layers = []
    for index, layer in enumerate(spec["layers"], start=1):
        shape = (layer["width"], width)
        if ("weights" in layer) != ("biases" in layer):
            raise ConfigError(f"layer {index}: give both weights and biases, or neither")
        if "weights" in layer:
            weights = np.asarray(layer["weights"], dtype=float)
            biases = np.asarray(layer["biases"], dtype=float)
            if weights.shape != shape or biases.shape != (shape[0],):
                raise ShapeError(
                    f"layer {index}: expected weights {shape} and {shape[0]} biases, "
                    f"got {weights.shape} and {biases.shape}"
                )
        else:
            weights = rng.uniform(-scale, scale, size=shape)
            biases = rng.uniform(-scale, scale, size=shape[0])
        layers.append(LayerParams(weights, biases, ActivationKind.parse(layer["activation"])))
        width = layer["width"]
    return Mlp(tuple(layers), spec["input_width"])


def build_dataset(spec: Dict[str, Any]) -> Dataset:
    if "generator" in spec:
        return DATASETS[spec["generator"]]()
    return Dataset.from_pairs((p, q) for p, q in spec["pairs"])


def parse_train_config(
    document: Dict[str, Any],
    settings: Settings,
    cli_overrides: Optional[Dict[str, Any]] = None,
) -> TrainJob:
    """
    Validate and build a job from an already parsed document.

    Raises:
        ConfigError: schema violation or invalid trainer values
        ShapeError: network and dataset widths disagree
    """
    validate_document(document)
    network = build_network(document["network"])
    dataset = build_dataset(document["dataset"])
    dataset.check_against(network)
    config = RunFactory(settings, cli_overrides).custom_config(document.get("trainer", {}))
    return TrainJob(document.get("name", "custom"), network, dataset, config)


def load_train_config(
    path: Union[str, Path],
    settings: Settings,
    cli_overrides: Optional[Dict[str, Any]] = None,
) -> TrainJob:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            document = json.load(f)
    except OSError as e:
        raise ConfigError(f"Cannot read train config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    logger.info(f"Loaded train config from: {path}")
    return parse_train_config(document, settings, cli_overrides)
