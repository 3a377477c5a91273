"""JSON Schema definitions for train configuration files."""
from typing import Any

from jsonschema import validate, ValidationError

from numerics.errors import ConfigError


NUMBER_MATRIX = {
    "type": "array",
    "items": {"type": "array", "items": {"type": "number"}, "minItems": 1},
    "minItems": 1,
}

# One layer: width and activation, optionally explicit parameters
LAYER_SCHEMA = {
    "type": "object",
    "properties": {
        "width": {"type": "integer", "minimum": 1},
        "activation": {"type": "string"},
        "weights": NUMBER_MATRIX,
        "biases": {"type": "array", "items": {"type": "number"}, "minItems": 1},
    },
    "required": ["width", "activation"],
    "additionalProperties": False,
}

NETWORK_SCHEMA = {
    "type": "object",
    "properties": {
        "input_width": {"type": "integer", "minimum": 1},
        "layers": {"type": "array", "items": LAYER_SCHEMA, "minItems": 1},
        "init_scale": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer"},
    },
    "required": ["input_width", "layers"],
    "additionalProperties": False,
}

DATASET_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "pairs": {
                    "type": "array",
                    "items": {"type": "array", "minItems": 2, "maxItems": 2},
                    "minItems": 1,
                },
            },
            "required": ["pairs"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"generator": {"enum": ["bump", "filter"]}},
            "required": ["generator"],
            "additionalProperties": False,
        },
    ]
}

ORDER_POLICY_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "kind": {"const": "fixed"},
                "value": {"type": "number", "minimum": 0},
            },
            "required": ["kind", "value"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "adaptive"},
                "epsilon_phi": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
    ]
}

TRAINER_SCHEMA = {
    "type": "object",
    "properties": {
        "mode": {"enum": ["classic", "fsdm"]},
        "learning_rate": {"type": "number", "minimum": 0},
        "max_iterations": {"type": "integer", "minimum": 1},
        "w_inf": {"type": ["number", "null"]},
        "b_inf": {"type": ["number", "null"]},
        "bound_offset": {"type": "number", "exclusiveMinimum": 0},
        "clamp_fraction": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "n_max": {"enum": [1, 3]},
        "order_policy": ORDER_POLICY_SCHEMA,
        "trainable": {"type": ["array", "null"], "items": {"type": "string"}},
        "track": {"type": "array", "items": {"type": "string"}},
        "stop_tolerance": {"type": "number", "minimum": 0},
        "saddle_epsilon": {"type": "number", "minimum": 0},
        "perturbation_scale": {"type": "number", "minimum": 0},
        "rng_seed": {"type": "integer"},
        "batch": {"enum": ["full", "per_sample"]},
        "log_every": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}

TRAIN_CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "trainer": TRAINER_SCHEMA,
        "network": NETWORK_SCHEMA,
        "dataset": DATASET_SCHEMA,
    },
    "required": ["network", "dataset"],
    "additionalProperties": False,
}


def validate_document(data: Any, schema: dict = TRAIN_CONFIG_SCHEMA) -> bool:
    """
    Validate a configuration document against a JSON schema.

    Args:
        data: Parsed JSON document
        schema: JSON schema to validate against

    Returns:
        True if validation passes

    Raises:
        ConfigError: If validation fails, with the failing path
    """
    try:
        validate(instance=data, schema=schema)
    except ValidationError as e:
        location = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"Invalid train config at {location}: {e.message}") from e
    return True

