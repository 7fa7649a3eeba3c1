"""sqsep configuration."""

from typing import Any, Dict, List, Optional
from pathlib import Path
import copy
import json

import jsonschema

from sqsep import utils
from sqsep.errors import ConfigurationError, ParameterError
from sqsep.moments import ConstructionParams


_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_UNIT = {"type": "number", "minimum": 0, "maximum": 1}

CONFIG_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "construction": {
            "type": "object",
            "properties": {
                "gamma": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "r": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "method": {"type": "string", "enum": ["kernel", "lstsq"]},
                "strict_regime": {"type": "boolean"},
                "eta": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "gamma_prime": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "k": {"type": ["integer", "null"], "minimum": 0},
            },
            "required": ["gamma", "r"],
        },
        "cube": {
            "type": "object",
            "properties": {
                "d": {"type": "integer", "minimum": 1},
                "check_dimension": {"type": "boolean"},
                "threshold": {"type": ["number", "null"], "minimum": -1, "maximum": 1},
            },
            "required": ["d"],
        },
        "oracle": {
            "type": "object",
            "properties": {
                "c1": _POSITIVE,
                "c2": _POSITIVE,
                "tau": {"type": ["number", "null"], "minimum": 0},
                "query_budget": {"type": ["integer", "null"], "minimum": 1},
            },
        },
        "ldp": {
            "type": "object",
            "properties": {
                "epsilon": _POSITIVE,
                "n_users": {"type": "integer", "minimum": 1},
                "queries_per_user": {"type": "integer", "minimum": 1},
            },
        },
        "experiment": {
            "type": "object",
            "properties": {
                "n_a": {"type": "integer", "minimum": 1},
                "samples": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "workers": {"type": "integer", "minimum": 1},
                "learners": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "perceptron_budget": {"type": ["integer", "null"], "minimum": 1},
                "require_certificate": {"type": "boolean"},
            },
        },
        "learners": {"type": "object", "additionalProperties": {"type": "object"}},
        "ceilings": {
            "type": "object",
            "properties": {
                "C": _POSITIVE,
                "lowdeg_max_accuracy": _UNIT,
                "perceptron_min_accuracy": _UNIT,
                "min_gap": _UNIT,
                "indistinguishable_fraction": _UNIT,
            },
        },
        "sweep": {
            "type": "object",
            "properties": {
                "gammas": {"type": "array", "items": _POSITIVE, "minItems": 1},
                "rs": {"type": "array", "items": _POSITIVE, "minItems": 1},
            },
        },
        "output": {
            "type": "object",
            "properties": {"directory": {"type": "string", "minLength": 1}},
        },
    },
    "required": ["construction", "cube", "oracle", "experiment", "ceilings"],
}


class SqsepConfig:
    """Manages sqsep configuration."""

    def __init__(self, config_path: str = None, config: Optional[Dict[str, Any]] = None):
        """
        Load configuration from file, from a dictionary, or use defaults.

        Values read from a file are merged over the defaults, so a file only
        needs the keys it changes.

        Args:
            config_path: Path to config JSON file
            config: Explicit configuration dictionary, takes precedence over the file
        """
        self.path = config_path
        if config is not None:
            self.config = copy.deepcopy(config)
        elif self.path and Path(self.path).exists():
            with open(self.path, encoding="utf-8") as f:
                try:
                    loaded = json.load(f)
                except json.JSONDecodeError as e:
                    raise ConfigurationError(f"{self.path} is not valid JSON: {e}") from e
            if not isinstance(loaded, dict):
                raise ConfigurationError(f"{self.path} must hold a JSON object")
            self.config = utils.deep_merge(self.get_default_config(), loaded)
        else:
            self.config = self.get_default_config()

    @staticmethod
    def get_default_config() -> Dict[str, Any]:
        """Return default configuration."""
        return {
            "construction": {
                "gamma": 0.35,
                "r": 0.5,
                "method": "kernel",
                "strict_regime": False,
                "eta": None,  # explicit values override the derivation from gamma and r
                "gamma_prime": None,
                "k": None,
            },
            "cube": {
                "d": 12,
                "check_dimension": True,
                "threshold": None,  # majority conditioning of P_1, None for gamma~/2
            },
            "oracle": {
                "c1": 5.0,  # query budget floor(exp(c1 * gamma^(-2r/5)))
                "c2": 4.0,  # tolerance exp(-c2 * gamma^(-2r/5))
                "tau": None,  # explicit tolerance, overrides c2
                "query_budget": None,  # explicit budget, overrides c1
            },
            "ldp": {
                "epsilon": 1.0,
                "n_users": 10000,
                "queries_per_user": 1,
            },
            "experiment": {
                "n_a": 200,
                "samples": 4000,
                "seed": 0,
                "workers": 4,
                "learners": ["perceptron", "lowdeg"],
                "perceptron_budget": None,  # None lets the Perceptron run unbounded
                "require_certificate": True,  # refuse to run when the Fourier gap exceeds tau
            },
            "learners": {
                "perceptron": {"max_rounds": 200, "target": 0.05},
                "lowdeg": {"max_degree": 3},
                "random-halfspace": {"eps": 0.2, "c": 1.0, "max_candidates": 10000},
            },
            "ceilings": {
                "C": 10,
                "lowdeg_max_accuracy": 0.55,
                "perceptron_min_accuracy": 0.9,
                "min_gap": 0.3,
                "indistinguishable_fraction": 0.95,
            },
            "sweep": {
                "gammas": [0.2, 0.25, 0.3, 0.35, 0.4],
                "rs": [0.3, 0.5, 0.7],
            },
            "output": {
                "directory": "sqsep-out",
            },
        }

    def get(self, key_path: str, default=None):
        """
        Get configuration value using dot notation.

        Example: config.get('construction.gamma')
        """
        return utils.conf_get(self.config, key_path, default)

    def merged(self, overrides: Dict[str, Any]) -> "SqsepConfig":
        """Return a copy with ``overrides`` deep-merged in; overrides win.

        Keys may be nested dictionaries or dot paths such as
        ``{"construction.gamma": 0.3}``. None values are ignored, so unset
        CLI flags keep the file value.
        """
        nested: Dict[str, Any] = {}
        for key, value in overrides.items():
            if value is None:
                continue
            *parents, leaf = key.split(".")
            target = nested
            for parent in parents:
                target = target.setdefault(parent, {})
            target[leaf] = value
        merged = SqsepConfig(config=utils.deep_merge(self.config, nested))
        merged.path = self.path
        return merged

    def params(self) -> ConstructionParams:
        """Construction parameters described by this configuration.

        Explicit eta, gamma_prime or k replace the values derived from gamma and r.
        """
        return ConstructionParams(
            self.get("construction.gamma"),
            self.get("construction.r"),
            eta=self.get("construction.eta"),
            gamma_prime=self.get("construction.gamma_prime"),
            k=self.get("construction.k"),
        )

    def tau(self) -> float:
        explicit = self.get("oracle.tau")
        if explicit is not None:
            return float(explicit)
        return self.params().tau(self.get("oracle.c2", 4.0))

    def query_budget(self) -> int:
        explicit = self.get("oracle.query_budget")
        if explicit is not None:
            return int(explicit)
        return self.params().query_budget(self.get("oracle.c1", 5.0))

    def validate(self) -> List[str]:
        """Check the schema and the construction constraints.

        Returns:
            Regime warnings for parameters outside the proven range

        Raises:
            ConfigurationError: If the document or the parameters are invalid
        """
        try:
            jsonschema.validate(instance=self.config, schema=CONFIG_SCHEMA)
        except jsonschema.ValidationError as e:
            location = ".".join(str(part) for part in e.absolute_path) or "<root>"
            raise ConfigurationError(f"Invalid configuration at {location}: {e.message}") from e
        try:
            params = self.params()
            warnings = params.validate(self.get("construction.strict_regime", False))
            d = self.get("cube.d")
            if self.get("cube.check_dimension", True) and d < params.min_dimension:
                raise ParameterError(f"cube.d={d} is below the required {params.min_dimension}")
        except ParameterError as e:
            raise ConfigurationError(str(e)) from e
        return warnings

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON dump of the resolved configuration."""
        return utils.config_hash(self.config)


def initialize() -> SqsepConfig:
    """Initialize and return the sqsep configuration."""

    project_dir = Path.cwd()
    selected_config = None
    for fname in ("sqsep.json", "sqsep.config.json"):
        candidate = project_dir / fname
        if candidate.exists():
            selected_config = str(candidate)
            break

    return SqsepConfig(config_path=selected_config)


conf = initialize()
