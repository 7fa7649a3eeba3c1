"""Helper functions for seeding, hashing and writing run artifacts."""

from typing import Any, Dict, Iterable, List, Optional, Sequence
from pathlib import Path
import csv
import hashlib
import json
import logging

import numpy as np


_logger = logging.getLogger("sqsep.console")

__all__ = [
    "task_rng",
    "spawn_rngs",
    "canonical_json",
    "config_hash",
    "create_directory",
    "write_file",
    "write_json",
    "write_csv",
    "write_jsonl",
    "format_duration",
    "conf_get",
    "deep_merge",
]


def task_rng(seed: int, *keys: int) -> np.random.Generator:
    """Return the random stream for a task identified by integer keys.

    Streams are derived from one root seed by counter splitting, so the
    stream for ``(seed, 3, 1)`` is the same no matter which worker asks.

    Args:
        seed: Root seed of the run
        keys: Task counters (e.g. a-sample index, stream number)

    Returns:
        Independent numpy Generator
    """
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.default_rng(sequence)


def spawn_rngs(seed: int, count: int) -> List[np.random.Generator]:
    """Spawn ``count`` independent child generators from a root seed."""
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [np.random.default_rng(child) for child in children]


def canonical_json(obj: Any) -> str:
    """Serialize to JSON with sorted keys and no insignificant whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_json_default)


def config_hash(config: Dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON dump of a configuration dictionary."""
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def _json_default(value: Any):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return value.as_posix()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def create_directory(directory: str):
    """Create directory.

    Args:
        directory: Path to directory
    """
    dirpath = Path(directory)
    dirpath.mkdir(parents=True, exist_ok=True)


def write_file(file: str, content: str):
    """Write content to file, overwriting it if it exists.

    Args:
        file: Path to file
        content: Content to write
    """
    with open(file, "w", encoding="utf-8") as f:
        f.write(content)


def write_json(file: str, obj: Any):
    """Write a JSON document with sorted keys and a trailing newline.

    Output is byte-stable for equal inputs.
    """
    content = json.dumps(obj, sort_keys=True, indent=2, default=_json_default)
    write_file(file, content + "\n")


def write_csv(file: str, fieldnames: Sequence[str], rows: Iterable[Dict[str, Any]]):
    """Write rows to a CSV file with a header line.

    Args:
        file: Path to file
        fieldnames: Column order
        rows: Dictionaries keyed by column name; missing keys are left empty
    """
    with open(file, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def write_jsonl(file: str, records: Iterable[Dict[str, Any]], header: Optional[Dict] = None):
    """Write JSON lines, optionally preceded by a metadata header line."""
    with open(file, "w", encoding="utf-8") as f:
        if header is not None:
            f.write(canonical_json(header))
            f.write("\n")
        for record in records:
            f.write(canonical_json(record))
            f.write("\n")


def format_duration(seconds: float) -> str:
    """Format duration in seconds to a human-readable string.

    Args:
        seconds: Duration in seconds

    Returns:
        Formatted string like "5m 32s"
    """
    minutes = int(seconds // 60)
    secs = int(seconds % 60)

    if minutes > 0:
        return f"{minutes}m {secs}s"
    return f"{secs}s"


def conf_get(config: dict, key_path: str, default=None):
    """Get configuration value using dot notation.

    Args:
        config: Configuration dictionary
        key_path: Dot notation key path
        default: Default value if key not found

    Returns:
        Configuration value or default

    Example: conf_get(config, 'construction.gamma')
    """
    keys = key_path.split(".")
    value = config
    for key in keys:
        if isinstance(value, dict) and key in value:
            value = value[key]
        else:
            return default
    return value


def deep_merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge ``overrides`` into a copy of ``base``; overrides win."""
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged
