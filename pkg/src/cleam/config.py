"""Declarative run configuration for the command-line interface.

A single versioned JSON file drives every subcommand.  Top-level keys:

* ``version``: must be 1.
* ``mode``: one of ``estimate``, ``simulate``, ``validate`` (the ``report``
  subcommand re-renders an existing JSON report and takes no config file).
* ``seed``, ``confidence``, ``significance``: run-wide numerics.
* ``estimators``: any of ``baseline``, ``cleam``, ``multiclass``, ``bbse``.
* ``accuracy``: ``{"alpha": [a0, a1]}`` or ``confusion``: a K x K
  column-stochastic matrix; exactly one channel may be given.
* ``data``: ``{"path": ..., "n_classes": ...}`` pointing at a label file.
* ``p_star``: known ground-truth class probabilities (enables error columns
  and, in validate mode, the model comparison).
* ``scenario``: ``{"p_star_grid": [...], "n": 400, "n_grid": [...],
  "s": 30, "repetitions": 5}`` for simulations.
* ``oracle_batches``: Monte Carlo size of the validate-mode variance oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .exceptions import ConfigError, InvalidInputError
from .simulator import ESTIMATOR_NAMES, Channel
from .types import AccuracyProfile, ClassDistribution, ConfusionMatrix

CONFIG_VERSION = 1

_TOP_LEVEL_KEYS = {
    "version",
    "mode",
    "seed",
    "confidence",
    "significance",
    "estimators",
    "accuracy",
    "confusion",
    "data",
    "p_star",
    "source_prior",
    "scenario",
    "oracle_batches",
}

_MODES = ("estimate", "simulate", "validate")


@dataclass(frozen=True)
class ScenarioSettings:
    """Grid shape for simulate mode."""

    p_star_values: tuple[float, ...]
    n_values: tuple[int, ...] = (400,)
    s: int = 30
    repetitions: int = 5


@dataclass(frozen=True)
class RunConfig:
    """A fully validated run configuration."""

    mode: str
    seed: int = 0
    confidence: float = 0.95
    significance: float = 0.05
    estimators: tuple[str, ...] = ("baseline", "cleam")
    channel: Channel | None = None
    data_path: Path | None = None
    n_classes: int = 2
    p_star: ClassDistribution | None = None
    source_prior: ClassDistribution | None = None
    scenario: ScenarioSettings | None = None
    oracle_batches: int = 100_000


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _parse_channel(raw: dict[str, Any]) -> Channel | None:
    has_alpha = "accuracy" in raw
    has_confusion = "confusion" in raw
    _expect(not (has_alpha and has_confusion), "give either 'accuracy' or 'confusion', not both")
    try:
        if has_alpha:
            accuracy = raw["accuracy"]
            _expect(isinstance(accuracy, dict) and "alpha" in accuracy, "'accuracy' must be {'alpha': [...]}")
            return AccuracyProfile(np.asarray(accuracy["alpha"], dtype=float))
        if has_confusion:
            return ConfusionMatrix(np.asarray(raw["confusion"], dtype=float))
    except InvalidInputError as exc:
        raise ConfigError(f"invalid channel: {exc}") from exc
    return None


def _parse_scenario(raw: Any) -> ScenarioSettings:
    _expect(isinstance(raw, dict), "'scenario' must be an object")
    unknown = set(raw) - {"p_star_grid", "n", "n_grid", "s", "repetitions"}
    _expect(not unknown, f"unknown scenario keys: {sorted(unknown)}")
    grid = raw.get("p_star_grid")
    _expect(isinstance(grid, list) and len(grid) >= 1, "'scenario.p_star_grid' must be a non-empty list")
    if "n_grid" in raw:
        _expect("n" not in raw, "give either 'scenario.n' or 'scenario.n_grid', not both")
        n_values = tuple(int(v) for v in raw["n_grid"])
        _expect(len(n_values) >= 1, "'scenario.n_grid' must be non-empty")
    else:
        n_values = (int(raw.get("n", 400)),)
    settings = ScenarioSettings(
        p_star_values=tuple(float(v) for v in grid),
        n_values=n_values,
        s=int(raw.get("s", 30)),
        repetitions=int(raw.get("repetitions", 5)),
    )
    _expect(all(0.0 <= v <= 1.0 for v in settings.p_star_values), "'scenario.p_star_grid' values must lie in [0, 1]")
    _expect(all(n >= 1 for n in settings.n_values), "'scenario' batch sizes must be >= 1")
    _expect(settings.s >= 2, "'scenario.s' must be >= 2")
    _expect(settings.repetitions >= 1, "'scenario.repetitions' must be >= 1")
    return settings


def parse_config(raw: dict[str, Any], base_dir: Path | None = None) -> RunConfig:
    """Validate a parsed config document into a :class:`RunConfig`."""
    _expect(isinstance(raw, dict), "the config file must hold a JSON object")
    unknown = set(raw) - _TOP_LEVEL_KEYS
    _expect(not unknown, f"unknown config keys: {sorted(unknown)}")
    _expect(raw.get("version") == CONFIG_VERSION, f"'version' must be {CONFIG_VERSION}")
    mode = raw.get("mode")
    _expect(mode in _MODES, f"'mode' must be one of {_MODES}, got {mode!r}")

    seed = raw.get("seed", 0)
    _expect(isinstance(seed, int) and seed >= 0, "'seed' must be a non-negative integer")
    confidence = float(raw.get("confidence", 0.95))
    _expect(0.0 < confidence < 1.0, "'confidence' must lie in (0, 1)")
    significance = float(raw.get("significance", 0.05))
    _expect(0.0 < significance < 1.0, "'significance' must lie in (0, 1)")

    estimators = tuple(raw.get("estimators", ["baseline", "cleam"]))
    _expect(len(estimators) >= 1, "'estimators' must name at least one estimator")
    for name in estimators:
        _expect(name in ESTIMATOR_NAMES, f"unknown estimator {name!r}; expected one of {ESTIMATOR_NAMES}")

    channel = _parse_channel(raw)

    data_path: Path | None = None
    n_classes = 2
    if "data" in raw:
        data = raw["data"]
        _expect(isinstance(data, dict) and "path" in data, "'data' must be {'path': ..., 'n_classes': ...}")
        unknown_data = set(data) - {"path", "n_classes"}
        _expect(not unknown_data, f"unknown data keys: {sorted(unknown_data)}")
        data_path = Path(data["path"])
        if base_dir is not None and not data_path.is_absolute():
            data_path = base_dir / data_path
        n_classes = int(data.get("n_classes", 2))
        _expect(n_classes >= 2, "'data.n_classes' must be >= 2")

    p_star = None
    if "p_star" in raw:
        try:
            p_star = ClassDistribution(np.asarray(raw["p_star"], dtype=float))
        except InvalidInputError as exc:
            raise ConfigError(f"invalid p_star: {exc}") from exc

    source_prior = None
    if "source_prior" in raw:
        try:
            source_prior = ClassDistribution(np.asarray(raw["source_prior"], dtype=float))
        except InvalidInputError as exc:
            raise ConfigError(f"invalid source_prior: {exc}") from exc

    scenario = _parse_scenario(raw["scenario"]) if "scenario" in raw else None

    oracle_batches = int(raw.get("oracle_batches", 100_000))
    _expect(oracle_batches >= 10_000, "'oracle_batches' must be >= 10000")

    config = RunConfig(
        mode=mode,
        seed=seed,
        confidence=confidence,
        significance=significance,
        estimators=estimators,
        channel=channel,
        data_path=data_path,
        n_classes=n_classes,
        p_star=p_star,
        source_prior=source_prior,
        scenario=scenario,
        oracle_batches=oracle_batches,
    )
    _check_mode_requirements(config)
    return config


def _check_mode_requirements(config: RunConfig) -> None:
    corrected = [name for name in config.estimators if name != "baseline"]
    if config.mode == "estimate":
        _expect(config.data_path is not None, "estimate mode requires 'data'")
        _expect(
            not corrected or config.channel is not None,
            f"estimators {corrected} need an 'accuracy' or 'confusion' channel",
        )
    elif config.mode == "simulate":
        _expect(config.scenario is not None, "simulate mode requires 'scenario'")
        _expect(config.channel is not None, "simulate mode requires an 'accuracy' or 'confusion' channel")
    elif config.mode == "validate":
        _expect(config.channel is not None, "validate mode requires an 'accuracy' or 'confusion' channel")
        _expect(isinstance(config.channel, AccuracyProfile), "validate mode works on a binary 'accuracy' channel")
        _expect(config.p_star is not None, "validate mode requires the known 'p_star'")
        _expect(
            config.data_path is not None or config.scenario is not None,
            "validate mode needs 'data' to check, or 'scenario' to simulate a series",
        )


def load_run_config(path: str | Path) -> RunConfig:
    """Read and validate a config file, raising :class:`ConfigError` on problems."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with path.open(encoding="utf-8") as handle:
            raw = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return parse_config(raw, base_dir=path.parent)
