"""Run configuration: a YAML mapping validated into :class:`RunConfig`."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from .disttest import SCORE_KINDS
from .dna import DnaAlphabet
from .fixtures import default_fixture_root

DETECTORS = ("dna", "graph", "dist", "external-adapter")
LABEL_MODES = ("heuristic", "calibration")
FIXTURE_ENV = "BOTWATCH_FIXTURES"


class ConfigError(ValueError):
    """Invalid configuration (exit code 2)."""


def fixture_root(override: str | os.PathLike | None = None) -> Path:
    if override:
        return Path(override)
    env = os.environ.get(FIXTURE_ENV)
    return Path(env) if env else default_fixture_root()


@dataclass
class DetectorParams:
    alphabet: dict[str, str] = field(
        default_factory=lambda: {"plain": "A", "reply": "C", "retweet": "T"}
    )
    min_group: int = 2
    bin_count: int = 20
    threshold: float | None = None
    score_kinds: list[str] = field(default_factory=lambda: list(SCORE_KINDS))
    n_boot: int = 200
    quantile: float = 0.99
    label_mode: str = "heuristic"
    calibration_fraction: float = 0.1
    export_graph: bool = False
    seed: int = 0

    def validate(self) -> None:
        try:
            DnaAlphabet(dict(self.alphabet))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"params.alphabet: {exc}") from exc
        if self.min_group < 2:
            raise ConfigError("params.min_group must be >= 2")
        if self.bin_count < 2:
            raise ConfigError("params.bin_count must be >= 2")
        if self.threshold is not None and self.threshold < 0:
            raise ConfigError("params.threshold must be >= 0")
        bad = [k for k in self.score_kinds if k not in SCORE_KINDS]
        if bad or not self.score_kinds:
            raise ConfigError(f"params.score_kinds must be a non-empty subset of {SCORE_KINDS}")
        if self.n_boot < 10:
            raise ConfigError("params.n_boot must be >= 10")
        if not 0.0 < self.quantile < 1.0:
            raise ConfigError("params.quantile must be in (0, 1)")
        if self.label_mode not in LABEL_MODES:
            raise ConfigError(f"params.label_mode must be one of {LABEL_MODES}")
        if not 0.0 < self.calibration_fraction <= 1.0:
            raise ConfigError("params.calibration_fraction must be in (0, 1]")


@dataclass
class RunConfig:
    detector: str = "dna"
    fixtures: str | None = None
    genuine: str = "genuine_accounts"
    bots: str = "social_spambots_1"
    test_set: str | None = "test_set_1"
    datasets: list[str] = field(default_factory=list)
    verdicts: str | None = None
    annotations: str = "annotations.csv"
    out: str = "botwatch-out"
    params: DetectorParams = field(default_factory=DetectorParams)

    def validate(self) -> "RunConfig":
        if self.detector not in DETECTORS:
            raise ConfigError(f"detector must be one of {DETECTORS}, got {self.detector!r}")
        self.params.validate()
        return self

    @property
    def root(self) -> Path:
        return fixture_root(self.fixtures)

    def resolve(self, ref: str) -> Path:
        """A dataset/manifest reference: existing path, or a name under the fixture root."""
        p = Path(ref)
        if p.exists() or p.is_absolute() or os.sep in ref:
            return p
        for candidate in (self.root / ref, self.root / f"{ref}.csv"):
            if candidate.exists():
                return candidate
        return self.root / ref

    def echo(self) -> dict[str, Any]:
        d = asdict(self)
        d.pop("out")  # where reports go is not part of the run
        d["fixtures"] = str(self.root)
        return d


def config_from_mapping(data: dict | None) -> RunConfig:
    data = dict(data or {})
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    params = data.pop("params", None) or {}
    if not isinstance(params, dict):
        raise ConfigError("params must be a mapping")
    pknown = {f.name for f in fields(DetectorParams)}
    punknown = sorted(set(params) - pknown)
    if punknown:
        raise ConfigError(f"unknown params keys: {punknown}")
    try:
        cfg = RunConfig(**data, params=DetectorParams(**params))
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def load_config(path: str | os.PathLike | None) -> RunConfig:
    if path is None:
        return config_from_mapping({})
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if data is not None and not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return config_from_mapping(data)
