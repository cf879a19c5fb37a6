"""Declarative pipeline configuration.

One JSON file drives the whole pipeline; every default mirrors the study
setup (100 kHz synthesis, 2 s loops, 1..5 mA drive range, 17 participants,
3 grouping rounds). Seeds are explicit everywhere so any artifact can be
regenerated bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .space import TRANSFORMS


@dataclass(frozen=True)
class SynthesisConfig:
    fs_hz: float = 100_000.0
    duration_s: float = 2.0
    base_seed: int = 0

    def __post_init__(self):
        if self.fs_hz <= 0 or self.duration_s <= 0:
            raise ValueError("fs_hz and duration_s must be positive")


@dataclass(frozen=True)
class ExperimentConfig:
    participants: int = 17
    group_counts: tuple = (8, 4, 2)
    weights: tuple = (1.0, 1.0, 1.0)
    noise_sd: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.participants < 1:
            raise ValueError("participants must be >= 1")
        counts = tuple(int(c) for c in self.group_counts)
        if len(counts) not in (2, 3):
            raise ValueError("group_counts must give 2 or 3 rounds")
        if any(a < b for a, b in zip(counts, counts[1:])) or counts[-1] < 2:
            raise ValueError("group_counts must be non-increasing and end >= 2")
        object.__setattr__(self, "group_counts", counts)
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")


@dataclass(frozen=True)
class MdsConfig:
    k: int = 3
    k_max: int = 5
    restarts: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.k_max < self.k:
            raise ValueError("need 1 <= k <= k_max")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass(frozen=True)
class AnalysisConfig:
    transform: str = "log-zscore"
    label_round: int = 3

    def __post_init__(self):
        if self.transform not in TRANSFORMS:
            raise ValueError(f"unknown transform {self.transform!r}")
        if self.label_round not in (1, 2, 3):
            raise ValueError("label_round must be 1, 2, or 3")


@dataclass(frozen=True)
class PipelineConfig:
    synthesis: SynthesisConfig = field(default_factory=SynthesisConfig)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    mds: MdsConfig = field(default_factory=MdsConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    out_dir: str = "out"


_SECTIONS = {
    "synthesis": SynthesisConfig,
    "experiment": ExperimentConfig,
    "mds": MdsConfig,
    "analysis": AnalysisConfig,
}


def default_config() -> PipelineConfig:
    return PipelineConfig()


def config_from_dict(payload: dict) -> PipelineConfig:
    """Build a config from parsed JSON, rejecting unknown keys loudly."""
    unknown = set(payload) - set(_SECTIONS) - {"out_dir"}
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    for name, cls in _SECTIONS.items():
        section = payload.get(name, {})
        if not isinstance(section, dict):
            raise ValueError(f"config section {name!r} must be an object")
        allowed = {f.name for f in fields(cls)}
        extra = set(section) - allowed
        if extra:
            raise ValueError(f"unknown keys in {name!r}: {sorted(extra)}")
        kwargs[name] = cls(**section)
    if "out_dir" in payload:
        kwargs["out_dir"] = str(payload["out_dir"])
    return PipelineConfig(**kwargs)


def load_config(path) -> PipelineConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ValueError(f"config {path} must hold a JSON object")
    return config_from_dict(payload)


def config_to_dict(config: PipelineConfig) -> dict:
    payload = asdict(config)
    payload["experiment"]["group_counts"] = list(config.experiment.group_counts)
    payload["experiment"]["weights"] = list(config.experiment.weights)
    return payload


def apply_overrides(
    config: PipelineConfig,
    seed: int | None = None,
    out: str | None = None,
    kmax: int | None = None,
    restarts: int | None = None,
) -> PipelineConfig:
    """Command-line flag overrides; seed shifts every seeded stage."""
    synthesis = config.synthesis
    experiment = config.experiment
    mds = config.mds
    if seed is not None:
        synthesis = SynthesisConfig(
            fs_hz=synthesis.fs_hz,
            duration_s=synthesis.duration_s,
            base_seed=seed,
        )
        experiment = ExperimentConfig(
            participants=experiment.participants,
            group_counts=experiment.group_counts,
            weights=experiment.weights,
            noise_sd=experiment.noise_sd,
            seed=seed,
        )
        mds = MdsConfig(k=mds.k, k_max=mds.k_max, restarts=mds.restarts, seed=seed)
    if kmax is not None or restarts is not None:
        new_kmax = kmax if kmax is not None else mds.k_max
        mds = MdsConfig(
            k=min(mds.k, new_kmax),
            k_max=new_kmax,
            restarts=restarts if restarts is not None else mds.restarts,
            seed=mds.seed,
        )
    return PipelineConfig(
        synthesis=synthesis,
        experiment=experiment,
        mds=mds,
        analysis=config.analysis,
        out_dir=out if out is not None else config.out_dir,
    )
