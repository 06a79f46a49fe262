"""Configuration management: model files and experiment settings."""

import json
import math
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, field_validator

from ..domain.errors import ConfigError
from ..domain.model.network import Network
from ..domain.model.noise import NoiseSpec
from ..domain.model.params import ModelParams
from ..domain.model.state import MAX_LN_N, SphereState
from ..domain.service.replica_streams import check_seed, stream_id
from ..domain.value_object.scan import ScanMode, ScanPolicy

DEFAULT_LN_N = [math.log(1000.0 * 5.0 ** j) for j in range(10)]
DEFAULT_BETA_GRID = [-5.0, -4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0]


class NoiseSection(BaseModel):
    """Noise law: kind in {gaussian, uniform, laplace} plus family parameters."""
    kind: str = Field("gaussian", description="Noise family")
    params: Dict[str, float] = Field(default_factory=dict, description="Family parameters")


class ScanSection(BaseModel):
    """Scan rule; ``sequence`` holds 1-based coordinates for explicit-sequence."""
    mode: ScanMode = ScanMode.CYCLE
    sequence: Optional[List[int]] = None


class ModelFile(BaseModel):
    """On-disk model description."""
    d: int = Field(..., ge=2, description="Number of coordinates")
    p: List[List[float]] = Field(..., description="Row-stochastic averaging matrix")
    e: Union[float, List[float]] = Field(..., description="Damping factors in (0,1)")
    sigma: Union[float, List[float]] = Field(1.0, description="Noise scales > 0")
    noise: NoiseSection = Field(default_factory=NoiseSection)
    scan: ScanSection = Field(default_factory=ScanSection)
    x0_direction: Optional[List[float]] = Field(None, description="Positive start direction")

    @field_validator("p")
    @classmethod
    def _square(cls, value: List[List[float]]) -> List[List[float]]:
        if any(len(row) != len(value) for row in value):
            raise ValueError("p must be a square matrix")
        return value


@dataclass
class ModelConfig:
    """Domain objects built from a model file."""
    network: Network
    params: ModelParams
    scan: ScanPolicy
    x0_direction: SphereState

    @property
    def d(self) -> int:
        return self.network.d

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ModelConfig':
        try:
            spec = ModelFile.model_validate(data)
        except ValidationError as exc:
            raise ConfigError(f"invalid model file: {exc}") from exc
        if len(spec.p) != spec.d:
            raise ConfigError(f"d={spec.d} but p has {len(spec.p)} rows")

        def per_coord(value: Union[float, List[float]], name: str) -> List[float]:
            if isinstance(value, list):
                if len(value) != spec.d:
                    raise ConfigError(f"{name} has {len(value)} entries, expected {spec.d}")
                return value
            return [value] * spec.d

        network = Network(spec.p)
        params = ModelParams(per_coord(spec.e, "e"), per_coord(spec.sigma, "sigma"),
                             NoiseSpec(spec.noise.kind, spec.noise.params))
        if spec.scan.mode is ScanMode.SEQUENCE:
            if not spec.scan.sequence:
                raise ConfigError("explicit-sequence scan needs a non-empty sequence")
            bad = [i for i in spec.scan.sequence if not 1 <= i <= spec.d]
            if bad:
                raise ConfigError(f"scan sequence entries {bad} outside 1..{spec.d}")
            scan = ScanPolicy.explicit([i - 1 for i in spec.scan.sequence])
        else:
            scan = ScanPolicy(spec.scan.mode)
        scan.validate(spec.d)
        direction = (SphereState.from_positive(spec.x0_direction) if spec.x0_direction
                     else SphereState.uniform(spec.d))
        return cls(network, params, scan, direction)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> 'ModelConfig':
        return cls.from_dict(_read_json(path))

    def to_dict(self) -> Dict[str, Any]:
        data = {"d": self.d, "p": self.network.p.tolist()}
        data.update(self.params.to_dict())
        data["scan"] = self.scan.to_dict()
        data["x0_direction"] = self.x0_direction.to_numpy().tolist()
        return data


def _read_json(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


@dataclass
class ExperimentConfig:
    """Command parameters. ``seed`` has no default on purpose: runs must be reproducible."""
    seed: Optional[int] = None
    model_path: Optional[str] = None
    out_dir: str = "out"
    threads: int = 1
    replicas: int = 10_000
    k_min: int = 0
    k_max: int = 60
    ln_n_list: List[float] = field(default_factory=lambda: list(DEFAULT_LN_N))
    beta_grid: List[float] = field(default_factory=lambda: list(DEFAULT_BETA_GRID))
    n_steps: int = 1_000_000
    burn_in: int = 1000
    samples: int = 100_000
    k_extra: int = 5
    alpha: Optional[float] = None
    random_scan: bool = False
    negative_control: bool = False
    log_level: str = "WARNING"
    metrics_file: Optional[str] = None
    model: Optional[ModelConfig] = field(default=None, repr=False)

    _OVERRIDABLE = (
        "replicas", "k_min", "k_max", "ln_n_list", "beta_grid", "n_steps", "burn_in",
        "samples", "k_extra", "alpha", "seed", "threads",
    )

    @classmethod
    def from_env(cls) -> 'ExperimentConfig':
        return cls(
            out_dir=os.getenv("ARCUTOFF_OUT", "out"),
            threads=int(os.getenv("ARCUTOFF_THREADS", "1")),
            log_level=os.getenv("ARCUTOFF_LOG_LEVEL", "WARNING"),
        )

    @classmethod
    def from_file(cls, config_path: Union[str, Path]) -> 'ExperimentConfig':
        """Load a run file.

        Either a bare model file, or ``{"model": <model or path>, "experiment": {...}}``.
        A relative model path is resolved against the run file's directory.
        """
        config = cls.from_env()
        data = _read_json(config_path)
        config.model_path = str(config_path)
        if "model" in data:
            model = data["model"]
            if isinstance(model, str):
                model_path = Path(config_path).parent / model
                config.model = ModelConfig.from_file(model_path)
            else:
                config.model = ModelConfig.from_dict(model)
            config.apply(data.get("experiment", {}))
        else:
            config.model = ModelConfig.from_dict(data)
        return config

    def apply(self, overrides: Dict[str, Any]) -> 'ExperimentConfig':
        """Set experiment fields from a mapping; unknown keys are an error."""
        for key, value in overrides.items():
            if key not in self._OVERRIDABLE:
                raise ConfigError(f"unknown experiment setting {key!r}")
            setattr(self, key, value)
        return self

    def validate(self) -> None:
        if self.seed is None:
            raise ConfigError("seed required")
        self.seed = check_seed(self.seed)
        if self.model is None:
            raise ConfigError("a model config is required (--config)")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if not 0 <= self.k_min <= self.k_max:
            raise ConfigError(f"need 0 <= k_min <= k_max, got {self.k_min}, {self.k_max}")
        if not self.ln_n_list or any(not v > 0 for v in self.ln_n_list):
            raise ConfigError("ln_n_list must be non-empty with positive entries")
        if any(v > MAX_LN_N for v in self.ln_n_list):
            raise ConfigError(f"ln_n_list entries must be <= {MAX_LN_N:.2f}")
        if self.alpha is not None and self.alpha >= 0:
            raise ConfigError("alpha must be negative")

    def scan(self) -> ScanPolicy:
        return ScanPolicy.random() if self.random_scan else self.model.scan

    def prepare_out_dir(self) -> Path:
        path = Path(self.out_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def to_dict(self) -> Dict[str, Any]:
        data = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "model"}
        data["model"] = self.model.to_dict() if self.model else None
        data["scan"] = self.scan().to_dict() if self.model else None
        return data

    def stream_ids(self, tags: Tuple[Any, ...], replicas: Optional[int] = None) -> List[str]:
        """Identifiers of the first and last replica stream of every tag used."""
        n = self.replicas if replicas is None else replicas
        ids = []
        for tag in tags:
            ids.append(stream_id(self.seed, tag, 0))
            if n > 1:
                ids.append(stream_id(self.seed, tag, n - 1))
        return ids


_config: Optional[ExperimentConfig] = None


def get_config() -> ExperimentConfig:
    """Global experiment configuration (environment defaults until set)."""
    global _config
    if _config is None:
        _config = ExperimentConfig.from_env()
    return _config


def set_config(config: Optional[ExperimentConfig]) -> None:
    global _config
    _config = config
