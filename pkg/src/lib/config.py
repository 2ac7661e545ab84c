#
# MIT License
#
# (C) Copyright 2026 Hewlett Packard Enterprise Development LP
#
# Permission is hereby granted, free of charge, to any person obtaining a
# copy of this software and associated documentation files (the "Software"),
# to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense,
# and/or sell copies of the Software, and to permit persons to whom the
# Software is furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included
# in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR
# OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE,
# ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR
# OTHER DEALINGS IN THE SOFTWARE.
#
"""
Pipeline configuration.

All settings live in one YAML (or JSON) file validated by the pydantic models
below; unknown keys are rejected. Command-line flags are applied on top of the
file with apply_overrides, so flags win. The models are frozen and are passed
directly to the numeric code.
"""

import logging
from logging import Logger
from pathlib import Path
from typing import Annotated, Any, Literal, Mapping, Optional
import yaml
from annotated_types import Ge, Gt, Le, Lt
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from typing_extensions import Self
from src.lib import bang_constants as const
from src.lib.errors import ConfigError

logger = logging.getLogger(__name__)

PositiveFloat = Annotated[float, Gt(0)]
PositiveInt = Annotated[int, Ge(1)]


def set_logger(custom_logger: Logger) -> None:
    """
    Sets a custom logger to be used globally within the module.
    Args:
        custom_logger (logging.Logger): A configured logger instance to override the default python logger.
    """
    global logger
    logger = custom_logger


# pydantic BaseModel contains an explicit Any, which mypy dislikes
class FilterRules(BaseModel):  # type: ignore[explicit-any]
    """
    Rule-based asset filter bounds.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    min_parts: PositiveInt = const.DEFAULT_MIN_PARTS
    max_parts: PositiveInt = const.DEFAULT_MAX_PARTS
    min_vertices: Annotated[int, Ge(0)] = const.DEFAULT_MIN_VERTICES
    max_vertices: PositiveInt = const.DEFAULT_MAX_VERTICES

    @model_validator(mode="after")
    def _check_bounds(self) -> Self:
        if self.min_parts > self.max_parts:
            raise ValueError("min_parts must not exceed max_parts")
        if self.min_vertices >= self.max_vertices:
            raise ValueError("min_vertices must be below max_vertices")
        return self


# pydantic BaseModel contains an explicit Any, which mypy dislikes
class ExplosionConfig(BaseModel):  # type: ignore[explicit-any]
    """
    Explosion-vector optimizer settings.
    overlap_threshold is a fraction of the scene box volume; max_translation a
    multiple of the scene box diagonal.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    overlap_threshold: Annotated[float, Gt(0), Lt(1)] = const.DEFAULT_OVERLAP_THRESHOLD
    max_translation: PositiveFloat = const.DEFAULT_MAX_TRANSLATION
    step_size: PositiveFloat = const.DEFAULT_EXPLOSION_STEP
    max_iters: PositiveInt = const.DEFAULT_EXPLOSION_ITERS
    reg_weight: PositiveFloat = const.DEFAULT_REG_WEIGHT
    seed: int = 0


# pydantic BaseModel contains an explicit Any, which mypy dislikes
class TrackConfig(BaseModel):  # type: ignore[explicit-any]
    """
    Trajectory tracking settings.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    samples_per_part: Annotated[int, Ge(const.MIN_SAMPLES_PER_PART)] = const.DEFAULT_SAMPLES_PER_PART
    lr: PositiveFloat = const.DEFAULT_TRACK_LR
    lr_decay: Annotated[float, Gt(0), Le(1)] = const.DEFAULT_TRACK_LR_DECAY
    max_iters: PositiveInt = const.DEFAULT_TRACK_ITERS
    convergence_tol: PositiveFloat = const.DEFAULT_CONVERGENCE_TOL
    mask_overlaps: bool = True
    seed: int = 0
    weld_eps: Optional[Annotated[float, Ge(0)]] = None


# pydantic BaseModel contains an explicit Any, which mypy dislikes
class ToyDims(BaseModel):  # type: ignore[explicit-any]
    """
    Toy-scale network dimensions.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    latent_tokens: PositiveInt = const.TOY_LATENT_TOKENS
    channels: PositiveInt = const.TOY_CHANNELS
    heads: PositiveInt = const.TOY_HEADS
    dit_layers: PositiveInt = const.TOY_DIT_LAYERS
    adapter_layers: PositiveInt = const.TOY_ADAPTER_LAYERS
    prompt_layers: PositiveInt = const.TOY_PROMPT_LAYERS
    time_mode: Literal["additive", "rotary"] = "additive"

    @model_validator(mode="after")
    def _check_heads(self) -> Self:
        if self.channels % self.heads:
            raise ValueError(f"channels {self.channels} not divisible by heads {self.heads}")
        if self.time_mode == "rotary" and (self.channels // self.heads) % 2:
            raise ValueError("rotary time embedding needs an even head width")
        return self

    @property
    def mode(self) -> const.TimeMode:
        """time_mode as the TimeMode enum."""
        return const.TimeMode[self.time_mode.upper()]


# pydantic BaseModel contains an explicit Any, which mypy dislikes
class AnnotationConfig(BaseModel):  # type: ignore[explicit-any]
    """
    Annotation client selection. The remote client needs an endpoint.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    client: Literal["default", "remote", "none"] = "default"
    endpoint: Optional[str] = None
    timeout: PositiveInt = const.DEFAULT_ANNOTATION_TIMEOUT

    @model_validator(mode="after")
    def _check_endpoint(self) -> Self:
        if self.client == "remote" and not self.endpoint:
            raise ValueError("the remote annotation client needs an endpoint")
        return self


# pydantic BaseModel contains an explicit Any, which mypy dislikes
class PipelineConfig(BaseModel):  # type: ignore[explicit-any]
    """
    Every setting of a bangkit run.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    filter: FilterRules = Field(default_factory=FilterRules)
    explosion: ExplosionConfig = Field(default_factory=ExplosionConfig)
    track: TrackConfig = Field(default_factory=TrackConfig)
    toy: ToyDims = Field(default_factory=ToyDims)
    annotation: AnnotationConfig = Field(default_factory=AnnotationConfig)
    seed: int = 0
    out: str = "out"
    sdf_resolution: Annotated[
        int, Ge(const.MIN_SDF_RESOLUTION), Le(const.MAX_SDF_RESOLUTION)
    ] = const.DEFAULT_SDF_RESOLUTION
    threads: PositiveInt = 1
    times: list[float] = Field(default_factory=lambda: list(const.DEFAULT_TIMES))
    min_gap: Annotated[float, Ge(0)] = const.DEFAULT_MIN_GAP
    max_expansion: PositiveFloat = const.DEFAULT_MAX_EXPANSION

    @model_validator(mode="after")
    def _check_values(self) -> Self:
        times = self.times
        if len(times) < 2 or times[0] != 0.0 or times[-1] != 1.0:
            raise ValueError("times must start at 0 and end at 1")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("times must be strictly ascending")
        return self


def _format_errors(e: ValidationError) -> str:
    """One line per validation error: dotted location and message."""
    return "; ".join(
        f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in e.errors()
    )


def load_config(path: Optional[str | Path] = None) -> PipelineConfig:
    """
    Load and validate a configuration file. With no path, return the defaults.

    Raises:
        ConfigError: unreadable file, YAML syntax error, unknown key or invalid value.
    """
    if path is None:
        return PipelineConfig()
    file_path = Path(path)
    try:
        raw = yaml.safe_load(file_path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read config {file_path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {file_path}: {e}") from e
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{file_path}: top level must be a mapping")
    try:
        config = PipelineConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"{file_path}: {_format_errors(e)}") from e
    logger.debug("Loaded configuration from %s", file_path)
    return config


def apply_overrides(config: PipelineConfig, overrides: Mapping[str, Any]) -> PipelineConfig:
    """
    Return config with dotted-key overrides applied ("track.mask_overlaps": False).
    None values are skipped so unset flags leave the file value in place.

    Raises:
        ConfigError: unknown key or invalid value.
    """
    data: dict[str, Any] = config.model_dump()
    for key, value in overrides.items():
        if value is None:
            continue
        *parents, leaf = key.split(".")
        node = data
        for parent in parents:
            child = node.get(parent)
            if not isinstance(child, dict):
                raise ConfigError(f"unknown configuration section {parent!r} in {key!r}")
            node = child
        node[leaf] = value
    try:
        return PipelineConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(_format_errors(e)) from e
