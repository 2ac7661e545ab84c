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
This module defines the TypedDict schemas for every JSON document bangkit reads
or writes: sequence manifests, trajectories, evaluation and statistics reports,
toy-model check reports and synthesis summaries. Manifests read back from disk
are validated with pydantic before use.
"""

import json
from pathlib import Path
from typing import Annotated, Literal, Mapping, Optional, final
from typing_extensions import TypedDict
from annotated_types import Ge, Gt, Len
from pydantic import AfterValidator, BaseModel, ConfigDict

Vector3 = Annotated[list[float], Len(min_length=3, max_length=3)]
DensityClass = Literal["low", "medium", "high"]


# Manifest Schemas
################################################


@final
class TransformSchema(TypedDict):
    """
    Normalization transform p -> (p + center) * scale applied to every frame.
    """

    center: Vector3
    scale: Annotated[float, Gt(0)]


@final
class FlagsSchema(TypedDict):
    """
    Optimizer and rejection flags of one asset.
    """

    converged: bool
    rejected: bool
    reasons: list[str]


@final
class SymmetrySchema(TypedDict):
    """
    Reflection symmetry about the planes through the box center.
    """

    x: bool
    y: bool
    z: bool


@final
class AnnotationSchema(TypedDict):
    """
    Geometric attributes produced by an annotation client.
    """

    symmetry: SymmetrySchema
    density_class: DensityClass
    complexity: Annotated[float, Ge(0)]


@final
class ManifestSchema(TypedDict):
    """
    Schema for manifest.json written next to the frames of a sequence.
    translations are in normalized scene units and point assembled -> exploded.
    """

    asset_id: str
    times: list[float]
    translations: list[Vector3]
    transform: TransformSchema
    flags: FlagsSchema
    expansion_ratio: float
    part_count: Annotated[int, Ge(1)]
    annotation: Optional[AnnotationSchema]
    seed: int


def _check_manifest(value: ManifestSchema) -> ManifestSchema:
    """
    Helper function for the manifest validator.
    Raise ValueError when the times or translations break the sequence invariants.
    """
    times = value["times"]
    if len(times) < 2 or times[0] != 0.0 or times[-1] != 1.0:
        raise ValueError("times must start at 0 and end at 1")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be strictly ascending")
    if len(value["translations"]) != value["part_count"]:
        raise ValueError(
            f"{len(value['translations'])} translations for {value['part_count']} parts"
        )
    return value


# pydantic BaseModel contains an explicit Any, which mypy dislikes
class ValidateManifest(BaseModel):  # type: ignore[explicit-any]
    """
    Pydantic validator used for validating manifests read from disk
    """

    model_config = ConfigDict(extra="forbid")

    manifest: Annotated[ManifestSchema, AfterValidator(_check_manifest)]


# Trajectory Schemas
################################################


@final
class TrajectorySchema(TypedDict):
    """
    Schema for trajectory.json: per-part vectors carrying the t=1 parts back to assembly.
    """

    v: list[Vector3]
    objective: float
    converged: bool
    iterations: int
    mask_overlaps: bool
    part_objectives: list[float]
    part_converged: list[bool]


def _check_trajectory(value: TrajectorySchema) -> TrajectorySchema:
    """
    Helper function for the trajectory validator.
    Per-part lists must agree in length with the translation list.
    """
    count = len(value["v"])
    if len(value["part_objectives"]) != count or len(value["part_converged"]) != count:
        raise ValueError("per-part lists differ in length from v")
    if value["objective"] < 0.0:
        raise ValueError("objective must be non-negative")
    return value


# pydantic BaseModel contains an explicit Any, which mypy dislikes
class ValidateTrajectory(BaseModel):  # type: ignore[explicit-any]
    """
    Pydantic validator used for validating trajectory.json read from disk
    """

    model_config = ConfigDict(extra="forbid")

    trajectory: Annotated[TrajectorySchema, AfterValidator(_check_trajectory)]


# Report Schemas
################################################


@final
class EvalReportSchema(TypedDict):
    """
    Schema for the eval subcommand report.
    """

    asset_id: str
    wiou: float
    sdf_objective: float
    per_part_iou: list[float]
    matching: list[int]
    frame_count: int


@final
class HistogramSchema(TypedDict):
    """
    Uniform histogram: len(edges) == len(counts) + 1.
    """

    edges: list[float]
    counts: list[int]


@final
class StatsReportSchema(TypedDict):
    """
    Schema for the stats subcommand report.
    """

    asset_count: int
    part_count: HistogramSchema
    expansion_ratio: HistogramSchema
    log_volume_ratio: HistogramSchema
    log_overlap_volume: HistogramSchema


@final
class FrameStudyRowSchema(TypedDict):
    """
    One row of the frame-count study table.
    """

    frames: int
    mean_wiou: float
    mean_sdf_objective: float
    mean_seconds: float


@final
class AblationRowSchema(TypedDict):
    """
    Metric pair of one asset tracked with and without overlap masking.
    """

    asset_id: str
    masked_wiou: float
    unmasked_wiou: float
    masked_sdf_objective: float
    unmasked_sdf_objective: float


@final
class ToyCheckItemSchema(TypedDict):
    """
    Outcome of one toy-model invariant check.
    """

    name: str
    passed: bool
    error: float
    tolerance: float
    seconds: float


@final
class ToyCheckReportSchema(TypedDict):
    """
    Schema for the toycheck subcommand report.
    """

    passed: bool
    seed: int
    seconds: float
    checks: list[ToyCheckItemSchema]


@final
class AssetRecordSchema(TypedDict):
    """
    Per-asset line of the synthesis summary; rejected assets carry the reasons.
    """

    asset_id: str
    status: Literal["accepted", "rejected", "failed"]
    reasons: list[str]


@final
class SynthSummarySchema(TypedDict):
    """
    Schema for summary.json written by the synth subcommand.
    """

    accepted: int
    rejected: int
    failed: int
    assets: list[AssetRecordSchema]


def dump_json(document: Mapping[str, object]) -> str:
    """
    Canonical JSON text: sorted keys, two-space indent and a trailing newline,
    so write -> read -> write is byte-identical.
    """
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def write_json(document: Mapping[str, object], path: str | Path) -> None:
    """Write document as canonical JSON."""
    Path(path).write_text(dump_json(document), encoding="utf-8")


def parse_manifest(data: object) -> ManifestSchema:
    """
    Validate a decoded manifest document.

    Raises:
        pydantic.ValidationError: the document does not match ManifestSchema.
    """
    return ValidateManifest.model_validate({"manifest": data}).manifest


def parse_trajectory(data: object) -> TrajectorySchema:
    """
    Validate a decoded trajectory document.

    Raises:
        pydantic.ValidationError: the document does not match TrajectorySchema.
    """
    return ValidateTrajectory.model_validate({"trajectory": data}).trajectory
