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
Tracking studies over synthetic assemblies: how the number of frames affects
tracking quality and cost, and what overlapped-point masking contributes.
"""

import logging
import time
from dataclasses import dataclass
from logging import Logger
from typing import Sequence, final
import numpy as np
from src.lib.bang_logging import get_log_id
from src.lib.config import PipelineConfig
from src.lib.errors import BangError
from src.lib.schema import AblationRowSchema, FrameStudyRowSchema
from src.mesh.components import connected_components
from src.mesh.geometry import TriangleMesh
from src.synth.explosion import optimize_explosion
from src.synth.pipeline import make_synthetic_assembly
from src.synth.sequence import ExplodedSequence, interpolate_sequence, normalize_sequence
from src.evaluation.metrics import EvalReport, evaluate_tracking
from src.track.tracking import build_frame_grids, extract_exploded_parts, track_parts

logger = logging.getLogger(__name__)


def set_logger(custom_logger: Logger) -> None:
    """
    Sets a custom logger to be used globally within the module.
    Args:
        custom_logger (logging.Logger): A configured logger instance to override the default python logger.
    """
    global logger
    logger = custom_logger


@final
@dataclass(frozen=True)
class FrameStudyRow:
    """Means over assets for one frame count."""

    frames: int
    mean_wiou: float
    mean_sdf_objective: float
    mean_seconds: float

    def to_document(self) -> FrameStudyRowSchema:
        """JSON row."""
        return {
            "frames": self.frames,
            "mean_wiou": self.mean_wiou,
            "mean_sdf_objective": self.mean_sdf_objective,
            "mean_seconds": self.mean_seconds,
        }


@final
@dataclass(frozen=True)
class AblationRow:
    """Metrics of one asset tracked with and without overlap masking."""

    asset_id: str
    masked: EvalReport
    unmasked: EvalReport

    def to_document(self) -> AblationRowSchema:
        """JSON row."""
        return {
            "asset_id": self.asset_id,
            "masked_wiou": self.masked.wiou,
            "unmasked_wiou": self.unmasked.wiou,
            "masked_sdf_objective": self.masked.sdf_objective,
            "unmasked_sdf_objective": self.unmasked.sdf_objective,
        }


def study_assets(count: int, seed: int, overlap: bool = False) -> list[TriangleMesh]:
    """count synthetic assemblies of 2 or 3 parts drawn from consecutive seeds."""
    return [
        make_synthetic_assembly(seed + k, 2 + (seed + k) % 2, overlap=overlap)
        for k in range(count)
    ]


def uniform_times(frames: int) -> tuple[float, ...]:
    """frames uniformly spaced times from 0 to 1."""
    if frames < 2:
        raise BangError(f"a sequence needs at least 2 frames, got {frames}")
    times = np.linspace(0.0, 1.0, frames)
    times[-1] = 1.0
    return tuple(float(t) for t in times)


def exploded_sequence(
    mesh: TriangleMesh, times: Sequence[float], cfg: PipelineConfig
) -> ExplodedSequence:
    """Explode mesh and interpolate it at times, skipping the filter and rejection."""
    parts = connected_components(mesh)
    explosion = optimize_explosion(parts, cfg.explosion)
    seq, _ = normalize_sequence(interpolate_sequence(parts, explosion.translations, times))
    return seq


def track_and_evaluate(
    seq: ExplodedSequence, cfg: PipelineConfig, asset_id: str, mask_overlaps: bool
) -> EvalReport:
    """Build grids, track and evaluate one sequence; seconds covers grids and tracking."""
    track_cfg = cfg.track.model_copy(update={"mask_overlaps": mask_overlaps})
    parts = extract_exploded_parts(seq, track_cfg.weld_eps).parts
    start = time.perf_counter()
    grids = build_frame_grids(seq, cfg.sdf_resolution, cfg.threads)
    sol = track_parts(seq, grids, track_cfg, parts=parts, threads=cfg.threads)
    seconds = time.perf_counter() - start
    return evaluate_tracking(
        seq, sol, grid=grids[0], parts=parts, asset_id=asset_id, seconds=seconds, seed=cfg.seed
    )


def frame_count_study(
    assets: Sequence[TriangleMesh], frame_counts: Sequence[int], cfg: PipelineConfig
) -> list[FrameStudyRow]:
    """
    Track every asset with uniformly spaced frames for each frame count and
    average wIoU, SDF objective and wall-clock seconds. One row per frame count.
    """
    counts = list(frame_counts)
    for frames in counts:
        uniform_times(frames)
    reports: dict[int, list[EvalReport]] = {frames: [] for frames in counts}
    for index, mesh in enumerate(assets):
        log_id = get_log_id()
        parts = connected_components(mesh)
        explosion = optimize_explosion(parts, cfg.explosion)
        for frames in counts:
            seq, _ = normalize_sequence(
                interpolate_sequence(parts, explosion.translations, uniform_times(frames))
            )
            report = track_and_evaluate(seq, cfg, mesh.name, cfg.track.mask_overlaps)
            logger.info(
                "[%s] asset %d, %d frames: wIoU %.4f in %.2fs",
                log_id, index, frames, report.wiou, report.seconds,
            )
            reports[frames].append(report)
    return [
        FrameStudyRow(
            frames=frames,
            mean_wiou=float(np.mean([r.wiou for r in reports[frames]])),
            mean_sdf_objective=float(np.mean([r.sdf_objective for r in reports[frames]])),
            mean_seconds=float(np.mean([r.seconds for r in reports[frames]])),
        )
        for frames in counts
    ]


def masking_ablation(assets: Sequence[TriangleMesh], cfg: PipelineConfig) -> list[AblationRow]:
    """Track each asset at cfg.times with and without overlapped-point masking."""
    rows = []
    for mesh in assets:
        seq = exploded_sequence(mesh, cfg.times, cfg)
        masked = track_and_evaluate(seq, cfg, mesh.name, True)
        unmasked = track_and_evaluate(seq, cfg, mesh.name, False)
        logger.info(
            "%s: wIoU masked %.4f / unmasked %.4f", mesh.name, masked.wiou, unmasked.wiou
        )
        rows.append(AblationRow(mesh.name, masked, unmasked))
    return rows
