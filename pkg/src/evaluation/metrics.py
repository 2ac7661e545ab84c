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
Tracking quality metrics: volume-weighted box IoU and the SDF objective.

Predicted parts are matched to ground-truth boxes with a Hungarian assignment
maximizing total IoU before the weighted IoU is taken, since the part order of
a generated sequence is arbitrary.
"""

import logging
from dataclasses import dataclass, field
from logging import Logger
from typing import Optional, Sequence, final
import numpy as np
import numpy.typing as npt
from scipy.optimize import linear_sum_assignment
from scipy.spatial import cKDTree
from src.lib.errors import MetricError
from src.lib.schema import EvalReportSchema
from src.mesh.geometry import AABB, FloatArray, IntArray, PartSet, TriangleMesh
from src.mesh.sampling import sample_surface_uniform
from src.mesh.sdf import SdfGrid, build_sdf, query_sdf, union_surface_triangles
from src.synth.sequence import ExplodedSequence, frame_expansion_ratio
from src.track.tracking import TrajectorySolution, extract_exploded_parts, reassemble

logger = logging.getLogger(__name__)

# surface samples per part for the SDF objective
EVAL_SAMPLES_PER_PART: int = 1024


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
class EvalReport:
    """Metrics of one tracked sequence. matching[i] is the GT index of prediction i."""

    asset_id: str
    wiou: float
    sdf_objective: float
    per_part_iou: tuple[float, ...]
    matching: tuple[int, ...]
    seconds: float
    frame_count: int
    warnings: tuple[str, ...] = field(default=())

    def to_document(self) -> EvalReportSchema:
        """JSON report content; wall-clock seconds stay out so reruns write identical bytes."""
        return {
            "asset_id": self.asset_id,
            "wiou": float(self.wiou),
            "sdf_objective": float(self.sdf_objective),
            "per_part_iou": [float(x) for x in self.per_part_iou],
            "matching": list(self.matching),
            "frame_count": self.frame_count,
        }


def box_iou(a: AABB, b: AABB) -> float:
    """Intersection-over-union of two boxes."""
    return a.iou(b)


def iou_matrix(pred: Sequence[AABB], gt: Sequence[AABB]) -> FloatArray:
    """(len(pred), len(gt)) pairwise IoU."""
    return np.array([[box_iou(p, g) for g in gt] for p in pred], dtype=np.float64).reshape(
        len(pred), len(gt)
    )


def hungarian_match(pred: Sequence[AABB], gt: Sequence[AABB]) -> IntArray:
    """
    GT index assigned to each predicted box, maximizing the summed IoU.
    Predictions left without a partner (more predictions than GT boxes) get -1.
    """
    matching = np.full(len(pred), -1, dtype=np.int64)
    if not pred or not gt:
        return matching
    rows, cols = linear_sum_assignment(iou_matrix(pred, gt), maximize=True)
    matching[rows] = cols
    return matching


def weighted_iou(pred: Sequence[tuple[AABB, float]], gt: Sequence[AABB]) -> float:
    """
    sum_i V_i IoU(B_i, B_i^gt) / sum_i V_i, pairs matched by index.

    Volumes are convex-hull volumes, so a flat part arrives with V_i = 0 and
    counts with zero weight; at least one volume must be positive.

    Raises:
        MetricError: length mismatch, negative volume or zero total volume.
    """
    if len(pred) != len(gt):
        raise MetricError(f"{len(pred)} predicted boxes for {len(gt)} ground-truth boxes")
    volumes = np.array([volume for _, volume in pred], dtype=np.float64)
    if np.any(volumes < 0.0):
        raise MetricError("part volumes must be non-negative")
    total = float(volumes.sum())
    if total <= 0.0:
        raise MetricError("total part volume is zero")
    ious = np.array([box_iou(box, ref) for (box, _), ref in zip(pred, gt)], dtype=np.float64)
    return float(np.clip((volumes * ious).sum() / total, 0.0, 1.0))


def sdf_objective(grid: SdfGrid, points: npt.ArrayLike) -> float:
    """
    Mean |SDF| of points.

    Raises:
        MetricError: empty point set.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if pts.shape[0] == 0:
        raise MetricError("sdf_objective needs at least one point")
    return float(np.abs(query_sdf(grid, pts)).mean())


def expansion_ratio(seq: ExplodedSequence) -> float:
    """Largest box dimension at t=1 over that at t=0."""
    return frame_expansion_ratio(seq.assembled, seq.exploded)


def ground_truth_vectors(
    seq: ExplodedSequence, parts: PartSet, gt_translations: npt.ArrayLike
) -> FloatArray:
    """
    Ground-truth exploded -> assembled vector of every t=1 part.

    Part j is assigned the synthesized translation u_i whose reversal lands its
    vertices closest to the t=0 frame (mean nearest-vertex distance), with a
    Hungarian assignment over all pairs. The vector is -u_i.
    """
    u = np.asarray(gt_translations, dtype=np.float64).reshape(-1, 3)
    tree = cKDTree(seq.assembled.vertices)
    cost = np.empty((len(parts), u.shape[0]))
    for j, part in enumerate(parts.parts):
        for i in range(u.shape[0]):
            dist, _ = tree.query(part.mesh.vertices - u[i])
            cost[j, i] = float(np.mean(dist))
    rows, cols = linear_sum_assignment(cost)
    vectors = np.zeros((len(parts), 3))
    vectors[rows] = -u[cols]
    return vectors


def fitted_surface(seq: ExplodedSequence, sol: TrajectorySolution, parts: PartSet) -> TriangleMesh:
    """
    Outer surface of the reassembled shape: the tracked parts at t=0 without
    the triangles buried inside another part.
    """
    placed = reassemble(seq, sol, 0.0, parts).source
    keep = union_surface_triangles(placed)
    return TriangleMesh(placed.vertices, placed.triangles[keep], name=placed.name)


def evaluate_tracking(
    seq: ExplodedSequence,
    sol: TrajectorySolution,
    gt_translations: Optional[npt.ArrayLike] = None,
    grid: Optional[SdfGrid] = None,
    *,
    parts: Optional[PartSet] = None,
    asset_id: str = "",
    seconds: float = 0.0,
    resolution: int = 64,
    samples: int = EVAL_SAMPLES_PER_PART,
    seed: int = 0,
) -> EvalReport:
    """
    Compare tracked translations against the ground truth.

    Predicted boxes are the t=1 part boxes moved by the tracked vectors, GT
    boxes the same boxes moved by the ground-truth vectors. The SDF objective
    is taken on samples of the reassembled shape's outer surface against the
    assembled frame, samples per part times the part count in total.

    Raises:
        MetricError: no ground-truth translations, or part count mismatch.
    """
    if gt_translations is None:
        gt_translations = seq.translations
    if gt_translations is None:
        raise MetricError("sequence carries no ground-truth translations")
    if parts is None:
        parts = extract_exploded_parts(seq).parts
    if len(parts) != len(sol):
        raise MetricError(f"{len(sol)} tracked vectors for {len(parts)} parts")
    if grid is None:
        grid = build_sdf(seq.assembled, resolution)

    gt_vectors = ground_truth_vectors(seq, parts, gt_translations)
    pred_boxes = [part.aabb.translated(v) for part, v in zip(parts.parts, sol.translations)]
    gt_boxes = [part.aabb.translated(v) for part, v in zip(parts.parts, gt_vectors)]
    matching = hungarian_match(pred_boxes, gt_boxes)
    matched_gt = [gt_boxes[int(k)] for k in matching]
    wiou = weighted_iou(
        [(box, part.volume) for box, part in zip(pred_boxes, parts.parts)], matched_gt
    )
    per_part = tuple(box_iou(p, g) for p, g in zip(pred_boxes, matched_gt))

    points = sample_surface_uniform(fitted_surface(seq, sol, parts), samples * len(parts), seed).points
    objective = sdf_objective(grid, points)
    logger.info("%s: wIoU %.4f, SDF objective %.6g", asset_id or "asset", wiou, objective)
    return EvalReport(
        asset_id=asset_id,
        wiou=wiou,
        sdf_objective=objective,
        per_part_iou=per_part,
        matching=tuple(int(k) for k in matching),
        seconds=seconds,
        frame_count=len(seq),
        warnings=sol.warnings,
    )
