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
Recover per-part straight-line trajectories from a generated sequence.

Each part of the exploded (t=1) frame is sampled once. A single vector v_i is
fitted so that the cloud displaced by v_i * (1 - t) lies on the surface of
every frame t, by minimizing the summed absolute SDF of the displaced points.
Points that land inside a solid (negative SDF) are masked out of both loss and
gradient at the current iterate, so parts whose assembled pose is embedded in
another part are not pushed away from it.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from logging import Logger
from pathlib import Path
from typing import Optional, Sequence, final
import numpy as np
import numpy.typing as npt
from pydantic import ValidationError
from src.lib.bang_constants import (
    REASSEMBLED_TEMPLATE,
    TRACK_MIN_LR,
    TRACK_MOMENTUM,
    TRACK_PATIENCE,
)
from src.lib.config import TrackConfig
from src.lib.errors import SequenceError
from src.lib.schema import TrajectorySchema, dump_json, parse_trajectory
from src.mesh.components import connected_components
from src.mesh.geometry import FloatArray, Part, PartSet, merge_meshes, translate_mesh
from src.mesh.obj_io import write_obj
from src.mesh.sampling import sample_surface_uniform
from src.mesh.sdf import SdfGrid, build_sdf, query_sdf, query_sdf_value_and_gradient
from src.synth.sequence import ExplodedSequence

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
class ExtractedParts:
    """
    Parts of the t=1 frame. single_part is set when there is nothing to track;
    warnings report parts that could not be separated.
    """

    parts: PartSet
    single_part: bool
    warnings: tuple[str, ...] = field(default=())


@final
@dataclass(frozen=True)
class PartTrack:
    """Optimization record of one part."""

    translation: FloatArray
    objective: float
    iterations: int
    converged: bool
    objective_history: tuple[float, ...]
    masked_history: tuple[float, ...]
    dropped_frames: tuple[int, ...]


@final
@dataclass(frozen=True)
class TrajectorySolution:
    """
    Per-part vectors v_i carrying the t=1 parts back to assembly, in the part
    order of the t=1 decomposition. objective is the sum of the per-part
    objectives; iterations is the largest per-part count.
    """

    translations: FloatArray
    objective: float
    iterations: int
    converged: bool
    part_objectives: tuple[float, ...]
    part_converged: tuple[bool, ...]
    masked_history: tuple[tuple[float, ...], ...]
    mask_overlaps: bool = True
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        vectors = np.array(self.translations, dtype=np.float64).reshape(-1, 3)
        vectors.setflags(write=False)
        object.__setattr__(self, "translations", vectors)
        if len(self.part_objectives) != vectors.shape[0]:
            raise SequenceError("one objective per translation required")

    def __len__(self) -> int:
        return int(self.translations.shape[0])


def extract_exploded_parts(
    seq: ExplodedSequence, weld_eps: Optional[float] = None
) -> ExtractedParts:
    """Connected components of the t=1 frame."""
    parts = connected_components(seq.exploded, weld_eps)
    warnings: list[str] = []
    if len(parts) == 1:
        warnings.append("t=1 frame has a single component; nothing to track")
    elif len(parts) < seq.part_count:
        warnings.append(
            f"only {len(parts)} of {seq.part_count} parts separated at t=1; touching parts merged"
        )
    for message in warnings:
        logger.warning(message)
    return ExtractedParts(parts, len(parts) == 1, tuple(warnings))


def build_frame_grids(
    seq: ExplodedSequence, resolution: int, threads: int = 1
) -> list[SdfGrid]:
    """One union SDF grid per frame, in frame order."""
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(lambda frame: build_sdf(frame, resolution), seq.frames))


def initial_translations(
    seq: ExplodedSequence, parts: PartSet, weld_eps: Optional[float] = None
) -> FloatArray:
    """
    Start vectors: each t=1 part is paired with the nearest unclaimed t=0
    component, preferring components with the same triangle count. Zero when
    the t=0 frame does not split into the same number of components.
    """
    start = np.zeros((len(parts), 3))
    assembled = connected_components(seq.assembled, weld_eps)
    if len(assembled) != len(parts):
        logger.debug(
            "t=0 frame has %d component(s) for %d part(s); starting from zero",
            len(assembled), len(parts),
        )
        return start
    unclaimed = set(range(len(assembled)))
    for i, part in enumerate(parts.parts):
        same = [
            j for j in unclaimed
            if assembled.parts[j].mesh.triangle_count == part.mesh.triangle_count
        ]
        pool = same or sorted(unclaimed)
        dist = [float(np.linalg.norm(assembled.parts[j].centroid - part.centroid)) for j in pool]
        j = pool[int(np.argmin(dist))]
        unclaimed.discard(j)
        start[i] = assembled.parts[j].centroid - part.centroid
    return start


@final
class PartObjective:
    """
    Summed absolute SDF of one part's cloud over all frames.

    For frame t the cloud is displaced by v * (1 - t); each frame contributes
    the sum of |SDF| over unmasked points divided by the cloud size.
    """

    def __init__(
        self,
        points: FloatArray,
        grids: Sequence[SdfGrid],
        times: Sequence[float],
        mask_overlaps: bool,
    ) -> None:
        self.points = points
        self.grids = list(grids)
        self.weights = [1.0 - float(t) for t in times]
        self.mask_overlaps = mask_overlaps
        self.n = float(points.shape[0])

    def _keep(self, values: FloatArray) -> npt.NDArray[np.bool_]:
        if self.mask_overlaps:
            return np.asarray(values >= 0.0)
        return np.ones(values.shape, dtype=bool)

    def masks(self, v: FloatArray) -> list[npt.NDArray[np.bool_]]:
        """Per-frame masks of the points that count at v (True = counted)."""
        return [
            self._keep(query_sdf(grid, self.points + w * v))
            for grid, w in zip(self.grids, self.weights)
        ]

    def value(self, v: FloatArray) -> float:
        """Objective at v."""
        total = 0.0
        for grid, w in zip(self.grids, self.weights):
            values = query_sdf(grid, self.points + w * v)
            total += float(np.abs(values[self._keep(values)]).sum())
        return total / self.n

    def value_and_gradient(
        self, v: FloatArray
    ) -> tuple[float, FloatArray, float, list[int]]:
        """
        Objective, gradient, mean masked fraction and the frames whose points
        are all masked, at v.
        """
        total = 0.0
        grad = np.zeros(3)
        masked = 0.0
        dropped: list[int] = []
        for index, (grid, w) in enumerate(zip(self.grids, self.weights)):
            values, gradients = query_sdf_value_and_gradient(grid, self.points + w * v)
            keep = self._keep(values)
            if not keep.any():
                dropped.append(index)
            masked += 1.0 - float(keep.mean())
            kept = values[keep]
            total += float(np.abs(kept).sum())
            # np.sign gives the 0 subgradient on the surface
            grad += w * (np.sign(kept)[:, None] * gradients[keep]).sum(axis=0)
        return total / self.n, grad / self.n, masked / len(self.grids), dropped


def _line_search(
    objective: PartObjective, v: FloatArray, current: float, direction: FloatArray, lr: float
) -> Optional[tuple[FloatArray, float]]:
    """Halve the step from lr until the objective strictly decreases."""
    step = lr
    while step >= TRACK_MIN_LR:
        candidate = v - step * direction
        value = objective.value(candidate)
        if value < current:
            return candidate, value
        step *= 0.5
    return None


def optimize_part(
    objective: PartObjective, start: FloatArray, cfg: TrackConfig
) -> PartTrack:
    """
    Momentum gradient descent with backtracking on one part.

    Only strictly decreasing steps are accepted, so the final iterate is also
    the best one. Converged when the relative decrease stays below
    convergence_tol for TRACK_PATIENCE iterations, when the objective reaches
    zero, or when no descent step exists along the momentum or gradient.
    """
    v = np.array(start, dtype=np.float64).reshape(3)
    current, grad, masked, dropped = objective.value_and_gradient(v)
    velocity = np.zeros(3)
    history = [current]
    masked_history = [masked]
    converged = False
    stall = 0
    iterations = 0
    for iterations in range(1, cfg.max_iters + 1):
        if current <= 0.0 or not np.any(grad):
            converged = True
            break
        lr = cfg.lr * cfg.lr_decay ** (iterations - 1)
        velocity = TRACK_MOMENTUM * velocity + grad
        found = _line_search(objective, v, current, velocity, lr)
        if found is None:
            velocity = np.zeros(3)
            found = _line_search(objective, v, current, grad, lr)
        if found is None:
            converged = True
            break
        v, value = found
        decrease = (current - value) / max(current, 1e-300)
        stall = stall + 1 if decrease <= cfg.convergence_tol else 0
        current, grad, masked, dropped = objective.value_and_gradient(v)
        history.append(current)
        masked_history.append(masked)
        if stall >= TRACK_PATIENCE:
            converged = True
            break
    return PartTrack(
        translation=v,
        objective=current,
        iterations=iterations,
        converged=converged,
        objective_history=tuple(history),
        masked_history=tuple(masked_history),
        dropped_frames=tuple(dropped),
    )


def part_objective(
    part: Part, index: int, seq: ExplodedSequence, grids: Sequence[SdfGrid], cfg: TrackConfig
) -> PartObjective:
    """Objective of part with its cloud drawn from seed + index."""
    cloud = sample_surface_uniform(part.mesh, cfg.samples_per_part, cfg.seed + index)
    return PartObjective(cloud.points, grids, seq.times, cfg.mask_overlaps)


def track_parts(
    seq: ExplodedSequence,
    grids: Sequence[SdfGrid],
    cfg: TrackConfig,
    parts: Optional[PartSet] = None,
    threads: int = 1,
) -> TrajectorySolution:
    """
    Fit one translation per t=1 part.

    Args:
        seq (ExplodedSequence): the generated sequence.
        grids (Sequence[SdfGrid]): one grid per frame, in frame order.
        cfg (TrackConfig): optimizer settings.
        parts (PartSet, optional): t=1 parts; extracted from seq when omitted.
        threads (int): parts optimized concurrently.

    Raises:
        SequenceError: grid count differs from frame count.
    """
    if len(grids) != len(seq):
        raise SequenceError(f"{len(grids)} grids for {len(seq)} frames")
    warnings: list[str] = []
    if parts is None:
        extracted = extract_exploded_parts(seq, cfg.weld_eps)
        parts = extracted.parts
        warnings.extend(extracted.warnings)
    start = initial_translations(seq, parts, cfg.weld_eps)

    def run(index: int) -> PartTrack:
        objective = part_objective(parts.parts[index], index, seq, grids, cfg)
        return optimize_part(objective, start[index], cfg)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        tracks = list(pool.map(run, range(len(parts))))

    for index, track in enumerate(tracks):
        for frame in track.dropped_frames:
            message = f"part {index}: every point masked at frame {frame}; frame dropped"
            logger.warning(message)
            warnings.append(message)
        if not track.converged:
            message = f"part {index}: not converged after {track.iterations} iterations"
            logger.warning(message)
            warnings.append(message)

    solution = TrajectorySolution(
        translations=np.array([track.translation for track in tracks]),
        objective=float(sum(track.objective for track in tracks)),
        iterations=max(track.iterations for track in tracks),
        converged=all(track.converged for track in tracks),
        part_objectives=tuple(track.objective for track in tracks),
        part_converged=tuple(track.converged for track in tracks),
        masked_history=tuple(track.masked_history for track in tracks),
        mask_overlaps=cfg.mask_overlaps,
        warnings=tuple(warnings),
    )
    logger.info(
        "Tracked %d part(s): objective %.6g, %d iterations, converged=%s",
        len(solution), solution.objective, solution.iterations, solution.converged,
    )
    return solution


def reassemble(
    seq: ExplodedSequence,
    sol: TrajectorySolution,
    t: float,
    parts: Optional[PartSet] = None,
) -> PartSet:
    """Place every t=1 part at its exploded position + v_i * (1 - t)."""
    if not 0.0 <= t <= 1.0:
        raise SequenceError(f"t must lie in [0, 1], got {t}")
    if parts is None:
        parts = extract_exploded_parts(seq).parts
    if len(parts) != len(sol):
        raise SequenceError(f"{len(sol)} translations for {len(parts)} parts")
    placed = []
    for part, v in zip(parts.parts, sol.translations):
        offset = (1.0 - t) * v
        placed.append(
            Part(
                mesh=translate_mesh(part.mesh, offset),
                centroid=part.centroid + offset,
                aabb=part.aabb.translated(offset),
                volume=part.volume,
                triangle_ids=part.triangle_ids,
            )
        )
    source = merge_meshes([part.mesh for part in placed], name=f"reassembled_t{t:g}")
    return PartSet(parts=tuple(placed), source=source)


def trajectory_document(sol: TrajectorySolution) -> TrajectorySchema:
    """trajectory.json content of sol."""
    return {
        "v": [[float(c) for c in row] for row in sol.translations],
        "objective": float(sol.objective),
        "converged": sol.converged,
        "iterations": sol.iterations,
        "mask_overlaps": sol.mask_overlaps,
        "part_objectives": [float(x) for x in sol.part_objectives],
        "part_converged": list(sol.part_converged),
    }


def write_trajectory(sol: TrajectorySolution, path: str | Path) -> None:
    """Write sol as canonical JSON."""
    Path(path).write_text(dump_json(trajectory_document(sol)), encoding="utf-8")


def read_trajectory(path: str | Path) -> TrajectorySolution:
    """
    Read a trajectory.json written by write_trajectory.

    Raises:
        SequenceError: missing, unreadable or malformed file.
    """
    file_path = Path(path)
    try:
        doc = parse_trajectory(json.loads(file_path.read_text(encoding="utf-8")))
    except OSError as e:
        raise SequenceError(f"cannot read trajectory {file_path}: {e}") from e
    except (json.JSONDecodeError, ValidationError) as e:
        raise SequenceError(f"malformed trajectory {file_path}: {e}") from e
    return TrajectorySolution(
        translations=np.asarray(doc["v"], dtype=np.float64).reshape(-1, 3),
        objective=doc["objective"],
        iterations=doc["iterations"],
        converged=doc["converged"],
        part_objectives=tuple(doc["part_objectives"]),
        part_converged=tuple(doc["part_converged"]),
        masked_history=tuple(() for _ in doc["v"]),
        mask_overlaps=doc["mask_overlaps"],
    )


def export_reassembly(
    seq: ExplodedSequence,
    sol: TrajectorySolution,
    directory: str | Path,
    parts: Optional[PartSet] = None,
) -> list[Path]:
    """Write reassembled_<index>.obj for every sequence time."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    if parts is None:
        parts = extract_exploded_parts(seq).parts
    paths = []
    for index, t in enumerate(seq.times):
        placed = reassemble(seq, sol, t, parts)
        path = out / REASSEMBLED_TEMPLATE.format(index=index)
        write_obj(placed.source, path)
        paths.append(path)
    logger.debug("Wrote %d reassembled frame(s) to %s", len(paths), out)
    return paths
