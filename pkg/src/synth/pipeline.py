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
Per-asset synthesis pipeline and synthetic test assemblies.

synthesize_asset runs filter -> components -> annotate -> explode ->
interpolate -> normalize -> reject -> manifest for one mesh.
"""

import logging
from dataclasses import dataclass, field
from logging import Logger
from typing import Optional, final
import numpy as np
from src.lib.bang_logging import get_log_id
from src.lib.config import PipelineConfig
from src.lib.errors import InvalidMeshError
from src.lib.schema import ManifestSchema
from src.mesh.components import connected_components
from src.mesh.geometry import FloatArray, TriangleMesh, make_icosphere, merge_meshes
from src.synth.annotation import AnnotationClient, annotate_asset
from src.synth.explosion import optimize_explosion
from src.synth.filtering import filter_asset
from src.synth.manifest import build_manifest
from src.synth.sequence import (
    ExplodedSequence,
    interpolate_sequence,
    normalize_sequence,
    reject_sequence,
)

logger = logging.getLogger(__name__)

# placement attempts per part before giving up
MAX_PLACEMENT_TRIES: int = 2000


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
class SynthResult:
    """
    Outcome of one asset. sequence and manifest are set whenever the asset got
    past the filter; accepted is False for filtered or rejected assets.
    """

    asset_id: str
    accepted: bool
    stage: str
    reasons: tuple[str, ...] = field(default=())
    sequence: Optional[ExplodedSequence] = None
    manifest: Optional[ManifestSchema] = None
    warnings: tuple[str, ...] = field(default=())


def synthesize_asset(
    mesh: TriangleMesh,
    asset_id: str,
    cfg: PipelineConfig,
    client: Optional[AnnotationClient] = None,
) -> SynthResult:
    """Run the full synthesis pipeline on one assembled mesh."""
    log_id = get_log_id()
    logger.info("[%s] Synthesizing %s", log_id, asset_id)
    parts = connected_components(mesh)
    decision = filter_asset(mesh, cfg.filter, parts)
    if not decision.accepted:
        logger.info("[%s] %s filtered out: %s", log_id, asset_id, "; ".join(decision.reasons))
        return SynthResult(asset_id, False, "filter", decision.reasons)

    outcome = annotate_asset(mesh, client)
    warnings = [outcome.warning] if outcome.warning else []

    explosion = optimize_explosion(parts, cfg.explosion)
    seq = interpolate_sequence(parts, explosion.translations, cfg.times)
    seq, transform = normalize_sequence(seq)
    rejection = reject_sequence(seq, cfg.min_gap, cfg.max_expansion)
    manifest = build_manifest(
        asset_id,
        seq,
        transform,
        converged=explosion.converged,
        reasons=rejection.reasons,
        expansion_ratio=rejection.expansion_ratio,
        annotation=outcome.annotation,
        seed=cfg.explosion.seed,
    )
    if rejection.accepted:
        logger.info(
            "[%s] %s accepted: %d parts, expansion %.3f, %d iterations",
            log_id, asset_id, len(parts), rejection.expansion_ratio, explosion.iterations,
        )
    else:
        logger.info("[%s] %s rejected: %s", log_id, asset_id, "; ".join(rejection.reasons))
    return SynthResult(
        asset_id=asset_id,
        accepted=rejection.accepted,
        stage="reject",
        reasons=rejection.reasons,
        sequence=seq,
        manifest=manifest,
        warnings=tuple(warnings),
    )


def _random_direction(rng: np.random.Generator) -> FloatArray:
    u = rng.standard_normal(3)
    return np.asarray(u / np.linalg.norm(u), dtype=np.float64)


def make_synthetic_assembly(
    seed: int, part_count: int, overlap: bool = False, subdivisions: int = 2
) -> TriangleMesh:
    """
    Random assembly of spheres of radius 0.25..0.45.

    Without overlap, every new sphere is placed next to an earlier one so the
    surfaces stay apart but the boxes intersect on all three axes, which gives
    the explosion optimizer something to separate. With overlap, every new
    sphere penetrates an earlier one.
    """
    if part_count < 1:
        raise InvalidMeshError("part_count must be at least 1")
    rng = np.random.default_rng(seed)
    centers: list[FloatArray] = []
    radii: list[float] = []
    for k in range(part_count):
        r = float(rng.uniform(0.25, 0.45))
        if k == 0:
            centers.append(np.zeros(3))
            radii.append(r)
            continue
        for _ in range(MAX_PLACEMENT_TRIES):
            j = int(rng.integers(k))
            u = _random_direction(rng)
            reach = r + radii[j]
            if overlap:
                dist = float(rng.uniform(0.55, 0.85)) * reach
            else:
                dist = reach + float(rng.uniform(0.02, 0.08))
                if np.abs(u).max() * dist >= 0.95 * reach:
                    continue
            c = centers[j] + dist * u
            others = [
                np.linalg.norm(c - centers[m]) - (r + radii[m]) for m in range(k) if m != j
            ]
            if not overlap and others and min(others) < 0.02:
                continue
            if overlap and others and min(others) < -0.5 * r:
                continue
            centers.append(c)
            radii.append(r)
            break
        else:
            raise InvalidMeshError(f"could not place part {k} of synthetic assembly {seed}")
    meshes = [
        make_icosphere(radius, subdivisions, center, name=f"sphere{k}")
        for k, (radius, center) in enumerate(zip(radii, centers))
    ]
    return merge_meshes(meshes, name=f"synthetic_{seed}")
