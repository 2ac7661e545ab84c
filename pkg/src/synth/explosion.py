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
Explosion-vector optimization.

Parts are pushed apart by gradient descent on a smooth surrogate of the total
pairwise box-overlap volume plus a quadratic penalty on the translations:

    S(v) = sum_{i<j} prod_k softplus(s * o_ijk) / s + reg * sum_i |v_i|^2
    o_ijk = (w_ik + w_jk) / 2 - |c_ik + v_ik - c_jk - v_jk|

with w the box widths, c the box centers and s the softplus sharpness. Work is
done in units of the scene box diagonal. A step is accepted when it lowers the
exact overlap volume, or lowers S without raising that volume, so the recorded
overlap history is non-increasing. After every step the volume-weighted drift
is removed and the translations are rescaled to respect max_translation.
"""

import logging
from dataclasses import dataclass
from logging import Logger
from typing import Sequence, final
import numpy as np
from scipy.special import expit
from src.lib.bang_constants import INITIAL_RADIAL_SCALE, MIN_LINE_SEARCH_STEP, SOFTPLUS_SHARPNESS
from src.lib.config import ExplosionConfig
from src.lib.errors import ExplosionError
from src.mesh.geometry import AABB, FloatArray, PartSet

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
class ExplosionResult:
    """
    translations: (P, 3) scene-unit vectors, assembled -> exploded.
    overlap_history: exact total overlap volume after each accepted iterate.
    """

    translations: FloatArray
    converged: bool
    iterations: int
    overlap_history: tuple[float, ...]
    final_overlap: float


def _pair_overlaps(centers: FloatArray, widths: FloatArray) -> tuple[FloatArray, FloatArray]:
    """Per-axis overlap o (pairs, 3) and center differences d (pairs, 3)."""
    i, j = np.triu_indices(centers.shape[0], 1)
    d = centers[i] - centers[j]
    o = 0.5 * (widths[i] + widths[j]) - np.abs(d)
    return o, d


def total_overlap_volume(
    aabbs: Sequence[AABB], translations: FloatArray | None = None
) -> float:
    """Sum of pairwise intersection volumes of the (translated) boxes."""
    centers = np.array([box.center for box in aabbs], dtype=np.float64).reshape(-1, 3)
    widths = np.array([box.extent for box in aabbs], dtype=np.float64).reshape(-1, 3)
    if translations is not None:
        centers = centers + np.asarray(translations, dtype=np.float64).reshape(-1, 3)
    if centers.shape[0] < 2:
        return 0.0
    o, _ = _pair_overlaps(centers, widths)
    return float(np.prod(np.clip(o, 0.0, None), axis=1).sum())


class _Objective:
    """Surrogate and exact overlap of a normalized box layout."""

    def __init__(self, centers: FloatArray, widths: FloatArray, reg: float) -> None:
        self.centers = centers
        self.widths = widths
        self.reg = reg
        self.pairs = np.triu_indices(centers.shape[0], 1)
        self.s = SOFTPLUS_SHARPNESS

    def hard(self, v: FloatArray) -> float:
        """Exact total pairwise overlap volume."""
        o, _ = _pair_overlaps(self.centers + v, self.widths)
        return float(np.prod(np.clip(o, 0.0, None), axis=1).sum())

    def soft(self, v: FloatArray) -> float:
        """Surrogate objective S(v)."""
        o, _ = _pair_overlaps(self.centers + v, self.widths)
        f = np.logaddexp(0.0, self.s * o) / self.s
        return float(np.prod(f, axis=1).sum() + self.reg * np.sum(v * v))

    def grad(self, v: FloatArray) -> FloatArray:
        """Gradient of S(v)."""
        o, d = _pair_overlaps(self.centers + v, self.widths)
        f = np.logaddexp(0.0, self.s * o) / self.s
        df = expit(self.s * o) * -np.sign(d)
        # product of the other two axes
        others = np.stack([f[:, 1] * f[:, 2], f[:, 0] * f[:, 2], f[:, 0] * f[:, 1]], axis=1)
        g_pair = others * df
        g = 2.0 * self.reg * v
        i, j = self.pairs
        np.add.at(g, i, g_pair)
        np.add.at(g, j, -g_pair)
        return g


def _project(v: FloatArray, weights: FloatArray, max_norm: float) -> FloatArray:
    """Remove the weighted drift, then rescale so every |v_i| <= max_norm."""
    v = v - (weights[:, None] * v).sum(axis=0)
    longest = float(np.linalg.norm(v, axis=1).max())
    if longest > max_norm:
        v = v * (max_norm / longest)
    return v


def _initial_translations(centers: FloatArray, seed: int) -> FloatArray:
    """Radial unit directions from the scene centroid; seeded jitter for central parts."""
    radial = centers - centers.mean(axis=0)
    norms = np.linalg.norm(radial, axis=1)
    rng = np.random.default_rng(seed)
    jitter = rng.standard_normal(radial.shape)
    central = norms < 1e-9
    radial[central] = jitter[central]
    radial = radial / np.linalg.norm(radial, axis=1, keepdims=True)
    return INITIAL_RADIAL_SCALE * radial


def optimize_explosion(parts: PartSet, cfg: ExplosionConfig) -> ExplosionResult:
    """
    Find per-part translations that separate the part boxes.

    Returns the zero vectors when the assembly already satisfies the overlap
    threshold. Otherwise iterates until the exact overlap drops to
    cfg.overlap_threshold * scene volume, the line search stalls or
    cfg.max_iters is reached; the last two leave converged False.

    Raises:
        ExplosionError: fewer than two parts.
    """
    count = len(parts)
    if count < 2:
        raise ExplosionError(f"explosion needs at least 2 parts, got {count}")

    scene = parts.scene_aabb
    diag = scene.diagonal
    if diag <= 0.0:
        raise ExplosionError("scene has zero extent")
    centers = (np.array([box.center for box in parts.aabbs]) - scene.center) / diag
    widths = np.array([box.extent for box in parts.aabbs]) / diag
    volumes = parts.volumes
    weights = volumes / volumes.sum() if volumes.sum() > 0.0 else np.full(count, 1.0 / count)
    threshold = cfg.overlap_threshold * scene.volume / diag ** 3
    objective = _Objective(centers, widths, cfg.reg_weight)

    volume_scale = diag ** 3
    v = np.zeros((count, 3))
    overlap = objective.hard(v)
    if overlap <= threshold:
        logger.debug("Assembly already separated: overlap %.3g", overlap * volume_scale)
        return ExplosionResult(v, True, 0, (overlap * volume_scale,), overlap * volume_scale)

    v = _project(_initial_translations(centers, cfg.seed), weights, cfg.max_translation)
    overlap = objective.hard(v)
    value = objective.soft(v)
    history = [overlap]
    converged = overlap <= threshold
    iterations = 0
    while not converged and iterations < cfg.max_iters:
        g = objective.grad(v)
        scale = float(np.abs(g).max())
        if scale == 0.0:
            break
        step = cfg.step_size
        accepted = False
        while step >= MIN_LINE_SEARCH_STEP:
            candidate = _project(v - step * g / scale, weights, cfg.max_translation)
            cand_value = objective.soft(candidate)
            cand_overlap = objective.hard(candidate)
            if cand_overlap < overlap or (cand_value < value and cand_overlap <= overlap):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            logger.debug("Line search stalled after %d iterations", iterations)
            break
        v, value, overlap = candidate, cand_value, cand_overlap
        history.append(overlap)
        iterations += 1
        converged = overlap <= threshold

    if converged:
        logger.debug("Explosion converged in %d iterations", iterations)
    else:
        logger.warning(
            "Explosion did not converge: overlap %.3g > %.3g after %d iterations",
            overlap * volume_scale, threshold * volume_scale, iterations,
        )
    return ExplosionResult(
        translations=v * diag,
        converged=converged,
        iterations=iterations,
        overlap_history=tuple(h * volume_scale for h in history),
        final_overlap=overlap * volume_scale,
    )
