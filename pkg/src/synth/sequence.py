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
Exploded sequences: interpolation between the assembled and exploded states,
normalization into [-1, 1]^3 and rejection of implausible explosions.
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, final
import numpy as np
import numpy.typing as npt
from src.lib.bang_constants import NORMALIZED_EXTENT
from src.lib.errors import SequenceError
from src.mesh.components import connected_components
from src.mesh.geometry import (
    AABB,
    FloatArray,
    PartSet,
    TriangleMesh,
    merge_meshes,
    transform_mesh,
    translate_mesh,
)

# transforms closer than this to the identity are snapped to it
IDENTITY_EPS: float = 1e-12


@final
@dataclass(frozen=True)
class Transform:
    """Uniform normalization p -> (p + center) * scale."""

    center: FloatArray
    scale: float

    def __post_init__(self) -> None:
        center = np.array(self.center, dtype=np.float64).reshape(3)
        center.setflags(write=False)
        object.__setattr__(self, "center", center)

    @classmethod
    def identity(cls) -> "Transform":
        """The identity transform."""
        return cls(np.zeros(3), 1.0)

    @property
    def is_identity(self) -> bool:
        """True for zero shift and unit scale."""
        return self.scale == 1.0 and not np.any(self.center)

    def apply(self, points: npt.ArrayLike) -> FloatArray:
        """Map points through the transform."""
        return np.asarray((np.asarray(points, dtype=np.float64) + self.center) * self.scale)

    def then(self, other: "Transform") -> "Transform":
        """Transform equal to applying self, then other."""
        # ((p + c1) s1 + c2) s2 = (p + c1 + c2 / s1) s1 s2
        return Transform(self.center + other.center / self.scale, self.scale * other.scale)


@final
@dataclass(frozen=True)
class ExplodedSequence:
    """
    Frames of one asset from assembled (t=0) to exploded (t=1).

    All frames hold the same parts; only part positions differ. When the
    sequence was synthesized, part_offsets holds the vertex range of each part
    (part i owns vertices part_offsets[i]:part_offsets[i + 1]) and translations
    the ground-truth (P, 3) vectors.
    """

    times: tuple[float, ...]
    frames: tuple[TriangleMesh, ...]
    part_count: int
    translations: Optional[FloatArray] = None
    part_offsets: Optional[tuple[int, ...]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        times = tuple(float(t) for t in self.times)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "frames", tuple(self.frames))
        if len(times) != len(self.frames):
            raise SequenceError(f"{len(times)} times for {len(self.frames)} frames")
        if len(times) < 2:
            raise SequenceError("a sequence needs at least the t=0 and t=1 frames")
        if times[0] != 0.0 or times[-1] != 1.0:
            raise SequenceError("times must start at 0 and end at 1")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise SequenceError("times must be strictly ascending")
        if self.part_count < 1:
            raise SequenceError("part_count must be at least 1")
        first = self.frames[0]
        for frame in self.frames[1:]:
            if frame.triangle_count != first.triangle_count:
                raise SequenceError("all frames must have the same triangle count")
        if self.translations is not None:
            vectors = np.array(self.translations, dtype=np.float64).reshape(-1, 3)
            if vectors.shape[0] != self.part_count:
                raise SequenceError(
                    f"{vectors.shape[0]} translations for {self.part_count} parts"
                )
            vectors.setflags(write=False)
            object.__setattr__(self, "translations", vectors)
        if self.part_offsets is not None and len(self.part_offsets) != self.part_count + 1:
            raise SequenceError("part_offsets must hold part_count + 1 entries")

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def assembled(self) -> TriangleMesh:
        """The t=0 frame."""
        return self.frames[0]

    @property
    def exploded(self) -> TriangleMesh:
        """The t=1 frame."""
        return self.frames[-1]

    def union_aabb(self) -> AABB:
        """Box around every frame."""
        box = self.frames[0].aabb
        for frame in self.frames[1:]:
            box = box.union(frame.aabb)
        return box

    def part_aabbs(self, index: int) -> list[AABB]:
        """
        Per-part boxes of frame index: from part_offsets when known, from
        connected components otherwise.
        """
        frame = self.frames[index]
        if self.part_offsets is None:
            return connected_components(frame).aabbs
        offs = self.part_offsets
        return [
            AABB.from_points(frame.vertices[offs[i]:offs[i + 1]]) for i in range(self.part_count)
        ]


@final
@dataclass(frozen=True)
class RejectDecision:
    """Accept/reject outcome of the post-normalization checks."""

    accepted: bool
    min_gap: float
    expansion_ratio: float
    reasons: tuple[str, ...] = field(default=())


def interpolate_sequence(
    parts: PartSet, translations: npt.ArrayLike, times: Sequence[float]
) -> ExplodedSequence:
    """
    Build frames placing part i at its assembled position + t * v_i.

    Raises:
        SequenceError: translation count differs from part count, or invalid times.
    """
    vectors = np.asarray(translations, dtype=np.float64).reshape(-1, 3)
    if vectors.shape[0] != len(parts):
        raise SequenceError(f"{vectors.shape[0]} translations for {len(parts)} parts")
    offsets = [0]
    for part in parts.parts:
        offsets.append(offsets[-1] + part.mesh.vertex_count)
    name = parts.source.name
    frames = [
        merge_meshes(
            [translate_mesh(part.mesh, float(t) * v) for part, v in zip(parts.parts, vectors)],
            name=f"{name}_frame{index}",
        )
        for index, t in enumerate(times)
    ]
    return ExplodedSequence(
        times=tuple(times),
        frames=tuple(frames),
        part_count=len(parts),
        translations=vectors,
        part_offsets=tuple(offsets),
    )


def normalize_sequence(seq: ExplodedSequence) -> tuple[ExplodedSequence, Transform]:
    """
    Center the union box of all frames at the origin and scale its largest
    dimension to 2. One transform is applied to every frame and to the
    translations.
    """
    box = seq.union_aabb()
    extent = box.max_dimension
    if extent <= 0.0:
        raise SequenceError("sequence has zero extent")
    center = -box.center
    scale = NORMALIZED_EXTENT / extent
    if abs(scale - 1.0) <= IDENTITY_EPS:
        scale = 1.0
    center[np.abs(center) <= IDENTITY_EPS] = 0.0
    transform = Transform(center, scale)
    if transform.is_identity:
        return seq, transform
    frames = tuple(transform_mesh(frame, center, scale) for frame in seq.frames)
    vectors = None if seq.translations is None else seq.translations * scale
    return replace(seq, frames=frames, translations=vectors), transform


def frame_expansion_ratio(assembled: TriangleMesh, exploded: TriangleMesh) -> float:
    """Largest box dimension of exploded divided by that of assembled."""
    base = assembled.aabb.max_dimension
    if base <= 0.0:
        raise SequenceError("assembled frame has zero extent")
    return exploded.aabb.max_dimension / base


def min_pairwise_gap(aabbs: Sequence[AABB]) -> float:
    """Smallest pairwise box gap (negative when some pair overlaps); inf for one box."""
    gaps = [
        aabbs[i].gap(aabbs[j]) for i in range(len(aabbs)) for j in range(i + 1, len(aabbs))
    ]
    return min(gaps) if gaps else float("inf")


def reject_sequence(
    seq: ExplodedSequence, min_gap: float, max_expansion: float
) -> RejectDecision:
    """
    Reject when parts sit closer than min_gap at t=1 or the explosion grows
    the scene beyond max_expansion.
    """
    boxes = seq.part_aabbs(len(seq) - 1)
    gap = min_pairwise_gap(boxes)
    ratio = frame_expansion_ratio(seq.assembled, seq.exploded)
    reasons: list[str] = []
    if len(boxes) < seq.part_count:
        reasons.append(f"proximity: only {len(boxes)} of {seq.part_count} parts separated at t=1")
    elif gap < min_gap:
        reasons.append(f"proximity: min gap {gap:.6g} < {min_gap:g} at t=1")
    if ratio > max_expansion:
        reasons.append(f"excessively large: expansion ratio {ratio:.6g} > {max_expansion:g}")
    return RejectDecision(
        accepted=not reasons, min_gap=gap, expansion_ratio=ratio, reasons=tuple(reasons)
    )
