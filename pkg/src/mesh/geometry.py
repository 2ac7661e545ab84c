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
Geometry carriers shared by every bangkit module: indexed triangle meshes,
axis-aligned bounding boxes, parts, part sets and point clouds.

All carriers are immutable after construction. Array fields are stored as
read-only numpy arrays so they can be shared across worker threads.
"""

from dataclasses import dataclass, field
from typing import Iterable, Sequence, final
import numpy as np
import numpy.typing as npt
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as csgraph_components
from scipy.spatial import cKDTree
from src.lib.bang_constants import MIN_MESH_VERTICES
from src.lib.errors import InvalidMeshError

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]


def _frozen(array: npt.ArrayLike, dtype: type) -> npt.NDArray[np.generic]:
    """Return a read-only contiguous copy of array with the given dtype."""
    out = np.array(array, dtype=dtype, copy=True, order="C")
    out.setflags(write=False)
    return out


@final
@dataclass(frozen=True)
class AABB:
    """Axis-aligned bounding box; min <= max componentwise."""

    min: FloatArray
    max: FloatArray

    def __post_init__(self) -> None:
        lo = _frozen(self.min, np.float64).reshape(3)
        hi = _frozen(self.max, np.float64).reshape(3)
        if np.any(lo > hi):
            raise InvalidMeshError(f"AABB min {lo} exceeds max {hi}")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    @classmethod
    def from_points(cls, points: npt.ArrayLike) -> "AABB":
        """Tight box around an (N, 3) point array."""
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        if pts.shape[0] == 0:
            raise InvalidMeshError("cannot bound an empty point set")
        return cls(pts.min(axis=0), pts.max(axis=0))

    @property
    def extent(self) -> FloatArray:
        """Edge lengths along x, y, z."""
        return np.asarray(self.max - self.min, dtype=np.float64)

    @property
    def center(self) -> FloatArray:
        """Box center."""
        return np.asarray(0.5 * (self.min + self.max), dtype=np.float64)

    @property
    def volume(self) -> float:
        """Box volume."""
        return float(np.prod(self.extent))

    @property
    def diagonal(self) -> float:
        """Length of the box diagonal."""
        return float(np.linalg.norm(self.extent))

    @property
    def max_dimension(self) -> float:
        """Largest edge length."""
        return float(np.max(self.extent))

    def contains(self, points: npt.ArrayLike, tol: float = 0.0) -> bool:
        """True if every point lies inside the box, inflated by tol."""
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        return bool(np.all(pts >= self.min - tol) and np.all(pts <= self.max + tol))

    def translated(self, offset: npt.ArrayLike) -> "AABB":
        """Copy of the box moved by offset."""
        off = np.asarray(offset, dtype=np.float64).reshape(3)
        return AABB(self.min + off, self.max + off)

    def union(self, other: "AABB") -> "AABB":
        """Smallest box containing both boxes."""
        return AABB(np.minimum(self.min, other.min), np.maximum(self.max, other.max))

    def intersection_volume(self, other: "AABB") -> float:
        """Volume of the intersection box, 0 when disjoint."""
        overlap = np.minimum(self.max, other.max) - np.maximum(self.min, other.min)
        return float(np.prod(np.clip(overlap, 0.0, None)))

    def iou(self, other: "AABB") -> float:
        """Intersection-over-union of the two boxes."""
        inter = self.intersection_volume(other)
        union = self.volume + other.volume - inter
        if union <= 0.0:
            return 1.0 if np.array_equal(self.min, other.min) and np.array_equal(self.max, other.max) else 0.0
        return inter / union

    def gap(self, other: "AABB") -> float:
        """
        Signed separation between two boxes: the largest per-axis gap.
        Positive when the boxes are separated along at least one axis,
        zero when touching, negative (minus the smallest penetration) when overlapping.
        """
        per_axis = np.maximum(other.min - self.max, self.min - other.max)
        return float(np.max(per_axis))


@final
@dataclass(frozen=True)
class TriangleMesh:
    """
    Indexed triangle surface.
    vertices: (V, 3) float64 positions; triangles: (F, 3) int64 vertex indices.
    warnings collects non-fatal issues recorded while the mesh was produced.
    """

    vertices: FloatArray
    triangles: IntArray
    name: str = "mesh"
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        verts = _frozen(self.vertices, np.float64).reshape(-1, 3)
        tris = _frozen(self.triangles, np.int64).reshape(-1, 3)
        if verts.shape[0] < MIN_MESH_VERTICES:
            raise InvalidMeshError(
                f"mesh {self.name!r} has {verts.shape[0]} vertices, need at least {MIN_MESH_VERTICES}"
            )
        if tris.size and (tris.min() < 0 or tris.max() >= verts.shape[0]):
            raise InvalidMeshError(f"mesh {self.name!r} has triangle indices out of range")
        if not np.all(np.isfinite(verts)):
            raise InvalidMeshError(f"mesh {self.name!r} has non-finite vertex coordinates")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tris)

    @property
    def vertex_count(self) -> int:
        """Number of vertices."""
        return int(self.vertices.shape[0])

    @property
    def triangle_count(self) -> int:
        """Number of triangles."""
        return int(self.triangles.shape[0])

    @property
    def corners(self) -> FloatArray:
        """(F, 3, 3) triangle corner positions."""
        return np.asarray(self.vertices[self.triangles], dtype=np.float64)

    @property
    def aabb(self) -> AABB:
        """Tight bounding box of the vertices referenced by triangles."""
        if self.triangle_count == 0:
            return AABB.from_points(self.vertices)
        return AABB.from_points(self.vertices[np.unique(self.triangles)])

    def triangle_areas(self) -> FloatArray:
        """Per-triangle area."""
        c = self.corners
        cross = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])
        return np.asarray(0.5 * np.linalg.norm(cross, axis=1), dtype=np.float64)

    def surface_area(self) -> float:
        """Total triangle area."""
        return float(self.triangle_areas().sum())

    def surface_centroid(self) -> FloatArray:
        """Area-weighted centroid of the surface; vertex mean for zero-area meshes."""
        areas = self.triangle_areas()
        total = areas.sum()
        if self.triangle_count == 0 or total <= 0.0:
            return np.asarray(self.vertices.mean(axis=0), dtype=np.float64)
        centers = self.corners.mean(axis=1)
        return np.asarray((centers * areas[:, None]).sum(axis=0) / total, dtype=np.float64)


@final
@dataclass(frozen=True)
class Part:
    """
    One connected component of a source mesh.
    triangle_ids index the source mesh triangles that make up the part.
    """

    mesh: TriangleMesh
    centroid: FloatArray
    aabb: AABB
    volume: float
    triangle_ids: IntArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "centroid", _frozen(self.centroid, np.float64).reshape(3))
        object.__setattr__(self, "triangle_ids", _frozen(self.triangle_ids, np.int64).reshape(-1))
        if self.volume < 0.0:
            raise InvalidMeshError("part volume must be non-negative")


@final
@dataclass(frozen=True)
class PartSet:
    """Ordered parts partitioning the triangles of source."""

    parts: tuple[Part, ...]
    source: TriangleMesh

    def __post_init__(self) -> None:
        if len(self.parts) < 1:
            raise InvalidMeshError("a part set needs at least one part")

    def __len__(self) -> int:
        return len(self.parts)

    @property
    def aabbs(self) -> list[AABB]:
        """Per-part boxes in part order."""
        return [part.aabb for part in self.parts]

    @property
    def volumes(self) -> FloatArray:
        """Per-part convex-hull volumes in part order."""
        return np.array([part.volume for part in self.parts], dtype=np.float64)

    @property
    def centroids(self) -> FloatArray:
        """(P, 3) part centroids in part order."""
        return np.array([part.centroid for part in self.parts], dtype=np.float64).reshape(-1, 3)

    @property
    def scene_aabb(self) -> AABB:
        """Union box of every part."""
        box = self.parts[0].aabb
        for part in self.parts[1:]:
            box = box.union(part.aabb)
        return box


@final
@dataclass(frozen=True)
class PointCloud:
    """Points drawn from a surface; seed is the PRNG seed used to draw them."""

    points: FloatArray
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", _frozen(self.points, np.float64).reshape(-1, 3))

    def __len__(self) -> int:
        return int(self.points.shape[0])


def weld_labels(vertices: npt.ArrayLike, eps: float) -> IntArray:
    """
    Group vertices closer than eps.
    Returns one label per vertex; the label of a group is the smallest vertex index in it.
    """
    verts = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    count = verts.shape[0]
    labels = np.arange(count, dtype=np.int64)
    if count == 0:
        return labels
    pairs = cKDTree(verts).query_pairs(r=max(eps, 0.0), output_type="ndarray")
    if len(pairs) == 0:
        return labels
    graph = coo_matrix(
        (np.ones(len(pairs), dtype=np.int8), (pairs[:, 0], pairs[:, 1])), shape=(count, count)
    )
    _, comp = csgraph_components(graph, directed=False)
    # smallest member index per component
    first = np.full(comp.max() + 1, count, dtype=np.int64)
    np.minimum.at(first, comp, labels)
    return np.asarray(first[comp], dtype=np.int64)


def merge_meshes(meshes: Sequence[TriangleMesh], name: str = "merged") -> TriangleMesh:
    """Concatenate meshes into one, offsetting triangle indices."""
    verts: list[FloatArray] = []
    tris: list[IntArray] = []
    offset = 0
    for mesh in meshes:
        verts.append(mesh.vertices)
        tris.append(mesh.triangles + offset)
        offset += mesh.vertex_count
    return TriangleMesh(np.concatenate(verts), np.concatenate(tris), name=name)


def translate_mesh(mesh: TriangleMesh, offset: npt.ArrayLike, name: str | None = None) -> TriangleMesh:
    """Copy of mesh moved by offset."""
    off = np.asarray(offset, dtype=np.float64).reshape(1, 3)
    return TriangleMesh(mesh.vertices + off, mesh.triangles, name=name or mesh.name)


def transform_mesh(mesh: TriangleMesh, shift: npt.ArrayLike, scale: float) -> TriangleMesh:
    """Copy of mesh mapped by p -> (p + shift) * scale."""
    off = np.asarray(shift, dtype=np.float64).reshape(1, 3)
    return TriangleMesh((mesh.vertices + off) * scale, mesh.triangles, name=mesh.name)


def make_box(lo: Iterable[float], hi: Iterable[float], name: str = "box") -> TriangleMesh:
    """Closed box with outward-facing triangles."""
    a = np.asarray(list(lo), dtype=np.float64)
    b = np.asarray(list(hi), dtype=np.float64)
    corners = np.array(
        [[(b if (i >> k) & 1 else a)[k] for k in range(3)] for i in range(8)], dtype=np.float64
    )
    # vertex i has bit k set when coordinate k is at the max side
    faces = np.array(
        [
            [0, 2, 3], [0, 3, 1],  # -z
            [4, 5, 7], [4, 7, 6],  # +z
            [0, 1, 5], [0, 5, 4],  # -y
            [2, 6, 7], [2, 7, 3],  # +y
            [0, 4, 6], [0, 6, 2],  # -x
            [1, 3, 7], [1, 7, 5],  # +x
        ],
        dtype=np.int64,
    )
    return TriangleMesh(corners, faces, name=name)


def make_icosphere(
    radius: float = 1.0,
    subdivisions: int = 4,
    center: Iterable[float] = (0.0, 0.0, 0.0),
    name: str = "icosphere",
) -> TriangleMesh:
    """Icosphere with outward-facing triangles."""
    phi = (1.0 + 5.0 ** 0.5) / 2.0
    verts = [
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ]
    faces = [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ]
    points = [np.asarray(v, dtype=np.float64) / np.linalg.norm(v) for v in verts]
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(i: int, j: int) -> int:
            key = (min(i, j), max(i, j))
            if key not in cache:
                mid = points[i] + points[j]
                points.append(mid / np.linalg.norm(mid))
                cache[key] = len(points) - 1
            return cache[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]])
        faces = refined
    offset = np.asarray(list(center), dtype=np.float64)
    return TriangleMesh(np.array(points) * radius + offset, np.array(faces, dtype=np.int64), name=name)
