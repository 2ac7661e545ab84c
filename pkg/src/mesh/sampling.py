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
Surface point sampling and farthest-point downsampling.
"""

import math
import numpy as np
from src.lib.errors import EmptyMeshError, InvalidMeshError
from src.mesh.geometry import FloatArray, IntArray, PointCloud, TriangleMesh


def sample_surface_uniform(mesh: TriangleMesh, n: int, seed: int) -> PointCloud:
    """
    Draw n points uniformly over the mesh surface.

    Triangles are chosen proportionally to their area and points are
    barycentric-uniform inside each triangle. Identical (mesh, n, seed) give
    bitwise-identical clouds.
    """
    if n < 1:
        raise InvalidMeshError(f"sample count must be >= 1, got {n}")
    areas = mesh.triangle_areas()
    total = float(areas.sum())
    if mesh.triangle_count == 0 or total <= 0.0:
        raise EmptyMeshError(f"mesh {mesh.name!r} has no surface to sample")

    rng = np.random.default_rng(seed)
    tri = rng.choice(mesh.triangle_count, size=n, p=areas / total)
    r1 = np.sqrt(rng.random(n))
    r2 = rng.random(n)
    corners = mesh.corners[tri]
    points = (
        (1.0 - r1)[:, None] * corners[:, 0]
        + (r1 * (1.0 - r2))[:, None] * corners[:, 1]
        + (r1 * r2)[:, None] * corners[:, 2]
    )
    return PointCloud(points=points, seed=seed)


def fps_indices(points: FloatArray, count: int) -> tuple[IntArray, FloatArray]:
    """
    Greedy farthest-point selection.

    The first index is the point nearest the centroid; each following index
    maximizes the distance to the already-selected set.

    Returns:
        tuple: (selected indices, min-distance to the selected set at the time
        each point was picked; the first entry is 0)
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    total = pts.shape[0]
    count = min(count, total)
    selected = np.empty(count, dtype=np.int64)
    picked_dist = np.zeros(count, dtype=np.float64)
    if count == 0:
        return selected, picked_dist

    centroid = pts.mean(axis=0)
    selected[0] = int(np.argmin(np.linalg.norm(pts - centroid, axis=1)))
    dists = np.linalg.norm(pts - pts[selected[0]], axis=1)
    for i in range(1, count):
        nxt = int(np.argmax(dists))
        selected[i] = nxt
        picked_dist[i] = dists[nxt]
        dists = np.minimum(dists, np.linalg.norm(pts - pts[nxt], axis=1))
    return selected, picked_dist


def fps_downsample(cloud: PointCloud, factor: int) -> PointCloud:
    """
    Keep ceil(|cloud| / factor) points by farthest-point sampling.
    """
    if factor < 1:
        raise InvalidMeshError(f"downsampling factor must be >= 1, got {factor}")
    if len(cloud) == 0:
        raise EmptyMeshError("cannot downsample an empty point cloud")
    keep = math.ceil(len(cloud) / factor)
    indices, _ = fps_indices(cloud.points, keep)
    return PointCloud(points=cloud.points[indices], seed=cloud.seed)
