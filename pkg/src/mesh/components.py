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
Connected-component decomposition of triangle meshes into parts.

Two triangles belong to the same part iff they are linked through shared
vertices, where vertices closer than weld_eps count as shared. Parts are ordered
by descending convex-hull volume, ties broken by ascending centroid.
"""

import logging
from logging import Logger
from typing import Optional
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as csgraph_components
from scipy.spatial import ConvexHull, QhullError
from src.lib.bang_constants import DEFAULT_WELD_FRACTION
from src.lib.errors import InvalidMeshError
from src.mesh.geometry import AABB, FloatArray, IntArray, Part, PartSet, TriangleMesh, weld_labels

logger = logging.getLogger(__name__)


def set_logger(custom_logger: Logger) -> None:
    """
    Sets a custom logger to be used globally within the module.
    Args:
        custom_logger (logging.Logger): A configured logger instance to override the default python logger.
    """
    global logger
    logger = custom_logger


def default_weld_eps(mesh: TriangleMesh) -> float:
    """Default welding distance: a millionth of the mesh box diagonal."""
    return DEFAULT_WELD_FRACTION * mesh.aabb.diagonal


def convex_hull_volume(points: FloatArray) -> float:
    """Convex-hull volume; 0 for flat or too-small point sets."""
    pts = np.unique(np.asarray(points, dtype=np.float64).reshape(-1, 3), axis=0)
    if pts.shape[0] < 4:
        return 0.0
    try:
        return float(ConvexHull(pts).volume)
    except QhullError:
        return 0.0


def triangle_labels(mesh: TriangleMesh, weld_eps: float) -> tuple[int, IntArray]:
    """
    Label each triangle with its connected component.

    Returns:
        tuple: (component count, per-triangle labels in 0..count-1, first-seen order)
    """
    vert_labels = weld_labels(mesh.vertices, weld_eps)
    tris = vert_labels[mesh.triangles]
    count = mesh.vertex_count
    rows = np.concatenate([tris[:, 0], tris[:, 1]])
    cols = np.concatenate([tris[:, 1], tris[:, 2]])
    graph = coo_matrix((np.ones(rows.shape[0], dtype=np.int8), (rows, cols)), shape=(count, count))
    _, vertex_comp = csgraph_components(graph, directed=False)
    tri_comp = vertex_comp[tris[:, 0]]
    # relabel in order of first appearance so labels do not depend on scipy internals
    _, first_index, inverse = np.unique(tri_comp, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first_index))
    return int(first_index.shape[0]), np.asarray(order[inverse], dtype=np.int64)


def _make_part(mesh: TriangleMesh, triangle_ids: IntArray, index: int) -> Part:
    """Build a Part from a subset of mesh triangles."""
    sub = mesh.triangles[triangle_ids]
    used, inverse = np.unique(sub.reshape(-1), return_inverse=True)
    part_mesh = TriangleMesh(
        mesh.vertices[used], inverse.reshape(-1, 3), name=f"{mesh.name}_part{index}"
    )
    return Part(
        mesh=part_mesh,
        centroid=part_mesh.surface_centroid(),
        aabb=AABB.from_points(part_mesh.vertices),
        volume=convex_hull_volume(part_mesh.vertices),
        triangle_ids=triangle_ids,
    )


def _order_key(part: Part) -> tuple[float, float, float, float]:
    # volumes are compared at 9 significant digits so translated copies tie
    return (-float(f"{part.volume:.9g}"), *(float(c) for c in part.centroid))


def connected_components(mesh: TriangleMesh, weld_eps: Optional[float] = None) -> PartSet:
    """
    Decompose mesh into its connected components.

    Args:
        mesh (TriangleMesh): source mesh.
        weld_eps (float, optional): vertices closer than this are treated as shared.
            Defaults to 1e-6 of the mesh box diagonal.

    Returns:
        PartSet: parts ordered by descending volume, ties by ascending centroid.
    """
    if mesh.triangle_count == 0:
        raise InvalidMeshError(f"mesh {mesh.name!r} has no triangles")
    eps = default_weld_eps(mesh) if weld_eps is None else weld_eps
    if eps < 0.0:
        raise InvalidMeshError("weld_eps must be non-negative")

    count, labels = triangle_labels(mesh, eps)
    parts = [
        _make_part(mesh, np.flatnonzero(labels == label), label) for label in range(count)
    ]
    parts.sort(key=_order_key)
    logger.debug("Mesh %s decomposed into %d part(s) at weld_eps=%g", mesh.name, count, eps)
    return PartSet(parts=tuple(parts), source=mesh)
