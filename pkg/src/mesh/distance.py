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
Exact point-to-mesh distance and generalized winding numbers.

TriangleDistanceIndex answers nearest-triangle queries exactly. Triangles are
grouped by bounding radius; each group keeps a k-d tree over triangle centroids.
A query evaluates the k nearest centroids of a group and doubles k until the
bound (k-th centroid distance minus the group radius) proves no other triangle
of the group can be closer.
"""

import math
import numpy as np
from scipy.spatial import cKDTree
from src.lib.bang_constants import SDF_CANDIDATE_TRIANGLES, WINDING_CHUNK
from src.mesh.geometry import FloatArray, IntArray, TriangleMesh

# pairs evaluated per vectorized batch
PAIR_BUDGET: int = 1 << 20


def closest_points_on_triangles(
    p: FloatArray, a: FloatArray, b: FloatArray, c: FloatArray
) -> FloatArray:
    """
    Closest point on triangle (a, b, c) to p, elementwise over leading axes.
    Voronoi-region classification; earlier regions win ties.
    """
    ab = b - a
    ac = c - a
    ap = p - a
    bp = p - b
    cp = p - c
    d1 = np.einsum("...i,...i->...", ab, ap)
    d2 = np.einsum("...i,...i->...", ac, ap)
    d3 = np.einsum("...i,...i->...", ab, bp)
    d4 = np.einsum("...i,...i->...", ac, bp)
    d5 = np.einsum("...i,...i->...", ab, cp)
    d6 = np.einsum("...i,...i->...", ac, cp)
    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2

    with np.errstate(divide="ignore", invalid="ignore"):
        denom = va + vb + vc
        v_in = np.where(denom != 0.0, vb / denom, 0.0)
        w_in = np.where(denom != 0.0, vc / denom, 0.0)
        out = a + ab * v_in[..., None] + ac * w_in[..., None]

        e_bc = (d4 - d3) + (d5 - d6)
        w_bc = np.where(e_bc != 0.0, (d4 - d3) / e_bc, 0.0)
        mask = (va <= 0.0) & ((d4 - d3) >= 0.0) & ((d5 - d6) >= 0.0)
        out = np.where(mask[..., None], b + (c - b) * w_bc[..., None], out)

        w_ac = np.where(d2 - d6 != 0.0, d2 / (d2 - d6), 0.0)
        mask = (vb <= 0.0) & (d2 >= 0.0) & (d6 <= 0.0)
        out = np.where(mask[..., None], a + ac * w_ac[..., None], out)

        mask = (d6 >= 0.0) & (d5 <= d6)
        out = np.where(mask[..., None], c, out)

        v_ab = np.where(d1 - d3 != 0.0, d1 / (d1 - d3), 0.0)
        mask = (vc <= 0.0) & (d1 >= 0.0) & (d3 <= 0.0)
        out = np.where(mask[..., None], a + ab * v_ab[..., None], out)

        mask = (d3 >= 0.0) & (d4 <= d3)
        out = np.where(mask[..., None], b, out)

        mask = (d1 <= 0.0) & (d2 <= 0.0)
        out = np.where(mask[..., None], a, out)
    return np.asarray(out, dtype=np.float64)


class _TriangleGroup:
    """Triangles of similar bounding radius with a centroid k-d tree."""

    def __init__(self, ids: IntArray, centroids: FloatArray, radius: float) -> None:
        self.ids = ids
        self.tree = cKDTree(centroids)
        self.radius = radius

    def __len__(self) -> int:
        return int(self.ids.shape[0])


class TriangleDistanceIndex:
    """Exact nearest-triangle queries against an immutable mesh."""

    def __init__(self, mesh: TriangleMesh, triangle_ids: IntArray | None = None) -> None:
        ids = (
            np.arange(mesh.triangle_count, dtype=np.int64)
            if triangle_ids is None
            else np.asarray(triangle_ids, dtype=np.int64)
        )
        self.corners = mesh.corners
        centroids = self.corners.mean(axis=1)
        radii = np.linalg.norm(self.corners - centroids[:, None, :], axis=2).max(axis=1)
        # group by power-of-two radius class
        classes = np.floor(np.log2(np.maximum(radii[ids], 1e-300))).astype(np.int64)
        self.groups: list[_TriangleGroup] = []
        for cls in np.unique(classes):
            member = ids[classes == cls]
            self.groups.append(_TriangleGroup(member, centroids[member], float(radii[member].max())))

    def _query_group(
        self, group: _TriangleGroup, pts: FloatArray
    ) -> tuple[FloatArray, FloatArray, IntArray]:
        """Exact nearest triangle of one group for every point."""
        count = pts.shape[0]
        best_d = np.full(count, np.inf)
        best_c = np.zeros((count, 3))
        best_t = np.zeros(count, dtype=np.int64)
        pending = np.arange(count)
        k = min(SDF_CANDIDATE_TRIANGLES, len(group))
        while pending.size:
            step = max(1, PAIR_BUDGET // k)
            unresolved: list[IntArray] = []
            for start in range(0, pending.size, step):
                sel = pending[start:start + step]
                cdist, cidx = group.tree.query(pts[sel], k=k)
                cdist = np.asarray(cdist).reshape(sel.size, k)
                cidx = np.asarray(cidx).reshape(sel.size, k)
                tri = group.ids[cidx]
                corners = self.corners[tri]
                p = np.broadcast_to(pts[sel][:, None, :], corners[:, :, 0].shape)
                closest = closest_points_on_triangles(
                    p, corners[:, :, 0], corners[:, :, 1], corners[:, :, 2]
                )
                dist = np.linalg.norm(closest - p, axis=2)
                arg = np.argmin(dist, axis=1)
                rows = np.arange(sel.size)
                best_d[sel] = dist[rows, arg]
                best_c[sel] = closest[rows, arg]
                best_t[sel] = tri[rows, arg]
                if k < len(group):
                    unsure = best_d[sel] > cdist[:, -1] - group.radius
                    unresolved.append(sel[unsure])
            pending = np.concatenate(unresolved) if unresolved else np.empty(0, dtype=np.int64)
            k = min(4 * k, len(group))
        return best_d, best_c, best_t

    def query(self, points: FloatArray) -> tuple[FloatArray, FloatArray, IntArray]:
        """
        Exact unsigned distance from each point to the indexed triangles.

        Returns:
            tuple: (distance, closest point, triangle index) per point.
        """
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        dist = np.full(pts.shape[0], np.inf)
        closest = np.zeros_like(pts)
        tri = np.zeros(pts.shape[0], dtype=np.int64)
        for group in self.groups:
            d, c, t = self._query_group(group, pts)
            better = d < dist
            dist[better] = d[better]
            closest[better] = c[better]
            tri[better] = t[better]
        return dist, closest, tri


def point_triangle_distance(
    mesh: TriangleMesh, points: FloatArray
) -> tuple[FloatArray, FloatArray]:
    """Exact unsigned distance and closest surface point for each point."""
    dist, closest, _ = TriangleDistanceIndex(mesh).query(points)
    return dist, closest


def winding_number(
    mesh: TriangleMesh, points: FloatArray, triangle_ids: IntArray | None = None
) -> FloatArray:
    """
    Generalized winding number of the (optionally restricted) triangle set at
    each point: 1 inside a closed outward-oriented surface, 0 outside.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    corners = mesh.corners if triangle_ids is None else mesh.corners[triangle_ids]
    out = np.zeros(pts.shape[0], dtype=np.float64)
    if corners.shape[0] == 0 or pts.shape[0] == 0:
        return out
    step = max(1, min(WINDING_CHUNK, PAIR_BUDGET // corners.shape[0]))
    for start in range(0, pts.shape[0], step):
        p = pts[start:start + step, None, :]
        a = corners[None, :, 0, :] - p
        b = corners[None, :, 1, :] - p
        c = corners[None, :, 2, :] - p
        la = np.linalg.norm(a, axis=2)
        lb = np.linalg.norm(b, axis=2)
        lc = np.linalg.norm(c, axis=2)
        num = np.einsum("pti,pti->pt", a, np.cross(b, c))
        den = (
            la * lb * lc
            + np.einsum("pti,pti->pt", a, b) * lc
            + np.einsum("pti,pti->pt", b, c) * la
            + np.einsum("pti,pti->pt", c, a) * lb
        )
        out[start:start + step] = (2.0 * np.arctan2(num, den)).sum(axis=1) / (4.0 * math.pi)
    return out
