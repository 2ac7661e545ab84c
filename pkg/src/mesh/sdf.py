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
Dense signed distance grids.

build_sdf samples the signed distance of a mesh on a regular cubic grid:
magnitude is the exact distance to the surface, sign comes from the
generalized winding number (negative inside, positive outside). Nodes farther
than SIGN_BAND cells from the surface are grouped into connected regions which
are signed by a winding-number vote over a few representative nodes; nodes in
the band are signed individually.

query_sdf interpolates trilinearly inside the grid. Outside, the value is the
distance to the grid box plus the interpolated value on the box boundary.
query_sdf_gradient is the analytic gradient of the trilinear interpolant.
"""

import json
import logging
from dataclasses import dataclass, field
from logging import Logger
from pathlib import Path
from typing import final
import numpy as np
import numpy.typing as npt
from scipy import ndimage
from src.lib.bang_constants import (
    MAX_SDF_RESOLUTION,
    MIN_SDF_RESOLUTION,
    SDF_PADDING_FRACTION,
    WATERTIGHT_TOLERANCE,
    WINDING_VOTE_SAMPLES,
)
from src.lib.errors import EmptyMeshError, GridBoundaryError, ResolutionError, SequenceError
from src.mesh.components import default_weld_eps, triangle_labels
from src.mesh.distance import TriangleDistanceIndex, winding_number
from src.mesh.geometry import AABB, FloatArray, IntArray, TriangleMesh

logger = logging.getLogger(__name__)

# nodes closer than this many cells to the surface are signed one by one
SIGN_BAND: float = 0.6


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
class SdfGrid:
    """
    Signed distance samples on resolution^3 nodes.
    Node (i, j, k) sits at origin + cell_size * (i, j, k).
    """

    resolution: int
    origin: FloatArray
    cell_size: float
    values: FloatArray
    watertight: bool = True
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        origin = np.array(self.origin, dtype=np.float64).reshape(3)
        values = np.array(self.values, dtype=np.float64).reshape((self.resolution,) * 3)
        origin.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "values", values)

    @property
    def upper(self) -> FloatArray:
        """Position of the last node."""
        return np.asarray(self.origin + self.cell_size * (self.resolution - 1), dtype=np.float64)

    @property
    def aabb(self) -> AABB:
        """Box spanned by the grid nodes."""
        return AABB(self.origin, self.upper)

    def node_position(self, i: int, j: int, k: int) -> FloatArray:
        """World position of node (i, j, k)."""
        return np.asarray(self.origin + self.cell_size * np.array([i, j, k]), dtype=np.float64)


def _grid_frame(mesh: TriangleMesh, resolution: int) -> tuple[FloatArray, float]:
    """Origin and cell size of a cubic grid padded around the mesh box."""
    box = mesh.aabb
    side = max(box.max_dimension, 1e-12) * (1.0 + 2.0 * SDF_PADDING_FRACTION)
    cell = side / (resolution - 1)
    origin = box.center - 0.5 * side
    return np.asarray(origin, dtype=np.float64), float(cell)


def union_surface_triangles(mesh: TriangleMesh) -> IntArray:
    """
    Triangles on the boundary of the union of the mesh components.
    A triangle is dropped when its centroid lies inside another component.
    """
    count, labels = triangle_labels(mesh, default_weld_eps(mesh))
    keep = np.ones(mesh.triangle_count, dtype=bool)
    if count < 2:
        return np.flatnonzero(keep)
    centroids = mesh.corners.mean(axis=1)
    for label in range(count):
        own = np.flatnonzero(labels == label)
        others = np.flatnonzero(labels != label)
        inside = winding_number(mesh, centroids[own], triangle_ids=others) > 0.5
        keep[own[inside]] = False
    if not keep.any():
        keep[:] = True
    return np.flatnonzero(keep)


def build_sdf(mesh: TriangleMesh, resolution: int, union: bool = True) -> SdfGrid:
    """
    Sample the signed distance of mesh on a resolution^3 grid.

    Args:
        mesh (TriangleMesh): surface to sample; expected watertight.
        resolution (int): nodes per axis, within [16, 512].
        union (bool): measure distance to the union boundary of the components,
            so surface inside another component reads as interior.

    Raises:
        ResolutionError: resolution out of range.
        EmptyMeshError: mesh has no triangles.
    """
    if not MIN_SDF_RESOLUTION <= resolution <= MAX_SDF_RESOLUTION:
        raise ResolutionError(
            f"SDF resolution {resolution} outside [{MIN_SDF_RESOLUTION}, {MAX_SDF_RESOLUTION}]"
        )
    if mesh.triangle_count == 0:
        raise EmptyMeshError(f"mesh {mesh.name!r} has no triangles")

    origin, cell = _grid_frame(mesh, resolution)
    surface_ids = union_surface_triangles(mesh) if union else None
    index = TriangleDistanceIndex(mesh, surface_ids)

    axis = np.arange(resolution, dtype=np.float64) * cell
    dist = np.empty((resolution,) * 3, dtype=np.float64)
    yy, zz = np.meshgrid(axis + origin[1], axis + origin[2], indexing="ij")
    for i in range(resolution):
        slab = np.stack([np.full(yy.size, axis[i] + origin[0]), yy.ravel(), zz.ravel()], axis=1)
        dist[i] = index.query(slab)[0].reshape(resolution, resolution)

    sign = np.ones_like(dist)
    warnings: list[str] = []
    watertight = True

    far = dist > SIGN_BAND * cell
    regions, region_count = ndimage.label(far)
    for region in range(1, region_count + 1):
        flat = np.flatnonzero(regions.ravel() == region)
        picks = flat[np.linspace(0, flat.size - 1, min(WINDING_VOTE_SAMPLES, flat.size)).astype(np.int64)]
        nodes = origin + cell * np.stack(np.unravel_index(picks, dist.shape), axis=1)
        wind = winding_number(mesh, nodes)
        if np.any(np.abs(wind - np.round(wind)) > WATERTIGHT_TOLERANCE):
            watertight = False
        if wind.mean() > 0.5:
            sign.ravel()[flat] = -1.0

    band = np.flatnonzero(~far.ravel())
    if band.size:
        nodes = origin + cell * np.stack(np.unravel_index(band, dist.shape), axis=1)
        wind = winding_number(mesh, nodes)
        sign.ravel()[band] = np.where(wind > 0.5, -1.0, 1.0)

    if not watertight:
        message = f"{mesh.name}: mesh is not watertight, sign estimated by winding number"
        logger.warning(message)
        warnings.append(message)

    logger.debug(
        "Built %d^3 SDF for %s: cell %.6g, %d far region(s), %d band node(s)",
        resolution, mesh.name, cell, region_count, band.size,
    )
    return SdfGrid(
        resolution=resolution,
        origin=origin,
        cell_size=cell,
        values=sign * dist,
        watertight=watertight,
        warnings=tuple(warnings),
    )


def _cell_coords(grid: SdfGrid, q: FloatArray) -> tuple[IntArray, FloatArray]:
    """Lower cell corner index and fractional position for in-grid points."""
    f = (q - grid.origin) / grid.cell_size
    i0 = np.clip(np.floor(f).astype(np.int64), 0, grid.resolution - 2)
    return i0, f - i0


def _corner_values(grid: SdfGrid, i0: IntArray) -> FloatArray:
    """(N, 2, 2, 2) node values around each cell."""
    v = grid.values
    out = np.empty((i0.shape[0], 2, 2, 2), dtype=np.float64)
    for dx in (0, 1):
        for dy in (0, 1):
            for dz in (0, 1):
                out[:, dx, dy, dz] = v[i0[:, 0] + dx, i0[:, 1] + dy, i0[:, 2] + dz]
    return out


def _trilinear(c: FloatArray, t: FloatArray) -> FloatArray:
    """Trilinear interpolation of corner values c at fractions t."""
    tx, ty, tz = t[:, 0], t[:, 1], t[:, 2]
    c00 = c[:, 0, 0, 0] * (1 - tx) + c[:, 1, 0, 0] * tx
    c01 = c[:, 0, 0, 1] * (1 - tx) + c[:, 1, 0, 1] * tx
    c10 = c[:, 0, 1, 0] * (1 - tx) + c[:, 1, 1, 0] * tx
    c11 = c[:, 0, 1, 1] * (1 - tx) + c[:, 1, 1, 1] * tx
    c0 = c00 * (1 - ty) + c10 * ty
    c1 = c01 * (1 - ty) + c11 * ty
    return np.asarray(c0 * (1 - tz) + c1 * tz, dtype=np.float64)


def query_sdf(grid: SdfGrid, points: npt.ArrayLike) -> FloatArray:
    """
    Signed distance at arbitrary points.
    Outside the grid: distance to the grid box plus the boundary value.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    q = np.clip(pts, grid.origin, grid.upper)
    outside = np.linalg.norm(pts - q, axis=1)
    i0, t = _cell_coords(grid, q)
    return _trilinear(_corner_values(grid, i0), t) + outside


def query_sdf_gradient(grid: SdfGrid, points: npt.ArrayLike) -> FloatArray:
    """
    Analytic gradient of the trilinear interpolant.

    Raises:
        GridBoundaryError: a point is not strictly inside the grid.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if np.any(pts <= grid.origin) or np.any(pts >= grid.upper):
        raise GridBoundaryError("gradient queries must lie strictly inside the grid")
    i0, t = _cell_coords(grid, pts)
    c = _corner_values(grid, i0)
    tx, ty, tz = t[:, 0], t[:, 1], t[:, 2]
    dx = c[:, 1] - c[:, 0]
    dy = c[:, :, 1] - c[:, :, 0]
    dz = c[:, :, :, 1] - c[:, :, :, 0]
    gx = (
        dx[:, 0, 0] * (1 - ty) * (1 - tz) + dx[:, 1, 0] * ty * (1 - tz)
        + dx[:, 0, 1] * (1 - ty) * tz + dx[:, 1, 1] * ty * tz
    )
    gy = (
        dy[:, 0, 0] * (1 - tx) * (1 - tz) + dy[:, 1, 0] * tx * (1 - tz)
        + dy[:, 0, 1] * (1 - tx) * tz + dy[:, 1, 1] * tx * tz
    )
    gz = (
        dz[:, 0, 0] * (1 - tx) * (1 - ty) + dz[:, 1, 0] * tx * (1 - ty)
        + dz[:, 0, 1] * (1 - tx) * ty + dz[:, 1, 1] * tx * ty
    )
    return np.stack([gx, gy, gz], axis=1) / grid.cell_size


def query_sdf_value_and_gradient(
    grid: SdfGrid, points: npt.ArrayLike
) -> tuple[FloatArray, FloatArray]:
    """
    Value and gradient of query_sdf anywhere, including outside the grid,
    where the gradient adds the unit direction away from the grid box.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    q = np.clip(pts, grid.origin, grid.upper)
    away = pts - q
    outside = np.linalg.norm(away, axis=1)
    i0, t = _cell_coords(grid, q)
    c = _corner_values(grid, i0)
    value = _trilinear(c, t) + outside
    grad = np.zeros_like(pts)
    inner = np.all((pts > grid.origin) & (pts < grid.upper), axis=1)
    if inner.any():
        grad[inner] = query_sdf_gradient(grid, pts[inner])
    rest = np.flatnonzero(~inner)
    if rest.size:
        h = 1e-3 * grid.cell_size
        for axis in range(3):
            free = (q[rest, axis] > grid.origin[axis]) & (q[rest, axis] < grid.upper[axis])
            lo = q[rest].copy()
            hi = q[rest].copy()
            lo[:, axis] = np.maximum(lo[:, axis] - h, grid.origin[axis])
            hi[:, axis] = np.minimum(hi[:, axis] + h, grid.upper[axis])
            span = hi[:, axis] - lo[:, axis]
            diff = query_sdf(grid, hi) - query_sdf(grid, lo)
            grad[rest, axis] = np.where(free & (span > 0.0), diff / np.where(span > 0.0, span, 1.0), 0.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(outside[rest, None] > 0.0, away[rest] / outside[rest, None], 0.0)
        grad[rest] += unit
    return value, grad


def export_sdf(grid: SdfGrid, path: str | Path) -> None:
    """Write a JSON header line followed by little-endian float32 node values."""
    header = {
        "cell_size": grid.cell_size,
        "origin": [float(c) for c in grid.origin],
        "resolution": grid.resolution,
        "watertight": grid.watertight,
    }
    with open(path, "wb") as handle:
        handle.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        handle.write(grid.values.astype("<f4").tobytes())


def import_sdf(path: str | Path) -> SdfGrid:
    """Read a grid written by export_sdf (values come back at float32 precision)."""
    raw = Path(path).read_bytes()
    head, sep, body = raw.partition(b"\n")
    if not sep:
        raise SequenceError(f"{path}: missing SDF header")
    header = json.loads(head.decode("utf-8"))
    resolution = int(header["resolution"])
    values = np.frombuffer(body, dtype="<f4")
    if values.size != resolution ** 3:
        raise SequenceError(f"{path}: expected {resolution ** 3} values, found {values.size}")
    return SdfGrid(
        resolution=resolution,
        origin=np.asarray(header["origin"], dtype=np.float64),
        cell_size=float(header["cell_size"]),
        values=values.astype(np.float64),
        watertight=bool(header["watertight"]),
    )
