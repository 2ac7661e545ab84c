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
Wavefront OBJ reading and writing.

Only vertex ('v') and face ('f') records are interpreted. Polygons are
fan-triangulated. Every other record type is ignored with one warning per type.
Loaded meshes are cleaned: vertices closer than WELD_EPS are welded, degenerate
triangles are dropped and unreferenced vertices removed.
"""

import logging
from logging import Logger
from pathlib import Path
import numpy as np
from src.lib.bang_constants import DEGENERATE_AREA_EPS, MIN_MESH_VERTICES, WELD_EPS
from src.lib.errors import EmptyMeshError, MeshLoadError
from src.mesh.geometry import FloatArray, IntArray, TriangleMesh, weld_labels

logger = logging.getLogger(__name__)


def set_logger(custom_logger: Logger) -> None:
    """
    Sets a custom logger to be used globally within the module.
    Args:
        custom_logger (logging.Logger): A configured logger instance to override the default python logger.
    """
    global logger
    logger = custom_logger


def _parse_index(token: str, vertex_count: int, line_no: int) -> int:
    """Resolve one face corner token (v, v/t, v//n, v/t/n) to a 0-based vertex index."""
    head = token.split("/", 1)[0]
    try:
        raw = int(head)
    except ValueError as e:
        raise MeshLoadError(f"invalid face index {token!r}", line_no) from e
    # negative indices are relative to the vertices read so far
    index = raw - 1 if raw > 0 else vertex_count + raw
    if raw == 0 or index < 0 or index >= vertex_count:
        raise MeshLoadError(
            f"face index {raw} out of range (have {vertex_count} vertices)", line_no
        )
    return index


def parse_obj(text: str, name: str = "mesh") -> tuple[FloatArray, IntArray, list[str]]:
    """
    Parse OBJ text into raw vertex and triangle arrays.

    Returns:
        tuple: (vertices, triangles, warnings) before any cleanup.
    """
    vertices: list[list[float]] = []
    triangles: list[list[int]] = []
    ignored: dict[str, int] = {}

    for line_no, line in enumerate(text.splitlines(), start=1):
        toks = line.split("#", 1)[0].split()
        if not toks:
            continue
        record = toks[0]
        if record == "v":
            if len(toks) < 4:
                raise MeshLoadError("vertex record needs 3 coordinates", line_no)
            try:
                vertices.append([float(v) for v in toks[1:4]])
            except ValueError as e:
                raise MeshLoadError(f"invalid vertex coordinate in {line.strip()!r}", line_no) from e
        elif record == "f":
            if len(toks) < 4:
                raise MeshLoadError("face record needs at least 3 corners", line_no)
            poly = [_parse_index(tok, len(vertices), line_no) for tok in toks[1:]]
            for i in range(2, len(poly)):
                triangles.append([poly[0], poly[i - 1], poly[i]])
        else:
            ignored[record] = ignored.get(record, 0) + 1

    warnings = [
        f"{name}: ignored {count} '{record}' record(s)" for record, count in sorted(ignored.items())
    ]
    verts = np.array(vertices, dtype=np.float64).reshape(-1, 3)
    tris = np.array(triangles, dtype=np.int64).reshape(-1, 3)
    return verts, tris, warnings


def clean_mesh(
    vertices: FloatArray, triangles: IntArray, name: str, warnings: list[str]
) -> TriangleMesh:
    """
    Weld duplicate vertices at WELD_EPS, drop degenerate triangles and
    unreferenced vertices. Raises EmptyMeshError if nothing usable remains.
    """
    if triangles.shape[0] == 0:
        raise EmptyMeshError(f"{name}: mesh has no faces")

    labels = weld_labels(vertices, WELD_EPS)
    tris = labels[triangles]

    repeated = (tris[:, 0] == tris[:, 1]) | (tris[:, 1] == tris[:, 2]) | (tris[:, 0] == tris[:, 2])
    corners = vertices[tris]
    areas = 0.5 * np.linalg.norm(
        np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0]), axis=1
    )
    extent = float(np.ptp(vertices, axis=0).max()) if vertices.shape[0] else 0.0
    degenerate = repeated | (areas <= DEGENERATE_AREA_EPS * max(extent, 1.0) ** 2)
    dropped = int(degenerate.sum())
    if dropped:
        warnings.append(f"{name}: dropped {dropped} degenerate triangle(s)")
    tris = tris[~degenerate]
    if tris.shape[0] == 0:
        raise EmptyMeshError(f"{name}: no non-degenerate triangles")

    used, inverse = np.unique(tris.reshape(-1), return_inverse=True)
    if used.shape[0] < MIN_MESH_VERTICES:
        raise EmptyMeshError(f"{name}: fewer than {MIN_MESH_VERTICES} vertices after cleanup")
    for message in warnings:
        logger.warning(message)
    return TriangleMesh(
        vertices[used], inverse.reshape(-1, 3), name=name, warnings=tuple(warnings)
    )


def load_mesh(path: str | Path) -> TriangleMesh:
    """
    Load and clean a Wavefront OBJ file.

    Raises:
        MeshLoadError: the file does not exist or fails to parse (with line number).
        EmptyMeshError: the file holds no usable triangles.
    """
    file_path = Path(path)
    if not file_path.is_file():
        raise MeshLoadError(f"mesh file not found: {file_path}")
    try:
        text = file_path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise MeshLoadError(f"cannot read {file_path}: {e}") from e
    vertices, triangles, warnings = parse_obj(text, name=file_path.stem)
    logger.debug(
        "Parsed %s: %d vertices, %d triangles", file_path, vertices.shape[0], triangles.shape[0]
    )
    return clean_mesh(vertices, triangles, file_path.stem, warnings)


def format_obj(mesh: TriangleMesh) -> str:
    """OBJ text for mesh with round-trip float precision and 1-based faces."""
    lines = [f"# {mesh.name}"]
    lines.extend(
        f"v {float(x)!r} {float(y)!r} {float(z)!r}" for x, y, z in mesh.vertices.tolist()
    )
    lines.extend(f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.triangles.tolist())
    return "\n".join(lines) + "\n"


def write_obj(mesh: TriangleMesh, path: str | Path) -> None:
    """Write mesh as OBJ; identical meshes produce identical bytes."""
    Path(path).write_text(format_obj(mesh), encoding="utf-8")
