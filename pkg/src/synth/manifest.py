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
Sequence directories on disk: frame_<index>.obj files next to manifest.json.
"""

import json
import logging
import re
from logging import Logger
from pathlib import Path
from typing import Optional, Sequence
import numpy as np
from pydantic import ValidationError
from src.lib.bang_constants import FRAME_TEMPLATE, MANIFEST_NAME
from src.lib.errors import BangError, SequenceError
from src.lib.schema import AnnotationSchema, ManifestSchema, dump_json, parse_manifest
from src.mesh.components import connected_components
from src.mesh.obj_io import load_mesh, write_obj
from src.synth.sequence import ExplodedSequence, Transform

logger = logging.getLogger(__name__)

FRAME_PATTERN = re.compile(r"^frame_(\d+)\.obj$")


def set_logger(custom_logger: Logger) -> None:
    """
    Sets a custom logger to be used globally within the module.
    Args:
        custom_logger (logging.Logger): A configured logger instance to override the default python logger.
    """
    global logger
    logger = custom_logger


def build_manifest(
    asset_id: str,
    seq: ExplodedSequence,
    transform: Transform,
    *,
    converged: bool,
    reasons: Sequence[str],
    expansion_ratio: float,
    annotation: Optional[AnnotationSchema],
    seed: int,
) -> ManifestSchema:
    """Manifest document for a (normalized) sequence."""
    if seq.translations is None:
        raise SequenceError(f"{asset_id}: sequence has no ground-truth translations")
    return {
        "asset_id": asset_id,
        "times": [float(t) for t in seq.times],
        "translations": [[float(c) for c in row] for row in seq.translations],
        "transform": {
            "center": [float(c) for c in transform.center],
            "scale": float(transform.scale),
        },
        "flags": {"converged": converged, "rejected": bool(reasons), "reasons": list(reasons)},
        "expansion_ratio": float(expansion_ratio),
        "part_count": seq.part_count,
        "annotation": annotation,
        "seed": seed,
    }


def write_manifest(manifest: ManifestSchema, path: str | Path) -> None:
    """Write manifest as canonical JSON."""
    Path(path).write_text(dump_json(manifest), encoding="utf-8")


def read_manifest(path: str | Path) -> ManifestSchema:
    """
    Read and validate a manifest.

    Raises:
        SequenceError: missing file, invalid JSON or schema violation.
    """
    file_path = Path(path)
    try:
        data = json.loads(file_path.read_text(encoding="utf-8"))
    except OSError as e:
        raise SequenceError(f"cannot read manifest {file_path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SequenceError(f"malformed manifest {file_path}: {e}") from e
    try:
        return parse_manifest(data)
    except ValidationError as e:
        raise SequenceError(f"malformed manifest {file_path}: {e.error_count()} error(s): {e}") from e


def write_sequence(
    seq: ExplodedSequence, directory: str | Path, manifest: Optional[ManifestSchema] = None
) -> Path:
    """Write frames (and the manifest when given) into directory."""
    out = Path(directory)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for index, frame in enumerate(seq.frames):
            write_obj(frame, out / FRAME_TEMPLATE.format(index=index))
        if manifest is not None:
            write_manifest(manifest, out / MANIFEST_NAME)
    except OSError as e:
        raise BangError(f"cannot write sequence to {out}: {e}") from e
    return out


def frame_paths(directory: str | Path) -> list[Path]:
    """frame_<index>.obj files of directory ordered by index."""
    indexed = []
    for path in Path(directory).iterdir():
        match = FRAME_PATTERN.match(path.name)
        if match:
            indexed.append((int(match.group(1)), path))
    indexed.sort()
    return [path for _, path in indexed]


def load_sequence(
    directory: str | Path, times: Optional[Sequence[float]] = None
) -> tuple[ExplodedSequence, Optional[ManifestSchema]]:
    """
    Load a sequence directory.

    Times and ground-truth translations come from manifest.json when present;
    a bare frame directory needs explicit times.

    Raises:
        SequenceError: not a directory, missing or extra frames, malformed manifest.
    """
    root = Path(directory)
    if not root.is_dir():
        raise SequenceError(f"sequence directory not found: {root}")
    manifest_path = root / MANIFEST_NAME
    manifest = read_manifest(manifest_path) if manifest_path.is_file() else None
    if manifest is not None:
        times = manifest["times"]
    if times is None:
        raise SequenceError(f"{root}: no {MANIFEST_NAME} and no times given")
    paths = frame_paths(root)
    expected = [FRAME_TEMPLATE.format(index=i) for i in range(len(times))]
    found = [path.name for path in paths]
    if found != expected:
        missing = sorted(set(expected) - set(found))
        raise SequenceError(
            f"{root}: expected frames {expected[0]}..{expected[-1]}, "
            f"missing {missing or 'none'}, found {len(found)}"
        )
    frames = tuple(load_mesh(path) for path in paths)
    if manifest is not None:
        part_count = manifest["part_count"]
        translations = np.asarray(manifest["translations"], dtype=np.float64)
    else:
        part_count = len(connected_components(frames[-1]))
        translations = None
    logger.debug("Loaded %d frame(s) from %s", len(frames), root)
    return (
        ExplodedSequence(
            times=tuple(times), frames=frames, part_count=part_count, translations=translations
        ),
        manifest,
    )
