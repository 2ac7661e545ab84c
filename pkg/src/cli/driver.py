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
Dataset driver: runs the synthesis pipeline over a directory of meshes with a
bounded worker pool and writes sequences, rejection records and a summary.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from logging import Logger
from pathlib import Path
from typing import Optional, final
from src.lib.bang_constants import SUMMARY_NAME
from src.lib.config import PipelineConfig
from src.lib.errors import BangError
from src.lib.schema import AssetRecordSchema, SynthSummarySchema, write_json
from src.mesh.obj_io import load_mesh
from src.synth.annotation import AnnotationClient
from src.synth.manifest import write_sequence
from src.synth.pipeline import SynthResult, synthesize_asset

logger = logging.getLogger(__name__)

REJECTED_DIR: str = "rejected"


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
class AssetOutcome:
    """result is None when the asset failed before synthesis (error says why)."""

    asset_id: str
    result: Optional[SynthResult] = None
    error: Optional[str] = None
    warnings: tuple[str, ...] = field(default=())

    @property
    def status(self) -> str:
        """accepted, rejected or failed."""
        if self.result is None:
            return "failed"
        return "accepted" if self.result.accepted else "rejected"

    def record(self) -> AssetRecordSchema:
        """Summary line of the asset."""
        if self.result is None:
            return {"asset_id": self.asset_id, "status": "failed", "reasons": [self.error or "unknown error"]}
        status = "accepted" if self.result.accepted else "rejected"
        return {"asset_id": self.asset_id, "status": status, "reasons": list(self.result.reasons)}


def mesh_paths(input_dir: str | Path) -> list[Path]:
    """OBJ files of input_dir in name order."""
    root = Path(input_dir)
    if not root.is_dir():
        raise BangError(f"input directory not found: {root}")
    paths = sorted(p for p in root.iterdir() if p.suffix.lower() == ".obj" and p.is_file())
    if not paths:
        raise BangError(f"no .obj meshes in {root}")
    return paths


def _synthesize_file(path: Path, cfg: PipelineConfig, client: Optional[AnnotationClient]) -> AssetOutcome:
    asset_id = path.stem
    try:
        mesh = load_mesh(path)
        return AssetOutcome(asset_id, synthesize_asset(mesh, asset_id, cfg, client), warnings=mesh.warnings)
    except BangError as e:
        logger.error("Asset %s failed: %s", asset_id, e)
        return AssetOutcome(asset_id, error=str(e))


def run_synth(
    input_dir: str | Path, cfg: PipelineConfig, client: Optional[AnnotationClient]
) -> tuple[list[AssetOutcome], SynthSummarySchema]:
    """
    Synthesize every mesh of input_dir into cfg.out.

    Accepted assets get a sequence directory out/<asset_id>; rejected and
    failed assets get out/rejected/<asset_id>.json. summary.json lists every
    asset ordered by asset id.

    Raises:
        BangError: missing or empty input directory, unwritable output.
    """
    paths = mesh_paths(input_dir)
    out = Path(cfg.out)
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        outcomes = list(pool.map(lambda p: _synthesize_file(p, cfg, client), paths))
    outcomes.sort(key=lambda o: o.asset_id)

    try:
        out.mkdir(parents=True, exist_ok=True)
        for outcome in outcomes:
            result = outcome.result
            if result is not None and result.accepted and result.sequence is not None:
                write_sequence(result.sequence, out / outcome.asset_id, result.manifest)
            else:
                (out / REJECTED_DIR).mkdir(exist_ok=True)
                write_json(outcome.record(), out / REJECTED_DIR / f"{outcome.asset_id}.json")
        summary: SynthSummarySchema = {
            "accepted": sum(o.status == "accepted" for o in outcomes),
            "rejected": sum(o.status == "rejected" for o in outcomes),
            "failed": sum(o.status == "failed" for o in outcomes),
            "assets": [o.record() for o in outcomes],
        }
        write_json(summary, out / SUMMARY_NAME)
    except OSError as e:
        raise BangError(f"cannot write to {out}: {e}") from e
    logger.info(
        "Synthesized %d asset(s): %d accepted, %d rejected, %d failed",
        len(outcomes), summary["accepted"], summary["rejected"], summary["failed"],
    )
    return outcomes, summary
