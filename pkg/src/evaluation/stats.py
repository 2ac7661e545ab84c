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
Dataset statistics: distributions of part count, expansion ratio, part-volume
spread and initial overlap over a set of synthesized sequences.
"""

import csv
import logging
import math
from dataclasses import dataclass
from logging import Logger
from pathlib import Path
from typing import Sequence, final
import numpy as np
import numpy.typing as npt
from src.lib.bang_constants import FRAME_TEMPLATE, HISTOGRAM_BINS, MANIFEST_NAME, OVERLAP_LOG_FLOOR
from src.lib.errors import MetricError
from src.lib.schema import HistogramSchema, ManifestSchema, StatsReportSchema
from src.mesh.components import connected_components
from src.mesh.geometry import FloatArray, IntArray, PartSet
from src.mesh.obj_io import load_mesh
from src.synth.explosion import total_overlap_volume
from src.synth.manifest import read_manifest

logger = logging.getLogger(__name__)

HISTOGRAM_NAMES: tuple[str, ...] = (
    "part_count",
    "expansion_ratio",
    "log_volume_ratio",
    "log_overlap_volume",
)


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
class Histogram:
    """bins + 1 edges and bins counts."""

    edges: FloatArray
    counts: IntArray

    @property
    def total(self) -> int:
        """Number of values binned."""
        return int(self.counts.sum())

    def to_document(self) -> HistogramSchema:
        """JSON content."""
        return {
            "edges": [float(e) for e in self.edges],
            "counts": [int(c) for c in self.counts],
        }


@final
@dataclass(frozen=True)
class DatasetStats:
    """The four dataset histograms; each sums to asset_count."""

    asset_count: int
    part_count: Histogram
    expansion_ratio: Histogram
    log_volume_ratio: Histogram
    log_overlap_volume: Histogram

    def histograms(self) -> dict[str, Histogram]:
        """Histograms by name."""
        return {name: getattr(self, name) for name in HISTOGRAM_NAMES}

    def to_document(self) -> StatsReportSchema:
        """JSON report content."""
        return {
            "asset_count": self.asset_count,
            "part_count": self.part_count.to_document(),
            "expansion_ratio": self.expansion_ratio.to_document(),
            "log_volume_ratio": self.log_volume_ratio.to_document(),
            "log_overlap_volume": self.log_overlap_volume.to_document(),
        }


def histogram(values: npt.ArrayLike, bins: int = HISTOGRAM_BINS) -> Histogram:
    """Uniform bins over the data range; a constant sample gets a unit-wide range."""
    data = np.asarray(values, dtype=np.float64).reshape(-1)
    if data.size == 0:
        raise MetricError("cannot histogram an empty sample")
    counts, edges = np.histogram(data, bins=bins)
    return Histogram(edges=edges, counts=counts.astype(np.int64))


def log_volume_ratio(parts: PartSet) -> float:
    """log10 of smallest over largest part volume."""
    volumes = np.maximum(parts.volumes, OVERLAP_LOG_FLOOR)
    return math.log10(float(volumes.min()) / float(volumes.max()))


def log_overlap_volume(parts: PartSet) -> float:
    """log10 of the summed pairwise box overlap, clamped to the floor."""
    return math.log10(max(total_overlap_volume(parts.aabbs), OVERLAP_LOG_FLOOR))


def dataset_stats(
    manifests: Sequence[ManifestSchema],
    parts: Sequence[PartSet],
    bins: int = HISTOGRAM_BINS,
) -> DatasetStats:
    """
    Histograms over assets; parts[k] is the assembled decomposition of asset k.

    Raises:
        MetricError: empty input or mismatched lengths.
    """
    if not manifests:
        raise MetricError("dataset_stats needs at least one asset")
    if len(manifests) != len(parts):
        raise MetricError(f"{len(manifests)} manifests for {len(parts)} part sets")
    stats = DatasetStats(
        asset_count=len(manifests),
        part_count=histogram([m["part_count"] for m in manifests], bins),
        expansion_ratio=histogram([m["expansion_ratio"] for m in manifests], bins),
        log_volume_ratio=histogram([log_volume_ratio(p) for p in parts], bins),
        log_overlap_volume=histogram([log_overlap_volume(p) for p in parts], bins),
    )
    logger.info("Computed statistics over %d asset(s)", stats.asset_count)
    return stats


def load_dataset(root: str | Path) -> tuple[list[str], list[ManifestSchema], list[PartSet]]:
    """
    Asset ids, manifests and assembled decompositions of every sequence
    directory directly under root, in name order.
    """
    ids: list[str] = []
    manifests: list[ManifestSchema] = []
    parts: list[PartSet] = []
    for directory in sorted(Path(root).iterdir()):
        if not (directory / MANIFEST_NAME).is_file():
            continue
        manifest = read_manifest(directory / MANIFEST_NAME)
        assembled = load_mesh(directory / FRAME_TEMPLATE.format(index=0))
        ids.append(manifest["asset_id"])
        manifests.append(manifest)
        parts.append(connected_components(assembled))
    logger.debug("Found %d sequence(s) under %s", len(ids), root)
    return ids, manifests, parts


def write_histogram_csv(stats: DatasetStats, path: str | Path) -> None:
    """One row per bin: histogram,bin_lo,bin_hi,count."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["histogram", "bin_lo", "bin_hi", "count"])
        for name, hist in stats.histograms().items():
            for lo, hi, count in zip(hist.edges[:-1], hist.edges[1:], hist.counts):
                writer.writerow([name, repr(float(lo)), repr(float(hi)), int(count)])
