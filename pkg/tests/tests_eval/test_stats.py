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
Unit tests for dataset statistics and the frame-count study.
"""
import csv
import math
import tempfile
import unittest
from pathlib import Path
from unittest.mock import MagicMock, patch
from src.evaluation.framestudy import (
    frame_count_study,
    masking_ablation,
    study_assets,
    uniform_times,
)
from src.evaluation.stats import (
    HISTOGRAM_NAMES,
    dataset_stats,
    histogram,
    load_dataset,
    log_overlap_volume,
    log_volume_ratio,
    write_histogram_csv,
)
from src.lib.bang_constants import OVERLAP_LOG_FLOOR
from src.lib.config import TrackConfig
from src.lib.errors import BangError, MetricError
from src.mesh.components import connected_components
from src.mesh.geometry import make_icosphere
from src.synth.manifest import write_sequence
from src.synth.pipeline import synthesize_asset
from tests.mock_data import knob_sequence, quick_config, stacked_boxes, two_boxes


class TestDatasetStats(unittest.TestCase):
    """Tests for the dataset histograms."""

    def test_histogram(self) -> None:
        """Counts add up to the sample size; empty samples are rejected."""
        hist = histogram([1.0, 2.0, 2.0, 3.0], bins=4)
        self.assertEqual(hist.total, 4)
        self.assertEqual(len(hist.edges), 5)
        constant = histogram([2.0, 2.0], bins=3)
        self.assertEqual(constant.total, 2)
        with self.assertRaises(MetricError):
            histogram([])

    def test_volume_and_overlap(self) -> None:
        """Equal parts have log ratio 0; separated boxes hit the overlap floor."""
        parts = connected_components(two_boxes())
        self.assertAlmostEqual(log_volume_ratio(parts), 0.0, places=9)
        self.assertEqual(log_overlap_volume(parts), math.log10(OVERLAP_LOG_FLOOR))
        self.assertGreater(log_overlap_volume(connected_components(stacked_boxes())), -2.0)

    def test_dataset_directory(self) -> None:
        """Statistics over a written dataset, plus the CSV export."""
        cfg = quick_config()
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            for name in ("a", "b"):
                result = synthesize_asset(two_boxes(), name, cfg)
                assert result.sequence is not None
                write_sequence(result.sequence, root / name, result.manifest)
            (root / "stray.txt").write_text("not a sequence", encoding="utf-8")
            ids, manifests, parts = load_dataset(root)
            stats = dataset_stats(manifests, parts, bins=5)
            csv_path = root / "stats.csv"
            write_histogram_csv(stats, csv_path)
            with open(csv_path, newline="", encoding="utf-8") as handle:
                rows = list(csv.reader(handle))
        self.assertEqual(ids, ["a", "b"])
        self.assertEqual(stats.asset_count, 2)
        self.assertEqual(tuple(stats.histograms()), HISTOGRAM_NAMES)
        self.assertEqual(stats.part_count.total, 2)
        self.assertEqual(rows[0], ["histogram", "bin_lo", "bin_hi", "count"])
        self.assertEqual(len(rows), 1 + 4 * 5)
        document = stats.to_document()
        self.assertEqual(document["asset_count"], 2)

    def test_empty_dataset(self) -> None:
        """No assets means no statistics."""
        with self.assertRaises(MetricError):
            dataset_stats([], [])


class TestFrameStudy(unittest.TestCase):
    """Tests for the frame-count study and masking ablation."""

    def setUp(self) -> None:
        self.cfg = quick_config(track=TrackConfig(samples_per_part=64, max_iters=40))

    def test_uniform_times(self) -> None:
        """Uniform spacing from 0 to 1; fewer than two frames is an error."""
        self.assertEqual(uniform_times(3), (0.0, 0.5, 1.0))
        with self.assertRaises(BangError):
            uniform_times(1)

    def test_study_assets(self) -> None:
        """Assets alternate between two and three parts."""
        assets = study_assets(2, seed=4)
        self.assertEqual([len(connected_components(a)) for a in assets], [2, 3])

    def test_frame_count_study(self) -> None:
        """More frames never lose wIoU beyond optimizer noise and always cost more time."""
        rows = frame_count_study(study_assets(2, seed=0), [2, 3, 5], self.cfg)
        self.assertEqual([row.frames for row in rows], [2, 3, 5])
        for row in rows:
            self.assertGreaterEqual(row.mean_wiou, 0.0)
            self.assertLessEqual(row.mean_wiou, 1.0)
            self.assertGreaterEqual(row.mean_sdf_objective, 0.0)
            self.assertEqual(row.to_document()["frames"], row.frames)
        self.assertGreaterEqual(rows[1].mean_wiou, rows[0].mean_wiou - 1e-3)
        self.assertGreater(rows[2].mean_seconds, rows[0].mean_seconds)

    def test_masking_ablation(self) -> None:
        """Each asset is tracked with and without masking."""
        rows = masking_ablation(study_assets(1, seed=1, overlap=True), self.cfg)
        self.assertEqual(len(rows), 1)
        self.assertEqual(rows[0].asset_id, "synthetic_1")
        document = rows[0].to_document()
        self.assertIn("masked_wiou", document)
        self.assertIn("unmasked_wiou", document)

    @patch("src.evaluation.framestudy.exploded_sequence")
    def test_masking_wins_on_buried_part(self, mock_sequence: MagicMock) -> None:
        """With a part mostly buried at t=0, masking scores higher wIoU and lower SDF objective."""
        mock_sequence.return_value = knob_sequence()
        cfg = quick_config(sdf_resolution=48, track=TrackConfig(samples_per_part=512, max_iters=400))
        rows = masking_ablation([make_icosphere(name="knob")], cfg)
        masked, unmasked = rows[0].masked, rows[0].unmasked
        self.assertGreater(masked.wiou, unmasked.wiou)
        self.assertLess(masked.sdf_objective, unmasked.sdf_objective)
        self.assertLess(unmasked.per_part_iou[1], masked.per_part_iou[1])


if __name__ == "__main__":
    unittest.main()
