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
Unit tests for the synthesis pipeline, sequence directories and annotation clients.
"""
import tempfile
import unittest
from pathlib import Path
from unittest.mock import MagicMock, patch
import numpy as np
import requests
from src.lib.bang_constants import MANIFEST_NAME, MAX_RETRIES
from src.lib.config import AnnotationConfig
from src.lib.errors import AnnotationUnavailableError, SequenceError
from src.mesh.geometry import make_box, make_icosphere, merge_meshes
from src.synth.annotation import (
    DefaultAnnotationClient,
    RemoteAnnotationClient,
    annotate_asset,
    make_client,
)
from src.synth.manifest import load_sequence, read_manifest, write_sequence
from src.synth.pipeline import make_synthetic_assembly, synthesize_asset
from tests.mock_data import MOCK_ANNOTATION, quick_config, two_boxes


class TestSynthesizeAsset(unittest.TestCase):
    """Tests for 'synthesize_asset'."""

    def test_single_part_is_filtered(self) -> None:
        """A one-part mesh stops at the filter stage."""
        result = synthesize_asset(make_box((0, 0, 0), (1, 1, 1)), "cube", quick_config())
        self.assertFalse(result.accepted)
        self.assertEqual(result.stage, "filter")
        self.assertIsNone(result.sequence)
        self.assertIn("part count 1 < 2", result.reasons)

    def test_separated_assembly_is_accepted(self) -> None:
        """Two separated boxes need no motion and pass the checks."""
        cfg = quick_config()
        result = synthesize_asset(two_boxes(), "boxes", cfg, DefaultAnnotationClient())
        self.assertTrue(result.accepted)
        assert result.sequence is not None and result.manifest is not None
        self.assertEqual(len(result.sequence), len(cfg.times))
        manifest = result.manifest
        self.assertEqual(manifest["part_count"], 2)
        self.assertTrue(manifest["flags"]["converged"])
        self.assertFalse(manifest["flags"]["rejected"])
        self.assertAlmostEqual(manifest["expansion_ratio"], 1.0)
        self.assertIsNotNone(manifest["annotation"])
        box = result.sequence.union_aabb()
        self.assertAlmostEqual(box.max_dimension, 2.0, places=9)

    def test_synthetic_assembly(self) -> None:
        """Synthetic assemblies have the requested part count and are reproducible."""
        a = make_synthetic_assembly(5, 3)
        b = make_synthetic_assembly(5, 3)
        np.testing.assert_array_equal(a.vertices, b.vertices)
        self.assertEqual(a.triangle_count, 3 * make_icosphere(1.0, 2).triangle_count)


class TestSequenceDirectory(unittest.TestCase):
    """Tests for writing and loading sequence directories."""

    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)
        self.result = synthesize_asset(two_boxes(), "boxes", quick_config())
        assert self.result.sequence is not None
        self.seq = self.result.sequence

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def test_round_trip(self) -> None:
        """Frames and manifest reload with the same geometry and metadata."""
        out = write_sequence(self.seq, self.root / "boxes", self.result.manifest)
        loaded, manifest = load_sequence(out)
        assert manifest is not None and loaded.translations is not None
        self.assertEqual(manifest, read_manifest(out / MANIFEST_NAME))
        self.assertEqual(loaded.times, self.seq.times)
        self.assertEqual(loaded.part_count, 2)
        for a, b in zip(loaded.frames, self.seq.frames):
            np.testing.assert_allclose(a.vertices, b.vertices)

    def test_bare_directory_needs_times(self) -> None:
        """Without a manifest, explicit times are required and parts come from t=1."""
        out = write_sequence(self.seq, self.root / "bare")
        with self.assertRaises(SequenceError):
            load_sequence(out)
        loaded, manifest = load_sequence(out, self.seq.times)
        self.assertIsNone(manifest)
        self.assertIsNone(loaded.translations)
        self.assertEqual(loaded.part_count, 2)

    def test_missing_frame(self) -> None:
        """A gap in the frame numbering is reported."""
        out = write_sequence(self.seq, self.root / "gap", self.result.manifest)
        (out / "frame_1.obj").unlink()
        with self.assertRaises(SequenceError):
            load_sequence(out)

    def test_malformed_manifest(self) -> None:
        """A manifest failing validation raises SequenceError."""
        out = write_sequence(self.seq, self.root / "bad", self.result.manifest)
        (out / MANIFEST_NAME).write_text('{"asset_id": 3}', encoding="utf-8")
        with self.assertRaises(SequenceError):
            load_sequence(out)


class TestAnnotation(unittest.TestCase):
    """Tests for the annotation clients."""

    def test_default_client(self) -> None:
        """A box is mirror-symmetric on every axis and sparsely triangulated."""
        record = DefaultAnnotationClient().annotate(make_box((0, 0, 0), (1, 2, 3)))
        self.assertEqual(record["symmetry"], {"x": True, "y": True, "z": True})
        self.assertEqual(record["density_class"], "low")
        self.assertGreater(record["complexity"], 0.0)

    def test_default_client_l_bracket(self) -> None:
        """An L-shaped bracket is mirror-symmetric only through its thickness."""
        bracket = merge_meshes(
            [make_box((0, 0, 0), (2, 0.5, 1), "foot"), make_box((0, 0.5, 0), (0.5, 2, 1), "upright")],
            name="bracket",
        )
        record = DefaultAnnotationClient().annotate(bracket)
        self.assertEqual(record["symmetry"], {"x": False, "y": False, "z": True})

    @patch("src.synth.annotation.requests.post")
    def test_remote_client_success(self, mock_post: MagicMock) -> None:
        """A valid reply becomes the annotation record."""
        mock_post.return_value.json.return_value = MOCK_ANNOTATION
        record = RemoteAnnotationClient("http://annotator/api", 5).annotate(two_boxes())
        self.assertEqual(record, MOCK_ANNOTATION)
        payload = mock_post.call_args.kwargs["json"]
        self.assertEqual(payload["triangle_count"], 24)

    @patch("src.synth.annotation.time.sleep")
    @patch("src.synth.annotation.requests.post", side_effect=requests.exceptions.ConnectionError("down"))
    def test_remote_client_retries(self, mock_post: MagicMock, _mock_sleep: MagicMock) -> None:
        """The client retries MAX_RETRIES times, then the asset passes unannotated."""
        client = RemoteAnnotationClient("http://annotator/api", 5)
        with self.assertRaises(AnnotationUnavailableError):
            client.annotate(two_boxes())
        self.assertEqual(mock_post.call_count, MAX_RETRIES)
        outcome = annotate_asset(two_boxes(), client)
        self.assertIsNone(outcome.annotation)
        self.assertIsNotNone(outcome.warning)

    @patch("src.synth.annotation.time.sleep")
    @patch("src.synth.annotation.requests.post")
    def test_remote_client_rejects_bad_reply(self, mock_post: MagicMock, _mock_sleep: MagicMock) -> None:
        """A reply that fails validation counts as unavailable."""
        mock_post.return_value.json.return_value = {"symmetry": "yes"}
        with self.assertRaises(AnnotationUnavailableError):
            RemoteAnnotationClient("http://annotator/api", 5).annotate(two_boxes())

    def test_make_client(self) -> None:
        """The configuration selects the client."""
        self.assertIsNone(make_client(AnnotationConfig(client="none")))
        self.assertIsInstance(make_client(AnnotationConfig()), DefaultAnnotationClient)
        remote = make_client(AnnotationConfig(client="remote", endpoint="http://annotator/api"))
        self.assertIsInstance(remote, RemoteAnnotationClient)


if __name__ == "__main__":
    unittest.main()
