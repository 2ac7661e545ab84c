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
Unit tests for sequence interpolation, normalization, rejection and filtering.
"""
import unittest
import numpy as np
from src.lib.config import FilterRules
from src.lib.errors import SequenceError
from src.mesh.components import connected_components
from src.mesh.geometry import make_box
from src.synth.filtering import filter_asset
from src.synth.sequence import (
    ExplodedSequence,
    Transform,
    frame_expansion_ratio,
    interpolate_sequence,
    min_pairwise_gap,
    normalize_sequence,
    reject_sequence,
)
from tests.mock_data import sphere_sequence, two_boxes


class TestSequence(unittest.TestCase):
    """Tests for 'interpolate_sequence' and the ExplodedSequence invariants."""

    def test_frames_follow_translations(self) -> None:
        """Part i sits at its assembled position plus t * v_i in every frame."""
        seq = sphere_sequence()
        self.assertEqual(len(seq), 3)
        assert seq.part_offsets is not None and seq.translations is not None
        offs = seq.part_offsets
        base = seq.assembled.vertices
        for t, frame in zip(seq.times, seq.frames):
            for i in range(seq.part_count):
                moved = frame.vertices[offs[i]:offs[i + 1]] - base[offs[i]:offs[i + 1]]
                np.testing.assert_allclose(moved, np.broadcast_to(t * seq.translations[i], moved.shape), atol=1e-12)

    def test_times_validation(self) -> None:
        """Times must start at 0, end at 1 and ascend strictly."""
        frame = make_box((0, 0, 0), (1, 1, 1))
        for times in ((0.0,), (0.1, 1.0), (0.0, 0.9), (0.0, 0.5, 0.5, 1.0)):
            with self.subTest(times=times):
                with self.assertRaises(SequenceError):
                    ExplodedSequence(times=times, frames=(frame,) * len(times), part_count=1)

    def test_translation_count_mismatch(self) -> None:
        """One vector per part is required."""
        parts = connected_components(two_boxes())
        with self.assertRaises(SequenceError):
            interpolate_sequence(parts, np.zeros((3, 3)), (0.0, 1.0))

    def test_normalize(self) -> None:
        """Union box is centered and scaled to extent 2; vectors scale along."""
        seq = sphere_sequence()
        normalized, transform = normalize_sequence(seq)
        box = normalized.union_aabb()
        np.testing.assert_allclose(box.center, 0.0, atol=1e-12)
        self.assertAlmostEqual(box.max_dimension, 2.0, places=12)
        assert seq.translations is not None and normalized.translations is not None
        np.testing.assert_allclose(normalized.translations, seq.translations * transform.scale)
        again, identity = normalize_sequence(normalized)
        self.assertTrue(identity.is_identity)
        self.assertIs(again, normalized)

    def test_transform_composition(self) -> None:
        """then() equals applying both transforms in order."""
        a = Transform(np.array([1.0, -2.0, 0.5]), 2.0)
        b = Transform(np.array([0.0, 3.0, -1.0]), 0.25)
        p = np.array([[0.3, 0.4, -0.7]])
        np.testing.assert_allclose(a.then(b).apply(p), b.apply(a.apply(p)))

    def test_reject_proximity_and_size(self) -> None:
        """Parts closer than min_gap or an oversized explosion are rejected with reasons."""
        seq = sphere_sequence()
        accepted = reject_sequence(seq, min_gap=0.01, max_expansion=4.0)
        self.assertTrue(accepted.accepted)
        close = reject_sequence(seq, min_gap=10.0, max_expansion=4.0)
        self.assertFalse(close.accepted)
        self.assertTrue(close.reasons[0].startswith("proximity"))
        large = reject_sequence(seq, min_gap=0.01, max_expansion=1.01)
        self.assertTrue(any(r.startswith("excessively large") for r in large.reasons))

    def test_expansion_ratio_and_gap(self) -> None:
        """Ratio of exploded to assembled extent; gap of a single box is infinite."""
        seq = sphere_sequence()
        ratio = frame_expansion_ratio(seq.assembled, seq.exploded)
        self.assertAlmostEqual(ratio, seq.exploded.aabb.max_dimension / seq.assembled.aabb.max_dimension)
        self.assertEqual(min_pairwise_gap([seq.assembled.aabb]), float("inf"))


class TestFilter(unittest.TestCase):
    """Tests for 'filter_asset'."""

    def test_bounds(self) -> None:
        """Every violated bound is listed."""
        mesh = two_boxes()
        ok = filter_asset(mesh, FilterRules(min_vertices=0))
        self.assertTrue(ok.accepted)
        self.assertEqual(ok.part_count, 2)
        bad = filter_asset(mesh, FilterRules(min_parts=3, max_parts=5, min_vertices=100))
        self.assertFalse(bad.accepted)
        self.assertEqual(len(bad.reasons), 2)


if __name__ == "__main__":
    unittest.main()
