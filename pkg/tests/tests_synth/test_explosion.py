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
Unit tests for the explosion-vector optimizer in the 'explosion' module.
"""
import unittest
import numpy as np
from src.lib.config import ExplosionConfig
from src.lib.errors import ExplosionError
from src.mesh.components import connected_components
from src.mesh.geometry import AABB, make_box, merge_meshes
from src.synth.explosion import optimize_explosion, total_overlap_volume
from tests.mock_data import stacked_boxes, two_boxes


class TestExplosion(unittest.TestCase):
    """Tests for 'optimize_explosion'."""

    def setUp(self) -> None:
        self.cfg = ExplosionConfig(seed=3)
        self.parts = connected_components(stacked_boxes())

    def test_overlap_volume(self) -> None:
        """Pairwise intersection volumes are summed, optionally after translation."""
        a = AABB(np.zeros(3), np.ones(3))
        b = a.translated((0.5, 0.0, 0.0))
        self.assertAlmostEqual(total_overlap_volume([a, b]), 0.5)
        self.assertEqual(total_overlap_volume([a, b], np.array([[0, 0, 0], [1, 0, 0]])), 0.0)
        self.assertEqual(total_overlap_volume([a]), 0.0)

    def test_separated_assembly_stays_put(self) -> None:
        """Boxes that already clear the threshold get zero vectors."""
        result = optimize_explosion(connected_components(two_boxes()), self.cfg)
        self.assertTrue(result.converged)
        self.assertEqual(result.iterations, 0)
        np.testing.assert_array_equal(result.translations, np.zeros((2, 3)))

    def test_interpenetrating_boxes_separate(self) -> None:
        """Overlapping boxes are pushed apart below the threshold."""
        result = optimize_explosion(self.parts, self.cfg)
        scene = self.parts.scene_aabb
        self.assertTrue(result.converged)
        self.assertLessEqual(result.final_overlap, self.cfg.overlap_threshold * scene.volume * (1 + 1e-9))
        self.assertAlmostEqual(
            result.final_overlap, total_overlap_volume(self.parts.aabbs, result.translations), places=9
        )

    def test_overlap_history_never_increases(self) -> None:
        """Every accepted iterate keeps or lowers the exact overlap."""
        history = optimize_explosion(self.parts, self.cfg).overlap_history
        self.assertGreater(len(history), 1)
        self.assertTrue(all(b <= a * (1 + 1e-12) for a, b in zip(history, history[1:])))

    def test_translation_constraints(self) -> None:
        """Vectors stay within the translation bound and keep the weighted centroid."""
        result = optimize_explosion(self.parts, self.cfg)
        diag = self.parts.scene_aabb.diagonal
        norms = np.linalg.norm(result.translations, axis=1)
        self.assertTrue(np.all(norms <= self.cfg.max_translation * diag * (1 + 1e-9)))
        weights = self.parts.volumes / self.parts.volumes.sum()
        np.testing.assert_allclose((weights[:, None] * result.translations).sum(axis=0), 0.0, atol=1e-9)

    def test_two_cubes_stay_on_axis(self) -> None:
        """Cubes overlapping along x are pushed apart along x only."""
        pair = merge_meshes([make_box((0, 0, 0), (1, 1, 1)), make_box((0.5, 0, 0), (1.5, 1, 1))])
        result = optimize_explosion(connected_components(pair), self.cfg)
        self.assertTrue(result.converged)
        np.testing.assert_allclose(result.translations[:, 1:], 0.0, atol=1e-6)
        self.assertLess(result.translations[0, 0] * result.translations[1, 0], 0.0)

    def test_nested_cube_moves_radially(self) -> None:
        """A small cube inside a large one leaves close to its radial direction."""
        nested = merge_meshes([make_box((0, 0, 0), (2, 2, 2)), make_box((1.1, 0.9, 0.8), (1.5, 1.3, 1.2))])
        parts = connected_components(nested)
        result = optimize_explosion(parts, self.cfg)
        self.assertTrue(result.converged)
        small = int(np.argmin(parts.volumes))
        large = 1 - small
        radial = parts.aabbs[small].center - parts.aabbs[large].center
        moved = result.translations[small] - result.translations[large]
        cosine = float(moved @ radial / (np.linalg.norm(moved) * np.linalg.norm(radial)))
        self.assertGreater(cosine, np.cos(np.radians(15.0)))
        self.assertAlmostEqual(total_overlap_volume(parts.aabbs, result.translations), result.final_overlap, places=9)

    def test_deterministic(self) -> None:
        """Equal inputs and seed give bitwise equal vectors."""
        a = optimize_explosion(self.parts, self.cfg)
        b = optimize_explosion(self.parts, self.cfg)
        np.testing.assert_array_equal(a.translations, b.translations)

    def test_single_part(self) -> None:
        """One part cannot be exploded."""
        with self.assertRaises(ExplosionError):
            optimize_explosion(connected_components(make_box((0, 0, 0), (1, 1, 1))), self.cfg)

    def test_iteration_cap(self) -> None:
        """Hitting max_iters leaves converged False with the best iterate."""
        nested = merge_meshes([make_box((0, 0, 0), (1, 1, 1)), make_box((0.25, 0.25, 0.25), (0.75, 0.75, 0.75))])
        cfg = ExplosionConfig(seed=3, max_iters=1, step_size=1e-4)
        result = optimize_explosion(connected_components(nested), cfg)
        self.assertFalse(result.converged)
        self.assertLessEqual(result.iterations, 1)


if __name__ == "__main__":
    unittest.main()
