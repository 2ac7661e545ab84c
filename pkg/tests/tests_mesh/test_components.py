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
Unit tests for connected-component decomposition and the geometry carriers.
"""
import unittest
import numpy as np
from src.lib.errors import InvalidMeshError
from src.mesh.components import connected_components, convex_hull_volume
from src.mesh.geometry import AABB, TriangleMesh, make_box, merge_meshes, translate_mesh
from tests.mock_data import stacked_boxes, two_boxes


class TestConnectedComponents(unittest.TestCase):
    """Tests for 'connected_components'."""

    def test_two_boxes(self) -> None:
        """Two disjoint boxes give two parts that partition the triangles."""
        parts = connected_components(two_boxes())
        self.assertEqual(len(parts), 2)
        ids = np.sort(np.concatenate([p.triangle_ids for p in parts.parts]))
        np.testing.assert_array_equal(ids, np.arange(24))
        for part in parts.parts:
            self.assertAlmostEqual(part.volume, 1.0, places=9)

    def test_order_by_volume_then_centroid(self) -> None:
        """Larger parts come first; equal volumes are ordered by centroid."""
        big = make_box((5, 0, 0), (7, 2, 2), "big")
        mesh = merge_meshes([two_boxes(), big])
        parts = connected_components(mesh)
        self.assertAlmostEqual(parts.parts[0].volume, 8.0, places=9)
        self.assertLess(parts.parts[1].centroid[0], parts.parts[2].centroid[0])

    def test_weld_eps_joins_touching_parts(self) -> None:
        """Vertices within weld_eps are shared, so touching boxes merge."""
        mesh = two_boxes(gap=1e-4)
        self.assertEqual(len(connected_components(mesh, weld_eps=1e-9)), 2)
        self.assertEqual(len(connected_components(mesh, weld_eps=1e-3)), 1)

    def test_translation_invariance(self) -> None:
        """Moving the whole mesh moves the parts without reordering them."""
        mesh = stacked_boxes()
        parts = connected_components(mesh)
        moved = connected_components(translate_mesh(mesh, (3.0, -1.0, 2.0)))
        for a, b in zip(parts.parts, moved.parts):
            np.testing.assert_array_equal(a.triangle_ids, b.triangle_ids)
            np.testing.assert_allclose(b.centroid - a.centroid, [3.0, -1.0, 2.0], atol=1e-12)

    def test_negative_weld_eps(self) -> None:
        """A negative welding distance is rejected."""
        with self.assertRaises(InvalidMeshError):
            connected_components(two_boxes(), weld_eps=-1.0)

    def test_flat_hull_volume(self) -> None:
        """Coplanar points have zero hull volume."""
        square = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], dtype=np.float64)
        self.assertEqual(convex_hull_volume(square), 0.0)


class TestGeometry(unittest.TestCase):
    """Tests for boxes and meshes."""

    def test_aabb_gap_and_iou(self) -> None:
        """Gap is positive when apart, negative when overlapping; IoU of identical boxes is 1."""
        a = AABB(np.zeros(3), np.ones(3))
        b = a.translated((1.5, 0.0, 0.0))
        c = a.translated((0.5, 0.0, 0.0))
        self.assertAlmostEqual(a.gap(b), 0.5)
        self.assertAlmostEqual(a.gap(c), -0.5)
        self.assertAlmostEqual(a.iou(a), 1.0)
        self.assertAlmostEqual(a.iou(c), 0.5 / 1.5)
        self.assertEqual(a.iou(b), 0.0)

    def test_inverted_box(self) -> None:
        """min above max is rejected."""
        with self.assertRaises(InvalidMeshError):
            AABB(np.ones(3), np.zeros(3))

    def test_mesh_validation(self) -> None:
        """Out-of-range triangle indices are rejected."""
        with self.assertRaises(InvalidMeshError):
            TriangleMesh(np.zeros((3, 3)), np.array([[0, 1, 3]]))

    def test_arrays_are_read_only(self) -> None:
        """Mesh arrays cannot be modified after construction."""
        mesh = make_box((0, 0, 0), (1, 1, 1))
        with self.assertRaises(ValueError):
            mesh.vertices[0, 0] = 5.0


if __name__ == "__main__":
    unittest.main()
