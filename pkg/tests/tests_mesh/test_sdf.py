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
Unit tests for SDF grid construction and queries in the 'sdf' module,
plus surface sampling and farthest-point selection.
"""
import tempfile
import unittest
from pathlib import Path
import numpy as np
from src.lib.errors import GridBoundaryError, ResolutionError
from src.mesh.geometry import make_box, make_icosphere
from src.mesh.sampling import fps_downsample, fps_indices, sample_surface_uniform
from src.mesh.sdf import (
    SdfGrid,
    build_sdf,
    export_sdf,
    import_sdf,
    query_sdf,
    query_sdf_gradient,
    query_sdf_value_and_gradient,
)
from tests.mock_data import TEST_SDF_RESOLUTION, sphere_pair


class TestSdf(unittest.TestCase):
    """Tests for the signed distance grid."""

    @classmethod
    def setUpClass(cls) -> None:
        cls.sphere = make_icosphere(0.5, 3)
        cls.grid = build_sdf(cls.sphere, TEST_SDF_RESOLUTION)

    def test_resolution_bounds(self) -> None:
        """Resolutions outside [16, 512] are rejected."""
        with self.assertRaises(ResolutionError):
            build_sdf(self.sphere, 8)
        with self.assertRaises(ResolutionError):
            build_sdf(self.sphere, 1024)

    def test_sign_convention(self) -> None:
        """Negative inside, positive outside, near zero on the surface."""
        values = query_sdf(self.grid, [[0.0, 0.0, 0.0], [0.58, 0.0, 0.0], [0.5, 0.0, 0.0]])
        self.assertLess(values[0], 0.0)
        self.assertGreater(values[1], 0.0)
        self.assertLess(abs(values[2]), 2.0 * self.grid.cell_size)
        self.assertAlmostEqual(float(values[0]), -0.5, delta=self.grid.cell_size)
        self.assertTrue(self.grid.watertight)

    def test_query_outside_grid(self) -> None:
        """Far points add their distance to the grid box."""
        far = np.array([[3.0, 0.0, 0.0]])
        value = float(query_sdf(self.grid, far)[0])
        self.assertAlmostEqual(value, 2.5, delta=0.05)

    def test_gradient_points_outward(self) -> None:
        """Gradient near the surface is close to the outward unit normal."""
        grad = query_sdf_gradient(self.grid, [[0.45, 0.0, 0.0], [0.0, -0.45, 0.0]])
        np.testing.assert_allclose(grad[0] / np.linalg.norm(grad[0]), [1, 0, 0], atol=0.15)
        np.testing.assert_allclose(grad[1] / np.linalg.norm(grad[1]), [0, -1, 0], atol=0.15)

    def test_gradient_boundary(self) -> None:
        """Gradient queries on or beyond the grid boundary raise."""
        with self.assertRaises(GridBoundaryError):
            query_sdf_gradient(self.grid, [self.grid.origin])

    def test_value_and_gradient_outside(self) -> None:
        """Outside the grid the gradient gains the unit away-from-box direction."""
        value, grad = query_sdf_value_and_gradient(self.grid, [[3.0, 0.0, 0.0], [0.2, 0.1, 0.0]])
        np.testing.assert_allclose(value, query_sdf(self.grid, [[3.0, 0.0, 0.0], [0.2, 0.1, 0.0]]))
        self.assertGreater(grad[0, 0], 0.9)
        np.testing.assert_allclose(grad[1], query_sdf_gradient(self.grid, [[0.2, 0.1, 0.0]])[0])

    def test_union_treats_buried_surface_as_interior(self) -> None:
        """With overlapping spheres the buried surface reads as inside."""
        mesh = sphere_pair(separation=0.5)
        union = build_sdf(mesh, TEST_SDF_RESOLUTION)
        raw = build_sdf(mesh, TEST_SDF_RESOLUTION, union=False)
        # point on the surface of sphere 0 inside sphere 1
        buried = [[0.4, 0.0, 0.0]]
        self.assertLess(float(query_sdf(union, buried)[0]), -union.cell_size)
        self.assertGreater(float(query_sdf(raw, buried)[0]), -raw.cell_size)

    def test_node_and_midpoint_values(self) -> None:
        """At a node the stored value comes back; halfway along x gives the mean of both nodes."""
        values = self.grid.values
        for i, j, k in ((3, 7, 11), (15, 16, 14), (0, 0, 0)):
            node = self.grid.node_position(i, j, k)
            self.assertAlmostEqual(float(query_sdf(self.grid, [node])[0]), float(values[i, j, k]), places=12)
            mid = node + np.array([0.5 * self.grid.cell_size, 0.0, 0.0])
            expected = 0.5 * (values[i, j, k] + values[i + 1, j, k])
            self.assertAlmostEqual(float(query_sdf(self.grid, [mid])[0]), float(expected), places=12)

    def test_gradient_matches_finite_differences(self) -> None:
        """Analytic gradient against central differences with h = cell_size / 16 at 1000 interior points."""
        rng = np.random.default_rng(11)
        cells = rng.integers(0, self.grid.resolution - 1, (1000, 3))
        # stay more than h away from cell faces so both stencil points share the cell
        frac = rng.uniform(0.125, 0.875, (1000, 3))
        points = self.grid.origin + self.grid.cell_size * (cells + frac)
        grad = query_sdf_gradient(self.grid, points)
        h = self.grid.cell_size / 16.0
        fd = np.empty_like(points)
        for axis in range(3):
            step = np.zeros(3)
            step[axis] = h
            fd[:, axis] = (query_sdf(self.grid, points + step) - query_sdf(self.grid, points - step)) / (2.0 * h)
        np.testing.assert_allclose(grad, fd, rtol=1e-6, atol=1e-9)

    def test_constant_region_has_zero_gradient(self) -> None:
        """A constant grid has zero gradient everywhere inside."""
        flat = SdfGrid(resolution=16, origin=np.zeros(3), cell_size=0.1, values=np.full((16,) * 3, 0.3))
        grad = query_sdf_gradient(flat, [[0.55, 0.72, 0.13], [1.2, 0.4, 0.9]])
        np.testing.assert_array_equal(grad, np.zeros((2, 3)))

    def test_export_import(self) -> None:
        """Exported grids reload at float32 precision."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "grid.sdf"
            export_sdf(self.grid, path)
            again = import_sdf(path)
        self.assertEqual(again.resolution, self.grid.resolution)
        np.testing.assert_allclose(again.values, self.grid.values, atol=1e-6)
        np.testing.assert_allclose(again.origin, self.grid.origin)


class TestAnalyticShapes(unittest.TestCase):
    """Grid values against analytic sphere and box distances."""

    @classmethod
    def setUpClass(cls) -> None:
        # odd resolution puts a node on the sphere center
        cls.sphere = build_sdf(make_icosphere(1.0, 4), 49)
        cls.cube = build_sdf(make_box((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5)), TEST_SDF_RESOLUTION)

    def test_unit_sphere(self) -> None:
        """-1 at the center, +1 at (2, 0, 0), unit radial gradient at (0.5, 0, 0)."""
        values = query_sdf(self.sphere, [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
        self.assertAlmostEqual(float(values[0]), -1.0, delta=0.05)
        self.assertAlmostEqual(float(values[1]), 1.0, delta=0.05)
        grad = query_sdf_gradient(self.sphere, [[0.5, 0.0, 0.0]])[0]
        self.assertAlmostEqual(float(np.linalg.norm(grad)), 1.0, delta=0.05)
        np.testing.assert_allclose(grad / np.linalg.norm(grad), [1.0, 0.0, 0.0], atol=0.1)

    def test_box_distance(self) -> None:
        """(0.75, 0, 0) is 0.25 from the cube [-0.5, 0.5]^3."""
        value = float(query_sdf(self.cube, [[0.75, 0.0, 0.0]])[0])
        self.assertAlmostEqual(value, 0.25, delta=1.5 * self.cube.cell_size)

    def test_sign_away_from_surface(self) -> None:
        """The sign matches the analytic box SDF wherever the surface is more than a cell away."""
        points = np.random.default_rng(5).uniform(-0.58, 0.58, (2000, 3))
        outside = np.maximum(np.abs(points) - 0.5, 0.0)
        analytic = np.linalg.norm(outside, axis=1) + np.minimum(np.max(np.abs(points) - 0.5, axis=1), 0.0)
        far = np.abs(analytic) > self.cube.cell_size
        values = query_sdf(self.cube, points[far])
        np.testing.assert_array_equal(np.sign(values), np.sign(analytic[far]))
        np.testing.assert_allclose(values, analytic[far], atol=1.5 * self.cube.cell_size)


class TestSampling(unittest.TestCase):
    """Tests for surface sampling and farthest-point selection."""

    def test_samples_lie_on_surface(self) -> None:
        """Samples of a box lie on its faces and are reproducible."""
        box = make_box((0, 0, 0), (1, 2, 3))
        a = sample_surface_uniform(box, 500, seed=7)
        b = sample_surface_uniform(box, 500, seed=7)
        np.testing.assert_array_equal(a.points, b.points)
        on_face = np.any(np.isclose(a.points, 0.0) | np.isclose(a.points, [1.0, 2.0, 3.0]), axis=1)
        self.assertTrue(np.all(on_face))

    def test_fps_starts_near_centroid(self) -> None:
        """The first pick is the point nearest the centroid, the second the farthest from it."""
        points = np.array([[0.0, 0, 0], [1.0, 0, 0], [2.0, 0, 0], [10.0, 0, 0]])
        indices, dist = fps_indices(points, 3)
        self.assertEqual(int(indices[0]), 2)
        self.assertEqual(int(indices[1]), 3)
        self.assertEqual(int(indices[2]), 0)
        self.assertEqual(float(dist[0]), 0.0)

    def test_face_counts_follow_area(self) -> None:
        """6000 samples of the unit cube put 1000 +- 3 sigma on every face."""
        points = sample_surface_uniform(make_box((0, 0, 0), (1, 1, 1)), 6000, seed=2).points
        sigma = np.sqrt(6000 * (1 / 6) * (5 / 6))
        for axis in range(3):
            for side in (0.0, 1.0):
                with self.subTest(axis=axis, side=side):
                    count = int(np.count_nonzero(np.isclose(points[:, axis], side)))
                    self.assertLessEqual(abs(count - 1000), 3 * sigma)

    def test_single_sample(self) -> None:
        """n=1 gives one point on the surface."""
        cloud = sample_surface_uniform(make_box((0, 0, 0), (1, 1, 1)), 1, seed=0)
        self.assertEqual(len(cloud), 1)
        self.assertTrue(np.any(np.isclose(cloud.points[0], 0.0) | np.isclose(cloud.points[0], 1.0)))

    def test_fps_factor_one_keeps_every_point(self) -> None:
        """factor=1 returns the same multiset of points."""
        cloud = sample_surface_uniform(make_icosphere(1.0, 1), 60, seed=4)
        kept = fps_downsample(cloud, 1)
        order = np.lexsort(cloud.points.T)
        kept_order = np.lexsort(kept.points.T)
        np.testing.assert_array_equal(kept.points[kept_order], cloud.points[order])

    def test_fps_square_and_center(self) -> None:
        """
        With the centroid start rule the center of a square is picked first, then
        the corners; keeping all five returns the corners after it.
        """
        points = np.array([[-1.0, -1, 0], [1.0, -1, 0], [-1.0, 1, 0], [1.0, 1, 0], [0.0, 0, 0]])
        indices, _ = fps_indices(points, 4)
        self.assertEqual(int(indices[0]), 4)
        self.assertEqual(len(set(indices.tolist())), 4)
        indices, dist = fps_indices(points, 5)
        self.assertEqual(sorted(indices[1:].tolist()), [0, 1, 2, 3])
        self.assertAlmostEqual(float(dist[1]), np.sqrt(2.0))

    def test_fps_min_distance_never_grows(self) -> None:
        """Pick distances and the min pairwise distance of the chosen prefix are non-increasing."""
        points = np.random.default_rng(9).uniform(-1.0, 1.0, (300, 3))
        indices, dist = fps_indices(points, 40)
        self.assertTrue(np.all(np.diff(dist[1:]) <= 1e-12))
        chosen = points[indices]
        pair = np.linalg.norm(chosen[:, None, :] - chosen[None, :, :], axis=2)
        np.fill_diagonal(pair, np.inf)
        prefix_min = [float(pair[:k, :k].min()) for k in range(2, 41)]
        self.assertTrue(np.all(np.diff(prefix_min) <= 1e-12))

    def test_fps_downsample_count(self) -> None:
        """Downsampling keeps ceil(N / factor) points."""
        cloud = sample_surface_uniform(make_icosphere(1.0, 2), 101, seed=0)
        self.assertEqual(len(fps_downsample(cloud, 10)), 11)

    def test_fps_adapter_cloud(self) -> None:
        """20480 points with factor 10 become 2048 distinct points of the cloud."""
        cloud = sample_surface_uniform(make_icosphere(1.0, 2), 20480, seed=1)
        kept = fps_downsample(cloud, 10)
        self.assertEqual(len(kept), 2048)
        self.assertEqual(np.unique(kept.points, axis=0).shape[0], 2048)


if __name__ == "__main__":
    unittest.main()
