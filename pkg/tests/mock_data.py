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
Mock data module for testing.

Small meshes, sequences and configurations shared by the test packages.
Resolutions and sample counts are kept low so the suites run in seconds.
"""

import numpy as np
from src.lib.config import FilterRules, PipelineConfig, ToyDims, TrackConfig
from src.lib.schema import AnnotationSchema
from src.mesh.components import connected_components
from src.mesh.geometry import TriangleMesh, make_box, make_icosphere, merge_meshes
from src.synth.sequence import ExplodedSequence, interpolate_sequence

TEST_SDF_RESOLUTION = 32

TWO_CUBES_OBJ = """# two unit cubes
o cubes
v 0 0 0
v 1 0 0
v 0 1 0
v 1 1 0
v 0 0 1
v 1 0 1
v 0 1 1
v 1 1 1
v 3 0 0
v 4 0 0
v 3 1 0
v 4 1 0
v 3 0 1
v 4 0 1
v 3 1 1
v 4 1 1
vn 0 0 1
f 1 3 4 2
f 5 6 8 7
f 1 2 6 5
f 3 7 8 4
f 1 5 7 3
f 2 4 8 6
f 9 11 12 10
f 13 14 16 15
f 9 10 14 13
f 11 15 16 12
f 9 13 15 11
f 10 12 16 14
"""

BAD_INDEX_OBJ = """v 0 0 0
v 1 0 0
v 0 1 0
f 1 2 7
"""

MOCK_ANNOTATION: AnnotationSchema = {
    "symmetry": {"x": True, "y": False, "z": True},
    "density_class": "medium",
    "complexity": 2.5,
}


def two_boxes(gap: float = 0.5) -> TriangleMesh:
    """Two unit boxes side by side along x, gap apart."""
    return merge_meshes(
        [make_box((0, 0, 0), (1, 1, 1), "left"), make_box((1 + gap, 0, 0), (2 + gap, 1, 1), "right")],
        name="two_boxes",
    )


def stacked_boxes() -> TriangleMesh:
    """Three boxes whose bounding boxes interpenetrate pairwise."""
    return merge_meshes(
        [
            make_box((0, 0, 0), (1, 1, 1), "a"),
            make_box((0.6, 0.2, 0.2), (1.4, 0.8, 0.8), "b"),
            make_box((0.2, 0.6, 0.1), (0.8, 1.5, 0.9), "c"),
        ],
        name="stacked",
    )


def sphere_pair(separation: float = 0.9) -> TriangleMesh:
    """Two icospheres of radius 0.4 whose centers sit separation apart along x."""
    return merge_meshes(
        [
            make_icosphere(0.4, 2, (0.0, 0.0, 0.0), "s0"),
            make_icosphere(0.4, 2, (separation, 0.0, 0.0), "s1"),
        ],
        name="sphere_pair",
    )


def sphere_sequence(
    translations: tuple[tuple[float, float, float], ...] = ((-0.6, 0.0, 0.0), (0.6, 0.3, 0.0)),
    times: tuple[float, ...] = (0.0, 0.5, 1.0),
) -> ExplodedSequence:
    """Sphere pair moved apart by known translations (part order of connected_components)."""
    parts = connected_components(sphere_pair())
    return interpolate_sequence(parts, np.asarray(translations, dtype=np.float64), times)


def nested_sequence(times: tuple[float, ...] = (0.0, 0.5, 1.0)) -> ExplodedSequence:
    """
    A radius 0.45 sphere assembled inside a radius 0.6 sphere, pulled out by
    (1, 0, 0) while the outer one stays put. Part 0 is the outer sphere.
    """
    parts = connected_components(
        merge_meshes(
            [make_icosphere(0.6, 3, name="outer"), make_icosphere(0.45, 2, name="inner")],
            name="nested",
        )
    )
    return interpolate_sequence(parts, np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]), times)


def knob_sequence(times: tuple[float, ...] = (0.0, 0.9, 1.0)) -> ExplodedSequence:
    """
    A radius 0.3 knob sunk into a radius 0.6 body with about three quarters of
    its surface buried at t=0, pulled out by (1.2, 0, 0). Part 0 is the body.
    """
    parts = connected_components(
        merge_meshes(
            [make_icosphere(0.6, 3, name="body"), make_icosphere(0.3, 2, (0.4, 0.0, 0.0), name="knob")],
            name="knob",
        )
    )
    return interpolate_sequence(parts, np.array([[0.0, 0.0, 0.0], [1.2, 0.0, 0.0]]), times)


def static_sequence(times: tuple[float, ...] = (0.0, 0.5, 1.0)) -> ExplodedSequence:
    """Already separated sphere pair that never moves."""
    parts = connected_components(sphere_pair(1.6))
    return interpolate_sequence(parts, np.zeros((len(parts), 3)), times)


def quick_config(**overrides: object) -> PipelineConfig:
    """Pipeline defaults loosened for tiny meshes and quick tracking."""
    base = PipelineConfig(
        sdf_resolution=TEST_SDF_RESOLUTION,
        filter=FilterRules(min_vertices=0),
        track=TrackConfig(samples_per_part=256, max_iters=300),
        toy=ToyDims(latent_tokens=8, channels=12, heads=2, dit_layers=1, adapter_layers=2, prompt_layers=1),
    )
    return base.model_copy(update=overrides) if overrides else base


def small_dims(**overrides: object) -> ToyDims:
    """Toy dimensions small enough for gradient checks."""
    values: dict[str, object] = {
        "latent_tokens": 8,
        "channels": 12,
        "heads": 2,
        "dit_layers": 1,
        "adapter_layers": 2,
        "prompt_layers": 1,
    }
    values.update(overrides)
    return ToyDims.model_validate(values)
