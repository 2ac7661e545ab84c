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
Rule-based asset filtering: component-count and vertex-count bounds.
"""

from dataclasses import dataclass, field
from typing import Optional, final
from src.lib.config import FilterRules
from src.mesh.components import connected_components
from src.mesh.geometry import PartSet, TriangleMesh


@final
@dataclass(frozen=True)
class FilterDecision:
    """Accept/reject outcome; reasons lists every violated rule."""

    accepted: bool
    part_count: int
    vertex_count: int
    reasons: tuple[str, ...] = field(default=())


def filter_asset(
    mesh: TriangleMesh, rules: FilterRules, parts: Optional[PartSet] = None
) -> FilterDecision:
    """
    Check mesh against the filter rules.

    Args:
        mesh (TriangleMesh): candidate asset.
        rules (FilterRules): bounds to enforce.
        parts (PartSet, optional): precomputed decomposition of mesh.
    """
    part_count = len(parts if parts is not None else connected_components(mesh))
    vertices = mesh.vertex_count
    reasons: list[str] = []
    if part_count < rules.min_parts:
        reasons.append(f"part count {part_count} < {rules.min_parts}")
    if part_count > rules.max_parts:
        reasons.append(f"part count {part_count} > {rules.max_parts}")
    if vertices < rules.min_vertices:
        reasons.append(f"vertex count {vertices} < {rules.min_vertices}")
    if vertices > rules.max_vertices:
        reasons.append(f"vertex count {vertices} > {rules.max_vertices}")
    return FilterDecision(
        accepted=not reasons, part_count=part_count, vertex_count=vertices, reasons=tuple(reasons)
    )
