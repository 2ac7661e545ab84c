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
Asset annotation clients.

DefaultAnnotationClient derives the attribute record locally: reflection
symmetry from surface distances of mirrored surface samples, polygon density
class from the triangle count per unit of normalized surface area, and a
complexity score. RemoteAnnotationClient posts mesh statistics to a configured
endpoint and validates the reply; what the remote service does is out of scope.
"""

import logging
import math
import time
from dataclasses import dataclass
from logging import Logger
from typing import Optional, Protocol, final
import requests
from pydantic import BaseModel, ConfigDict
from src.lib.bang_constants import (
    DENSITY_CLASS_BOUNDS,
    MAX_RETRIES,
    RETRY_DELAY,
    SYMMETRY_TOLERANCE,
)
from src.lib.config import AnnotationConfig
from src.lib.errors import AnnotationUnavailableError
from src.lib.schema import AnnotationSchema, DensityClass, SymmetrySchema
from src.mesh.components import default_weld_eps, triangle_labels
from src.mesh.distance import point_triangle_distance
from src.mesh.geometry import TriangleMesh
from src.mesh.sampling import sample_surface_uniform

logger = logging.getLogger(__name__)

SYMMETRY_SAMPLES: int = 2048
SYMMETRY_SEED: int = 0


def set_logger(custom_logger: Logger) -> None:
    """
    Sets a custom logger to be used globally within the module.
    Args:
        custom_logger (logging.Logger): A configured logger instance to override the default python logger.
    """
    global logger
    logger = custom_logger


class AnnotationClient(Protocol):
    """Anything that turns a mesh into an attribute record."""

    def annotate(self, mesh: TriangleMesh) -> AnnotationSchema:
        """Return the attribute record or raise AnnotationUnavailableError."""


def reflection_symmetry(mesh: TriangleMesh, axis: int) -> bool:
    """
    True when mirroring the surface about the plane through the box center
    normal to axis maps it onto itself within SYMMETRY_TOLERANCE of the diagonal.
    """
    box = mesh.aabb
    samples = sample_surface_uniform(mesh, SYMMETRY_SAMPLES, SYMMETRY_SEED).points.copy()
    samples[:, axis] = 2.0 * box.center[axis] - samples[:, axis]
    dist, _ = point_triangle_distance(mesh, samples)
    return bool(dist.mean() <= SYMMETRY_TOLERANCE * box.diagonal)


def density_class(mesh: TriangleMesh) -> DensityClass:
    """Triangle count per unit surface area, with area measured in diagonal^2."""
    area = mesh.surface_area() / max(mesh.aabb.diagonal, 1e-300) ** 2
    density = mesh.triangle_count / max(area, 1e-300)
    low, high = DENSITY_CLASS_BOUNDS
    if density < low:
        return "low"
    if density < high:
        return "medium"
    return "high"


@final
class DefaultAnnotationClient:
    """Local heuristic annotation; needs no network."""

    def annotate(self, mesh: TriangleMesh) -> AnnotationSchema:
        symmetry: SymmetrySchema = {
            "x": reflection_symmetry(mesh, 0),
            "y": reflection_symmetry(mesh, 1),
            "z": reflection_symmetry(mesh, 2),
        }
        components, _ = triangle_labels(mesh, default_weld_eps(mesh))
        # parts times log-size of the surface
        complexity = components * math.log10(1.0 + mesh.triangle_count)
        return {
            "symmetry": symmetry,
            "density_class": density_class(mesh),
            "complexity": float(complexity),
        }


# pydantic BaseModel contains an explicit Any, which mypy dislikes
class ValidateAnnotation(BaseModel):  # type: ignore[explicit-any]
    """
    Pydantic validator used for validating replies of the remote annotation service
    """

    model_config = ConfigDict(extra="forbid")

    annotation: AnnotationSchema


@final
class RemoteAnnotationClient:
    """Posts mesh statistics to an annotation service."""

    def __init__(self, endpoint: str, timeout: int) -> None:
        self.endpoint = endpoint
        self.timeout = timeout

    def annotate(self, mesh: TriangleMesh) -> AnnotationSchema:
        box = mesh.aabb
        payload = {
            "name": mesh.name,
            "vertex_count": mesh.vertex_count,
            "triangle_count": mesh.triangle_count,
            "surface_area": mesh.surface_area(),
            "aabb": {"min": box.min.tolist(), "max": box.max.tolist()},
        }
        for attempt in range(1, MAX_RETRIES + 1):
            try:
                response = requests.post(self.endpoint, json=payload, timeout=self.timeout)
                response.raise_for_status()
                return ValidateAnnotation.model_validate({"annotation": response.json()}).annotation
            except (requests.exceptions.RequestException, ValueError) as e:
                # pydantic ValidationError is a ValueError
                logger.error("Attempt %d: annotation request to %s failed: %s", attempt, self.endpoint, e)
                if attempt == MAX_RETRIES:
                    logger.error("Max retries reached. Could not annotate %s", mesh.name)
                    raise AnnotationUnavailableError(
                        f"annotation service {self.endpoint} unavailable: {e}"
                    ) from e
                time.sleep(RETRY_DELAY)
        raise AnnotationUnavailableError(f"annotation service {self.endpoint} unavailable")


@final
@dataclass(frozen=True)
class AnnotationOutcome:
    """annotation is None when the client failed; warning then says why."""

    annotation: Optional[AnnotationSchema]
    warning: Optional[str] = None


def make_client(cfg: AnnotationConfig) -> Optional[AnnotationClient]:
    """Client selected by the configuration; None disables annotation."""
    if cfg.client == "none":
        return None
    if cfg.client == "remote" and cfg.endpoint:
        return RemoteAnnotationClient(cfg.endpoint, cfg.timeout)
    return DefaultAnnotationClient()


def annotate_asset(mesh: TriangleMesh, client: Optional[AnnotationClient]) -> AnnotationOutcome:
    """
    Annotate mesh with client. An unavailable client lets the asset pass
    through unannotated with a warning flag.
    """
    if client is None:
        return AnnotationOutcome(None)
    try:
        return AnnotationOutcome(client.annotate(mesh))
    except AnnotationUnavailableError as e:
        message = f"unannotated: {e}"
        logger.warning("%s: %s", mesh.name, message)
        return AnnotationOutcome(None, message)

