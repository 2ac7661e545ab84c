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
Exception hierarchy for bangkit. Every error carries the process exit code the
command-line harness reports when the error escapes a subcommand.
"""

from typing import Optional
from src.lib.bang_constants import EXIT_USAGE


class BangError(Exception):
    """Base class for all bangkit errors"""

    exit_code: int = EXIT_USAGE


class MeshLoadError(BangError):
    """
    A mesh file could not be read or parsed.
    line_no is set for parse errors and names the offending line (1-based).
    """

    def __init__(self, message: str, line_no: Optional[int] = None) -> None:
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class EmptyMeshError(BangError):
    """The mesh has no usable triangles"""


class InvalidMeshError(BangError):
    """The mesh violates a structural invariant"""


class ResolutionError(BangError):
    """SDF resolution outside the supported range"""


class GridBoundaryError(BangError):
    """A gradient was requested at a point not strictly inside the grid"""


class SequenceError(BangError):
    """Malformed exploded sequence, manifest or sequence directory"""


class ExplosionError(BangError):
    """The explosion optimizer cannot run on the given parts"""


class MetricError(BangError):
    """Metric inputs are inconsistent"""


class ToyShapeError(BangError):
    """Toy model inputs have incompatible shapes"""


class ConfigError(BangError):
    """Configuration file or flag value is invalid"""


class AnnotationUnavailableError(BangError):
    """The annotation client could not produce a record"""
