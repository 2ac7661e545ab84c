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
Fixed sinusoidal encodings: 3D positions, scalars (diffusion step, time,
parts count) and the rotary rotation used by the rotary time mode.
"""

import math
import numpy.typing as npt
import torch
from src.lib.errors import ToyShapeError
from src.toy.tokens import TokenBatch


def _as_points(points: npt.ArrayLike | torch.Tensor) -> torch.Tensor:
    if isinstance(points, torch.Tensor):
        pts = points.to(torch.float64)
    else:
        pts = torch.as_tensor(points, dtype=torch.float64)
    return pts.reshape(-1, 3)


def pos_emb(points: npt.ArrayLike | torch.Tensor, channels: int) -> TokenBatch:
    """
    Per-axis sinusoidal embedding of 3D points.

    Each axis gets channels / 6 frequencies pi * 2^k laid out as
    [sin(f_0 x) .. sin(f_F x), cos(f_0 x) .. cos(f_F x)], then y, then z.

    Raises:
        ToyShapeError: channels not a positive multiple of 6.
    """
    if channels <= 0 or channels % 6:
        raise ToyShapeError(f"pos_emb channels must be a positive multiple of 6, got {channels}")
    pts = _as_points(points)
    freqs = math.pi * 2.0 ** torch.arange(channels // 6, dtype=torch.float64)
    lanes = []
    for axis in range(3):
        phase = pts[:, axis, None] * freqs
        lanes.extend([torch.sin(phase), torch.cos(phase)])
    return TokenBatch(torch.cat(lanes, dim=-1).unsqueeze(0), kind="geometry-cond")


def axis_lanes(channels: int, axis: int) -> slice:
    """Channel range pos_emb uses for axis."""
    width = 2 * (channels // 6)
    return slice(axis * width, (axis + 1) * width)


def scalar_embedding(values: torch.Tensor, dim: int) -> torch.Tensor:
    """(N,) scalars -> (N, dim) sinusoidal embedding with geometric frequencies."""
    half = dim // 2
    freqs = torch.exp(
        -math.log(10000.0) * torch.arange(half, dtype=torch.float64) / max(half, 1)
    )
    args = values.to(torch.float64).reshape(-1, 1) * freqs
    emb = torch.cat([torch.sin(args), torch.cos(args)], dim=-1)
    if dim % 2:
        emb = torch.nn.functional.pad(emb, (0, 1))
    return emb


def rotate_pairs(x: torch.Tensor, angles: torch.Tensor) -> torch.Tensor:
    """
    Rotate consecutive channel pairs of x (..., N, D) by angles (N, D / 2).
    Zero angles return x unchanged.
    """
    even = x[..., 0::2]
    odd = x[..., 1::2]
    cos = torch.cos(angles)
    sin = torch.sin(angles)
    rotated = torch.stack([even * cos - odd * sin, even * sin + odd * cos], dim=-1)
    return rotated.flatten(-2)


def rotary_angles(times: torch.Tensor, head_dim: int, scale: float) -> torch.Tensor:
    """(N,) times -> (N, head_dim / 2) rotation angles."""
    half = head_dim // 2
    freqs = torch.exp(
        -math.log(10000.0) * torch.arange(half, dtype=torch.float64) / max(half, 1)
    )
    return times.to(torch.float64).reshape(-1, 1) * freqs * scale
