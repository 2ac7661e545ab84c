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
Token containers passed between the toy network stages.
"""

from dataclasses import dataclass, field
from typing import Literal, Optional, final
import torch
from src.lib.errors import ToyShapeError
from src.mesh.geometry import AABB, PointCloud

TokenKind = Literal["latent", "geometry-cond", "prompt"]


@final
@dataclass(frozen=True)
class TokenBatch:
    """
    data is (batch, tokens, channels). frame_ids, when set, holds the frame
    index of every token of a merged multi-frame sequence.
    """

    data: torch.Tensor
    kind: TokenKind = "latent"
    frame_ids: Optional[torch.Tensor] = None

    def __post_init__(self) -> None:
        if self.data.dim() != 3:
            raise ToyShapeError(f"token data must be (batch, tokens, channels), got {tuple(self.data.shape)}")
        if self.frame_ids is not None and self.frame_ids.shape[-1] != self.data.shape[1]:
            raise ToyShapeError("frame_ids must label every token")

    @property
    def tokens(self) -> int:
        """Tokens per batch entry."""
        return int(self.data.shape[1])

    @property
    def channels(self) -> int:
        """Channels per token."""
        return int(self.data.shape[2])

    def with_data(self, data: torch.Tensor) -> "TokenBatch":
        """Same kind and frame labels, new data."""
        return TokenBatch(data, self.kind, self.frame_ids)


@final
@dataclass(frozen=True)
class PromptSet:
    """Spatial prompts: part boxes, part region clouds and the all-parts flag."""

    bboxes: tuple[AABB, ...] = field(default=())
    region_clouds: tuple[PointCloud, ...] = field(default=())
    covers_all_parts: bool = False

    def __len__(self) -> int:
        return len(self.bboxes) + len(self.region_clouds)
