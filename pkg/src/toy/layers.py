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
Attention and transformer blocks of the toy network.

Every block is pre-norm. Attention normalizes queries and keys per head.
Injection branches (adapter cross-attention, prompt exchange) are built with
zero output projections so the base path is reproduced exactly until they are
given weights.
"""

import math
from typing import Optional, Sequence
import torch
from einops import rearrange, repeat
from torch import nn
from src.lib.bang_constants import FF_EXPANSION, TIME_EMB_SCALE, TimeMode
from src.lib.errors import ToyShapeError
from src.toy.embeddings import rotary_angles, rotate_pairs, scalar_embedding
from src.toy.tokens import TokenBatch


class Attention(nn.Module):
    """
    Multi-head attention with per-head query/key normalization.

    q_times / k_times, when given, add the per-token time embedding to queries
    and keys only (or rotate them in rotary mode); values never see time.
    time_gain scales the time embedding; 0 disables it.
    """

    def __init__(self, channels: int, heads: int, zero_out: bool = False) -> None:
        super().__init__()
        if channels % heads:
            raise ToyShapeError(f"channels {channels} not divisible by heads {heads}")
        self.heads = heads
        self.head_dim = channels // heads
        self.q = nn.Linear(channels, channels)
        self.k = nn.Linear(channels, channels)
        self.v = nn.Linear(channels, channels)
        self.out = nn.Linear(channels, channels)
        self.q_norm = nn.LayerNorm(self.head_dim)
        self.k_norm = nn.LayerNorm(self.head_dim)
        self.zero_out = zero_out
        self.time_gain = 1.0

    def _with_time(self, x: torch.Tensor, times: torch.Tensor, mode: TimeMode) -> torch.Tensor:
        if mode is TimeMode.ROTARY:
            return rotate_pairs(x, rotary_angles(times, self.head_dim, TIME_EMB_SCALE * self.time_gain))
        return x + self.time_gain * scalar_embedding(times * TIME_EMB_SCALE, self.head_dim)

    def _qkv(
        self,
        x: torch.Tensor,
        context: Optional[torch.Tensor],
        q_times: Optional[torch.Tensor],
        k_times: Optional[torch.Tensor],
        mode: TimeMode,
    ) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        ctx = x if context is None else context
        if ctx.shape[-1] != x.shape[-1]:
            raise ToyShapeError(f"context has {ctx.shape[-1]} channels, queries {x.shape[-1]}")
        q = self.q_norm(rearrange(self.q(x), "b n (h d) -> b h n d", h=self.heads))
        k = self.k_norm(rearrange(self.k(ctx), "b n (h d) -> b h n d", h=self.heads))
        v = rearrange(self.v(ctx), "b n (h d) -> b h n d", h=self.heads)
        if q_times is not None:
            q = self._with_time(q, q_times, mode)
        if k_times is not None:
            k = self._with_time(k, k_times, mode)
        return q, k, v

    def weights(
        self,
        x: torch.Tensor,
        context: Optional[torch.Tensor] = None,
        q_times: Optional[torch.Tensor] = None,
        k_times: Optional[torch.Tensor] = None,
        mode: TimeMode = TimeMode.ADDITIVE,
    ) -> torch.Tensor:
        """Softmax attention matrix (batch, heads, queries, keys)."""
        q, k, _ = self._qkv(x, context, q_times, k_times, mode)
        return torch.softmax(q @ k.transpose(-1, -2) / math.sqrt(self.head_dim), dim=-1)

    def forward(
        self,
        x: torch.Tensor,
        context: Optional[torch.Tensor] = None,
        q_times: Optional[torch.Tensor] = None,
        k_times: Optional[torch.Tensor] = None,
        mode: TimeMode = TimeMode.ADDITIVE,
    ) -> torch.Tensor:
        q, k, v = self._qkv(x, context, q_times, k_times, mode)
        w = torch.softmax(q @ k.transpose(-1, -2) / math.sqrt(self.head_dim), dim=-1)
        return self.out(rearrange(w @ v, "b h n d -> b n (h d)"))


class FeedForward(nn.Sequential):
    """Linear -> GELU -> Linear with hidden width FF_EXPANSION * channels."""

    def __init__(self, channels: int) -> None:
        super().__init__(
            nn.Linear(channels, FF_EXPANSION * channels),
            nn.GELU(),
            nn.Linear(FF_EXPANSION * channels, channels),
        )


class SelfBlock(nn.Module):
    """Self-attention and feed-forward, both residual."""

    def __init__(self, channels: int, heads: int) -> None:
        super().__init__()
        self.norm1 = nn.LayerNorm(channels)
        self.attn = Attention(channels, heads)
        self.norm2 = nn.LayerNorm(channels)
        self.ff = FeedForward(channels)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + self.attn(self.norm1(x))
        return x + self.ff(self.norm2(x))


class AdaLNBlock(nn.Module):
    """
    Self-attention block whose layer norms are scaled and shifted by a
    conditioning vector. With modulation weights at zero the block ignores
    the condition.
    """

    def __init__(self, channels: int, heads: int) -> None:
        super().__init__()
        self.norm1 = nn.LayerNorm(channels, elementwise_affine=False)
        self.attn = Attention(channels, heads)
        self.norm2 = nn.LayerNorm(channels, elementwise_affine=False)
        self.ff = FeedForward(channels)
        self.modulation = nn.Linear(channels, 4 * channels)

    def forward(self, x: torch.Tensor, cond: torch.Tensor) -> torch.Tensor:
        scale1, shift1, scale2, shift2 = self.modulation(cond).unsqueeze(1).chunk(4, dim=-1)
        x = x + self.attn(self.norm1(x) * (1.0 + scale1) + shift1)
        return x + self.ff(self.norm2(x) * (1.0 + scale2) + shift2)


def merge_frames(frames: Sequence[TokenBatch]) -> TokenBatch:
    """
    Merge T frames of (1, L, C) tokens into one (1, T * L, C) sequence whose
    frame_ids label every token with its frame.

    Raises:
        ToyShapeError: no frames, or frames of different shapes.
    """
    if not frames:
        raise ToyShapeError("no frames to merge")
    shape = tuple(frames[0].data.shape)
    for frame in frames:
        if tuple(frame.data.shape) != shape or shape[0] != 1:
            raise ToyShapeError(f"frame shapes differ or batch != 1: {tuple(frame.data.shape)} vs {shape}")
    stacked = torch.cat([frame.data for frame in frames], dim=0)
    merged = rearrange(stacked, "t l c -> 1 (t l) c")
    frame_ids = repeat(torch.arange(len(frames)), "t -> (t l)", l=shape[1])
    return TokenBatch(merged, frames[0].kind, frame_ids)


def split_frames(merged: TokenBatch) -> list[TokenBatch]:
    """Inverse of merge_frames."""
    if merged.frame_ids is None:
        raise ToyShapeError("merged tokens carry no frame_ids")
    count = int(merged.frame_ids.max().item()) + 1
    frames = rearrange(merged.data, "1 (t l) c -> t l c", t=count)
    return [TokenBatch(frames[i:i + 1], merged.kind) for i in range(count)]


def temporal_attention(
    attn: Attention,
    frames: Sequence[TokenBatch],
    times: Sequence[float] | torch.Tensor,
    mode: TimeMode = TimeMode.ADDITIVE,
) -> list[TokenBatch]:
    """
    Self-attention across all tokens of all frames, with each token's frame
    time combined into its query and key.

    Raises:
        ToyShapeError: frame and time counts differ, or frame shapes differ.
    """
    t = torch.as_tensor(times, dtype=torch.float64).reshape(-1)
    if t.shape[0] != len(frames):
        raise ToyShapeError(f"{t.shape[0]} times for {len(frames)} frames")
    merged = merge_frames(frames)
    assert merged.frame_ids is not None
    token_times = t[merged.frame_ids]
    out = attn(merged.data, q_times=token_times, k_times=token_times, mode=mode)
    return split_frames(merged.with_data(out))


class DiTBlock(nn.Module):
    """
    Denoiser block: self-attention, cross-attention to the geometry condition
    with a parallel adapter cross-attention added to its output, temporal
    attention across frames, feed-forward.
    """

    def __init__(self, channels: int, heads: int) -> None:
        super().__init__()
        self.norm1 = nn.LayerNorm(channels)
        self.self_attn = Attention(channels, heads)
        self.norm2 = nn.LayerNorm(channels)
        self.cross_attn = Attention(channels, heads)
        self.inject = Attention(channels, heads, zero_out=True)
        self.norm_t = nn.LayerNorm(channels)
        self.temporal = Attention(channels, heads)
        self.norm3 = nn.LayerNorm(channels)
        self.ff = FeedForward(channels)

    def cross(
        self, h: torch.Tensor, geometry: torch.Tensor, g_explode: Optional[torch.Tensor]
    ) -> torch.Tensor:
        """Base cross-attention output plus the adapter branch when g_explode is given."""
        base = self.cross_attn(h, context=geometry.expand(h.shape[0], -1, -1))
        if g_explode is None:
            return base
        return base + self.inject(h, context=g_explode.expand(h.shape[0], -1, -1))

    def forward(
        self,
        x: torch.Tensor,
        geometry: torch.Tensor,
        g_explode: Optional[torch.Tensor],
        times: torch.Tensor,
        mode: TimeMode,
    ) -> torch.Tensor:
        x = x + self.self_attn(self.norm1(x))
        x = x + self.cross(self.norm2(x), geometry, g_explode)
        h = self.norm_t(x)
        frames = [TokenBatch(h[i:i + 1]) for i in range(h.shape[0])]
        moved = temporal_attention(self.temporal, frames, times, mode)
        x = x + torch.cat([frame.data for frame in moved], dim=0)
        return x + self.ff(self.norm3(x))


class PromptExchangeBlock(nn.Module):
    """
    One prompt transformer layer interleaved with the geometry stream: the
    prompt stream reads the geometry tokens, and the geometry stream reads the
    prompt tokens through a zero-initialized exchange attention.
    """

    def __init__(self, channels: int, heads: int) -> None:
        super().__init__()
        self.block = SelfBlock(channels, heads)
        self.norm_p = nn.LayerNorm(channels)
        self.read_geometry = Attention(channels, heads)
        self.norm_g = nn.LayerNorm(channels)
        self.exchange = Attention(channels, heads, zero_out=True)

    def forward(self, g: torch.Tensor, p: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        p = self.block(p)
        p = p + self.read_geometry(self.norm_p(p), context=g)
        g = g + self.exchange(self.norm_g(g), context=p)
        return g, p
