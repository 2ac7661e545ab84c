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
Toy-scale exploded-dynamics network with random weights.

ToyModel holds every weight: the point-cloud encoder and SDF decoder, the
exploded-view adapter, the prompt encoder with its exchange layers and the
denoiser blocks. The module-level functions are the operations the invariant
suite exercises; they are pure functions of (model, inputs).
"""

import logging
import math
from logging import Logger
from typing import Sequence
import numpy.typing as npt
import torch
from torch import nn
from src.lib.bang_constants import (
    ADAPTER_DOWNSAMPLE_FACTOR,
    MAX_PARTS_EMBEDDING,
    MAX_PROMPT_SLOTS,
    POS_EMB_CHANNELS,
    TIME_EMB_SCALE,
    TOY_INIT_STD,
)
from src.lib.config import ToyDims
from src.lib.errors import ToyShapeError
from src.mesh.geometry import PointCloud
from src.mesh.sampling import fps_indices
from src.toy.embeddings import pos_emb, scalar_embedding
from src.toy.layers import (
    AdaLNBlock,
    Attention,
    DiTBlock,
    PromptExchangeBlock,
    SelfBlock,
)
from src.toy.tokens import PromptSet, TokenBatch

logger = logging.getLogger(__name__)


def set_logger(custom_logger: Logger) -> None:
    """
    Sets a custom logger to be used globally within the module.
    Args:
        custom_logger (logging.Logger): A configured logger instance to override the default python logger.
    """
    global logger
    logger = custom_logger


class ToyModel(nn.Module):
    """All weights of the toy network, float64, seeded Gaussian init."""

    def __init__(self, dims: ToyDims, seed: int = 0) -> None:
        super().__init__()
        c = dims.channels
        self.dims = dims
        self.seed = seed
        self.point_proj = nn.Linear(POS_EMB_CHANNELS, c)
        self.encoder_attn = Attention(c, dims.heads)
        self.decoder_blocks = nn.ModuleList(SelfBlock(c, dims.heads) for _ in range(dims.dit_layers))
        self.decoder_attn = Attention(c, dims.heads)
        self.decoder_out = nn.Linear(c, 1)

        self.cond_mlp = nn.Sequential(nn.Linear(2 * c, c), nn.SiLU(), nn.Linear(c, c))
        self.adapter_blocks = nn.ModuleList(AdaLNBlock(c, dims.heads) for _ in range(dims.adapter_layers))

        self.slot_embedding = nn.Parameter(torch.zeros(MAX_PROMPT_SLOTS, c))
        self.flag_embedding = nn.Parameter(torch.zeros(2, c))
        self.prompt_blocks = nn.ModuleList(
            PromptExchangeBlock(c, dims.heads) for _ in range(dims.prompt_layers)
        )

        self.step_mlp = nn.Sequential(nn.Linear(c, c), nn.SiLU(), nn.Linear(c, c))
        self.dit_blocks = nn.ModuleList(DiTBlock(c, dims.heads) for _ in range(dims.dit_layers))
        self.dit_norm = nn.LayerNorm(c)
        self.dit_out = nn.Linear(c, c)

        self.double()
        self.reset_parameters(seed)

    def reset_parameters(self, seed: int) -> None:
        """Linear weights and embeddings ~ N(0, TOY_INIT_STD); biases 0; branches zeroed."""
        generator = torch.Generator().manual_seed(seed)
        with torch.no_grad():
            for name, param in self.named_parameters():
                if "norm" in name:
                    continue
                if name.endswith("bias"):
                    param.zero_()
                else:
                    param.copy_(torch.randn(param.shape, generator=generator, dtype=torch.float64) * TOY_INIT_STD)
            for module in self.modules():
                if isinstance(module, Attention) and module.zero_out:
                    module.out.weight.zero_()
                    module.out.bias.zero_()

    def randomize_branches(self, seed: int) -> None:
        """Give the zero-initialized injection and exchange branches random weights."""
        generator = torch.Generator().manual_seed(seed)
        with torch.no_grad():
            for module in self.modules():
                if isinstance(module, Attention) and module.zero_out:
                    for param in (module.out.weight, module.out.bias):
                        param.copy_(torch.randn(param.shape, generator=generator, dtype=torch.float64) * TOY_INIT_STD)

    def zero_modulation(self) -> None:
        """Zero every adaLN modulation layer of the adapter."""
        with torch.no_grad():
            for block in self.adapter_blocks:
                assert isinstance(block, AdaLNBlock)
                block.modulation.weight.zero_()
                block.modulation.bias.zero_()

    def embed_points(self, points: npt.ArrayLike | torch.Tensor) -> torch.Tensor:
        """(1, N, C) projected positional embedding."""
        return self.point_proj(pos_emb(points, POS_EMB_CHANNELS).data)


def build_toy_model(dims: ToyDims, seed: int = 0) -> ToyModel:
    """Toy model in evaluation mode."""
    model = ToyModel(dims, seed)
    model.eval()
    logger.debug(
        "Built toy model L=%d C=%d heads=%d with %d parameters",
        dims.latent_tokens, dims.channels, dims.heads,
        sum(p.numel() for p in model.parameters()),
    )
    return model


def encode_geometry(model: ToyModel, cloud: PointCloud, factor: int) -> TokenBatch:
    """
    Cross-attention from farthest-point-sampled queries to the whole cloud.
    Returns ceil(|cloud| / factor) tokens.

    Raises:
        ToyShapeError: fewer points than factor.
    """
    if factor < 1 or len(cloud) < factor:
        raise ToyShapeError(f"cloud of {len(cloud)} points too small for factor {factor}")
    keep = math.ceil(len(cloud) / factor)
    indices, _ = fps_indices(cloud.points, keep)
    queries = model.embed_points(cloud.points[indices])
    keys = model.embed_points(cloud.points)
    return TokenBatch(model.encoder_attn(queries, context=keys), kind="geometry-cond")


def decode_queries(
    model: ToyModel, latent: TokenBatch, queries: npt.ArrayLike | torch.Tensor
) -> torch.Tensor:
    """
    SDF values at queries: self-attention stack over the latent, then
    cross-attention from the query embeddings. One scalar per query.
    """
    z = latent.data
    for block in model.decoder_blocks:
        z = block(z)
    q = model.embed_points(queries)
    return model.decoder_out(model.decoder_attn(q, context=z)).reshape(-1)


def condition_vector(model: ToyModel, t: float, parts_count: int) -> torch.Tensor:
    """(1, C) embedding of explosion time and expected parts count."""
    c = model.dims.channels
    values = torch.tensor([t * TIME_EMB_SCALE], dtype=torch.float64)
    parts = torch.tensor([float(min(parts_count, MAX_PARTS_EMBEDDING))], dtype=torch.float64)
    return model.cond_mlp(torch.cat([scalar_embedding(values, c), scalar_embedding(parts, c)], dim=-1))


def adapter_condition(model: ToyModel, g: TokenBatch, t: float, parts_count: int) -> TokenBatch:
    """
    G_explode: the geometry tokens passed through the adaLN-modulated adapter
    blocks conditioned on t and parts_count. Token shape is preserved.

    Raises:
        ToyShapeError: t outside [0, 1] or parts_count < 1.
    """
    if not 0.0 <= t <= 1.0:
        raise ToyShapeError(f"t must lie in [0, 1], got {t}")
    if parts_count < 1:
        raise ToyShapeError(f"parts_count must be >= 1, got {parts_count}")
    cond = condition_vector(model, t, parts_count)
    x = g.data
    for block in model.adapter_blocks:
        x = block(x, cond)
    return TokenBatch(x, kind="geometry-cond")


def adapter_inject(
    model: ToyModel, block_input: TokenBatch, geometry: TokenBatch, g_explode: TokenBatch, layer: int = 0
) -> TokenBatch:
    """
    Cross-attention output of DiT block layer: base cross-attention to the
    geometry plus the parallel adapter cross-attention to g_explode.

    Raises:
        ToyShapeError: channel counts differ.
    """
    if not block_input.channels == geometry.channels == g_explode.channels:
        raise ToyShapeError("block input, geometry and g_explode channel counts differ")
    block = model.dit_blocks[layer]
    assert isinstance(block, DiTBlock)
    return block_input.with_data(block.cross(block_input.data, geometry.data, g_explode.data))


def prompt_tokens(model: ToyModel, prompts: PromptSet) -> TokenBatch:
    """
    Two corner tokens per box, encoder tokens per region cloud, each prompt
    tagged with its slot embedding, then one all-parts flag token.

    Raises:
        ToyShapeError: empty prompt set or more prompts than slots.
    """
    if len(prompts) == 0:
        raise ToyShapeError("prompt set is empty")
    if len(prompts) > MAX_PROMPT_SLOTS:
        raise ToyShapeError(f"{len(prompts)} prompts exceed {MAX_PROMPT_SLOTS} slots")
    blocks: list[torch.Tensor] = []
    for box in prompts.bboxes:
        corners = torch.tensor([box.min.tolist(), box.max.tolist()], dtype=torch.float64)
        blocks.append(model.embed_points(corners))
    for cloud in prompts.region_clouds:
        factor = min(ADAPTER_DOWNSAMPLE_FACTOR, len(cloud))
        blocks.append(encode_geometry(model, cloud, factor).data)
    tagged = [block + model.slot_embedding[slot] for slot, block in enumerate(blocks)]
    flag = model.flag_embedding[int(prompts.covers_all_parts)].reshape(1, 1, -1)
    return TokenBatch(torch.cat([*tagged, flag], dim=1), kind="prompt")


def prompt_inject(model: ToyModel, g: TokenBatch, prompt: TokenBatch) -> TokenBatch:
    """
    Interleave the prompt blocks with the geometry stream; the geometry
    stream gains what the exchange attention reads from the prompt.

    Raises:
        ToyShapeError: channel counts differ.
    """
    if g.channels != prompt.channels:
        raise ToyShapeError(f"geometry has {g.channels} channels, prompt {prompt.channels}")
    x, p = g.data, prompt.data
    for block in model.prompt_blocks:
        x, p = block(x, p)
    return g.with_data(x)


def denoiser(
    model: ToyModel,
    latents: torch.Tensor,
    tau: int,
    geometry: torch.Tensor,
    g_explode: torch.Tensor | None,
    times: Sequence[float] | torch.Tensor,
) -> torch.Tensor:
    """
    One forward pass over (T, L, C) frame latents at diffusion step tau.
    g_explode None runs the frozen base path without the adapter.
    """
    c = model.dims.channels
    step = model.step_mlp(scalar_embedding(torch.tensor([float(tau)]), c))
    x = latents + step.unsqueeze(0)
    t = torch.as_tensor(times, dtype=torch.float64).reshape(-1)
    for block in model.dit_blocks:
        x = block(x, geometry, g_explode, t, model.dims.mode)
    return model.dit_out(model.dit_norm(x))
