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
Diffusion skeleton: linear-beta DDPM schedule, single-step denoiser loss and
a conditional sampling loop with classifier-free guidance over all frames.
"""

import logging
from dataclasses import dataclass
from logging import Logger
from typing import Optional, Sequence, final
import torch
from src.lib.bang_constants import (
    ADAPTER_DOWNSAMPLE_FACTOR,
    BETA_END,
    BETA_START,
    DEFAULT_CFG_SCALE,
    DEFAULT_DIFFUSION_STEPS,
    DEFAULT_TIMES,
)
from src.lib.errors import ToyShapeError
from src.mesh.geometry import PointCloud
from src.toy.model import (
    ToyModel,
    adapter_condition,
    denoiser,
    encode_geometry,
    prompt_inject,
    prompt_tokens,
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


@final
@dataclass(frozen=True)
class NoiseSchedule:
    """betas, alphas and cumulative alpha products of a DDPM schedule."""

    betas: torch.Tensor
    alphas: torch.Tensor
    alpha_bars: torch.Tensor

    @classmethod
    def linear(cls, steps: int) -> "NoiseSchedule":
        """Betas spaced linearly from BETA_START to BETA_END."""
        if steps < 1:
            raise ToyShapeError(f"steps must be >= 1, got {steps}")
        betas = torch.linspace(BETA_START, BETA_END, steps, dtype=torch.float64)
        alphas = 1.0 - betas
        return cls(betas, alphas, torch.cumprod(alphas, dim=0))

    def __len__(self) -> int:
        return int(self.betas.shape[0])


def denoise_eval(
    model: ToyModel,
    latent_noisy: TokenBatch,
    tau: int,
    g_explode: TokenBatch,
    target: Optional[torch.Tensor] = None,
    geometry: Optional[TokenBatch] = None,
    times: Optional[Sequence[float]] = None,
    steps: int = DEFAULT_DIFFUSION_STEPS,
) -> tuple[TokenBatch, torch.Tensor]:
    """
    One denoiser pass with adapter injection and its mean squared error to
    target (zero target when omitted). Each batch entry is one frame; times
    default to uniform spacing. geometry defaults to g_explode.

    Raises:
        ToyShapeError: tau outside [0, steps) or target shape mismatch.
    """
    if not 0 <= tau < steps:
        raise ToyShapeError(f"tau must lie in [0, {steps}), got {tau}")
    frames = latent_noisy.data.shape[0]
    if times is None:
        times = torch.linspace(0.0, 1.0, frames, dtype=torch.float64).tolist() if frames > 1 else [0.0]
    base = g_explode if geometry is None else geometry
    out = denoiser(model, latent_noisy.data, tau, base.data, g_explode.data, times)
    goal = torch.zeros_like(out) if target is None else target
    if goal.shape != out.shape:
        raise ToyShapeError(f"target shape {tuple(goal.shape)} != output {tuple(out.shape)}")
    return latent_noisy.with_data(out), torch.mean((out - goal) ** 2)


def _conditions(
    model: ToyModel,
    cloud: PointCloud,
    times: Sequence[float],
    prompts: Optional[PromptSet],
    parts_count: int,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Geometry tokens (1, M, C) and per-frame G_explode (T, M, C)."""
    factor = min(ADAPTER_DOWNSAMPLE_FACTOR, len(cloud))
    geometry = encode_geometry(model, cloud, factor)
    prompt = prompt_tokens(model, prompts) if prompts is not None and len(prompts) else None
    explode = []
    for t in times:
        g = adapter_condition(model, geometry, float(t), parts_count)
        if prompt is not None:
            g = prompt_inject(model, g, prompt)
        explode.append(g.data)
    return geometry.data, torch.cat(explode, dim=0)


def sample_sequence(
    model: ToyModel,
    cloud: PointCloud,
    times: Sequence[float] = DEFAULT_TIMES,
    prompts: Optional[PromptSet] = None,
    steps: int = DEFAULT_DIFFUSION_STEPS,
    cfg_scale: float = DEFAULT_CFG_SCALE,
    seed: int = 0,
    parts_count: int = 2,
    unconditional: bool = False,
) -> list[TokenBatch]:
    """
    Ancestral DDPM sampling of one latent per time.

    The denoiser predicts the clean latents of all frames jointly; the guided
    prediction is uncond + cfg_scale * (cond - uncond), where the
    unconditional pass sees zero geometry tokens and no adapter. With
    unconditional=True only the unconditional pass runs. Noise comes from a
    generator seeded with seed, so equal arguments give equal outputs.
    """
    schedule = NoiseSchedule.linear(steps)
    geometry, g_explode = _conditions(model, cloud, times, prompts, parts_count)
    null = torch.zeros_like(geometry)
    generator = torch.Generator().manual_seed(seed)
    shape = (len(times), model.dims.latent_tokens, model.dims.channels)
    x = torch.randn(shape, generator=generator, dtype=torch.float64)
    with torch.no_grad():
        for tau in reversed(range(steps)):
            uncond = denoiser(model, x, tau, null, None, times)
            if unconditional:
                x0 = uncond
            else:
                cond = denoiser(model, x, tau, geometry, g_explode, times)
                x0 = uncond + cfg_scale * (cond - uncond)
            beta = schedule.betas[tau]
            alpha_bar = schedule.alpha_bars[tau]
            alpha_bar_prev = schedule.alpha_bars[tau - 1] if tau > 0 else torch.tensor(1.0, dtype=torch.float64)
            coef_x0 = torch.sqrt(alpha_bar_prev) * beta / (1.0 - alpha_bar)
            coef_xt = torch.sqrt(schedule.alphas[tau]) * (1.0 - alpha_bar_prev) / (1.0 - alpha_bar)
            noise = torch.randn(shape, generator=generator, dtype=torch.float64)
            x = coef_x0 * x0 + coef_xt * x
            if tau > 0:
                variance = beta * (1.0 - alpha_bar_prev) / (1.0 - alpha_bar)
                x = x + torch.sqrt(variance) * noise
    logger.debug("Sampled %d frame(s) in %d step(s), cfg scale %g", len(times), steps, cfg_scale)
    return [TokenBatch(x[i:i + 1]) for i in range(len(times))]
