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
Invariant suite of the toy network: shape contracts, attention row sums,
zero-branch identities, time-embedding placement, permutation behavior,
gradient checks against central differences and sampling determinism.
"""

import copy
import logging
import time
from dataclasses import dataclass
from logging import Logger
from typing import Callable, Sequence, final
import numpy as np
import torch
from src.lib.bang_constants import (
    DEFAULT_CFG_SCALE,
    DEFAULT_DIFFUSION_STEPS,
    DEFAULT_TIMES,
    GRADCHECK_ATOL,
    GRADCHECK_EPS,
    GRADCHECK_RTOL,
    POS_EMB_CHANNELS,
)
from src.lib.config import ToyDims
from src.lib.schema import ToyCheckItemSchema, ToyCheckReportSchema
from src.mesh.geometry import AABB, PointCloud
from src.toy.embeddings import axis_lanes, pos_emb
from src.toy.layers import DiTBlock, merge_frames, split_frames, temporal_attention
from src.toy.model import (
    adapter_condition,
    adapter_inject,
    build_toy_model,
    decode_queries,
    encode_geometry,
    prompt_inject,
    prompt_tokens,
)
from src.toy.sampling import denoise_eval, sample_sequence
from src.toy.tokens import PromptSet, TokenBatch

logger = logging.getLogger(__name__)

# cloud size and downsampling factor of the check instances
CHECK_CLOUD_POINTS: int = 40
CHECK_FACTOR: int = 10


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
class ToyCheckItem:
    """error <= tolerance means passed."""

    name: str
    passed: bool
    error: float
    tolerance: float
    seconds: float

    def to_document(self) -> ToyCheckItemSchema:
        """JSON content."""
        return {
            "name": self.name,
            "passed": self.passed,
            "error": self.error,
            "tolerance": self.tolerance,
            "seconds": self.seconds,
        }


@final
@dataclass(frozen=True)
class ToyCheckReport:
    """Outcome of the whole suite."""

    passed: bool
    seed: int
    seconds: float
    checks: tuple[ToyCheckItem, ...]

    def to_document(self) -> ToyCheckReportSchema:
        """JSON report content."""
        return {
            "passed": self.passed,
            "seed": self.seed,
            "seconds": self.seconds,
            "checks": [item.to_document() for item in self.checks],
        }


def gradient_check(fn: Callable[..., torch.Tensor], inputs: Sequence[torch.Tensor]) -> bool:
    """torch.autograd.gradcheck in float64 with the suite tolerances."""
    prepared = tuple(x.detach().to(torch.float64).requires_grad_(True) for x in inputs)
    return bool(
        torch.autograd.gradcheck(
            fn,
            prepared,
            eps=GRADCHECK_EPS,
            atol=GRADCHECK_ATOL,
            rtol=GRADCHECK_RTOL,
            raise_exception=False,
        )
    )


def directional_error(
    loss_fn: Callable[[], torch.Tensor], param: torch.Tensor, seed: int
) -> float:
    """
    Relative error between the autograd directional derivative of a scalar
    loss along a random direction in param and its central difference.
    """
    generator = torch.Generator().manual_seed(seed)
    direction = torch.randn(param.shape, generator=generator, dtype=torch.float64)
    param.grad = None
    loss_fn().backward()
    assert param.grad is not None
    analytic = float((param.grad * direction).sum())
    with torch.no_grad():
        param.add_(GRADCHECK_EPS * direction)
        plus = float(loss_fn())
        param.sub_(2.0 * GRADCHECK_EPS * direction)
        minus = float(loss_fn())
        param.add_(GRADCHECK_EPS * direction)
    numeric = (plus - minus) / (2.0 * GRADCHECK_EPS)
    scale = max(abs(analytic), abs(numeric), GRADCHECK_ATOL / GRADCHECK_RTOL)
    return abs(analytic - numeric) / scale


def _cloud(seed: int, count: int = CHECK_CLOUD_POINTS, shift: float = 0.0) -> PointCloud:
    rng = np.random.default_rng(seed)
    return PointCloud(rng.uniform(-1.0, 1.0, size=(count, 3)) + shift, seed)


def _max_diff(a: torch.Tensor, b: torch.Tensor) -> float:
    return float((a - b).abs().max())


def _flag(ok: bool) -> float:
    return 0.0 if ok else 1.0


class _Suite:
    """Check instances shared by all checks of one run."""

    def __init__(self, dims: ToyDims, seed: int, steps: int, cfg_scale: float) -> None:
        self.dims = dims
        self.seed = seed
        self.steps = steps
        self.cfg_scale = cfg_scale
        self.model = build_toy_model(dims, seed)
        self.branched = copy.deepcopy(self.model)
        self.branched.randomize_branches(seed + 1)
        generator = torch.Generator().manual_seed(seed)
        self.cloud = _cloud(seed)
        self.geometry = encode_geometry(self.model, self.cloud, CHECK_FACTOR)
        self.latent = TokenBatch(
            torch.randn((1, dims.latent_tokens, dims.channels), generator=generator, dtype=torch.float64)
        )
        self.frames = [
            TokenBatch(torch.randn((1, 4, dims.channels), generator=generator, dtype=torch.float64))
            for _ in range(3)
        ]
        self.box = AABB(np.array([-0.5, -0.2, 0.0]), np.array([0.3, 0.4, 0.6]))

    @property
    def block(self) -> DiTBlock:
        block = self.model.dit_blocks[0]
        assert isinstance(block, DiTBlock)
        return block

    def softmax_rows(self) -> tuple[float, float]:
        keys = self.model.embed_points(self.cloud.points)
        w = self.model.encoder_attn.weights(keys[:, :5], context=keys)
        return _max_diff(w.sum(dim=-1), torch.ones(1, dtype=torch.float64)), 1e-6

    def pos_emb_origin(self) -> tuple[float, float]:
        emb = pos_emb([[0.0, 0.0, 0.0]], POS_EMB_CHANNELS).data.reshape(-1)
        half = POS_EMB_CHANNELS // 6
        expected = torch.cat([torch.zeros(half), torch.ones(half)] * 3).to(torch.float64)
        return _max_diff(emb, expected), 0.0

    def pos_emb_axis_lanes(self) -> tuple[float, float]:
        a = pos_emb([[0.1, 0.2, 0.3]], POS_EMB_CHANNELS).data.reshape(-1)
        b = pos_emb([[0.101, 0.2, 0.3]], POS_EMB_CHANNELS).data.reshape(-1)
        x = axis_lanes(POS_EMB_CHANNELS, 0)
        outside = torch.cat([(a - b)[: x.start], (a - b)[x.stop:]])
        moved = float((a - b)[x].abs().max()) > 0.0
        return float(outside.abs().max()) + _flag(moved), 0.0

    def encode_permutation(self) -> tuple[float, float]:
        perm = np.random.default_rng(self.seed).permutation(len(self.cloud))
        shuffled = PointCloud(self.cloud.points[perm], self.cloud.seed)
        out = encode_geometry(self.model, shuffled, CHECK_FACTOR)
        return _max_diff(out.data, self.geometry.data), 1e-5

    def encode_shape_and_translation(self) -> tuple[float, float]:
        expected = (1, -(-CHECK_CLOUD_POINTS // CHECK_FACTOR), self.dims.channels)
        moved = encode_geometry(self.model, _cloud(self.seed, shift=0.25), CHECK_FACTOR)
        ok = tuple(self.geometry.data.shape) == expected and _max_diff(moved.data, self.geometry.data) > 0.0
        return _flag(ok), 0.0

    def decode_gradient(self) -> tuple[float, float]:
        queries = torch.tensor([[0.1, 0.2, 0.3], [0.1, 0.2, 0.3], [-0.4, 0.0, 0.5]], dtype=torch.float64)
        small = self.latent.data[:, :4]
        values = decode_queries(self.model, TokenBatch(small), queries)
        ok = values.shape == (3,) and float(values[0]) == float(values[1])
        ok = ok and gradient_check(lambda z: decode_queries(self.model, TokenBatch(z), queries), [small])
        return _flag(ok), 0.0

    def adapter_time_effect(self) -> tuple[float, float]:
        a = adapter_condition(self.model, self.geometry, 0.2, 3)
        b = adapter_condition(self.model, self.geometry, 0.8, 3)
        ok = a.data.shape == self.geometry.data.shape and _max_diff(a.data, b.data) > 0.0
        return _flag(ok), 0.0

    def adapter_zero_modulation(self) -> tuple[float, float]:
        model = copy.deepcopy(self.model)
        model.zero_modulation()
        a = adapter_condition(model, self.geometry, 0.2, 3)
        b = adapter_condition(model, self.geometry, 0.8, 3)
        return _max_diff(a.data, b.data), 0.0

    def inject_zero_identity(self) -> tuple[float, float]:
        g_explode = adapter_condition(self.model, self.geometry, 0.5, 3)
        out = adapter_inject(self.model, self.latent, self.geometry, g_explode)
        base = self.block.cross_attn(self.latent.data, context=self.geometry.data)
        return float((out.data != base).sum()), 0.0

    def inject_branch(self) -> tuple[float, float]:
        g_explode = adapter_condition(self.branched, self.geometry, 0.5, 3)
        out = adapter_inject(self.branched, self.latent, self.geometry, g_explode)
        base = adapter_inject(self.model, self.latent, self.geometry, g_explode)
        ok = _max_diff(out.data, base.data) > 0.0
        ok = ok and gradient_check(
            lambda g: adapter_inject(self.branched, self.latent, self.geometry, TokenBatch(g)).data,
            [g_explode.data],
        )
        return _flag(ok), 0.0

    def temporal_qk_only(self) -> tuple[float, float]:
        attn = copy.deepcopy(self.block.temporal)
        attn.time_gain = 0.0
        out = temporal_attention(attn, self.frames, [0.0, 0.5, 1.0], self.dims.mode)
        merged = merge_frames(self.frames)
        plain = attn(merged.data)
        return _max_diff(torch.cat([f.data for f in out], dim=1), plain), 1e-6

    def temporal_permutation(self) -> tuple[float, float]:
        times = [0.0, 0.5, 1.0]
        order = [2, 0, 1]
        out = temporal_attention(self.block.temporal, self.frames, times, self.dims.mode)
        permuted = temporal_attention(
            self.block.temporal, [self.frames[i] for i in order], [times[i] for i in order], self.dims.mode
        )
        err = max(_max_diff(permuted[k].data, out[i].data) for k, i in enumerate(order))
        single = temporal_attention(self.block.temporal, self.frames[:1], [0.3], self.dims.mode)
        shape_ok = len(single) == 1 and single[0].data.shape == self.frames[0].data.shape
        return err + _flag(shape_ok), 1e-10

    def frame_merge_round_trip(self) -> tuple[float, float]:
        merged = merge_frames(self.frames)
        back = split_frames(merged)
        err = max(float((a.data != b.data).sum()) for a, b in zip(back, self.frames))
        return err + _flag(len(back) == len(self.frames)), 0.0

    def prompt_layout(self) -> tuple[float, float]:
        one = prompt_tokens(self.model, PromptSet(bboxes=(self.box,)))
        two = prompt_tokens(self.model, PromptSet(bboxes=(self.box, self.box)))
        flipped = prompt_tokens(self.model, PromptSet(bboxes=(self.box,), covers_all_parts=True))
        ok = one.tokens == 3 and two.tokens == 5
        ok = ok and _max_diff(two.data[:, 0:2], two.data[:, 2:4]) > 0.0
        ok = ok and _max_diff(one.data[:, :2], flipped.data[:, :2]) == 0.0
        ok = ok and _max_diff(one.data[:, 2], flipped.data[:, 2]) > 0.0
        return _flag(ok), 0.0

    def prompt_injection(self) -> tuple[float, float]:
        prompts = PromptSet(bboxes=(self.box,), region_clouds=(_cloud(self.seed + 2, 20),))
        tokens = prompt_tokens(self.model, prompts)
        same = prompt_inject(self.model, self.geometry, tokens)
        zero_ok = bool(torch.equal(same.data, self.geometry.data))
        changed = prompt_inject(self.branched, self.geometry, tokens)
        ok = zero_ok and _max_diff(changed.data, self.geometry.data) > 0.0
        ok = ok and gradient_check(
            lambda p: prompt_inject(self.branched, self.geometry, TokenBatch(p, kind="prompt")).data,
            [tokens.data],
        )
        return _flag(ok), 0.0

    def denoise_loss(self) -> tuple[float, float]:
        small = TokenBatch(self.latent.data[:, :4])
        g_explode = adapter_condition(self.branched, self.geometry, 0.5, 3)
        out, _ = denoise_eval(self.branched, small, 3, g_explode, geometry=self.geometry)
        _, zero = denoise_eval(self.branched, small, 3, g_explode, target=out.data, geometry=self.geometry)
        target = torch.randn(out.data.shape, generator=torch.Generator().manual_seed(self.seed), dtype=torch.float64)
        _, loss = denoise_eval(self.branched, small, 3, g_explode, target=target, geometry=self.geometry)
        perm = torch.tensor([2, 0, 3, 1])
        _, permuted = denoise_eval(
            self.branched, TokenBatch(small.data[:, perm]), 3, g_explode, target=target[:, perm], geometry=self.geometry
        )
        return float(zero) + abs(float(loss) - float(permuted)), 1e-6

    def denoise_parameter_gradients(self) -> tuple[float, float]:
        model = copy.deepcopy(self.branched)
        small = TokenBatch(self.latent.data[:, :4])
        g_explode = adapter_condition(model, self.geometry, 0.5, 3).data.detach()
        geometry = TokenBatch(self.geometry.data.detach())
        target = torch.randn(small.data.shape, generator=torch.Generator().manual_seed(self.seed), dtype=torch.float64)

        def loss() -> torch.Tensor:
            return denoise_eval(model, small, 3, TokenBatch(g_explode), target=target, geometry=geometry)[1]

        errors = [
            directional_error(loss, param, self.seed + k)
            for k, (name, param) in enumerate(model.named_parameters())
            if name.startswith(("step_mlp", "dit_"))
        ]
        return max(errors), GRADCHECK_RTOL

    def sampling(self) -> tuple[float, float]:
        prompts = PromptSet(bboxes=(self.box,))
        kwargs = {"steps": self.steps, "seed": self.seed}
        a = sample_sequence(self.branched, self.cloud, DEFAULT_TIMES, prompts, cfg_scale=self.cfg_scale, **kwargs)
        b = sample_sequence(self.branched, self.cloud, DEFAULT_TIMES, prompts, cfg_scale=self.cfg_scale, **kwargs)
        ok = len(a) == len(DEFAULT_TIMES)
        ok = ok and all(f.data.shape == (1, self.dims.latent_tokens, self.dims.channels) for f in a)
        ok = ok and all(bool(torch.isfinite(f.data).all()) for f in a)
        ok = ok and all(torch.equal(x.data, y.data) for x, y in zip(a, b))
        return _flag(ok), 0.0

    def cfg_zero(self) -> tuple[float, float]:
        kwargs = {"steps": self.steps, "seed": self.seed}
        guided = sample_sequence(self.branched, self.cloud, DEFAULT_TIMES, cfg_scale=0.0, **kwargs)
        plain = sample_sequence(self.branched, self.cloud, DEFAULT_TIMES, unconditional=True, **kwargs)
        return max(_max_diff(x.data, y.data) for x, y in zip(guided, plain)), 0.0


CHECKS: tuple[str, ...] = (
    "softmax_rows",
    "pos_emb_origin",
    "pos_emb_axis_lanes",
    "encode_permutation",
    "encode_shape_and_translation",
    "decode_gradient",
    "adapter_time_effect",
    "adapter_zero_modulation",
    "inject_zero_identity",
    "inject_branch",
    "temporal_qk_only",
    "temporal_permutation",
    "frame_merge_round_trip",
    "prompt_layout",
    "prompt_injection",
    "denoise_loss",
    "denoise_parameter_gradients",
    "sampling",
    "cfg_zero",
)


def run_toycheck(
    dims: ToyDims,
    seed: int = 0,
    steps: int = DEFAULT_DIFFUSION_STEPS,
    cfg_scale: float = DEFAULT_CFG_SCALE,
) -> ToyCheckReport:
    """Run every check; a check that raises is reported as failed."""
    start = time.perf_counter()
    suite = _Suite(dims, seed, steps, cfg_scale)
    items = []
    for name in CHECKS:
        check_start = time.perf_counter()
        try:
            error, tolerance = getattr(suite, name)()
        except Exception as e:  # pylint: disable=broad-exception-caught
            logger.error("Check %s raised: %s", name, e)
            error, tolerance = float("inf"), 0.0
        passed = bool(error <= tolerance)
        items.append(
            ToyCheckItem(name, passed, float(error), float(tolerance), time.perf_counter() - check_start)
        )
        level = logging.INFO if passed else logging.ERROR
        logger.log(level, "%-30s %s (error %.3g, tolerance %.3g)", name, "PASS" if passed else "FAIL", error, tolerance)
    return ToyCheckReport(
        passed=all(item.passed for item in items),
        seed=seed,
        seconds=time.perf_counter() - start,
        checks=tuple(items),
    )
