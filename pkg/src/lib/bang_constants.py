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
constants being used by bangkit
"""

from enum import Enum, auto


LOG_ENV_VAR: str = "BANGKIT_LOG"
DEFAULT_LOG_LEVEL: str = "info"
LOG_FORMAT: str = "%(asctime)s - %(levelname)s in %(module)s - %(message)s"

# Mesh loading and decomposition
WELD_EPS: float = 1e-9
DEFAULT_WELD_FRACTION: float = 1e-6
DEGENERATE_AREA_EPS: float = 1e-14
MIN_MESH_VERTICES: int = 3

# SDF grids
DEFAULT_SDF_RESOLUTION: int = 128
MIN_SDF_RESOLUTION: int = 16
MAX_SDF_RESOLUTION: int = 512
SDF_PADDING_FRACTION: float = 0.1
SDF_CANDIDATE_TRIANGLES: int = 16
SDF_QUERY_CHUNK: int = 32768
WINDING_CHUNK: int = 4096
WINDING_VOTE_SAMPLES: int = 8
WATERTIGHT_TOLERANCE: float = 0.1

# Point clouds
ADAPTER_CLOUD_POINTS: int = 20480
ADAPTER_DOWNSAMPLE_FACTOR: int = 10

# Asset filtering
DEFAULT_MIN_PARTS: int = 2
DEFAULT_MAX_PARTS: int = 30
DEFAULT_MIN_VERTICES: int = 1000
DEFAULT_MAX_VERTICES: int = 1_000_000

# Explosion optimizer
DEFAULT_OVERLAP_THRESHOLD: float = 1e-3
DEFAULT_MAX_TRANSLATION: float = 1.5
DEFAULT_EXPLOSION_STEP: float = 0.05
DEFAULT_EXPLOSION_ITERS: int = 2000
DEFAULT_REG_WEIGHT: float = 0.01
SOFTPLUS_SHARPNESS: float = 1e3
INITIAL_RADIAL_SCALE: float = 0.1
MIN_LINE_SEARCH_STEP: float = 1e-9

# Sequences
DEFAULT_TIMES: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
NORMALIZED_EXTENT: float = 2.0
DEFAULT_MIN_GAP: float = 0.01
DEFAULT_MAX_EXPANSION: float = 4.0
MANIFEST_NAME: str = "manifest.json"
TRAJECTORY_NAME: str = "trajectory.json"
SUMMARY_NAME: str = "summary.json"
FRAME_TEMPLATE: str = "frame_{index}.obj"
REASSEMBLED_TEMPLATE: str = "reassembled_{index}.obj"

# Trajectory tracking
DEFAULT_SAMPLES_PER_PART: int = 4096
MIN_SAMPLES_PER_PART: int = 16
DEFAULT_TRACK_LR: float = 0.02
DEFAULT_TRACK_LR_DECAY: float = 0.999
DEFAULT_TRACK_ITERS: int = 2000
DEFAULT_CONVERGENCE_TOL: float = 1e-6
TRACK_MOMENTUM: float = 0.9
TRACK_PATIENCE: int = 10
TRACK_MIN_LR: float = 1e-7

# Evaluation
HISTOGRAM_BINS: int = 30
OVERLAP_LOG_FLOOR: float = 1e-8

# Annotation
DEFAULT_ANNOTATION_TIMEOUT: int = 10
MAX_RETRIES: int = 3
RETRY_DELAY: int = 2
SYMMETRY_TOLERANCE: float = 0.01
DENSITY_CLASS_BOUNDS: tuple[float, float] = (100.0, 10000.0)

# Toy model
TOY_LATENT_TOKENS: int = 32
TOY_CHANNELS: int = 16
TOY_HEADS: int = 4
TOY_DIT_LAYERS: int = 2
TOY_ADAPTER_LAYERS: int = 4
TOY_PROMPT_LAYERS: int = 2
TOY_INIT_STD: float = 0.02
DEFAULT_DIFFUSION_STEPS: int = 50
DEFAULT_CFG_SCALE: float = 7.0
BETA_START: float = 1e-4
BETA_END: float = 2e-2
MAX_PARTS_EMBEDDING: int = 64
POS_EMB_CHANNELS: int = 24
MAX_PROMPT_SLOTS: int = 16
TIME_EMB_SCALE: float = 1000.0
FF_EXPANSION: int = 4
GRADCHECK_EPS: float = 1e-6
GRADCHECK_RTOL: float = 1e-4
GRADCHECK_ATOL: float = 1e-6

# Full-scale configuration of the trained generator, recorded only
FULL_LATENT_TOKENS: int = 2048
FULL_LATENT_CHANNELS: int = 64
FULL_DIT_LAYERS: int = 24
FULL_DIT_HIDDEN: int = 2560
FULL_DIT_HEADS: int = 20
FULL_DECODER_SELF_ATTN_LAYERS: int = 24
FULL_ADAPTER_LAYERS: int = 4
FULL_ADAPTER_HIDDEN: int = 512

# Exit codes
EXIT_OK: int = 0
EXIT_USAGE: int = 1
EXIT_UNCONVERGED: int = 2
EXIT_ACCEPTANCE: int = 3


class TimeMode(Enum):
    """
    How the frame-wise time embedding is combined into queries and keys
    """

    ADDITIVE = auto()
    ROTARY = auto()
