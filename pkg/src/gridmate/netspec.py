"""Compound-scaling arithmetic and architecture size descriptors.

A network family is scaled by a depth factor alpha and a width factor
beta (resolution gamma is pinned to 1 on the 8x8 board).  Two balance
criteria are supported: the original alpha * beta^2 ~ 2 rule and the
latency-adjusted alpha * beta^1.6 ~ 2 rule; the adjusted form is the
default validator.  The grid rows explored under each criterion and the
four published size presets are frozen here as data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

BASE_DEPTH = 10
BASE_CHANNELS = 192

ORIGINAL_EXPONENT = 0.5   # beta = (2 / alpha) ** 0.5, alpha * beta^2 = 2
ADJUSTED_EXPONENT = 0.625  # beta = (2 / alpha) ** (5/8), alpha * beta^1.6 = 2


@dataclass(frozen=True)
class ScalingParams:
    """Compound-scaling factors: depth alpha, width beta, resolution gamma
    (fixed at 1), and the compound coefficient phi."""

    alpha: float
    beta: float
    gamma: float = 1.0
    phi: float = 1.0

    def __post_init__(self):
        if self.gamma != 1.0:
            raise ValueError(f"gamma is fixed at 1, got {self.gamma}")
        if self.alpha < 1.0 or self.beta < 1.0:
            raise ValueError(f"alpha and beta must be >= 1, got "
                             f"({self.alpha}, {self.beta})")
        if self.phi < 0.0:
            raise ValueError(f"phi must be >= 0, got {self.phi}")


class NetworkSpec(NamedTuple):
    """Stacked-stage architecture size.

    total_blocks = stage1_mcb + stage2_blocks * (stage2_mcb + 1): each
    stage-2 repeat carries its own extra block.
    """

    name: str
    stage2_blocks: int    # B
    stage1_mcb: int       # N1
    stage2_mcb: int       # N2
    base_channels: int
    total_blocks: int


def validate_spec(spec: NetworkSpec) -> None:
    want = spec.stage1_mcb + spec.stage2_blocks * (spec.stage2_mcb + 1)
    if spec.total_blocks != want:
        raise ValueError(
            f"{spec.name}: total_blocks {spec.total_blocks} != "
            f"N1 + B*(N2+1) = {want}")
    if spec.base_channels <= 0 or spec.base_channels % 32:
        raise ValueError(
            f"{spec.name}: base_channels {spec.base_channels} "
            f"not a positive multiple of 32")


_SIZE_PRESETS = {
    "tiny": NetworkSpec("tiny", 1, 8, 6, 192, 15),
    "small": NetworkSpec("small", 1, 11, 10, 192, 22),
    "normal": NetworkSpec("normal", 2, 10, 7, 224, 26),
    "large": NetworkSpec("large", 2, 13, 11, 224, 37),
}

for _spec in _SIZE_PRESETS.values():
    validate_spec(_spec)


def size_preset(name: str) -> NetworkSpec:
    """Published architecture size by name: tiny, small, normal, large."""
    try:
        return _SIZE_PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown size {name!r}; choose from {sorted(_SIZE_PRESETS)}"
        ) from None


def size_names() -> list[str]:
    return list(_SIZE_PRESETS)


def scaled_dimensions(params: ScalingParams,
                      base_depth: int = BASE_DEPTH,
                      base_channels: int = BASE_CHANNELS) -> tuple[int, int]:
    """(depth, channels) after compound scaling, rounded to integers."""
    depth = round(base_depth * params.alpha ** params.phi)
    channels = round(base_channels * params.beta ** params.phi)
    return depth, channels


def check_original_criterion(params: ScalingParams,
                             tolerance: float = 1e-9) -> bool:
    """alpha * beta^2 * gamma^2 within `tolerance` of 2."""
    value = params.alpha * params.beta ** 2 * params.gamma ** 2
    return abs(value - 2.0) <= tolerance


def check_adjusted_criterion(params: ScalingParams,
                             tolerance: float = 1e-9) -> bool:
    """alpha * beta^1.6 within `tolerance` of 2 (latency-adjusted rule)."""
    return abs(params.alpha * params.beta ** 1.6 - 2.0) <= tolerance


def _grid(exponent: float) -> tuple[ScalingParams, ...]:
    return tuple(
        ScalingParams(alpha=a, beta=(2.0 / a) ** exponent)
        for a in (1.0, 1.2, 1.4, 1.6, 1.8, 2.0)
    )


# The explored grids, row for row, with the depth/channel sizes each row
# produced from the (10, 192) base.
ORIGINAL_GRID = _grid(ORIGINAL_EXPONENT)
ADJUSTED_GRID = _grid(ADJUSTED_EXPONENT)
ORIGINAL_GRID_DIMENSIONS = ((10, 272), (12, 248), (14, 229),
                            (16, 215), (18, 202), (20, 192))
ADJUSTED_GRID_DIMENSIONS = ((10, 296), (12, 264), (14, 240),
                            (16, 221), (18, 205), (20, 192))

SCALING_GRIDS = {"original": ORIGINAL_GRID, "adjusted": ADJUSTED_GRID}


def spec_to_json_dict(spec: NetworkSpec) -> dict:
    return {
        "name": spec.name,
        "stage2_blocks": spec.stage2_blocks,
        "stage1_mcb": spec.stage1_mcb,
        "stage2_mcb": spec.stage2_mcb,
        "base_channels": spec.base_channels,
        "total_blocks": spec.total_blocks,
    }
