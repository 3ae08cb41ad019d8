"""Integrated Gradients over encoder channels, without autodiff.

Gradients come from central finite differences.  Perturbing one input
cell shifts the first dense layer's pre-activation by exactly
eps * W1[:, i] (the layer is affine), so all 2 * inputs probe points per
gradient share one first-layer evaluation and run through the rest of
the trunk as a single batch.  The result is bit-identical to the naive
per-cell loop up to float reassociation, at a tiny fraction of the cost.

The attribution target is a scalar head readout: the value v = W - L by
default, a single WDL component, or the raw ply head (unclamped, so the
derivative is meaningful everywhere).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import chesscore as cc
from . import planes
from .inference import Network

TARGETS = ("v", "w", "d", "l", "ply")
BASELINE_KINDS = ("zeros", "dataset_mean", "custom")
DEFAULT_STEPS = 64
DEFAULT_EPS = 1e-3


@dataclass(frozen=True)
class AttributionMap:
    attributions: np.ndarray  # channels x 8 x 8
    channel_means: np.ndarray  # channels
    baseline_kind: str
    steps: int
    target: str


def _check_target(target: str) -> None:
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}, expected one of {TARGETS}")


def _check_version(net: Network, stack: planes.PlaneStack) -> None:
    if stack.layout_version != net.version:
        raise ValueError(f"network expects {net.version} planes, "
                         f"got {stack.layout_version}")


def _batch_softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _from_first_preact(net: Network, z1: np.ndarray, target: str) -> np.ndarray:
    """Target scalars for a batch of first-layer pre-activation rows."""
    h = np.maximum(z1, 0.0) if net.layers[0].act == "relu" else z1
    for layer in net.layers[1:]:
        h = h @ layer.w.T + layer.b
        if layer.act == "relu":
            h = np.maximum(h, 0.0)
    if target == "ply":
        return h @ net.ply_head.w[0] + net.ply_head.b[0]
    wdl = _batch_softmax(h @ net.wdl_head.w.T + net.wdl_head.b)
    if target == "v":
        return wdl[:, 0] - wdl[:, 2]
    return wdl[:, ("w", "d", "l").index(target)]


def evaluate_target(net: Network, stack: planes.PlaneStack,
                    target: str = "v") -> float:
    """The scalar F(x) that attributions decompose."""
    _check_target(target)
    _check_version(net, stack)
    x = stack.data.reshape(-1)
    first = net.layers[0]
    z1 = first.w @ x + first.b
    return float(_from_first_preact(net, z1[None, :], target)[0])


def finite_diff_gradient(net: Network, stack: planes.PlaneStack,
                         target: str = "v",
                         eps: float = DEFAULT_EPS) -> np.ndarray:
    """Central-difference gradient of the target w.r.t. every input cell."""
    _check_target(target)
    _check_version(net, stack)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    x = stack.data.reshape(-1)
    first = net.layers[0]
    z1 = first.w @ x + first.b
    # x +- eps*e_i shifts the affine first layer by exactly +-eps*W1[:, i]
    plus = _from_first_preact(net, z1[None, :] + eps * first.w.T, target)
    minus = _from_first_preact(net, z1[None, :] - eps * first.w.T, target)
    return ((plus - minus) / (2.0 * eps)).reshape(stack.data.shape)


def integrated_gradients(net: Network, stack: planes.PlaneStack,
                         baseline: planes.PlaneStack,
                         steps: int = DEFAULT_STEPS, target: str = "v",
                         baseline_kind: str = "custom",
                         eps: float = DEFAULT_EPS) -> AttributionMap:
    """Right-endpoint Riemann IG along the straight baseline-to-input path."""
    _check_target(target)
    _check_version(net, stack)
    if stack.data.shape != baseline.data.shape:
        raise ValueError(f"shape mismatch: input {stack.data.shape} vs "
                         f"baseline {baseline.data.shape}")
    if stack.layout_version != baseline.layout_version:
        raise ValueError("input and baseline use different plane layouts")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if baseline_kind not in BASELINE_KINDS:
        raise ValueError(f"unknown baseline kind {baseline_kind!r}")
    delta = stack.data - baseline.data
    grads = np.zeros_like(stack.data)
    for k in range(1, steps + 1):
        point = planes.PlaneStack(
            channels=stack.channels,
            data=baseline.data + (k / steps) * delta,
            layout_version=stack.layout_version,
        )
        grads += finite_diff_gradient(net, point, target, eps)
    attributions = delta * (grads / steps)
    return AttributionMap(
        attributions=attributions,
        channel_means=attributions.mean(axis=(1, 2)),
        baseline_kind=baseline_kind,
        steps=steps,
        target=target,
    )


def zeros_baseline(version: str = planes.V2) -> planes.PlaneStack:
    """All-zero input stack, the appendix case-study baseline."""
    layout = tuple(planes.plane_layout(version))
    return planes.PlaneStack(
        channels=layout,
        data=np.zeros((len(layout), 8, 8)),
        layout_version=version,
    )


def mean_baseline(positions: list[cc.Position],
                  version: str = planes.V2) -> planes.PlaneStack:
    """Element-wise mean encoding over a reference set of positions."""
    if not positions:
        raise ValueError("mean baseline needs at least one position")
    stacks = [planes.encode(p, version) for p in positions]
    return planes.PlaneStack(
        channels=stacks[0].channels,
        data=np.mean([s.data for s in stacks], axis=0),
        layout_version=version,
    )


def channel_report(attr: AttributionMap,
                   layout: list[planes.ChannelDescriptor]) -> list[tuple]:
    """(channel name, signed mean attribution) rows in layout order."""
    if len(layout) != len(attr.channel_means):
        raise ValueError(f"layout has {len(layout)} channels, attribution "
                         f"map has {len(attr.channel_means)}")
    return [(desc.name, float(attr.channel_means[desc.index]))
            for desc in layout]
