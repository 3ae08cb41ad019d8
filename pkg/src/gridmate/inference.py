"""Pluggable position evaluators.

Two evaluators share one output contract (policy priors over a flat move
space plus a WdlpOutput): a deterministic material heuristic for search
tests and arena baselines, and a small dense network loaded from a JSON
weight file.  The move space is the full (from, to, promotion) cube of
64 * 64 * 5 = 20480 indices; policies are masked to the legal moves and
renormalized there, so the over-approximation is harmless.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import chesscore as cc
from . import netspec
from . import planes
from .wdlp import WdlpOutput

POLICY_SIZE = 64 * 64 * 5

# Pawn-unit piece values for the material heuristic.
PAWN_UNITS = {cc.PAWN: 1, cc.KNIGHT: 3, cc.BISHOP: 3, cc.ROOK: 5, cc.QUEEN: 9}
MATERIAL_SCALE = 10.0
ORACLE_PLIES = 40.0

# An evaluator is any callable (Position, legal moves) -> EvalOutput.
Evaluator = Callable[[cc.Position, list[cc.Move]], "EvalOutput"]


class NetworkFormatError(ValueError):
    """Raised when a weight file is malformed; names the offending layer."""


def move_index(mv: cc.Move) -> int:
    """Flat policy index: from * 320 + to * 5 + promotion code."""
    return mv.from_sq * 320 + mv.to_sq * 5 + mv.promotion


def index_to_move(index: int) -> cc.Move:
    """Inverse of move_index (castle/en-passant flags are not encoded)."""
    if not 0 <= index < POLICY_SIZE:
        raise ValueError(f"move index {index} outside [0, {POLICY_SIZE})")
    from_sq, rest = divmod(index, 320)
    to_sq, promo = divmod(rest, 5)
    return cc.Move(from_sq, to_sq, promo)


@dataclass(frozen=True)
class EvalOutput:
    """Masked policy over the flat move space plus the value-head output."""

    policy: np.ndarray  # shape (20480,), zero outside the legal moves
    wdlp: WdlpOutput

    def prior(self, mv: cc.Move) -> float:
        return float(self.policy[move_index(mv)])

    @property
    def value(self) -> float:
        return self.wdlp.win - self.wdlp.loss


def _masked_policy(logits_or_probs: Sequence[float],
                   legal: list[cc.Move],
                   already_probs: bool = False) -> np.ndarray:
    policy = np.zeros(POLICY_SIZE)
    idx = [move_index(mv) for mv in legal]
    vals = np.asarray(logits_or_probs, dtype=np.float64)
    if not already_probs:
        vals = vals - vals.max()
        vals = np.exp(vals)
    policy[idx] = vals / vals.sum()
    return policy


# ---------------------------------------------------------------------------
# Material heuristic
# ---------------------------------------------------------------------------

def material_balance(pos: cc.Position) -> int:
    """Pawn-unit material balance from the side to move's perspective."""
    mover = pos.side_to_move
    total = 0
    for pt, units in PAWN_UNITS.items():
        own = bin(pos.bb[mover * 6 + pt]).count("1")
        theirs = bin(pos.bb[(mover ^ 1) * 6 + pt]).count("1")
        total += units * (own - theirs)
    return total


def _mating_moves(pos: cc.Position, legal: list[cc.Move]) -> list[cc.Move]:
    """Legal moves that checkmate immediately.

    A mating move must give check, and a direct check requires landing on
    a queen-ray or knight-jump square of the enemy king (discovered
    checks require vacating a ray square), so everything else is skipped
    before the expensive child expansion.
    """
    eksq = pos.king_square(pos.side_to_move ^ 1)
    direct = cc.QUEEN_RAYS_EMPTY[eksq] | cc.KNIGHT_ATTACKS[eksq]
    rays = cc.QUEEN_RAYS_EMPTY[eksq]
    mates = []
    for mv in legal:
        if not ((direct >> mv.to_sq) & 1 or (rays >> mv.from_sq) & 1
                or mv.is_castle or mv.is_en_passant):
            continue
        if not cc.gives_check(pos, mv):
            continue
        child = cc.apply_move(pos, mv)
        if not cc.legal_moves(child):
            mates.append(mv)
    return mates


def material_oracle(pos: cc.Position, legal: list[cc.Move]) -> EvalOutput:
    """Deterministic evaluator: tanh-squashed material for the value,
    uniform policy except that immediate mates take all the mass."""
    if not legal:
        raise ValueError("material_oracle needs at least one legal move")
    v = math.tanh(material_balance(pos) / MATERIAL_SCALE)
    wdl = WdlpOutput(
        win=(1.0 + v) ** 2 / 4.0,
        draw=(1.0 - v * v) / 2.0,
        loss=(1.0 - v) ** 2 / 4.0,
        plies_left=ORACLE_PLIES,
    )
    mates = _mating_moves(pos, legal)
    chosen = mates if mates else legal
    probs = np.full(len(chosen), 1.0 / len(chosen))
    return EvalOutput(_masked_policy(probs, chosen, already_probs=True), wdl)


# ---------------------------------------------------------------------------
# Dense network
# ---------------------------------------------------------------------------

ACTIVATIONS = ("relu", "identity")


@dataclass(frozen=True)
class DenseLayer:
    w: np.ndarray  # out x in
    b: np.ndarray  # out
    act: str = "identity"


@dataclass(frozen=True)
class Network:
    """Dense trunk plus policy / wdl / ply heads over a plane encoding."""

    version: str
    layers: tuple[DenseLayer, ...]
    policy_head: DenseLayer
    wdl_head: DenseLayer
    ply_head: DenseLayer

    @property
    def input_dim(self) -> int:
        return planes.CHANNELS[self.version] * 64


def _parse_layer(obj, name: str, expect_in: int) -> DenseLayer:
    if not isinstance(obj, dict) or "w" not in obj or "b" not in obj:
        raise NetworkFormatError(f"{name}: expected an object with 'w' and 'b'")
    try:
        w = np.asarray(obj["w"], dtype=np.float64)
        b = np.asarray(obj["b"], dtype=np.float64)
    except ValueError as err:
        raise NetworkFormatError(f"{name}: ragged or non-numeric arrays ({err})")
    if w.ndim != 2 or b.ndim != 1:
        raise NetworkFormatError(
            f"{name}: 'w' must be 2-D and 'b' 1-D, got {w.ndim}-D and {b.ndim}-D")
    if w.shape[0] != b.shape[0]:
        raise NetworkFormatError(
            f"{name}: bias length {b.shape[0]} != output dim {w.shape[0]}")
    if w.shape[1] != expect_in:
        raise NetworkFormatError(
            f"dimension mismatch at {name}: expected input {expect_in}, "
            f"got {w.shape[1]}")
    act = obj.get("act", "identity")
    if act not in ACTIVATIONS:
        raise NetworkFormatError(f"{name}: unknown activation {act!r}")
    return DenseLayer(w, b, act)


def network_from_dict(doc: dict) -> Network:
    version = doc.get("version")
    if version not in planes.CHANNELS:
        raise NetworkFormatError(f"unknown encoder version {version!r}")
    dim = planes.CHANNELS[version] * 64
    layers = []
    for i, obj in enumerate(doc.get("layers", [])):
        layer = _parse_layer(obj, f"layer {i}", dim)
        dim = layer.w.shape[0]
        layers.append(layer)
    heads = {}
    for name, out_dim in (("policy_head", POLICY_SIZE),
                          ("wdl_head", 3), ("ply_head", 1)):
        if name not in doc:
            raise NetworkFormatError(f"missing {name}")
        head = _parse_layer(doc[name], name, dim)
        if head.w.shape[0] != out_dim:
            raise NetworkFormatError(
                f"{name}: output dim {head.w.shape[0]}, expected {out_dim}")
        if head.act != "identity":
            raise NetworkFormatError(f"{name}: head activation must be identity")
        heads[name] = head
    return Network(version, tuple(layers), heads["policy_head"],
                   heads["wdl_head"], heads["ply_head"])


def load_network(path) -> Network:
    """Load and validate a JSON weight file (see network_to_dict)."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as err:
        raise NetworkFormatError(f"malformed JSON in {path}: {err}")
    return network_from_dict(doc)


def network_to_dict(net: Network) -> dict:
    def layer_doc(layer):
        return {"w": layer.w.tolist(), "b": layer.b.tolist(), "act": layer.act}

    return {
        "version": net.version,
        "layers": [layer_doc(l) for l in net.layers],
        "policy_head": layer_doc(net.policy_head),
        "wdl_head": layer_doc(net.wdl_head),
        "ply_head": layer_doc(net.ply_head),
    }


def save_network(net: Network, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(network_to_dict(net), handle)


def gen_random_network(seed: int, spec_name: str = "tiny",
                       version: str = planes.V2) -> Network:
    """Random but well-formed network for tests and demos.

    The architecture size preset picks the shape: stage2_blocks hidden
    relu layers, each base_channels/12 wide.
    """
    spec = netspec.size_preset(spec_name)
    rng = np.random.default_rng(seed)
    width = spec.base_channels // 12
    dims = [planes.CHANNELS[version] * 64] + [width] * spec.stage2_blocks

    def dense(n_in, n_out, act):
        w = rng.normal(0.0, 1.0 / math.sqrt(n_in), size=(n_out, n_in))
        b = rng.normal(0.0, 0.02, size=n_out)
        return DenseLayer(w, b, act)

    layers = tuple(dense(dims[i], dims[i + 1], "relu")
                   for i in range(len(dims) - 1))
    last = dims[-1]
    return Network(
        version, layers,
        policy_head=dense(last, POLICY_SIZE, "identity"),
        wdl_head=dense(last, 3, "identity"),
        ply_head=dense(last, 1, "identity"),
    )


def _run_trunk(net: Network, x: np.ndarray) -> np.ndarray:
    h = x
    for layer in net.layers:
        h = layer.w @ h + layer.b
        if layer.act == "relu":
            h = np.maximum(h, 0.0)
    return h


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def value_scalar(net: Network, x: np.ndarray) -> float:
    """Scalar value (win - loss) for a flattened input vector."""
    h = _run_trunk(net, x)
    wdl = _softmax(net.wdl_head.w @ h + net.wdl_head.b)
    return float(wdl[0] - wdl[2])


def forward(net: Network, stack: planes.PlaneStack,
            legal: list[cc.Move]) -> EvalOutput:
    """Evaluate one encoded position; policy is masked to `legal`."""
    if stack.layout_version != net.version:
        raise ValueError(
            f"encoder mismatch: network wants {net.version}, "
            f"stack is {stack.layout_version}")
    if not legal:
        raise ValueError("forward needs at least one legal move")
    x = stack.data.reshape(-1)
    h = _run_trunk(net, x)
    wdl = _softmax(net.wdl_head.w @ h + net.wdl_head.b)
    ply = max(0.0, float((net.ply_head.w @ h + net.ply_head.b)[0]))
    logits = net.policy_head.w @ h + net.policy_head.b
    legal_logits = [logits[move_index(mv)] for mv in legal]
    return EvalOutput(
        _masked_policy(legal_logits, legal),
        WdlpOutput(float(wdl[0]), float(wdl[1]), float(wdl[2]), ply),
    )


def network_evaluator(net: Network) -> Evaluator:
    """Bind a Network into the (pos, legal) -> EvalOutput contract."""
    def evaluate(pos: cc.Position, legal: list[cc.Move]) -> EvalOutput:
        return forward(net, planes.encode(pos, net.version), legal)
    return evaluate
