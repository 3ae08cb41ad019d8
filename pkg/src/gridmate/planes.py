"""Board-plane encoders for network input.

Two stacked-plane layouts over an 8x8 frame: the 39-channel V1 tensor and
the 52-channel V2 tensor, which drops the color and total-move-count
planes and appends mask, pattern, and material-summary channels.

Everything is encoded from the side to move's perspective: P1 is always
the mover, and when black is to move the board is flipped vertically
(rank r becomes 7 - r; files are not mirrored).  Square-indexed planes
(pieces, en passant, last moves, checkers) all live in that flipped
frame.  Integer-valued features are constant across their plane and
scaled into [-1, 1] against fixed reference extremes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import chesscore as cc

V1 = "V1"
V2 = "V2"

PIECE_ORDER = (cc.PAWN, cc.KNIGHT, cc.BISHOP, cc.ROOK, cc.QUEEN, cc.KING)
PIECE_LABELS = ("PAWN", "KNIGHT", "BISHOP", "ROOK", "QUEEN", "KING")

# Scaling denominators: the 50-move rule, a generous game-length bound,
# and the initial per-side armies.  Clipping absorbs promotions.
NO_PROGRESS_NORM = 50.0
TOTAL_MOVE_NORM = 500.0
MATERIAL_ORDER = (cc.PAWN, cc.KNIGHT, cc.BISHOP, cc.ROOK, cc.QUEEN)
MATERIAL_NORMS = {cc.PAWN: 8.0, cc.KNIGHT: 2.0, cc.BISHOP: 2.0,
                  cc.ROOK: 2.0, cc.QUEEN: 1.0}

LAST_MOVE_PAIRS = 8


class ChannelDescriptor(NamedTuple):
    index: int
    name: str
    kind: str   # "bool" or "int"
    owner: str  # "P1", "P2", or "global"


@dataclass(frozen=True)
class PlaneStack:
    """Encoded input tensor: `data` has shape (channels, 8, 8)."""

    channels: int
    data: np.ndarray
    layout_version: str

    def plane(self, name: str) -> np.ndarray:
        """Look up one 8x8 plane by its descriptor name."""
        for desc in plane_layout(self.layout_version):
            if desc.name == name:
                return self.data[desc.index]
        raise KeyError(name)


def _build_layout(version: str) -> tuple[ChannelDescriptor, ...]:
    rows: list[tuple[str, str, str]] = []
    for label in PIECE_LABELS:
        rows.append((f"P1 {label}", "bool", "P1"))
    for label in PIECE_LABELS:
        rows.append((f"P2 {label}", "bool", "P2"))
    rows.append(("Repetitions 1", "bool", "global"))
    rows.append(("Repetitions 2", "bool", "global"))
    rows.append(("En passant", "bool", "global"))
    if version == V1:
        rows.append(("Color", "bool", "global"))
        rows.append(("Total move count", "int", "global"))
    rows.append(("P1 castle kingside", "bool", "P1"))
    rows.append(("P1 castle queenside", "bool", "P1"))
    rows.append(("P2 castle kingside", "bool", "P2"))
    rows.append(("P2 castle queenside", "bool", "P2"))
    rows.append(("No-progress count", "int", "global"))
    for k in range(1, LAST_MOVE_PAIRS + 1):
        rows.append((f"Last move {k} origin", "bool", "global"))
        rows.append((f"Last move {k} target", "bool", "global"))
    rows.append(("is960", "bool", "global"))
    if version == V2:
        rows.append(("P1 mask", "bool", "P1"))
        rows.append(("P2 mask", "bool", "P2"))
        rows.append(("Checkerboard", "bool", "global"))
        for label in PIECE_LABELS[:5]:
            rows.append((f"Material difference {label}", "int", "global"))
        rows.append(("Opposite-color bishops", "bool", "global"))
        rows.append(("Checkers", "bool", "P2"))
        for label in PIECE_LABELS[:5]:
            rows.append((f"Material count {label}", "int", "P1"))
    return tuple(
        ChannelDescriptor(i, name, kind, owner)
        for i, (name, kind, owner) in enumerate(rows)
    )


_LAYOUTS = {V1: _build_layout(V1), V2: _build_layout(V2)}
CHANNELS = {V1: len(_LAYOUTS[V1]), V2: len(_LAYOUTS[V2])}


def plane_layout(version: str) -> list[ChannelDescriptor]:
    """Channel descriptors in tensor order for a layout version."""
    if version not in _LAYOUTS:
        raise ValueError(f"unknown layout version {version!r}")
    return list(_LAYOUTS[version])


# Fixed positional pattern: 1 where frame file + frame rank is even.
_CHECKER_PATTERN = np.fromfunction(
    lambda r, f: (r + f) % 2 == 0, (8, 8)).astype(np.float64)


def _fill_squares(plane: np.ndarray, mask: int, flip: bool) -> None:
    for sq in cc._bits(mask):
        if flip:
            sq ^= 56
        plane[sq >> 3, sq & 7] = 1.0


def encode(pos: cc.Position, version: str = V2) -> PlaneStack:
    """Encode a position into a plane stack (see module docstring)."""
    layout = plane_layout(version)
    data = np.zeros((len(layout), 8, 8), dtype=np.float64)
    it = iter(layout)

    def take() -> np.ndarray:
        return data[next(it).index]

    mover = pos.side_to_move
    flip = mover == cc.BLACK
    opp = mover ^ 1

    for side in (mover, opp):
        for pt in PIECE_ORDER:
            _fill_squares(take(), pos.bb[side * 6 + pt], flip)

    take()[:] = 1.0 if pos.repetition_count >= 1 else 0.0
    take()[:] = 1.0 if pos.repetition_count >= 2 else 0.0

    ep_plane = take()
    if pos.ep_square is not None:
        _fill_squares(ep_plane, 1 << pos.ep_square, flip)

    if version == V1:
        take()[:] = 1.0 if mover == cc.WHITE else 0.0
        take()[:] = min(pos.fullmove_number / TOTAL_MOVE_NORM, 1.0)

    side_bits = {
        cc.WHITE: (cc.CASTLE_WK, cc.CASTLE_WQ),
        cc.BLACK: (cc.CASTLE_BK, cc.CASTLE_BQ),
    }
    for side in (mover, opp):
        for bit in side_bits[side]:
            take()[:] = 1.0 if pos.castling & bit else 0.0

    take()[:] = min(pos.halfmove_clock / NO_PROGRESS_NORM, 1.0)

    trail = pos.move_trail[:LAST_MOVE_PAIRS]
    for k in range(LAST_MOVE_PAIRS):
        origin, target = take(), take()
        if k < len(trail):
            _fill_squares(origin, 1 << trail[k].from_sq, flip)
            _fill_squares(target, 1 << trail[k].to_sq, flip)

    take()[:] = 0.0  # is960: standard chess only

    if version == V2:
        p1_mask = take()
        p2_mask = take()
        _fill_squares(p1_mask, pos.occupancy(mover), flip)
        _fill_squares(p2_mask, pos.occupancy(opp), flip)

        take()[:] = _CHECKER_PATTERN

        counts = {
            side: {pt: bin(pos.bb[side * 6 + pt]).count("1") for pt in MATERIAL_ORDER}
            for side in (mover, opp)
        }
        for pt in MATERIAL_ORDER:
            diff = (counts[mover][pt] - counts[opp][pt]) / MATERIAL_NORMS[pt]
            take()[:] = min(max(diff, -1.0), 1.0)

        take()[:] = 1.0 if _opposite_color_bishops(pos) else 0.0

        _fill_squares(take(), pos.checkers(), flip)

        for pt in MATERIAL_ORDER:
            take()[:] = min(counts[mover][pt] / MATERIAL_NORMS[pt], 1.0)

    return PlaneStack(len(layout), data, version)


def _opposite_color_bishops(pos: cc.Position) -> bool:
    """Exactly one bishop per side and the two stand on different colors."""
    white = pos.bb[cc.WHITE * 6 + cc.BISHOP]
    black = pos.bb[cc.BLACK * 6 + cc.BISHOP]
    if bin(white).count("1") != 1 or bin(black).count("1") != 1:
        return False
    w_sq = white.bit_length() - 1
    b_sq = black.bit_length() - 1
    return ((w_sq >> 3) + (w_sq & 7)) % 2 != ((b_sq >> 3) + (b_sq & 7)) % 2


# ---------------------------------------------------------------------------
# Reporting
# ---------------------------------------------------------------------------

def _format_value(v: float) -> str:
    return f"{v:.1f}" if v == int(v) else f"{v:g}"


def describe(stack: PlaneStack) -> str:
    """Channel-by-channel text dump: index, name, then either the constant
    value, the list of one-squares (in frame coordinates), or an ones count
    for dense patterns."""
    lines = [f"layout {stack.layout_version}, {stack.channels} channels"]
    for desc in plane_layout(stack.layout_version):
        plane = stack.data[desc.index]
        if desc.name == "Checkerboard":
            body = f"constant pattern, {int(plane.sum())} ones"
        elif np.all(plane == plane[0, 0]):
            body = f"constant {_format_value(float(plane[0, 0]))}"
        else:
            squares = [
                cc.square_name(r * 8 + f)
                for r in range(8) for f in range(8) if plane[r, f] != 0.0
            ]
            if len(squares) <= 16:
                body = "ones: " + " ".join(squares)
            else:
                body = f"{len(squares)} ones"
        lines.append(f"[{desc.index:2d}] {desc.name}: {body}")
    return "\n".join(lines)


def to_json_dict(stack: PlaneStack) -> dict:
    """JSON form: values are 64 floats per channel, row-major, rank 0 first."""
    layout = plane_layout(stack.layout_version)
    return {
        "version": stack.layout_version,
        "channels": [
            {
                "index": desc.index,
                "name": desc.name,
                "values": [float(v) for v in stack.data[desc.index].reshape(64)],
            }
            for desc in layout
        ],
    }
