"""Standard-chess rules kernel.

Bitboard position state, FEN input/output, legal move generation,
termination detection, and the game-history fields (repetition counts,
last-move trail) that the plane encoder consumes.

Squares are flat indices 0..63 with a1 = 0, h1 = 7, a8 = 56 (index =
rank * 8 + file).  Positions are immutable values: every mutation-like
operation returns a fresh ``Position``, so they are safe to share across
threads.
"""

from __future__ import annotations

import enum
from typing import NamedTuple, Optional

WHITE = 0
BLACK = 1

PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING = range(6)
PIECE_NAMES = ("PAWN", "KNIGHT", "BISHOP", "ROOK", "QUEEN", "KING")
PIECE_CHARS = "pnbrqk"

# Promotion encoding shared with the policy move index.
PROMO_NONE, PROMO_KNIGHT, PROMO_BISHOP, PROMO_ROOK, PROMO_QUEEN = range(5)
PROMO_CHARS = {PROMO_KNIGHT: "n", PROMO_BISHOP: "b", PROMO_ROOK: "r", PROMO_QUEEN: "q"}
PROMO_FROM_CHAR = {v: k for k, v in PROMO_CHARS.items()}
PROMO_TO_PIECE = {PROMO_KNIGHT: KNIGHT, PROMO_BISHOP: BISHOP, PROMO_ROOK: ROOK, PROMO_QUEEN: QUEEN}

# Castling-rights bitmask.
CASTLE_WK, CASTLE_WQ, CASTLE_BK, CASTLE_BQ = 1, 2, 4, 8

STARTPOS_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"

FULL_BOARD = (1 << 64) - 1


class FenError(ValueError):
    """Raised when a FEN string cannot be parsed; names the bad field."""


class IllegalMoveError(ValueError):
    """Raised when a move is applied to a position where it is not legal."""


class GameStatus(enum.Enum):
    ONGOING = "ongoing"
    CHECKMATE = "checkmate"
    STALEMATE = "stalemate"
    DRAW_FIFTY_MOVE = "draw_fifty_move"
    DRAW_THREEFOLD = "draw_threefold"
    DRAW_INSUFFICIENT_MATERIAL = "draw_insufficient_material"


class Square(NamedTuple):
    """Board cell addressed by file (a..h -> 0..7) and rank (1..8 -> 0..7)."""

    file_index: int
    rank_index: int

    @property
    def index(self) -> int:
        return self.rank_index * 8 + self.file_index

    @classmethod
    def from_index(cls, index: int) -> "Square":
        return cls(index & 7, index >> 3)


def square_name(sq: int) -> str:
    return "abcdefgh"[sq & 7] + str((sq >> 3) + 1)


def parse_square(text: str) -> int:
    if len(text) != 2 or text[0] not in "abcdefgh" or text[1] not in "12345678":
        raise ValueError(f"bad square {text!r}")
    return (int(text[1]) - 1) * 8 + "abcdefgh".index(text[0])


class Move(NamedTuple):
    """A move as (from, to, promotion) plus castle / en-passant flags.

    Field order gives the canonical sort: ascending from-square, then
    to-square, then promotion code.
    """

    from_sq: int
    to_sq: int
    promotion: int = PROMO_NONE
    is_castle: bool = False
    is_en_passant: bool = False

    def uci(self) -> str:
        """Long algebraic text, e.g. ``e2e4`` or ``e7e8q``."""
        suffix = PROMO_CHARS.get(self.promotion, "")
        return square_name(self.from_sq) + square_name(self.to_sq) + suffix

    def __str__(self) -> str:
        return self.uci()


# ---------------------------------------------------------------------------
# Attack tables
# ---------------------------------------------------------------------------

def _build_step_table(steps: list[tuple[int, int]]) -> list[int]:
    table = []
    for sq in range(64):
        f, r = sq & 7, sq >> 3
        mask = 0
        for df, dr in steps:
            nf, nr = f + df, r + dr
            if 0 <= nf < 8 and 0 <= nr < 8:
                mask |= 1 << (nr * 8 + nf)
        table.append(mask)
    return table


KNIGHT_ATTACKS = _build_step_table(
    [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
)
KING_ATTACKS = _build_step_table(
    [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
)
# PAWN_ATTACKS[side][sq] = squares a pawn of `side` on `sq` attacks.
PAWN_ATTACKS = (
    _build_step_table([(-1, 1), (1, 1)]),
    _build_step_table([(-1, -1), (1, -1)]),
)

_BISHOP_DIRS = [(1, 1), (-1, 1), (1, -1), (-1, -1)]
_ROOK_DIRS = [(1, 0), (-1, 0), (0, 1), (0, -1)]


def _build_rays(dirs: list[tuple[int, int]]) -> list[list[list[int]]]:
    rays = []
    for sq in range(64):
        f, r = sq & 7, sq >> 3
        per_sq = []
        for df, dr in dirs:
            ray = []
            nf, nr = f + df, r + dr
            while 0 <= nf < 8 and 0 <= nr < 8:
                ray.append(nr * 8 + nf)
                nf += df
                nr += dr
            if ray:
                per_sq.append(ray)
        rays.append(per_sq)
    return rays


BISHOP_RAYS = _build_rays(_BISHOP_DIRS)
ROOK_RAYS = _build_rays(_ROOK_DIRS)

# BETWEEN[a][b] = mask of squares strictly between a and b when aligned, else 0.
BETWEEN = [[0] * 64 for _ in range(64)]
for _a in range(64):
    for _rays in (BISHOP_RAYS[_a], ROOK_RAYS[_a]):
        for _ray in _rays:
            _mask = 0
            for _b in _ray:
                BETWEEN[_a][_b] = _mask
                _mask |= 1 << _b


# All squares a queen on sq would see on an empty board; any direct
# checker must stand on one of these or on a knight-jump square.
QUEEN_RAYS_EMPTY = [0] * 64
for _sq in range(64):
    _mask = 0
    for _rays in (BISHOP_RAYS[_sq], ROOK_RAYS[_sq]):
        for _ray in _rays:
            for _t in _ray:
                _mask |= 1 << _t
    QUEEN_RAYS_EMPTY[_sq] = _mask


def _slider_attacks(sq: int, occ: int, rays: list[list[int]]) -> int:
    mask = 0
    for ray in rays:
        for t in ray:
            bit = 1 << t
            mask |= bit
            if occ & bit:
                break
    return mask


def bishop_attacks(sq: int, occ: int) -> int:
    return _slider_attacks(sq, occ, BISHOP_RAYS[sq])


def rook_attacks(sq: int, occ: int) -> int:
    return _slider_attacks(sq, occ, ROOK_RAYS[sq])


def _bits(bb: int):
    """Iterate set-bit indices of a bitboard, ascending."""
    while bb:
        lsb = bb & -bb
        yield lsb.bit_length() - 1
        bb ^= lsb


def _attackers_to(bb: list[int], occ: int, sq: int, side: int) -> int:
    """Mask of `side` pieces attacking `sq` under occupancy `occ`."""
    base = side * 6
    mask = PAWN_ATTACKS[side ^ 1][sq] & bb[base + PAWN]
    mask |= KNIGHT_ATTACKS[sq] & bb[base + KNIGHT]
    mask |= KING_ATTACKS[sq] & bb[base + KING]
    diag = bishop_attacks(sq, occ)
    mask |= diag & (bb[base + BISHOP] | bb[base + QUEEN])
    line = rook_attacks(sq, occ)
    mask |= line & (bb[base + ROOK] | bb[base + QUEEN])
    return mask


# ---------------------------------------------------------------------------
# Position
# ---------------------------------------------------------------------------

_CASTLE_CLEAR_BY_SQUARE = {4: CASTLE_WK | CASTLE_WQ, 0: CASTLE_WQ, 7: CASTLE_WK,
                           60: CASTLE_BK | CASTLE_BQ, 56: CASTLE_BQ, 63: CASTLE_BK}


class Position:
    """Immutable full game state.

    Besides the FEN-visible fields this carries the played-game history
    needed by the encoder: a repetition count for the current position and
    the trail of up to eight most recent moves (newest first).
    """

    __slots__ = (
        "bb", "side_to_move", "castling", "ep_square", "halfmove_clock",
        "fullmove_number", "move_trail", "history_keys", "key",
        "repetition_count", "_legal", "_checkers",
    )

    def __init__(self, bb, side_to_move, castling, ep_square, halfmove_clock,
                 fullmove_number, move_trail=(), history_keys=()):
        self.bb = tuple(bb)
        self.side_to_move = side_to_move
        self.castling = castling
        self.ep_square = ep_square
        self.halfmove_clock = halfmove_clock
        self.fullmove_number = fullmove_number
        self.move_trail = tuple(move_trail)
        self.history_keys = tuple(history_keys)
        self.key = _position_key(self.bb, side_to_move, castling, ep_square)
        self.repetition_count = self.history_keys.count(self.key)
        self._legal = None
        self._checkers = None

    # -- derived views ----------------------------------------------------

    def occupancy(self, side: Optional[int] = None) -> int:
        if side is None:
            return self.occupancy(WHITE) | self.occupancy(BLACK)
        base = side * 6
        b = self.bb
        return b[base] | b[base + 1] | b[base + 2] | b[base + 3] | b[base + 4] | b[base + 5]

    def piece_at(self, sq: int) -> Optional[tuple[int, int]]:
        """(side, piece_type) on a square, or None."""
        bit = 1 << sq
        for i, board in enumerate(self.bb):
            if board & bit:
                return divmod(i, 6)
        return None

    def king_square(self, side: int) -> int:
        return (self.bb[side * 6 + KING]).bit_length() - 1

    def checkers(self) -> int:
        """Mask of opponent pieces giving check to the side to move."""
        if self._checkers is None:
            occ = self.occupancy()
            self._checkers = _attackers_to(
                list(self.bb), occ, self.king_square(self.side_to_move),
                self.side_to_move ^ 1)
        return self._checkers

    def is_check(self) -> bool:
        return self.checkers() != 0

    def __eq__(self, other) -> bool:
        return isinstance(other, Position) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Position({emit_fen(self)!r})"


def _position_key(bb, side, castling, ep_square) -> tuple:
    """Repetition identity: placement, mover, castling rights, and the
    en-passant square only when a legal en-passant capture exists."""
    ep = ep_square if ep_square is not None and _ep_capturable(bb, side, ep_square) else None
    return (bb, side, castling, ep)


def _ep_capturable(bb, side, ep_square) -> bool:
    candidates = PAWN_ATTACKS[side ^ 1][ep_square] & bb[side * 6 + PAWN]
    for from_sq in _bits(candidates):
        mv = Move(from_sq, ep_square, is_en_passant=True)
        if _king_safe_after(list(bb), side, mv):
            return True
    return False


# ---------------------------------------------------------------------------
# Board deltas (shared by apply_move, legality tests, check detection)
# ---------------------------------------------------------------------------

def _apply_to_boards(bb: list[int], side: int, mv: Move) -> list[int]:
    """New piece boards after `mv` by `side`; no metadata bookkeeping."""
    out = list(bb)
    base = side * 6
    from_bit = 1 << mv.from_sq
    to_bit = 1 << mv.to_sq
    for pt in range(6):
        if out[base + pt] & from_bit:
            out[base + pt] ^= from_bit
            if mv.promotion:
                out[base + PROMO_TO_PIECE[mv.promotion]] |= to_bit
            else:
                out[base + pt] |= to_bit
            break
    enemy = (side ^ 1) * 6
    if mv.is_en_passant:
        cap_bit = 1 << (mv.to_sq - 8 if side == WHITE else mv.to_sq + 8)
        out[enemy + PAWN] ^= cap_bit
    else:
        for pt in range(6):
            if out[enemy + pt] & to_bit:
                out[enemy + pt] ^= to_bit
                break
    if mv.is_castle:
        rank_base = 0 if side == WHITE else 56
        if mv.to_sq == rank_base + 6:  # king side
            out[base + ROOK] ^= (1 << (rank_base + 7)) | (1 << (rank_base + 5))
        else:
            out[base + ROOK] ^= (1 << rank_base) | (1 << (rank_base + 3))
    return out


def _king_safe_after(bb: list[int], side: int, mv: Move) -> bool:
    new_bb = _apply_to_boards(bb, side, mv)
    occ = 0
    for board in new_bb:
        occ |= board
    ksq = new_bb[side * 6 + KING].bit_length() - 1
    return _attackers_to(new_bb, occ, ksq, side ^ 1) == 0


def gives_check(pos: Position, mv: Move) -> bool:
    """True when `mv` leaves the opponent's king in check.

    Cheap path for ordinary moves (direct attack from the landing square
    plus a discovered-check ray scan); castles fall back to a full board
    delta since the rook moves too.
    """
    side = pos.side_to_move
    if mv.is_castle:
        new_bb = _apply_to_boards(list(pos.bb), side, mv)
        occ = 0
        for board in new_bb:
            occ |= board
        eksq = new_bb[(side ^ 1) * 6 + KING].bit_length() - 1
        return _attackers_to(new_bb, occ, eksq, side) != 0

    bb = pos.bb
    eksq = pos.king_square(side ^ 1)
    from_bit = 1 << mv.from_sq
    to_bit = 1 << mv.to_sq
    occ = (pos.occupancy() & ~from_bit) | to_bit
    if mv.is_en_passant:
        occ &= ~(1 << (mv.to_sq - 8 if side == WHITE else mv.to_sq + 8))

    # Direct check from the landing square.
    if mv.promotion:
        pt = PROMO_TO_PIECE[mv.promotion]
    else:
        base = side * 6
        pt = next(p for p in range(6) if bb[base + p] & from_bit)
    if pt == PAWN:
        if PAWN_ATTACKS[side][mv.to_sq] & (1 << eksq):
            return True
    elif pt == KNIGHT:
        if KNIGHT_ATTACKS[mv.to_sq] & (1 << eksq):
            return True
    elif pt in (BISHOP, QUEEN):
        if bishop_attacks(mv.to_sq, occ) & (1 << eksq):
            return True
    if pt in (ROOK, QUEEN):
        if rook_attacks(mv.to_sq, occ) & (1 << eksq):
            return True

    # Discovered check: vacating from_sq (or the en-passant victim's
    # square) may open a slider ray onto the king.
    base = side * 6
    diag = bb[base + BISHOP] | bb[base + QUEEN]
    line = bb[base + ROOK] | bb[base + QUEEN]
    if bishop_attacks(eksq, occ) & diag & ~from_bit:
        return True
    if rook_attacks(eksq, occ) & line & ~from_bit:
        return True
    return False


# ---------------------------------------------------------------------------
# Legal move generation
# ---------------------------------------------------------------------------

def legal_moves(pos: Position) -> list[Move]:
    """All legal moves, sorted ascending by (from, to, promotion)."""
    if pos._legal is None:
        pos._legal = sorted(_generate_legal(pos), key=lambda m: m[:3])
    return list(pos._legal)


def _generate_legal(pos: Position) -> list[Move]:
    side = pos.side_to_move
    enemy = side ^ 1
    bb = list(pos.bb)
    base = side * 6
    own_occ = pos.occupancy(side)
    enemy_occ = pos.occupancy(enemy)
    occ = own_occ | enemy_occ
    ksq = pos.king_square(side)
    checkers = pos.checkers()
    moves: list[Move] = []

    # King steps: exclude squares attacked with the king lifted off the board.
    occ_no_king = occ ^ (1 << ksq)
    for t in _bits(KING_ATTACKS[ksq] & ~own_occ):
        if _attackers_to(bb, occ_no_king ^ ((1 << t) & enemy_occ), t, enemy) == 0:
            moves.append(Move(ksq, t))

    n_checkers = bin(checkers).count("1")
    if n_checkers >= 2:
        return moves

    if n_checkers == 1:
        csq = checkers.bit_length() - 1
        target_mask = checkers | BETWEEN[ksq][csq]
    else:
        target_mask = FULL_BOARD

    pinned, pin_rays = _pins(bb, occ, ksq, side)

    def allowed(from_sq: int) -> int:
        bit = 1 << from_sq
        if pinned & bit:
            return target_mask & pin_rays[from_sq]
        return target_mask

    # Knights (a pinned knight can never move).
    for f in _bits(bb[base + KNIGHT] & ~pinned):
        for t in _bits(KNIGHT_ATTACKS[f] & ~own_occ & target_mask):
            moves.append(Move(f, t))

    for f in _bits(bb[base + BISHOP]):
        for t in _bits(bishop_attacks(f, occ) & ~own_occ & allowed(f)):
            moves.append(Move(f, t))
    for f in _bits(bb[base + ROOK]):
        for t in _bits(rook_attacks(f, occ) & ~own_occ & allowed(f)):
            moves.append(Move(f, t))
    for f in _bits(bb[base + QUEEN]):
        mask = (bishop_attacks(f, occ) | rook_attacks(f, occ)) & ~own_occ & allowed(f)
        for t in _bits(mask):
            moves.append(Move(f, t))

    # Pawns.
    push = 8 if side == WHITE else -8
    start_rank = 1 if side == WHITE else 6
    promo_rank = 7 if side == WHITE else 0
    for f in _bits(bb[base + PAWN]):
        ok = allowed(f)
        t = f + push
        if not occ & (1 << t):
            if ok & (1 << t):
                _push_pawn_move(moves, f, t, promo_rank)
            if (f >> 3) == start_rank:
                t2 = t + push
                if not occ & (1 << t2) and ok & (1 << t2):
                    moves.append(Move(f, t2))
        for t in _bits(PAWN_ATTACKS[side][f] & enemy_occ & ok):
            _push_pawn_move(moves, f, t, promo_rank)

    # En passant: rare and subtle (the captured pawn leaves a second hole),
    # so just simulate king safety directly.
    if pos.ep_square is not None:
        for f in _bits(PAWN_ATTACKS[enemy][pos.ep_square] & bb[base + PAWN]):
            mv = Move(f, pos.ep_square, is_en_passant=True)
            if _king_safe_after(bb, side, mv):
                moves.append(mv)

    # Castling.
    if n_checkers == 0:
        moves.extend(_castle_moves(pos, bb, occ, ksq, side, enemy))

    return moves


def _push_pawn_move(moves: list[Move], f: int, t: int, promo_rank: int) -> None:
    if (t >> 3) == promo_rank:
        for promo in (PROMO_KNIGHT, PROMO_BISHOP, PROMO_ROOK, PROMO_QUEEN):
            moves.append(Move(f, t, promo))
    else:
        moves.append(Move(f, t))


def _pins(bb: list[int], occ: int, ksq: int, side: int) -> tuple[int, dict[int, int]]:
    """Absolutely pinned own pieces and, per pinned square, the ray mask
    (pinning slider plus squares between) the piece must stay on."""
    enemy = (side ^ 1) * 6
    own_occ = 0
    for pt in range(6):
        own_occ |= bb[side * 6 + pt]
    pinned = 0
    rays: dict[int, int] = {}
    for ray_set, sliders in (
        (BISHOP_RAYS[ksq], bb[enemy + BISHOP] | bb[enemy + QUEEN]),
        (ROOK_RAYS[ksq], bb[enemy + ROOK] | bb[enemy + QUEEN]),
    ):
        for ray in ray_set:
            blocker = -1
            for t in ray:
                bit = 1 << t
                if not occ & bit:
                    continue
                if blocker < 0:
                    if bit & own_occ:
                        blocker = t
                        continue
                    break  # enemy piece first: a check, not a pin
                if sliders & bit:
                    pinned |= 1 << blocker
                    rays[blocker] = BETWEEN[ksq][t] | bit
                break
    return pinned, rays


_CASTLE_LANES = {
    # side -> (rights_bit, king_to, rook_home, empty_mask, king_path)
    WHITE: (
        (CASTLE_WK, 6, 7, (1 << 5) | (1 << 6), (5, 6)),
        (CASTLE_WQ, 2, 0, (1 << 1) | (1 << 2) | (1 << 3), (3, 2)),
    ),
    BLACK: (
        (CASTLE_BK, 62, 63, (1 << 61) | (1 << 62), (61, 62)),
        (CASTLE_BQ, 58, 56, (1 << 57) | (1 << 58) | (1 << 59), (59, 58)),
    ),
}


def _castle_moves(pos, bb, occ, ksq, side, enemy):
    out = []
    home = 4 if side == WHITE else 60
    if ksq != home:
        return out
    for rights, king_to, rook_home, empty_mask, king_path in _CASTLE_LANES[side]:
        if not pos.castling & rights:
            continue
        if not bb[side * 6 + ROOK] & (1 << rook_home):
            continue
        if occ & empty_mask:
            continue
        if any(_attackers_to(bb, occ, s, enemy) for s in king_path):
            continue
        out.append(Move(home, king_to, is_castle=True))
    return out


# ---------------------------------------------------------------------------
# Applying moves
# ---------------------------------------------------------------------------

def apply_move(pos: Position, mv: Move) -> Position:
    """Play a legal move, returning the successor position.

    Raises IllegalMoveError when `mv` is not legal in `pos`.
    """
    if mv not in legal_moves(pos):
        raise IllegalMoveError(f"illegal move {mv.uci()} in {emit_fen(pos)}")

    side = pos.side_to_move
    bb = _apply_to_boards(list(pos.bb), side, mv)

    is_pawn_move = bool(pos.bb[side * 6 + PAWN] & (1 << mv.from_sq))
    is_capture = mv.is_en_passant or bool(pos.occupancy(side ^ 1) & (1 << mv.to_sq))

    castling = pos.castling
    castling &= ~_CASTLE_CLEAR_BY_SQUARE.get(mv.from_sq, 0)
    castling &= ~_CASTLE_CLEAR_BY_SQUARE.get(mv.to_sq, 0)

    ep_square = None
    if is_pawn_move and abs(mv.to_sq - mv.from_sq) == 16:
        ep_square = (mv.from_sq + mv.to_sq) // 2

    return Position(
        bb,
        side ^ 1,
        castling,
        ep_square,
        0 if (is_pawn_move or is_capture) else pos.halfmove_clock + 1,
        pos.fullmove_number + (1 if side == BLACK else 0),
        move_trail=(mv,) + pos.move_trail[:7],
        history_keys=pos.history_keys + (pos.key,),
    )


def move_from_uci(pos: Position, text: str) -> Move:
    """Resolve long-algebraic move text against the legal moves of `pos`."""
    text = text.strip()
    if not 4 <= len(text) <= 5:
        raise ValueError(f"bad move text {text!r}")
    from_sq = parse_square(text[:2])
    to_sq = parse_square(text[2:4])
    promo = PROMO_FROM_CHAR.get(text[4].lower()) if len(text) == 5 else PROMO_NONE
    if promo is None:
        raise ValueError(f"bad promotion in {text!r}")
    for mv in legal_moves(pos):
        if mv.from_sq == from_sq and mv.to_sq == to_sq and mv.promotion == promo:
            return mv
    raise IllegalMoveError(f"illegal move {text!r} in {emit_fen(pos)}")


# ---------------------------------------------------------------------------
# Game termination
# ---------------------------------------------------------------------------

def game_status(pos: Position) -> GameStatus:
    """FIDE termination state: mate and stalemate first, then the draws
    (50-move at 100 plies, threefold at two prior occurrences, bare
    material)."""
    if not legal_moves(pos):
        return GameStatus.CHECKMATE if pos.is_check() else GameStatus.STALEMATE
    if pos.halfmove_clock >= 100:
        return GameStatus.DRAW_FIFTY_MOVE
    if pos.repetition_count >= 2:
        return GameStatus.DRAW_THREEFOLD
    if _insufficient_material(pos):
        return GameStatus.DRAW_INSUFFICIENT_MATERIAL
    return GameStatus.ONGOING


def _insufficient_material(pos: Position) -> bool:
    bb = pos.bb
    if bb[PAWN] | bb[6 + PAWN] | bb[ROOK] | bb[6 + ROOK] | bb[QUEEN] | bb[6 + QUEEN]:
        return False
    knights = bb[KNIGHT] | bb[6 + KNIGHT]
    bishops = bb[BISHOP] | bb[6 + BISHOP]
    minors = bin(knights | bishops).count("1")
    if minors <= 1:
        return True
    if knights:
        return False
    # Only bishops: drawn when they all stand on one square color.
    dark = 0xAA55AA55AA55AA55
    return bishops & dark == bishops or bishops & ~dark == bishops


# ---------------------------------------------------------------------------
# FEN
# ---------------------------------------------------------------------------

def parse_fen(text: str) -> Position:
    """Build a Position from a 4-6 field FEN record.

    The word ``startpos`` is accepted as shorthand for the initial
    position.  History fields start empty (no trail, repetition 0).
    """
    text = text.strip()
    if text == "startpos":
        text = STARTPOS_FEN
    fields = text.split()
    if not 4 <= len(fields) <= 6:
        raise FenError(f"expected 4-6 FEN fields, got {len(fields)}")
    placement, active, castling_text, ep_text = fields[:4]
    halfmove_text = fields[4] if len(fields) >= 5 else "0"
    fullmove_text = fields[5] if len(fields) >= 6 else "1"

    ranks = placement.split("/")
    if len(ranks) != 8:
        raise FenError("placement: expected 8 ranks")
    bb = [0] * 12
    for rank_idx, row in enumerate(ranks):
        rank = 7 - rank_idx
        file_idx = 0
        for ch in row:
            if ch.isdigit():
                if ch == "0" or ch == "9":
                    raise FenError(f"placement: bad empty-run {ch!r}")
                file_idx += int(ch)
            else:
                pt = PIECE_CHARS.find(ch.lower())
                if pt < 0 or file_idx >= 8:
                    raise FenError(f"placement: bad rank {row!r}")
                side = WHITE if ch.isupper() else BLACK
                bb[side * 6 + pt] |= 1 << (rank * 8 + file_idx)
                file_idx += 1
        if file_idx != 8:
            raise FenError(f"placement: rank {row!r} does not span 8 files")

    for side, label in ((WHITE, "white"), (BLACK, "black")):
        kings = bin(bb[side * 6 + KING]).count("1")
        if kings != 1:
            raise FenError(f"placement: {label} has {kings} kings, expected 1")

    if active not in ("w", "b"):
        raise FenError(f"active color: {active!r}")
    side_to_move = WHITE if active == "w" else BLACK

    castling = 0
    if castling_text != "-":
        lookup = {"K": CASTLE_WK, "Q": CASTLE_WQ, "k": CASTLE_BK, "q": CASTLE_BQ}
        for ch in castling_text:
            bit = lookup.get(ch)
            if bit is None or castling & bit:
                raise FenError(f"castling: {castling_text!r}")
            castling |= bit

    ep_square = None
    if ep_text != "-":
        try:
            ep_square = parse_square(ep_text)
        except ValueError:
            raise FenError(f"en passant: {ep_text!r}") from None
        if ep_square >> 3 not in (2, 5):
            raise FenError(f"en passant: {ep_text!r} not on rank 3 or 6")

    try:
        halfmove = int(halfmove_text)
        fullmove = int(fullmove_text)
    except ValueError:
        raise FenError(f"clocks: {halfmove_text!r} {fullmove_text!r}") from None
    if halfmove < 0:
        raise FenError(f"halfmove clock: {halfmove} < 0")
    if fullmove < 1:
        raise FenError(f"fullmove number: {fullmove} < 1")

    pos = Position(bb, side_to_move, castling, ep_square, halfmove, fullmove)
    # a position where the mover could capture the enemy king is not
    # reachable by legal play and breaks every downstream assumption
    idle = side_to_move ^ 1
    occ = pos.occupancy()
    idle_king = pos.king_square(idle)
    if _attackers_to(bb, occ, idle_king, side_to_move):
        raise FenError("placement: side not to move is in check")
    return pos


def emit_fen(pos: Position) -> str:
    rows = []
    for rank in range(7, -1, -1):
        row = ""
        empty = 0
        for file in range(8):
            piece = pos.piece_at(rank * 8 + file)
            if piece is None:
                empty += 1
                continue
            if empty:
                row += str(empty)
                empty = 0
            side, pt = piece
            ch = PIECE_CHARS[pt]
            row += ch.upper() if side == WHITE else ch
        if empty:
            row += str(empty)
        rows.append(row)
    castle = "".join(
        ch for ch, bit in zip("KQkq", (CASTLE_WK, CASTLE_WQ, CASTLE_BK, CASTLE_BQ))
        if pos.castling & bit
    ) or "-"
    ep = square_name(pos.ep_square) if pos.ep_square is not None else "-"
    return " ".join([
        "/".join(rows),
        "w" if pos.side_to_move == WHITE else "b",
        castle,
        ep,
        str(pos.halfmove_clock),
        str(pos.fullmove_number),
    ])


def startpos() -> Position:
    return parse_fen(STARTPOS_FEN)


# ---------------------------------------------------------------------------
# Mirroring, perft, SAN
# ---------------------------------------------------------------------------

def _mirror_sq(sq: int) -> int:
    return sq ^ 56


def _mirror_castling(castling: int) -> int:
    out = 0
    if castling & CASTLE_WK:
        out |= CASTLE_BK
    if castling & CASTLE_WQ:
        out |= CASTLE_BQ
    if castling & CASTLE_BK:
        out |= CASTLE_WK
    if castling & CASTLE_BQ:
        out |= CASTLE_WQ
    return out


def _mirror_boards(bb) -> list[int]:
    flipped = []
    for board in bb:
        out = 0
        for sq in _bits(board):
            out |= 1 << (sq ^ 56)
        flipped.append(out)
    return flipped[6:] + flipped[:6]


def mirror_move(mv: Move) -> Move:
    return Move(_mirror_sq(mv.from_sq), _mirror_sq(mv.to_sq), mv.promotion,
                mv.is_castle, mv.is_en_passant)


def mirror_position(pos: Position) -> Position:
    """Color-mirrored twin: board flipped vertically, colors and castling
    rights swapped, side to move flipped.  Game history (trail, repetition
    keys) is mirrored along with it."""
    mirrored_history = tuple(
        (tuple(_mirror_boards(k[0])), k[1] ^ 1, _mirror_castling(k[2]),
         None if k[3] is None else _mirror_sq(k[3]))
        for k in pos.history_keys
    )
    return Position(
        _mirror_boards(pos.bb),
        pos.side_to_move ^ 1,
        _mirror_castling(pos.castling),
        None if pos.ep_square is None else _mirror_sq(pos.ep_square),
        pos.halfmove_clock,
        pos.fullmove_number,
        move_trail=tuple(mirror_move(m) for m in pos.move_trail),
        history_keys=mirrored_history,
    )


def perft(pos: Position, depth: int) -> int:
    """Exhaustive legal-move-tree node count (bulk count at the leaves)."""
    if depth <= 0:
        return 1
    moves = legal_moves(pos)
    if depth == 1:
        return len(moves)
    return sum(perft(apply_move(pos, mv), depth - 1) for mv in moves)


def san(pos: Position, mv: Move) -> str:
    """Standard algebraic notation for a legal move, with +/# suffix."""
    if mv.is_castle:
        text = "O-O" if (mv.to_sq & 7) == 6 else "O-O-O"
    else:
        side, pt = pos.piece_at(mv.from_sq)
        capture = mv.is_en_passant or pos.occupancy(side ^ 1) & (1 << mv.to_sq)
        if pt == PAWN:
            text = square_name(mv.from_sq)[0] + "x" if capture else ""
            text += square_name(mv.to_sq)
            if mv.promotion:
                text += "=" + PROMO_CHARS[mv.promotion].upper()
        else:
            text = PIECE_CHARS[pt].upper()
            others = [
                m for m in legal_moves(pos)
                if m.to_sq == mv.to_sq and m.from_sq != mv.from_sq
                and pos.piece_at(m.from_sq)[1] == pt
            ]
            if others:
                same_file = any((m.from_sq & 7) == (mv.from_sq & 7) for m in others)
                same_rank = any((m.from_sq >> 3) == (mv.from_sq >> 3) for m in others)
                if not same_file:
                    text += square_name(mv.from_sq)[0]
                elif not same_rank:
                    text += square_name(mv.from_sq)[1]
                else:
                    text += square_name(mv.from_sq)
            if capture:
                text += "x"
            text += square_name(mv.to_sq)
    child = apply_move(pos, mv)
    status = game_status(child)
    if status == GameStatus.CHECKMATE:
        text += "#"
    elif child.is_check():
        text += "+"
    return text
