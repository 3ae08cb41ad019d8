"""Rules-kernel tests: perft pins, an independent mailbox oracle, FEN IO,
termination detection, repetition identity, mirroring, and SAN."""

import random

import pytest

from gridmate import chesscore as cc
from oracle_engine import OracleBoard, san_to_uci

# Well-known perft positions with published node counts.
PERFT_CASES = [
    (cc.STARTPOS_FEN, [20, 400, 8902]),
    ("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
     [48, 2039]),
    ("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1", [14, 191, 2812]),
    ("r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1",
     [6, 264, 9467]),
    ("rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8",
     [44, 1486]),
    ("r4rk1/1pp1qppp/p1np1n2/2b1p1B1/2B1P1b1/P1NP1N2/1PP1QPPP/R4RK1 w - - 0 10",
     [46, 2079]),
]


def test_perft():
    for fen, counts in PERFT_CASES:
        pos = cc.parse_fen(fen)
        for depth, want in enumerate(counts, start=1):
            assert cc.perft(pos, depth) == want, (fen, depth)


def random_playout(seed, plies=60):
    """Yield positions along a random legal game from the start position."""
    rng = random.Random(seed)
    pos = cc.startpos()
    yield pos
    for _ in range(plies):
        moves = cc.legal_moves(pos)
        if not moves or cc.game_status(pos) != cc.GameStatus.ONGOING:
            return
        pos = cc.apply_move(pos, rng.choice(moves))
        yield pos


def test_movegen_matches_mailbox_oracle():
    """Bitboard generator against the mailbox oracle along random games."""
    for seed in range(6):
        for pos in random_playout(seed):
            oracle = OracleBoard(cc.emit_fen(pos))
            got = {m.uci() for m in cc.legal_moves(pos)}
            assert got == oracle.legal_moves(), cc.emit_fen(pos)
            assert pos.is_check() == oracle.in_check()


def test_movegen_matches_oracle_on_tricky_fens():
    for fen, _ in PERFT_CASES:
        pos = cc.parse_fen(fen)
        assert {m.uci() for m in cc.legal_moves(pos)} == OracleBoard(fen).legal_moves()


def test_moves_in_canonical_order():
    pos = cc.parse_fen("5n2/4P3/8/8/8/1k6/8/4K3 w - - 0 1")
    moves = cc.legal_moves(pos)
    assert moves == sorted(moves, key=lambda m: (m.from_sq, m.to_sq, m.promotion))
    promos = [m.promotion for m in moves if m.from_sq == cc.parse_square("e7")
              and m.to_sq == cc.parse_square("f8")]
    assert promos == [cc.PROMO_KNIGHT, cc.PROMO_BISHOP, cc.PROMO_ROOK, cc.PROMO_QUEEN]


# -- FEN --------------------------------------------------------------------

def test_fen_round_trip():
    fens = [cc.STARTPOS_FEN] + [fen for fen, _ in PERFT_CASES]
    for fen in fens:
        assert cc.emit_fen(cc.parse_fen(fen)) == fen


def test_fen_round_trip_along_games():
    for pos in random_playout(99, plies=40):
        again = cc.parse_fen(cc.emit_fen(pos))
        assert cc.emit_fen(again) == cc.emit_fen(pos)
        assert again.bb == pos.bb


def test_fen_four_fields_defaults_clocks():
    pos = cc.parse_fen("8/4k3/8/8/8/3K4/8/8 w - -")
    assert pos.halfmove_clock == 0
    assert pos.fullmove_number == 1


def test_fen_startpos_shorthand():
    assert cc.emit_fen(cc.parse_fen("startpos")) == cc.STARTPOS_FEN


@pytest.mark.parametrize("fen, field", [
    ("8/8/8/8/8/8/8 w - - 0 1", "placement"),
    ("9/4k3/8/8/8/3K4/8/8 w - - 0 1", "placement"),
    ("8/4k3/8/8/8/3K4/8/8 x - - 0 1", "active color"),
    ("8/4k3/8/8/8/3K4/8/8 w KK - 0 1", "castling"),
    ("8/4k3/8/8/8/3K4/8/8 w - e5 0 1", "en passant"),
    ("8/4k3/8/8/8/3K4/8/8 w - - -1 1", "halfmove"),
    ("8/4k3/8/8/8/3K4/8/8 w - - 0 0", "fullmove"),
    ("8/4k3/8/8/8/8/8/8 w - - 0 1", "kings"),
    ("8/4k3/8/8/8/3K4/3K4/8 w - - 0 1", "kings"),
    ("too few", "fields"),
])
def test_fen_errors_name_the_field(fen, field):
    with pytest.raises(cc.FenError) as err:
        cc.parse_fen(fen)
    assert field in str(err.value)


# -- applying moves ---------------------------------------------------------

def test_apply_move_sets_en_passant_square():
    pos = cc.apply_move(cc.startpos(), cc.move_from_uci(cc.startpos(), "e2e4"))
    assert cc.emit_fen(pos) == (
        "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1")


def test_apply_move_clock_rules():
    pos = cc.startpos()
    pos = cc.apply_move(pos, cc.move_from_uci(pos, "g1f3"))
    assert pos.halfmove_clock == 1 and pos.fullmove_number == 1
    pos = cc.apply_move(pos, cc.move_from_uci(pos, "b8c6"))
    assert pos.halfmove_clock == 2 and pos.fullmove_number == 2
    pos = cc.apply_move(pos, cc.move_from_uci(pos, "e2e4"))
    assert pos.halfmove_clock == 0  # pawn move resets


def test_capture_resets_halfmove_clock():
    pos = cc.parse_fen("4k3/8/8/3n4/8/4N3/8/4K3 w - - 7 30")
    pos = cc.apply_move(pos, cc.move_from_uci(pos, "e3d5"))
    assert pos.halfmove_clock == 0


def test_castling_rights_updates():
    # King move drops both rights for the mover only.
    pos = cc.parse_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1")
    after = cc.apply_move(pos, cc.move_from_uci(pos, "e1e2"))
    assert after.castling == cc.CASTLE_BK | cc.CASTLE_BQ
    # Rook move drops its own side's right.
    after = cc.apply_move(pos, cc.move_from_uci(pos, "h1g1"))
    assert after.castling == cc.CASTLE_WQ | cc.CASTLE_BK | cc.CASTLE_BQ
    # Capturing a rook on its home square drops the opponent's right.
    pos = cc.parse_fen("r3k2r/8/8/8/8/6n1/8/R3K2R b KQkq - 0 1")
    after = cc.apply_move(pos, cc.move_from_uci(pos, "g3h1"))
    assert not after.castling & cc.CASTLE_WK
    assert after.castling & cc.CASTLE_WQ


def test_castle_moves_rook_too():
    pos = cc.parse_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1")
    after = cc.apply_move(pos, cc.move_from_uci(pos, "e1g1"))
    assert after.piece_at(cc.parse_square("f1")) == (cc.WHITE, cc.ROOK)
    assert after.piece_at(cc.parse_square("g1")) == (cc.WHITE, cc.KING)
    after = cc.apply_move(pos, cc.move_from_uci(pos, "e1c1"))
    assert after.piece_at(cc.parse_square("d1")) == (cc.WHITE, cc.ROOK)


def test_en_passant_capture_removes_pawn():
    pos = cc.parse_fen("4k3/8/8/8/4p3/8/3P4/4K3 w - - 0 1")
    pos = cc.apply_move(pos, cc.move_from_uci(pos, "d2d4"))
    mv = cc.move_from_uci(pos, "e4d3")
    assert mv.is_en_passant
    after = cc.apply_move(pos, mv)
    assert after.piece_at(cc.parse_square("d4")) is None
    assert after.piece_at(cc.parse_square("d3")) == (cc.BLACK, cc.PAWN)


def test_apply_illegal_move_raises():
    pos = cc.startpos()
    with pytest.raises(cc.IllegalMoveError):
        cc.apply_move(pos, cc.Move(cc.parse_square("e2"), cc.parse_square("e5")))
    with pytest.raises(cc.IllegalMoveError):
        cc.move_from_uci(pos, "e7e5")
    with pytest.raises(ValueError):
        cc.move_from_uci(pos, "e2e4x")


def test_move_trail_newest_first_capped_at_eight():
    pos = cc.startpos()
    played = []
    for uci in ["e2e4", "e7e5", "g1f3", "b8c6", "f1c4", "g8f6",
                "d2d3", "f8c5", "b1c3", "d7d6"]:
        mv = cc.move_from_uci(pos, uci)
        pos = cc.apply_move(pos, mv)
        played.append(mv)
    assert len(pos.move_trail) == 8
    assert list(pos.move_trail) == played[::-1][:8]


# -- repetition and termination ---------------------------------------------

def test_repetition_count_knight_shuffle():
    pos = cc.startpos()
    counts = []
    for uci in "g1f3 g8f6 f3g1 f6g8 g1f3 g8f6 f3g1 f6g8".split():
        pos = cc.apply_move(pos, cc.move_from_uci(pos, uci))
        counts.append(pos.repetition_count)
    # Start placement recurs after each full shuffle; knight-out placements
    # recur one cycle later.
    assert counts == [0, 0, 0, 1, 1, 1, 1, 2]
    assert cc.game_status(pos) == cc.GameStatus.DRAW_THREEFOLD


def test_repetition_key_ignores_dead_en_passant():
    via_move = cc.apply_move(cc.startpos(), cc.move_from_uci(cc.startpos(), "e2e4"))
    no_ep = cc.parse_fen(
        "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq - 0 1")
    assert via_move.key == no_ep.key


def test_repetition_key_keeps_live_en_passant():
    live = cc.parse_fen(
        "rnbqkbnr/ppp1pppp/8/8/3pP3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 2")
    dead = cc.parse_fen(
        "rnbqkbnr/ppp1pppp/8/8/3pP3/8/PPPP1PPP/RNBQKBNR b KQkq - 0 2")
    assert live.key != dead.key


def test_repetition_key_ignores_pinned_en_passant():
    # The only capturer of the d-pawn is pinned along the rank, so the ep
    # square contributes nothing to the position identity.
    pinned = cc.parse_fen("8/8/8/8/k2Pp2Q/8/8/4K3 b - d3 0 1")
    plain = cc.parse_fen("8/8/8/8/k2Pp2Q/8/8/4K3 b - - 0 1")
    assert "e4d3" not in {m.uci() for m in cc.legal_moves(pinned)}
    assert pinned.key == plain.key


@pytest.mark.parametrize("fen, status", [
    ("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1", cc.GameStatus.STALEMATE),
    ("5k2/5P2/5K2/8/8/8/8/8 b - - 0 1", cc.GameStatus.STALEMATE),
    ("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3",
     cc.GameStatus.CHECKMATE),
    ("7k/8/6K1/8/8/8/8/4R3 b - - 100 80", cc.GameStatus.DRAW_FIFTY_MOVE),
    ("8/4k3/8/8/8/3K4/8/8 w - - 0 1", cc.GameStatus.DRAW_INSUFFICIENT_MATERIAL),
    ("8/4k3/8/8/8/3KB3/8/8 w - - 0 1", cc.GameStatus.DRAW_INSUFFICIENT_MATERIAL),
    ("8/4k3/8/8/8/3KN3/8/8 w - - 0 1", cc.GameStatus.DRAW_INSUFFICIENT_MATERIAL),
    ("8/4k3/8/8/8/3K4/8/B1B5 w - - 0 1", cc.GameStatus.DRAW_INSUFFICIENT_MATERIAL),
    ("8/4kb2/8/8/8/3KB3/8/8 w - - 0 1", cc.GameStatus.ONGOING),
    ("8/4k3/8/8/8/3KN3/8/6N1 w - - 0 1", cc.GameStatus.ONGOING),
    (cc.STARTPOS_FEN, cc.GameStatus.ONGOING),
])
def test_game_status(fen, status):
    assert cc.game_status(cc.parse_fen(fen)) == status


def test_mate_takes_precedence_over_fifty_move():
    # Mate delivered exactly as the clock hits 100 plies still counts.
    pos = cc.parse_fen("6k1/5ppp/8/8/8/8/8/K3R3 w - - 99 80")
    after = cc.apply_move(pos, cc.move_from_uci(pos, "e1e8"))
    assert after.halfmove_clock == 100
    assert cc.game_status(after) == cc.GameStatus.CHECKMATE


# -- mirroring ----------------------------------------------------------------

def test_mirror_startpos_is_startpos():
    assert cc.emit_fen(cc.mirror_position(cc.startpos())) == cc.STARTPOS_FEN.replace(
        " w ", " b ")


def test_mirror_involution_and_move_sets():
    for fen, _ in PERFT_CASES:
        pos = cc.parse_fen(fen)
        twin = cc.mirror_position(pos)
        assert cc.emit_fen(cc.mirror_position(twin)) == fen
        ours = {m.uci() for m in cc.legal_moves(pos)}
        theirs = {cc.mirror_move(m).uci() for m in cc.legal_moves(twin)}
        assert ours == theirs
        assert cc.game_status(pos).value == cc.game_status(twin).value


def test_mirror_swaps_castling_rights():
    pos = cc.parse_fen("r3k2r/8/8/8/8/8/8/R3K2R w Kq - 0 1")
    twin = cc.mirror_position(pos)
    assert twin.castling == cc.CASTLE_BK | cc.CASTLE_WQ


def test_mirror_preserves_repetition_count():
    pos = cc.startpos()
    for uci in "g1f3 g8f6 f3g1 f6g8".split():
        pos = cc.apply_move(pos, cc.move_from_uci(pos, uci))
    assert pos.repetition_count == 1
    assert cc.mirror_position(pos).repetition_count == 1


# -- SAN ----------------------------------------------------------------------

def test_san_cases():
    pos = cc.startpos()
    assert cc.san(pos, cc.move_from_uci(pos, "e2e4")) == "e4"
    pos = cc.parse_fen(
        "r1bqkb1r/pppp1ppp/2n2n2/4p3/2B1P3/5N2/PPPP1PPP/RNBQK2R w KQkq - 4 4")
    assert cc.san(pos, cc.move_from_uci(pos, "e1g1")) == "O-O"
    pos = cc.parse_fen("r3k2r/8/8/8/8/8/8/R3K2R b KQkq - 0 1")
    assert cc.san(pos, cc.move_from_uci(pos, "e8c8")) == "O-O-O"
    pos = cc.parse_fen("1k6/8/8/8/8/8/8/KN3N2 w - - 0 1")
    assert cc.san(pos, cc.move_from_uci(pos, "b1d2")) == "Nbd2"
    pos = cc.parse_fen("k7/8/8/8/8/8/8/KR4R1 w - - 0 1")
    assert cc.san(pos, cc.move_from_uci(pos, "b1d1")) == "Rbd1"
    pos = cc.parse_fen("4k3/8/8/3p4/4P3/8/8/4K3 w - - 0 1")
    assert cc.san(pos, cc.move_from_uci(pos, "e4d5")) == "exd5"
    pos = cc.parse_fen("4k3/1P6/8/8/8/8/8/4K3 w - - 0 1")
    assert cc.san(pos, cc.move_from_uci(pos, "b7b8q")) == "b8=Q+"
    pos = cc.parse_fen("6k1/5ppp/8/8/8/8/8/K3R3 w - - 0 1")
    assert cc.san(pos, cc.move_from_uci(pos, "e1e8")) == "Re8#"


def test_san_round_trips_through_oracle():
    """Every SAN we write must resolve to the same move via the oracle."""
    for seed in (3, 11):
        for pos in random_playout(seed, plies=30):
            moves = cc.legal_moves(pos)
            if not moves:
                break
            oracle = OracleBoard(cc.emit_fen(pos))
            for mv in moves[:6]:
                assert san_to_uci(oracle, cc.san(pos, mv)) == mv.uci()


# -- misc helpers -------------------------------------------------------------

def test_square_helpers():
    assert cc.square_name(0) == "a1"
    assert cc.square_name(63) == "h8"
    assert cc.parse_square("e4") == 28
    assert cc.Square.from_index(28) == cc.Square(4, 3)
    assert cc.Square(4, 3).index == 28


def test_gives_check():
    pos = cc.parse_fen("6k1/5ppp/8/8/8/8/8/K3R3 w - - 0 1")
    assert cc.gives_check(pos, cc.move_from_uci(pos, "e1e8"))
    assert not cc.gives_check(pos, cc.move_from_uci(pos, "e1e2"))


def test_gives_check_matches_naive_application():
    # Promotions, discovered checks, en passant, castling rook checks.
    fens = [
        "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
        "rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8",
        "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1",
        "3k4/8/8/8/8/8/8/R3K3 w Q - 0 1",  # O-O-O checks the d8 king
    ]
    for fen in fens:
        pos = cc.parse_fen(fen)
        for mv in cc.legal_moves(pos):
            child = cc.apply_move(pos, mv)
            assert cc.gives_check(pos, mv) == child.is_check(), (fen, mv.uci())
    for seed in (21, 22):
        for pos in random_playout(seed, plies=40):
            for mv in cc.legal_moves(pos)[:10]:
                child = cc.apply_move(pos, mv)
                assert cc.gives_check(pos, mv) == child.is_check()


def test_checkers_mask():
    pos = cc.parse_fen("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3")
    checkers = pos.checkers()
    assert checkers == 1 << cc.parse_square("h4")
