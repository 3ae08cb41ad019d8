"""Round-robin match harness: deterministic engine pairings over an
opening suite, PGN export, and Elo differences anchored to a baseline.

Engines play at temperature 0 with fixed seeds, so a pairing's outcome
is a pure function of the configs and the opening; statistical spread
comes from opening diversity.  Elo uses the logistic inversion
-400*log10(1/s - 1), written as 400*(log10(s) - log10(1-s)) so that
antisymmetry in s holds exactly in floating point, with a delta-method
standard error; perfect scores report a bounded sentinel and a flag
instead of an infinite difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from . import chesscore as cc
from .inference import Evaluator
from .mcts import DEFAULT_C_PUCT, run_search

WHITE_WIN = "white_win"
DRAW = "draw"
BLACK_WIN = "black_win"
MOVE_LIMIT = "move_limit"
DEFAULT_MAX_PLIES = 200

# Elo difference reported for a perfect score, where the estimator
# diverges; consumers must check the saturated flag before trusting it.
SATURATED_ELO = 1000.0

_RESULT_TOKEN = {WHITE_WIN: "1-0", DRAW: "1/2-1/2", BLACK_WIN: "0-1"}


@dataclass(frozen=True)
class EngineConfig:
    name: str
    evaluator: Evaluator
    budget_nodes: int
    c_puct: float = DEFAULT_C_PUCT
    seed: int = 0

    def __post_init__(self):
        if self.budget_nodes < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget_nodes}")


@dataclass(frozen=True)
class GameRecord:
    white: str
    black: str
    opening: str  # FEN
    moves: tuple
    result: str
    termination: str  # a GameStatus value, or "move_limit"
    opening_index: int = 0


class PairCount(NamedTuple):
    wins: int
    draws: int
    losses: int


@dataclass
class MatchTable:
    engines: list
    pair_results: dict = field(default_factory=dict)  # (a, b) -> PairCount
    records: list = field(default_factory=list)

    def add(self, record: GameRecord) -> None:
        self.records.append(record)
        for me, other in ((record.white, record.black),
                          (record.black, record.white)):
            w, d, l = self.pair_results.get((me, other), PairCount(0, 0, 0))
            if record.result == DRAW:
                d += 1
            elif (record.result == WHITE_WIN) == (me == record.white):
                w += 1
            else:
                l += 1
            self.pair_results[(me, other)] = PairCount(w, d, l)

    def score(self, name: str) -> float:
        return sum(c.wins + c.draws / 2
                   for (a, _), c in self.pair_results.items() if a == name)

    def games_between(self, a: str, b: str) -> int:
        c = self.pair_results.get((a, b))
        return c.wins + c.draws + c.losses if c else 0


def play_game(white: EngineConfig, black: EngineConfig, opening: cc.Position,
              max_plies: int = DEFAULT_MAX_PLIES,
              opening_index: int = 0) -> GameRecord:
    """One deterministic game; draws are adjudicated at the ply limit."""
    if cc.game_status(opening) != cc.GameStatus.ONGOING:
        raise ValueError(f"opening is terminal: {cc.emit_fen(opening)}")
    pos = opening
    moves = []
    termination = MOVE_LIMIT
    for _ in range(max_plies):
        engine = white if pos.side_to_move == cc.WHITE else black
        result = run_search(pos, engine.evaluator, engine.budget_nodes,
                            c_puct=engine.c_puct, seed=engine.seed)
        if result.best_move not in cc.legal_moves(pos):
            raise RuntimeError(
                f"engine {engine.name} produced illegal move "
                f"{result.best_move.uci()} in {cc.emit_fen(pos)}")
        moves.append(result.best_move)
        pos = cc.apply_move(pos, result.best_move)
        status = cc.game_status(pos)
        if status != cc.GameStatus.ONGOING:
            termination = status.value
            break
    if termination == cc.GameStatus.CHECKMATE.value:
        outcome = WHITE_WIN if pos.side_to_move == cc.BLACK else BLACK_WIN
    else:
        outcome = DRAW
    return GameRecord(white=white.name, black=black.name,
                      opening=cc.emit_fen(opening), moves=tuple(moves),
                      result=outcome, termination=termination,
                      opening_index=opening_index)


def round_robin(engines: list, openings: list,
                games_per_pairing_per_opening: int = 1,
                max_plies: int = DEFAULT_MAX_PLIES) -> MatchTable:
    """Every unordered pair plays every opening with colors swapped."""
    if len(engines) < 2:
        raise ValueError("round robin needs at least 2 engines")
    if not openings:
        raise ValueError("round robin needs at least 1 opening")
    names = [e.name for e in engines]
    if len(set(names)) != len(names):
        raise ValueError("engine names must be unique")
    table = MatchTable(engines=names)
    for i, a in enumerate(engines):
        for b in engines[i + 1:]:
            for idx, opening in enumerate(openings):
                for _ in range(games_per_pairing_per_opening):
                    table.add(play_game(a, b, opening, max_plies, idx))
                    table.add(play_game(b, a, opening, max_plies, idx))
    return table


class EloEstimate(NamedTuple):
    elo: float
    stderr: float
    saturated: bool = False


def elo_from_score(score_rate: float, n_games: int) -> EloEstimate:
    """Elo difference implied by a score rate, with a delta-method stderr."""
    if n_games < 1:
        raise ValueError(f"need at least one game, got {n_games}")
    if not 0.0 <= score_rate <= 1.0:
        raise ValueError(f"score rate must be within [0, 1], got {score_rate}")
    if score_rate == 0.0 or score_rate == 1.0:
        sign = 1.0 if score_rate == 1.0 else -1.0
        return EloEstimate(sign * SATURATED_ELO, math.inf, saturated=True)
    elo = 400.0 * (math.log10(score_rate) - math.log10(1.0 - score_rate))
    stderr = (400.0 / math.log(10)) / math.sqrt(
        n_games * score_rate * (1.0 - score_rate))
    return EloEstimate(elo, stderr)


def anchor_elo(table: MatchTable, baseline_engine: str) -> dict:
    """Each engine's Elo from its head-to-head score against the baseline.

    The baseline sits at 0 by definition; an engine that never met the
    baseline is unrated (None).
    """
    if baseline_engine not in table.engines:
        raise ValueError(f"baseline {baseline_engine!r} did not participate")
    ratings: dict[str, Optional[EloEstimate]] = {
        baseline_engine: EloEstimate(0.0, 0.0)}
    for name in table.engines:
        if name == baseline_engine:
            continue
        games = table.games_between(name, baseline_engine)
        if games == 0:
            ratings[name] = None
            continue
        count = table.pair_results[(name, baseline_engine)]
        ratings[name] = elo_from_score((count.wins + count.draws / 2) / games,
                                       games)
    return ratings


def load_openings(path) -> list:
    """FEN or EPD records, one per line; '#' starts a comment line."""
    openings = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                openings.append(cc.parse_fen(line))
                continue
            except cc.FenError:
                pass
            # EPD: the four FEN base fields followed by opcodes
            base = " ".join(line.split()[:4])
            try:
                openings.append(cc.parse_fen(base))
            except cc.FenError as err:
                raise ValueError(f"{path}: line {lineno}: {err}")
    if not openings:
        raise ValueError(f"{path}: no openings")
    return openings


def _movetext(record: GameRecord) -> str:
    pos = cc.parse_fen(record.opening)
    tokens = []
    for i, mv in enumerate(record.moves):
        text = cc.san(pos, mv)
        if pos.side_to_move == cc.WHITE:
            tokens.append(f"{pos.fullmove_number}. {text}")
        elif i == 0:
            tokens.append(f"{pos.fullmove_number}... {text}")
        else:
            tokens.append(text)
        pos = cc.apply_move(pos, mv)
    tokens.append(_RESULT_TOKEN[record.result])
    lines = []
    current = ""
    for token in tokens:
        if current and len(current) + 1 + len(token) > 80:
            lines.append(current)
            current = token
        else:
            current = f"{current} {token}" if current else token
    lines.append(current)
    return "\n".join(lines)


def pgn_text(records: list) -> str:
    """All records as PGN: Seven Tag Roster, FEN/SetUp for set positions."""
    chunks = []
    for number, record in enumerate(records, start=1):
        tags = [
            ("Event", "Round robin"),
            ("Site", "desk"),
            ("Date", "????.??.??"),
            ("Round", str(number)),
            ("White", record.white),
            ("Black", record.black),
            ("Result", _RESULT_TOKEN[record.result]),
        ]
        if record.opening != cc.STARTPOS_FEN:
            tags.append(("SetUp", "1"))
            tags.append(("FEN", record.opening))
        tags.append(("Termination", record.termination))
        header = "\n".join(f'[{name} "{value}"]' for name, value in tags)
        chunks.append(f"{header}\n\n{_movetext(record)}\n")
    return "\n".join(chunks)


def write_pgn(records: list, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(pgn_text(records))
