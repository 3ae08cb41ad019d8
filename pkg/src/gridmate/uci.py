"""Line-oriented UCI front end.

The reader loop stays on the calling thread; each `go` runs the search
on a worker thread so `stop` can interrupt it at a simulation boundary.
Unknown commands are noted and ignored per UCI convention.  Scores map
v in [-1, 1] to centipawns by a flat x100; `wdl` info reports the root
evaluation scaled to permille, adjusted so the triple sums to 1000.
"""

from __future__ import annotations

import threading
import time

from . import chesscore as cc
from .inference import (NetworkFormatError, load_network, material_oracle,
                        network_evaluator)
from .mcts import DEFAULT_C_PUCT, run_search

ENGINE_NAME = "gridmate"
ENGINE_AUTHOR = "the gridmate developers"
DEFAULT_NODES = 256
_CALIBRATION_SIMS = 48


class EngineSession:
    """One UCI conversation: current position, options, at most one search."""

    def __init__(self, out):
        self._out = out
        self._write_lock = threading.Lock()
        self.position = cc.startpos()
        self.evaluator = material_oracle
        self.c_puct = DEFAULT_C_PUCT
        self.default_nodes = DEFAULT_NODES
        self.seed = 0
        self._thread = None
        self._stop = threading.Event()
        self._nodes_per_ms = None

    def send(self, line: str) -> None:
        with self._write_lock:
            self._out.write(line + "\n")
            self._out.flush()

    # -- commands -----------------------------------------------------------

    def cmd_uci(self) -> None:
        self.send(f"id name {ENGINE_NAME}")
        self.send(f"id author {ENGINE_AUTHOR}")
        self.send(f"option name Nodes type spin default {DEFAULT_NODES} "
                  "min 1 max 1048576")
        self.send(f"option name CPuct type string default {DEFAULT_C_PUCT}")
        self.send("option name EvaluatorPath type string default ")
        self.send("uciok")

    def cmd_isready(self) -> None:
        self.send("readyok")

    def cmd_ucinewgame(self) -> None:
        self.halt()
        self.position = cc.startpos()

    def cmd_position(self, args: list) -> None:
        self.halt(interrupt=False)
        try:
            if not args:
                raise cc.FenError("position needs startpos or fen")
            if args[0] == "startpos":
                pos = cc.startpos()
                rest = args[1:]
            elif args[0] == "fen":
                moves_at = args.index("moves") if "moves" in args else len(args)
                pos = cc.parse_fen(" ".join(args[1:moves_at]))
                rest = args[moves_at:]
            else:
                raise cc.FenError(f"unknown position kind {args[0]!r}")
            if rest:
                if rest[0] != "moves":
                    raise cc.FenError(f"expected 'moves', got {rest[0]!r}")
                for text in rest[1:]:
                    pos = cc.apply_move(pos, cc.move_from_uci(pos, text))
        except (cc.FenError, cc.IllegalMoveError, ValueError) as err:
            self.send(f"info string error: {err}")
            return
        self.position = pos

    def cmd_setoption(self, args: list) -> None:
        # setoption name <id> value <x>
        self.halt(interrupt=False)
        try:
            name_at = args.index("name") + 1
            value_at = args.index("value")
            name = " ".join(args[name_at:value_at]).strip().lower()
            value = " ".join(args[value_at + 1:]).strip()
        except ValueError:
            self.send("info string error: malformed setoption")
            return
        try:
            if name == "nodes":
                nodes = int(value)
                if nodes < 1:
                    raise ValueError("Nodes must be >= 1")
                self.default_nodes = nodes
            elif name == "cpuct":
                self.c_puct = float(value)
            elif name == "evaluatorpath":
                self.evaluator = network_evaluator(load_network(value))
            else:
                self.send(f"info string ignoring unknown option: {name}")
        except (ValueError, OSError, NetworkFormatError) as err:
            self.send(f"info string error: {err}")

    def _movetime_budget(self, millis: float) -> int:
        if self._nodes_per_ms is None:
            t0 = time.perf_counter()
            run_search(cc.startpos(), self.evaluator, _CALIBRATION_SIMS,
                       c_puct=self.c_puct)
            elapsed_ms = max((time.perf_counter() - t0) * 1000.0, 1e-3)
            self._nodes_per_ms = _CALIBRATION_SIMS / elapsed_ms
        return max(1, int(millis * self._nodes_per_ms))

    def cmd_go(self, args: list) -> None:
        self.halt(interrupt=False)
        budget = self.default_nodes
        fields = dict(zip(args[::2], args[1::2]))
        try:
            if "nodes" in fields:
                budget = int(fields["nodes"])
            elif "movetime" in fields:
                budget = self._movetime_budget(float(fields["movetime"]))
            if budget < 1:
                raise ValueError("node budget must be >= 1")
        except ValueError as err:
            self.send(f"info string error: {err}")
            return
        if cc.game_status(self.position) != cc.GameStatus.ONGOING:
            self.send("info string error: position is terminal")
            return
        self._stop.clear()
        self._thread = threading.Thread(
            target=self._search, args=(self.position, budget), daemon=True)
        self._thread.start()

    def _search(self, pos: cc.Position, budget: int) -> None:
        result = run_search(pos, self.evaluator, budget, c_puct=self.c_puct,
                            seed=self.seed, should_stop=self._stop.is_set)
        sims = sum(result.visit_distribution.values()) + 1
        wdlp = result.root_eval.wdlp
        w = round(wdlp.win * 1000)
        l = round(wdlp.loss * 1000)
        d = max(0, 1000 - w - l)
        cp = round(result.root_value * 100)
        self.send(f"info depth {sims} nodes {result.nodes_expanded} "
                  f"score cp {cp} wdl {w} {d} {l}")
        self.send(f"bestmove {result.best_move.uci()}")

    def cmd_stop(self) -> None:
        self._stop.set()

    def halt(self, interrupt: bool = True) -> None:
        """Wait out the worker; interrupt=False lets it finish its budget,
        so a quit right after go still reports the full deterministic
        search rather than a truncated one."""
        if interrupt:
            self._stop.set()
        if self._thread is not None and self._thread.is_alive():
            self._thread.join()
        self._thread = None


def uci_loop(instream, outstream) -> int:
    session = EngineSession(outstream)
    for raw in instream:
        line = raw.strip()
        if not line:
            continue
        command, *args = line.split()
        if command == "uci":
            session.cmd_uci()
        elif command == "isready":
            session.cmd_isready()
        elif command == "ucinewgame":
            session.cmd_ucinewgame()
        elif command == "position":
            session.cmd_position(args)
        elif command == "setoption":
            session.cmd_setoption(args)
        elif command == "go":
            session.cmd_go(args)
        elif command == "stop":
            session.cmd_stop()
        elif command == "quit":
            break
        else:
            session.send(f"info string ignoring unknown command: {command}")
    session.halt(interrupt=False)
    return 0
