"""PUCT Monte-Carlo tree search over any evaluator.

Single-threaded, fully deterministic: no Dirichlet noise, no virtual
loss, no transposition table, unvisited edges start at Q = 0, and ties
fall to canonical move order.  The budget counts simulations; each
simulation that reaches a new non-terminal leaf costs one evaluator
call, while revisiting a terminal node uses its exact game value for
free.  Values are always from the perspective of the side to move at
the node, negated once per ply on the way back up.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple, Optional

from . import chesscore as cc
from .inference import EvalOutput, Evaluator

DEFAULT_C_PUCT = 2.5

TERMINAL_VALUES = {
    cc.GameStatus.CHECKMATE: -1.0,  # side to move has been mated
    cc.GameStatus.STALEMATE: 0.0,
    cc.GameStatus.DRAW_FIFTY_MOVE: 0.0,
    cc.GameStatus.DRAW_THREEFOLD: 0.0,
    cc.GameStatus.DRAW_INSUFFICIENT_MATERIAL: 0.0,
}


class SearchNode:
    """One expanded position: per-edge statistics in canonical move order."""

    __slots__ = ("position", "moves", "priors", "n", "w", "children",
                 "terminal_value")

    def __init__(self, position: cc.Position, moves: list[cc.Move],
                 priors: list[float],
                 terminal_value: Optional[float] = None):
        self.position = position
        self.moves = moves
        self.priors = priors
        self.n = [0] * len(moves)
        self.w = [0.0] * len(moves)
        self.children: list[Optional[SearchNode]] = [None] * len(moves)
        self.terminal_value = terminal_value

    def q(self, edge: int) -> float:
        n = self.n[edge]
        return self.w[edge] / n if n else 0.0

    def visit_total(self) -> int:
        return sum(self.n)


class SearchResult(NamedTuple):
    best_move: cc.Move
    root_value: float
    visit_distribution: dict
    nodes_expanded: int
    root_eval: EvalOutput
    root: SearchNode


def puct_select(node: SearchNode, c_puct: float = DEFAULT_C_PUCT) -> int:
    """Index of the edge maximizing Q + c_puct * P * sqrt(sum N)/(1 + N).

    With no visits anywhere the exploration term is zero for every edge,
    so the first edge in canonical order wins the all-zero tie.
    """
    sqrt_total = math.sqrt(node.visit_total())
    best_edge = 0
    best_score = -math.inf
    for i in range(len(node.moves)):
        n = node.n[i]
        q = node.w[i] / n if n else 0.0
        score = q + c_puct * node.priors[i] * sqrt_total / (1 + n)
        if score > best_score:
            best_score = score
            best_edge = i
    return best_edge


def _make_node(pos: cc.Position, evaluator: Evaluator):
    """Child node plus (value from its mover's perspective, eval or None)."""
    status = cc.game_status(pos)
    if status != cc.GameStatus.ONGOING:
        value = TERMINAL_VALUES[status]
        return SearchNode(pos, [], [], terminal_value=value), value, None
    legal = cc.legal_moves(pos)
    out = evaluator(pos, legal)
    priors = [out.prior(mv) for mv in legal]
    return SearchNode(pos, legal, priors), out.value, out


def run_search(pos: cc.Position, evaluator: Evaluator, budget_nodes: int,
               c_puct: float = DEFAULT_C_PUCT, seed: int = 0,
               should_stop: Optional[Callable[[], bool]] = None) -> SearchResult:
    """Run `budget_nodes` simulations from `pos` and report the results.

    The search itself is deterministic; `seed` is accepted so callers can
    keep a stable configuration surface, but nothing here draws random
    numbers.  `should_stop` is polled between simulations and ends the
    search early (the first simulation always completes).
    """
    del seed  # deterministic search: reserved, never consumed
    if budget_nodes < 1:
        raise ValueError(f"budget must be >= 1, got {budget_nodes}")
    if cc.game_status(pos) != cc.GameStatus.ONGOING:
        raise ValueError(f"search root is terminal: {cc.emit_fen(pos)}")

    root, root_value, root_eval = _make_node(pos, evaluator)
    expanded = 1
    total_value = root_value
    sims = 1

    while sims < budget_nodes:
        if should_stop is not None and should_stop():
            break
        node = root
        path = []
        while True:
            if node.terminal_value is not None:
                value = node.terminal_value
                break
            edge = puct_select(node, c_puct)
            child = node.children[edge]
            if child is None:
                child_pos = cc.apply_move(node.position, node.moves[edge])
                child, value, child_eval = _make_node(child_pos, evaluator)
                if child_eval is not None:
                    expanded += 1
                node.children[edge] = child
                path.append((node, edge))
                break
            path.append((node, edge))
            node = child
        for parent, edge in reversed(path):
            value = -value
            parent.n[edge] += 1
            parent.w[edge] += value
        total_value += value
        sims += 1

    # max() keeps the first maximum, which is the canonical tie-break
    # because root.moves is already in canonical order.
    best_edge = max(range(len(root.moves)), key=lambda i: root.n[i])
    return SearchResult(
        best_move=root.moves[best_edge],
        root_value=total_value / sims,
        visit_distribution={mv: root.n[i] for i, mv in enumerate(root.moves)},
        nodes_expanded=expanded,
        root_eval=root_eval,
        root=root,
    )


def visit_policy(result: SearchResult, temperature: float = 1.0) -> dict:
    """Visit counts sharpened into move probabilities: prob proportional
    to N^(1/T); T = 0 is argmax mode (one-hot at best_move).  An all-zero
    count map (budget 1) also falls back to the one-hot."""
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    moves = list(result.visit_distribution)
    counts = [result.visit_distribution[mv] for mv in moves]
    if temperature == 0.0 or not any(counts):
        return {mv: (1.0 if mv == result.best_move else 0.0) for mv in moves}
    weights = [c ** (1.0 / temperature) for c in counts]
    total = sum(weights)
    return {mv: wgt / total for mv, wgt in zip(moves, weights)}
