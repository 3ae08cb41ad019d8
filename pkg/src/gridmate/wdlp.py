"""Value-head mathematics.

A value head can emit a plain scalar or a (win, draw, loss) distribution
plus a plies-to-end estimate.  This module holds the conversions between
the two and the corresponding training losses:

  classical:  alpha * (z - v)^2  - pi . log p  + c * |theta|^2
  wdlp:       -alpha * (WDL_t . log WDL_p) - w_pi * (pi . log p)
              + beta * (ply_t - ply_p)^2 + c * |theta|^2

Closed-form partial derivatives are provided so gradient checks can pin
the arithmetic down.  Everything is stateless pure math.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

WDL_ATOL = 1e-9

WHITE_WIN = "white_win"
DRAW = "draw"
BLACK_WIN = "black_win"


class WdlpOutput(NamedTuple):
    """Win/draw/loss distribution and predicted half-moves to game end."""

    win: float
    draw: float
    loss: float
    plies_left: float = 0.0


class LossWeights(NamedTuple):
    alpha: float          # value / wdl loss factor
    beta: float           # plies-to-end loss factor
    c: float              # L2 regularization factor
    policy_weight: float  # policy cross-entropy factor


# The classical loss carries its policy term unweighted; the wdlp loss
# uses the tuned factors (value/wdl 0.01, policy 0.988, plies 0.002).
CLASSICAL_WEIGHTS = LossWeights(alpha=0.01, beta=0.0, c=0.0, policy_weight=1.0)
WDLP_WEIGHTS = LossWeights(alpha=0.01, beta=0.002, c=0.0, policy_weight=0.988)


@dataclass(frozen=True)
class TrainingTarget:
    """Supervision for one position.

    wdl_target is a (win, draw, loss) triple from the mover's
    perspective, policy_target a probability vector over moves (soft
    visit counts or one-hot), plies_target the half-moves until the game
    ended, and outcome_scalar the classic z in {-1, 0, +1}.
    """

    wdl_target: tuple[float, float, float]
    policy_target: Optional[np.ndarray]
    plies_target: float
    outcome_scalar: float

    def __post_init__(self):
        total = sum(self.wdl_target)
        if abs(total - 1.0) > WDL_ATOL:
            raise ValueError(f"wdl_target sums to {total}, expected 1")
        if self.policy_target is not None:
            pol = np.asarray(self.policy_target, dtype=np.float64)
            object.__setattr__(self, "policy_target", pol)
            if abs(float(pol.sum()) - 1.0) > 1e-9:
                raise ValueError(f"policy_target sums to {pol.sum()}, expected 1")
        if self.plies_target < 0:
            raise ValueError(f"plies_target {self.plies_target} < 0")


def validate_wdl(out: WdlpOutput) -> None:
    total = out.win + out.draw + out.loss
    if abs(total - 1.0) > WDL_ATOL:
        raise ValueError(f"wdl triple sums to {total}, expected 1")
    for name, p in (("win", out.win), ("draw", out.draw), ("loss", out.loss)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} probability {p} outside [0, 1]")
    if out.plies_left < 0:
        raise ValueError(f"plies_left {out.plies_left} < 0")


def value_from_wdl(out: WdlpOutput) -> float:
    """Collapse a WDL distribution to the classic scalar: v = win - loss."""
    validate_wdl(out)
    return out.win - out.loss


def _policy_cross_entropy(policy_target: np.ndarray, p: Sequence[float]) -> float:
    pi = np.asarray(policy_target, dtype=np.float64)
    pv = np.asarray(p, dtype=np.float64)
    if pi.shape != pv.shape:
        raise ValueError(f"policy shapes differ: {pi.shape} vs {pv.shape}")
    live = pi > 0.0
    if np.any(pv[live] <= 0.0):
        i = int(np.argmax(live & (pv <= 0.0)))
        raise ValueError(
            f"policy cross-entropy is infinite: p[{i}] = 0 with target {pi[i]}")
    return float(-(pi[live] * np.log(pv[live])).sum())


def classical_loss(target: TrainingTarget, v: float, p: Sequence[float],
                   theta_sq_norm: float = 0.0,
                   w: LossWeights = CLASSICAL_WEIGHTS) -> float:
    """Squared-error value loss plus policy cross-entropy plus L2."""
    if target.policy_target is None:
        raise ValueError("target carries no policy distribution")
    if abs(v) > 1.0:
        raise ValueError(f"value {v} outside [-1, 1]")
    z = target.outcome_scalar
    return (w.alpha * (z - v) ** 2
            + w.policy_weight * _policy_cross_entropy(target.policy_target, p)
            + w.c * theta_sq_norm)


def classical_loss_partials(target: TrainingTarget, v: float, p: Sequence[float],
                            w: LossWeights = CLASSICAL_WEIGHTS):
    """(d/dv, d/dp) of classical_loss at the given point."""
    pi = target.policy_target
    pv = np.asarray(p, dtype=np.float64)
    d_v = -2.0 * w.alpha * (target.outcome_scalar - v)
    d_p = np.zeros_like(pv)
    live = pi > 0.0
    d_p[live] = -w.policy_weight * pi[live] / pv[live]
    return d_v, d_p


def wdlp_loss(target: TrainingTarget, pred: WdlpOutput, p: Sequence[float],
              theta_sq_norm: float = 0.0,
              w: LossWeights = WDLP_WEIGHTS) -> float:
    """WDL cross-entropy, policy cross-entropy, plies squared error, L2."""
    if target.policy_target is None:
        raise ValueError("target carries no policy distribution")
    validate_wdl(pred)
    wdl_term = 0.0
    for t, q, name in zip(target.wdl_target, pred[:3], ("win", "draw", "loss")):
        if t > 0.0:
            if q <= 0.0:
                raise ValueError(
                    f"wdl cross-entropy is infinite: predicted {name} = 0 "
                    f"with target {t}")
            wdl_term -= t * math.log(q)
    ply_err = target.plies_target - pred.plies_left
    return (w.alpha * wdl_term
            + w.policy_weight * _policy_cross_entropy(target.policy_target, p)
            + w.beta * ply_err ** 2
            + w.c * theta_sq_norm)


def wdlp_loss_partials(target: TrainingTarget, pred: WdlpOutput,
                       p: Sequence[float], w: LossWeights = WDLP_WEIGHTS):
    """(d/dWDL_p, d/dp, d/dply_p) of wdlp_loss at the given point."""
    d_wdl = np.zeros(3)
    for i, (t, q) in enumerate(zip(target.wdl_target, pred[:3])):
        if t > 0.0:
            d_wdl[i] = -w.alpha * t / q
    _, d_p = classical_loss_partials(target, 0.0, p,
                                     w=LossWeights(0.0, 0.0, 0.0, w.policy_weight))
    d_ply = -2.0 * w.beta * (target.plies_target - pred.plies_left)
    return d_wdl, d_p, d_ply


def target_from_game(result: str, side_to_move: int, plies_remaining: int,
                     policy_target: Optional[Sequence[float]] = None) -> TrainingTarget:
    """Build the supervision triple for one position of a finished game.

    `result` is white_win / draw / black_win; the WDL one-hot and z are
    expressed from the perspective of `side_to_move` (0 = white).
    """
    if result not in (WHITE_WIN, DRAW, BLACK_WIN):
        raise ValueError(f"unknown result {result!r}")
    if result == DRAW:
        z = 0.0
    else:
        mover_won = (result == WHITE_WIN) == (side_to_move == 0)
        z = 1.0 if mover_won else -1.0
    wdl = {1.0: (1.0, 0.0, 0.0), 0.0: (0.0, 1.0, 0.0), -1.0: (0.0, 0.0, 1.0)}[z]
    pol = None if policy_target is None else np.asarray(policy_target, dtype=np.float64)
    return TrainingTarget(wdl, pol, float(plies_remaining), z)
