"""Figures of merit for probabilistic solvers: CoP and time-to-solution."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracle


def cop(p_star: float, n: int) -> float:
    """Coefficient of performance: success probability relative to random
    guessing over 2^n bitstrings, i.e. p_star * 2^n."""
    if not 0.0 <= p_star <= 1.0:
        raise ValueError("probability must lie in [0, 1]")
    return p_star * (1 << n)


def tts(p_star: float, alpha: float = 0.99, lambda_per_shot: float = 1.0) -> float:
    """Shots needed to see the optimum at least once with confidence alpha.

    lambda_per_shot * ceil(ln(1-alpha) / ln(1-p_star)).  Returns inf for
    p_star = 0 and lambda_per_shot for p_star = 1.
    """
    if not 0.0 <= p_star <= 1.0:
        raise ValueError("probability must lie in [0, 1]")
    if p_star == 0.0:
        return math.inf
    if p_star == 1.0:
        return lambda_per_shot
    return lambda_per_shot * math.ceil(math.log(1.0 - alpha) / math.log(1.0 - p_star))


@dataclass(frozen=True)
class MeritRow:
    p: int
    prob_optimal: float
    prob_feasible: float
    cop: float
    tts: float
    most_probable_index: int
    most_probable_class: str
    expectation: float


@dataclass(frozen=True)
class MeritReport:
    n: int
    rows: tuple[MeritRow, ...]


def merit_row(
    p: int, probs: np.ndarray, classes: np.ndarray, n: int, expectation: float
) -> MeritRow:
    """Summarize one trained layer count from exact state probabilities.

    classes is indexed by basis index with oracle class codes; probability
    ties on the most probable state break toward the lower index.
    """
    p_opt = float(probs[classes == oracle.CLASS_OPTIMAL].sum())
    p_feas = float(probs[classes != oracle.CLASS_INFEASIBLE].sum())
    top = int(np.argmax(probs))
    return MeritRow(
        p=p,
        prob_optimal=p_opt,
        prob_feasible=p_feas,
        cop=cop(p_opt, n),
        tts=tts(p_opt),
        most_probable_index=top,
        most_probable_class=oracle.CLASS_LABELS[int(classes[top])],
        expectation=expectation,
    )
