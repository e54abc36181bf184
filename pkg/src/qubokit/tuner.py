"""Exact penalty-weight tuning for the resonance penalty pair (M5, M6).

With M1..M4 frozen, the energy of every basis state is affine in (M5, M6):
E(x) = e0(x) + M5*g(x) + M6*g(x)^2.  Enumerating all states turns the
weight choice into a plain linear program: maximize the gap between the
highest feasible energy and the lowest infeasible energy, subject to every
feasible state sitting below every infeasible one.  Dominated states are
pruned first, so the LP stays tiny.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle, simplex
from .boost import DesignInstance, PenaltyWeights, build_qubo
from .errors import ResourceLimitError

DEFAULT_WEIGHT_UPPER_BOUND = 50.0


@dataclass(frozen=True)
class EnergyDecomposition:
    """Per-basis-state energy split E = e0 + M5*e1 + M6*e2 with class tags."""

    n: int
    e0: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    classes: np.ndarray


@dataclass(frozen=True)
class LpProblem:
    """maximize objective . v  subject to  a_ub v <= b_ub and variable bounds."""

    objective: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray
    bounds: list[tuple[float | None, float | None]]
    var_names: tuple[str, ...]
    row_labels: tuple[str, ...]


@dataclass(frozen=True)
class TuneResult:
    m5: float
    m6: float
    gap: float
    active_rows: tuple[str, ...]

    @property
    def separation_ok(self) -> bool:
        return self.gap > 0

    def as_dict(self) -> dict:
        return {
            "M5": self.m5,
            "M6": self.m6,
            "gap": self.gap,
            "separation_ok": self.separation_ok,
            "active_rows": list(self.active_rows),
        }


def decompose_energies(
    instance: DesignInstance,
    m1: float = 5.0,
    m2: float = 5.0,
    m3: float = 5.0,
    m4: float = 5.0,
) -> EnergyDecomposition:
    """Enumerate e0 (cost + structural penalties), e1 = g, e2 = g^2, classes."""
    if instance.n_qubits > oracle.MAX_ENUM_QUBITS:
        raise ResourceLimitError(
            f"{instance.n_qubits} qubits exceeds the enumeration guard"
        )
    base = build_qubo(instance, PenaltyWeights(m1, m2, m3, m4, 0.0, 0.0))
    spectrum = oracle.classify(oracle.enumerate_model(base.model), instance)
    e1 = instance.violation_table()
    return EnergyDecomposition(
        n=instance.n_qubits,
        e0=spectrum.energies,
        e1=e1,
        e2=e1 * e1,
        classes=spectrum.classes,
    )


def _pareto_prune(rows: np.ndarray, keep_max: bool) -> np.ndarray:
    """Indices of the non-dominated (e0, e1, e2) triples.

    With M5, M6 >= 0, a feasible-side row is redundant if another row
    weakly exceeds it in every component (keep_max=True keeps the Pareto
    maxima); the infeasible side keeps Pareto minima.  Rows sharing a
    violation value are collapsed to their extreme e0 first, which keeps
    the quadratic scan tiny.
    """
    signed = rows if keep_max else -rows
    order = np.lexsort((signed[:, 0], signed[:, 2], signed[:, 1]))
    reduced_idx = []
    seen: dict[tuple[float, float], int] = {}
    for k in order:
        key = (round(float(signed[k, 1]), 12), round(float(signed[k, 2]), 12))
        seen[key] = k  # ascending e0 scan: the last write holds the extreme
    reduced_idx = sorted(seen.values())
    data = signed[reduced_idx]
    keep = []
    for pos, k in enumerate(reduced_idx):
        dominated = np.any(
            np.all(data >= data[pos], axis=1) & np.any(data > data[pos], axis=1)
        )
        if not dominated:
            keep.append(k)
    return np.array(keep, dtype=int)


def build_separation_lp(
    dec: EnergyDecomposition,
    weight_upper_bound: float = DEFAULT_WEIGHT_UPPER_BOUND,
) -> LpProblem:
    """LP over (M5, M6, u, v, gap): push every feasible energy under u,
    every infeasible energy over v, and maximize gap <= v - u."""
    feas = dec.classes != oracle.CLASS_INFEASIBLE
    infeas = ~feas
    if not np.any(feas):
        raise ValueError("no feasible states; nothing to separate")
    if not np.any(infeas):
        raise ValueError("no infeasible states; nothing to separate")

    triples = np.column_stack([dec.e0, dec.e1, dec.e2])
    f_rows = triples[feas]
    i_rows = triples[infeas]
    f_idx = np.nonzero(feas)[0]
    i_idx = np.nonzero(infeas)[0]
    f_keep = _pareto_prune(f_rows, keep_max=True)
    i_keep = _pareto_prune(i_rows, keep_max=False)

    rows = []
    rhs = []
    labels = []
    for k in f_keep:
        e0, e1, e2 = f_rows[k]
        rows.append([e1, e2, -1.0, 0.0, 0.0])  # e0 + M5 e1 + M6 e2 <= u
        rhs.append(-e0)
        labels.append(f"feasible:{int(f_idx[k])}")
    for k in i_keep:
        e0, e1, e2 = i_rows[k]
        rows.append([-e1, -e2, 0.0, 1.0, 0.0])  # e0 + M5 e1 + M6 e2 >= v
        rhs.append(e0)
        labels.append(f"infeasible:{int(i_idx[k])}")
    rows.append([0.0, 0.0, 1.0, -1.0, 1.0])  # gap <= v - u
    rhs.append(0.0)
    labels.append("gap_link")

    return LpProblem(
        objective=np.array([0.0, 0.0, 0.0, 0.0, 1.0]),
        a_ub=np.array(rows),
        b_ub=np.array(rhs),
        bounds=[
            (0.0, weight_upper_bound),
            (0.0, weight_upper_bound),
            (None, None),
            (None, None),
            (None, None),
        ],
        var_names=("m5", "m6", "u", "v", "gap"),
        row_labels=tuple(labels),
    )


def solve_lp(lp: LpProblem) -> TuneResult:
    """Run the simplex and package the tuned weights.

    separation_ok mirrors gap > 0; active_rows lists the constraints tight
    at the optimum (the supporting feasible/infeasible states).
    """
    result = simplex.maximize(lp.objective, lp.a_ub, lp.b_ub, lp.bounds)
    if result.status != simplex.STATUS_OPTIMAL:
        raise RuntimeError(f"separation LP ended {result.status}")
    x = result.x
    residual = lp.b_ub - lp.a_ub @ x
    active = tuple(
        label for label, r in zip(lp.row_labels, residual) if abs(r) <= 1e-7
    )
    return TuneResult(m5=float(x[0]), m6=float(x[1]), gap=float(x[4]), active_rows=active)


def tune_weights(
    instance: DesignInstance,
    m1: float = 5.0,
    m2: float = 5.0,
    m3: float = 5.0,
    m4: float = 5.0,
    weight_upper_bound: float = DEFAULT_WEIGHT_UPPER_BOUND,
) -> TuneResult:
    """End to end: decompose energies, build the separation LP, solve it."""
    dec = decompose_energies(instance, m1, m2, m3, m4)
    return solve_lp(build_separation_lp(dec, weight_upper_bound))
