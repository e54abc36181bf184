"""The four-variable textbook problem used throughout the docs and tests.

f(x) = -3 x0 - 3 x3 + 2 x0 x1 + 2 x1 x2 + 2 x2 x3 over x in {0,1}^4, with
unique minimum -6 at x = (1, 0, 0, 1), i.e. basis index 9.
"""

from __future__ import annotations

from .pbool import IsingModel, PseudoBooleanPoly, QuboModel, qubo_to_ising, to_qubo

OPTIMAL_INDEX = 9
OPTIMAL_VALUE = -6.0
NUM_VARS = 4


def didactic_poly() -> PseudoBooleanPoly:
    return PseudoBooleanPoly(
        NUM_VARS,
        {(0,): -3.0, (3,): -3.0, (0, 1): 2.0, (1, 2): 2.0, (2, 3): 2.0},
    )


def didactic_qubo() -> QuboModel:
    return to_qubo(didactic_poly())


def didactic_ising() -> IsingModel:
    return qubo_to_ising(didactic_qubo())
