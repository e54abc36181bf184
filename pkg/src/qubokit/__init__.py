"""qubokit: a QUBO/Ising workbench for constrained component selection.

Encode constrained combinatorial design problems as penalized quadratic
binary models, solve them exactly by enumeration and approximately by a
QAOA statevector simulation, tune penalty weights with a linear program,
and export spectra, landscapes, figures of merit, and circuits.
"""

from .pbool import (
    IsingModel,
    LinearExpr,
    PseudoBooleanPoly,
    QuboModel,
    VarRegistry,
    ising_to_qubo,
    qubo_to_ising,
    to_qubo,
)
from .qaoa import QaoaParams, TrainConfig, TrainTrace

__all__ = [
    "IsingModel",
    "LinearExpr",
    "PseudoBooleanPoly",
    "QuboModel",
    "QaoaParams",
    "TrainConfig",
    "TrainTrace",
    "VarRegistry",
    "ising_to_qubo",
    "qubo_to_ising",
    "to_qubo",
]

__version__ = "0.1.0"
