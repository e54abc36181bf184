"""Exhaustive ground-truth engine: full 2^n spectra and classification.

Enumeration is chunked so memory stays bounded and the work can be spread
over threads; chunks are merged in ascending basis-index order, so results
are identical regardless of worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import bitconv
from .errors import ResourceLimitError
from .pbool import IsingModel, QuboModel

# 2^26 energies is ~0.5 GB; anything larger is not desk scale.
MAX_ENUM_QUBITS = 26
_CHUNK = 1 << 18

GROUND_TIE_TOL = 1e-9

CLASS_OPTIMAL = 0
CLASS_FEASIBLE = 1
CLASS_INFEASIBLE = 2
CLASS_LABELS = {CLASS_OPTIMAL: "optimal", CLASS_FEASIBLE: "feasible", CLASS_INFEASIBLE: "infeasible"}


@dataclass(frozen=True)
class Spectrum:
    """All 2^n energies of a model, optionally tagged with solution classes.

    indices is always a permutation of [0, 2^n); classes is None until
    classify() has run, after which every entry is optimal, feasible, or
    infeasible.  The optimal tag marks feasible entries of minimum original
    cost, so optimal entries are feasible entries too.
    """

    n: int
    indices: np.ndarray
    energies: np.ndarray
    classes: np.ndarray | None = None
    sorted_by_energy: bool = False

    def __post_init__(self):
        size = 1 << self.n
        if self.indices.shape != (size,) or self.energies.shape != (size,):
            raise ValueError("spectrum arrays must have exactly 2^n entries")

    def energy_of(self, basis_index: int) -> float:
        if self.sorted_by_energy:
            pos = int(np.nonzero(self.indices == basis_index)[0][0])
            return float(self.energies[pos])
        return float(self.energies[basis_index])

    def class_of(self, basis_index: int) -> int:
        if self.classes is None:
            raise ValueError("spectrum is unclassified")
        if self.sorted_by_energy:
            pos = int(np.nonzero(self.indices == basis_index)[0][0])
            return int(self.classes[pos])
        return int(self.classes[basis_index])

    def sort_by_energy(self) -> "Spectrum":
        order = np.argsort(self.energies, kind="stable")
        return Spectrum(
            n=self.n,
            indices=self.indices[order],
            energies=self.energies[order],
            classes=None if self.classes is None else self.classes[order],
            sorted_by_energy=True,
        )


@dataclass(frozen=True)
class SeparationReport:
    max_feasible_energy: float
    min_infeasible_energy: float

    @property
    def gap(self) -> float:
        return self.min_infeasible_energy - self.max_feasible_energy

    @property
    def separated(self) -> bool:
        return self.gap > 0


def _chunk_energies(model, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    bits = bitconv.bit_matrix(idx, model.n)
    if isinstance(model, QuboModel):
        return model.energies(bits)
    if isinstance(model, IsingModel):
        return model.energies(1.0 - 2.0 * bits)
    raise TypeError(f"cannot enumerate {type(model).__name__}")


def enumerate_model(model: QuboModel | IsingModel, threads: int = 1) -> Spectrum:
    """Evaluate every basis state of a QUBO or Ising model.

    Basis indices follow the MSB-first convention of bitconv; spin models
    are evaluated at z = 1 - 2x.
    """
    n = model.n
    if n > MAX_ENUM_QUBITS:
        raise ResourceLimitError(
            f"enumeration over {n} variables exceeds the guard of {MAX_ENUM_QUBITS}"
        )
    size = 1 << n
    energies = np.empty(size, dtype=float)
    ranges = [(s, min(s + _CHUNK, size)) for s in range(0, size, _CHUNK)]
    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = pool.map(lambda r: _chunk_energies(model, *r), ranges)
            for (s, e), out in zip(ranges, results):
                energies[s:e] = out
    else:
        for s, e in ranges:
            energies[s:e] = _chunk_energies(model, s, e)
    return Spectrum(n=n, indices=np.arange(size, dtype=np.int64), energies=energies)


def classify(spectrum: Spectrum, instance) -> Spectrum:
    """Tag each entry against the original constrained problem.

    `instance` must provide feasibility_table() -> (feasible mask, cost
    vector), both indexed by basis index; feasible entries of minimal cost
    are tagged optimal.  Classification depends only on the decoded bits,
    never on the energies.
    """
    feasible, costs = instance.feasibility_table()
    size = 1 << spectrum.n
    if feasible.shape != (size,):
        raise ValueError(
            f"instance covers {feasible.shape[0]} states but spectrum has {size}"
        )
    by_index = np.full(size, CLASS_INFEASIBLE, dtype=np.int8)
    by_index[feasible] = CLASS_FEASIBLE
    if np.any(feasible):
        best = np.min(costs[feasible])
        by_index[feasible & (costs <= best + 1e-12)] = CLASS_OPTIMAL
    return replace(spectrum, classes=by_index[spectrum.indices])


def ground_states(spectrum: Spectrum) -> list[int]:
    """Basis indices attaining the minimum energy within the tie tolerance."""
    lowest = float(np.min(spectrum.energies))
    hits = spectrum.indices[spectrum.energies <= lowest + GROUND_TIE_TOL]
    return sorted(int(i) for i in hits)


def separation_report(spectrum: Spectrum) -> SeparationReport:
    """Gap between the worst feasible and best infeasible energies.

    A positive gap certifies that the penalized encoding ranks every
    feasible assignment below every infeasible one.
    """
    if spectrum.classes is None:
        raise ValueError("spectrum is unclassified; run classify() first")
    feas = spectrum.classes != CLASS_INFEASIBLE
    infeas = spectrum.classes == CLASS_INFEASIBLE
    if not np.any(feas):
        raise ValueError("no feasible entries in spectrum")
    if not np.any(infeas):
        raise ValueError("no infeasible entries in spectrum")
    return SeparationReport(
        max_feasible_energy=float(np.max(spectrum.energies[feas])),
        min_infeasible_energy=float(np.min(spectrum.energies[infeas])),
    )


def stream_separation(model: QuboModel | IsingModel, instance) -> SeparationReport:
    """Separation report without materializing the full spectrum.

    Streams energy chunks and folds them into the two extrema, so memory
    stays at one chunk regardless of n (still bounded by the enumeration
    guard).  Results match classify + separation_report exactly.
    """
    n = model.n
    if n > MAX_ENUM_QUBITS:
        raise ResourceLimitError(
            f"enumeration over {n} variables exceeds the guard of {MAX_ENUM_QUBITS}"
        )
    feasible, _ = instance.feasibility_table()
    if not np.any(feasible):
        raise ValueError("no feasible entries in spectrum")
    if np.all(feasible):
        raise ValueError("no infeasible entries in spectrum")
    max_feas = -np.inf
    min_infeas = np.inf
    size = 1 << n
    for start in range(0, size, _CHUNK):
        stop = min(start + _CHUNK, size)
        energies = _chunk_energies(model, start, stop)
        mask = feasible[start:stop]
        if np.any(mask):
            max_feas = max(max_feas, float(np.max(energies[mask])))
        if not np.all(mask):
            min_infeas = min(min_infeas, float(np.min(energies[~mask])))
    return SeparationReport(max_feasible_energy=max_feas, min_infeasible_energy=min_infeas)


def write_spectrum_csv(spectrum: Spectrum, fh) -> None:
    """CSV rows `index,bitstring,energy,class` in the spectrum's entry order."""
    fh.write("index,bitstring,energy,class\n")
    classes = spectrum.classes
    for pos in range(1 << spectrum.n):
        idx = int(spectrum.indices[pos])
        label = "" if classes is None else CLASS_LABELS[int(classes[pos])]
        fh.write(
            f"{idx},{bitconv.bitstring(idx, spectrum.n)},{float(spectrum.energies[pos])!r},{label}\n"
        )
