"""Dense n-qubit statevector simulator.

Gate set: H, X, RX, RZ (single qubit), CX, CZ, RZZ (two qubit), plus a fast
elementwise phase for diagonal cost operators.  Qubit 0 is the most
significant bit of the basis index (see bitconv), so the decimal label of a
basis state reads off its bitstring directly.

Public operations are value-semantic: they return the evolved state and
never mutate their input.  Sampling uses numpy's default PCG64 generator
with an explicit seed, so shot counts are reproducible bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError

MAX_QUBITS = 26


@dataclass(frozen=True)
class StateVector:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        if self.amps.shape != (1 << self.n,):
            raise ValueError("amplitude vector must have 2^n entries")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True)
class ShotCounts:
    """Measurement histogram: basis index -> count, zeros omitted."""

    counts: dict[int, int]
    total: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise ValueError("counts must sum to total")


def init_zero(n: int) -> StateVector:
    """The all-|0> product state."""
    if not 1 <= n <= MAX_QUBITS:
        raise ResourceLimitError(f"qubit count {n} outside [1, {MAX_QUBITS}]")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return StateVector(n=n, amps=amps)


def uniform_superposition(n: int) -> StateVector:
    """H on every qubit of |0...0>: equal real amplitudes everywhere."""
    if not 1 <= n <= MAX_QUBITS:
        raise ResourceLimitError(f"qubit count {n} outside [1, {MAX_QUBITS}]")
    amps = np.full(1 << n, 1.0 / math.sqrt(1 << n), dtype=complex)
    return StateVector(n=n, amps=amps)


def _check_qubit(s: StateVector, q: int) -> None:
    if not 0 <= q < s.n:
        raise ValueError(f"qubit index {q} out of range for n={s.n}")


def _pair_view(amps: np.ndarray, n: int, q: int) -> np.ndarray:
    # Axis layout (2^q, 2, 2^(n-1-q)); the middle axis is qubit q's bit.
    return amps.reshape(1 << q, 2, -1)


def _apply_single_inplace(amps, n, q, m00, m01, m10, m11):
    a = _pair_view(amps, n, q)
    a0 = a[:, 0, :]
    a1 = a[:, 1, :]
    t0 = m00 * a0 + m01 * a1
    a[:, 1, :] = m10 * a0 + m11 * a1
    a[:, 0, :] = t0


def apply_h(s: StateVector, q: int) -> StateVector:
    _check_qubit(s, q)
    amps = s.amps.copy()
    inv = 1.0 / math.sqrt(2.0)
    _apply_single_inplace(amps, s.n, q, inv, inv, inv, -inv)
    return StateVector(s.n, amps)


def apply_x(s: StateVector, q: int) -> StateVector:
    _check_qubit(s, q)
    amps = s.amps.copy()
    a = _pair_view(amps, s.n, q)
    a[:, [0, 1], :] = a[:, [1, 0], :]
    return StateVector(s.n, amps)


def apply_rx(s: StateVector, q: int, theta: float) -> StateVector:
    """RX(theta) = [[cos(t/2), -i sin(t/2)], [-i sin(t/2), cos(t/2)]]."""
    _check_qubit(s, q)
    amps = s.amps.copy()
    c = math.cos(theta / 2.0)
    ms = -1j * math.sin(theta / 2.0)
    _apply_single_inplace(amps, s.n, q, c, ms, ms, c)
    return StateVector(s.n, amps)


def apply_rz(s: StateVector, q: int, theta: float) -> StateVector:
    """RZ(theta) = diag(exp(-i t/2), exp(+i t/2))."""
    _check_qubit(s, q)
    amps = s.amps.copy()
    a = _pair_view(amps, s.n, q)
    a[:, 0, :] *= np.exp(-0.5j * theta)
    a[:, 1, :] *= np.exp(0.5j * theta)
    return StateVector(s.n, amps)


def _check_pair(s: StateVector, q1: int, q2: int) -> None:
    _check_qubit(s, q1)
    _check_qubit(s, q2)
    if q1 == q2:
        raise ValueError("two-qubit gate needs distinct qubits")


def apply_cx(s: StateVector, control: int, target: int) -> StateVector:
    """Flip the target bit wherever the control bit is 1."""
    _check_pair(s, control, target)
    amps = s.amps.copy()
    grid = amps.reshape((2,) * s.n)
    sel: list = [slice(None)] * s.n
    sel[control] = 1
    sub = grid[tuple(sel)]
    t_axis = target - (1 if control < target else 0)
    s0: list = [slice(None)] * (s.n - 1)
    s1: list = [slice(None)] * (s.n - 1)
    s0[t_axis] = 0
    s1[t_axis] = 1
    tmp = sub[tuple(s0)].copy()
    sub[tuple(s0)] = sub[tuple(s1)]
    sub[tuple(s1)] = tmp
    return StateVector(s.n, amps)


def apply_cz(s: StateVector, q1: int, q2: int) -> StateVector:
    """Phase -1 on basis states where both bits are 1 (symmetric in its qubits)."""
    _check_pair(s, q1, q2)
    amps = s.amps.copy()
    grid = amps.reshape((2,) * s.n)
    sel: list = [slice(None)] * s.n
    sel[q1] = 1
    sel[q2] = 1
    grid[tuple(sel)] *= -1.0
    return StateVector(s.n, amps)


def apply_rzz(s: StateVector, q1: int, q2: int, theta: float) -> StateVector:
    """RZZ(theta): phase exp(-i t/2) on equal bits, exp(+i t/2) on unequal."""
    _check_pair(s, q1, q2)
    amps = s.amps.copy()
    grid = amps.reshape((2,) * s.n)
    ph_eq = np.exp(-0.5j * theta)
    ph_ne = np.exp(0.5j * theta)
    for b1 in (0, 1):
        for b2 in (0, 1):
            sel: list = [slice(None)] * s.n
            sel[q1] = b1
            sel[q2] = b2
            grid[tuple(sel)] *= ph_eq if b1 == b2 else ph_ne
    return StateVector(s.n, amps)


def apply_diagonal_phase(s: StateVector, energies: np.ndarray, gamma: float) -> StateVector:
    """Elementwise amp_b *= exp(-i * gamma * E_b) for a diagonal operator."""
    energies = np.asarray(energies, dtype=float)
    if energies.shape != s.amps.shape:
        raise ValueError("energy table length must be 2^n")
    return StateVector(s.n, s.amps * np.exp(-1j * gamma * energies))


def probabilities(s: StateVector) -> np.ndarray:
    return np.abs(s.amps) ** 2


def expectation_diagonal(s: StateVector, energies: np.ndarray) -> float:
    """<psi| diag(E) |psi> accumulated in a fixed deterministic order."""
    energies = np.asarray(energies, dtype=float)
    if energies.shape != s.amps.shape:
        raise ValueError("energy table length must be 2^n")
    return float(np.dot(probabilities(s), energies))


def fidelity(s1: StateVector, s2: StateVector) -> float:
    """|<psi1|psi2>| — 1.0 means equal up to global phase."""
    return float(abs(np.vdot(s1.amps, s2.amps)))


def sample(s: StateVector, shots: int, seed: int) -> ShotCounts:
    """Multinomial draw from the measurement distribution (PCG64, seeded)."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = probabilities(s)
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    drawn = rng.multinomial(shots, p)
    hit = np.nonzero(drawn)[0]
    return ShotCounts(counts={int(i): int(drawn[i]) for i in hit}, total=shots)
