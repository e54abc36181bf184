"""Compiled hot loops for ansatz evolution and its adjoint sweep.

All kernels run serially over float64 views of complex128 statevectors
(interleaved re/im), so results are bit-reproducible and the contiguous
inner loops autovectorize.  They release the GIL, which lets callers fan
independent training runs out over threads.  The pure-numpy gate path in
statevec is the independent reference; the test suite holds the two within
simulator tolerance of each other.

Layout note: qubit q toggles bit (n-1-q) of the basis index, so its
amplitude pairs sit stride = 2^(n-1-q) apart.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def phase_apply(av: np.ndarray, energies: np.ndarray, gamma: float, ph: np.ndarray) -> None:
    """amp_b *= exp(-i*gamma*E_b), also storing the phase factors in ph."""
    for i in range(energies.size):
        ang = -gamma * energies[i]
        c = math.cos(ang)
        s = math.sin(ang)
        re = av[2 * i]
        im = av[2 * i + 1]
        av[2 * i] = re * c - im * s
        av[2 * i + 1] = re * s + im * c
        ph[2 * i] = c
        ph[2 * i + 1] = s


@njit(cache=True, nogil=True)
def phase_only(av: np.ndarray, energies: np.ndarray, gamma: float) -> None:
    """amp_b *= exp(-i*gamma*E_b) without keeping the phases."""
    for i in range(energies.size):
        ang = -gamma * energies[i]
        c = math.cos(ang)
        s = math.sin(ang)
        re = av[2 * i]
        im = av[2 * i + 1]
        av[2 * i] = re * c - im * s
        av[2 * i + 1] = re * s + im * c


@njit(cache=True, nogil=True)
def conj_mult(av: np.ndarray, ph: np.ndarray) -> None:
    """av *= conj(ph) elementwise (undoes a stored phase layer)."""
    for i in range(av.size // 2):
        c = ph[2 * i]
        s = ph[2 * i + 1]
        re = av[2 * i]
        im = av[2 * i + 1]
        av[2 * i] = re * c + im * s
        av[2 * i + 1] = im * c - re * s


@njit(cache=True, nogil=True)
def mixer(av: np.ndarray, n: int, beta: float) -> None:
    """exp(-i*beta*X_q) on every qubit: new0 = c*a0 - i*s*a1 and symmetric."""
    size = av.size >> 1
    c = math.cos(beta)
    s = math.sin(beta)
    for q in range(n):
        stride = 1 << (n - 1 - q)
        step = stride << 1
        for base in range(0, size, step):
            b2 = 2 * base
            for off in range(stride):
                i0 = b2 + 2 * off
                i1 = i0 + 2 * stride
                re0 = av[i0]
                im0 = av[i0 + 1]
                re1 = av[i1]
                im1 = av[i1 + 1]
                av[i0] = c * re0 + s * im1
                av[i0 + 1] = c * im0 - s * re1
                av[i1] = c * re1 + s * im0
                av[i1 + 1] = c * im1 - s * re0


@njit(cache=True, nogil=True)
def mixer_undo_with_xgrad(psi: np.ndarray, lam: np.ndarray, n: int, beta: float) -> float:
    """Undo one mixer layer on psi and lam, returning Im<lam|sum_q X_q|psi>.

    X_q commutes with every single-qubit RX, so the per-qubit contribution
    to the inner product is unchanged by the undos already applied for
    other qubits; accumulating it inside the same sweep is exact and saves
    two full passes per layer.
    """
    size = psi.size >> 1
    c = math.cos(-beta)
    s = math.sin(-beta)
    acc = 0.0
    for q in range(n):
        stride = 1 << (n - 1 - q)
        step = stride << 1
        for base in range(0, size, step):
            b2 = 2 * base
            for off in range(stride):
                i0 = b2 + 2 * off
                i1 = i0 + 2 * stride
                pre0 = psi[i0]
                pim0 = psi[i0 + 1]
                pre1 = psi[i1]
                pim1 = psi[i1 + 1]
                lre0 = lam[i0]
                lim0 = lam[i0 + 1]
                lre1 = lam[i1]
                lim1 = lam[i1 + 1]
                # Im(conj(l0)*p1 + conj(l1)*p0)
                acc += lre0 * pim1 - lim0 * pre1 + lre1 * pim0 - lim1 * pre0
                psi[i0] = c * pre0 + s * pim1
                psi[i0 + 1] = c * pim0 - s * pre1
                psi[i1] = c * pre1 + s * pim0
                psi[i1 + 1] = c * pim1 - s * pre0
                lam[i0] = c * lre0 + s * lim1
                lam[i0 + 1] = c * lim0 - s * lre1
                lam[i1] = c * lre1 + s * lim0
                lam[i1 + 1] = c * lim1 - s * lre0
    return acc


@njit(cache=True, nogil=True)
def ediag_expect(av: np.ndarray, energies: np.ndarray) -> float:
    """sum_b E_b * |amp_b|^2 in ascending index order."""
    acc = 0.0
    for i in range(energies.size):
        re = av[2 * i]
        im = av[2 * i + 1]
        acc += energies[i] * (re * re + im * im)
    return acc


@njit(cache=True, nogil=True)
def ediag_mult(src: np.ndarray, energies: np.ndarray, dst: np.ndarray) -> None:
    """dst = diag(E) src."""
    for i in range(energies.size):
        dst[2 * i] = energies[i] * src[2 * i]
        dst[2 * i + 1] = energies[i] * src[2 * i + 1]


@njit(cache=True, nogil=True)
def ediag_imag_dot(lam: np.ndarray, psi: np.ndarray, energies: np.ndarray) -> float:
    """Im<lam|diag(E)|psi> in ascending index order."""
    acc = 0.0
    for i in range(energies.size):
        lre = lam[2 * i]
        lim = lam[2 * i + 1]
        pre = psi[2 * i]
        pim = psi[2 * i + 1]
        acc += energies[i] * (lre * pim - lim * pre)
    return acc
