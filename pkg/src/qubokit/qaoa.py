"""QAOA ansatz evaluation, analytic gradients, Adam training, landscape scans.

The ansatz applies p alternating layers to the uniform superposition: a
cost layer exp(-i*gamma_j*Hc) realized as an elementwise phase over a
precomputed 2^n energy table (the model offset rides along as a global
phase), then a mixer layer exp(-i*beta_j*X_q) = RX(2*beta_j) on every
qubit.  Gradients come from a reverse adjoint sweep and are checked against
central finite differences in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, oracle
from .errors import ResourceLimitError
from .pbool import IsingModel
from .statevec import MAX_QUBITS, StateVector


@dataclass(frozen=True)
class QaoaParams:
    """Variational angles: beta (mixer) and gamma (cost), one pair per layer."""

    beta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        gamma = np.atleast_1d(np.asarray(self.gamma, dtype=float))
        if beta.shape != gamma.shape or beta.ndim != 1 or beta.size < 1:
            raise ValueError("beta and gamma must be 1-D arrays of equal length >= 1")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)

    @property
    def p(self) -> int:
        return self.beta.size


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer settings.

    With seed=None both parameter vectors start at init_value; a seed
    switches to uniform random initialization in [0, pi/4) for trajectory
    studies.  Training always runs exactly max_iters Adam steps.
    """

    step_size: float = 1e-3
    max_iters: int = 2000
    init_value: float = 0.01
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    gradient_method: str = "adjoint"
    seed: int | None = None

    def validate(self) -> None:
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.gradient_method not in ("adjoint", "finite_difference"):
            raise ValueError(f"unknown gradient_method {self.gradient_method!r}")


@dataclass(frozen=True)
class TrainTrace:
    """Per-iteration expectations plus the best parameters seen."""

    expectations: np.ndarray
    final_params: QaoaParams
    final_expectation: float


def energy_table(m: IsingModel) -> np.ndarray:
    """Diagonal of the cost operator over basis indices, offset included."""
    return oracle.enumerate_model(m).energies


def _check_size(n: int) -> None:
    if n > MAX_QUBITS:
        raise ResourceLimitError(f"{n} qubits exceeds the simulator guard of {MAX_QUBITS}")


def _rx_all_inplace(arr: np.ndarray, n: int, beta: float) -> None:
    """exp(-i*beta*X_q) on every qubit; the last axis is the statevector."""
    c = math.cos(beta)
    ms = -1j * math.sin(beta)
    lead = arr.shape[:-1]
    for q in range(n):
        a = arr.reshape(*lead, 1 << q, 2, -1)
        a0 = a[..., 0, :]
        a1 = a[..., 1, :]
        t0 = c * a0 + ms * a1
        a[..., 1, :] = ms * a0 + c * a1
        a[..., 0, :] = t0


def _evolve(energies: np.ndarray, n: int, beta: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    amps = np.full(1 << n, 1.0 / math.sqrt(1 << n), dtype=complex)
    view = amps.view(np.float64)
    for j in range(beta.size):
        _kernels.phase_only(view, energies, gamma[j])
        _kernels.mixer(view, n, beta[j])
    return amps


def qaoa_state(m: IsingModel, params: QaoaParams) -> StateVector:
    """Statevector of the ansatz at the given angles."""
    _check_size(m.n)
    return StateVector(m.n, _evolve(energy_table(m), m.n, params.beta, params.gamma))


def expectation(m: IsingModel, params: QaoaParams) -> float:
    """<Hc> of the ansatz state, model offset included."""
    _check_size(m.n)
    energies = energy_table(m)
    amps = _evolve(energies, m.n, params.beta, params.gamma)
    return float(np.dot(np.abs(amps) ** 2, energies))


def _value_and_grad(energies: np.ndarray, n: int, beta: np.ndarray, gamma: np.ndarray):
    """Expectation and its gradient via one forward + one adjoint sweep.

    For a gate exp(-i*theta*A) the derivative of <Hc> is
    2*Im(<lambda|A|psi_after>) with lambda the cost-applied state pulled
    back through the later gates; A is diag(E) for cost layers and the
    transverse-field sum for mixer layers.
    """
    p = beta.size
    size = 1 << n
    amps = np.full(size, 1.0 / math.sqrt(size), dtype=complex)
    psi = amps.view(np.float64)
    phases = np.empty((p, 2 * size))
    for j in range(p):
        _kernels.phase_apply(psi, energies, gamma[j], phases[j])
        _kernels.mixer(psi, n, beta[j])
    value = _kernels.ediag_expect(psi, energies)
    lam_c = np.empty_like(amps)
    lam = lam_c.view(np.float64)
    _kernels.ediag_mult(psi, energies, lam)
    gbeta = np.zeros(p)
    ggamma = np.zeros(p)
    for j in range(p - 1, -1, -1):
        gbeta[j] = 2.0 * _kernels.mixer_undo_with_xgrad(psi, lam, n, beta[j])
        ggamma[j] = 2.0 * _kernels.ediag_imag_dot(lam, psi, energies)
        _kernels.conj_mult(psi, phases[j])
        _kernels.conj_mult(lam, phases[j])
    return value, gbeta, ggamma


def gradient(m: IsingModel, params: QaoaParams, method: str = "adjoint") -> np.ndarray:
    """d<Hc>/d(beta_1..beta_p, gamma_1..gamma_p) as a flat 2p vector."""
    _check_size(m.n)
    energies = energy_table(m)
    if method == "adjoint":
        _, gb, gg = _value_and_grad(energies, m.n, params.beta, params.gamma)
        return np.concatenate([gb, gg])
    if method == "finite_difference":
        return _fd_gradient(energies, m.n, params.beta, params.gamma)
    raise ValueError(f"unknown gradient method {method!r}")


def _fd_gradient(energies, n, beta, gamma, step: float = 1e-5) -> np.ndarray:
    def value(b, g):
        amps = _evolve(energies, n, b, g)
        return float(np.dot(np.abs(amps) ** 2, energies))

    out = []
    for vec, is_beta in ((beta, True), (gamma, False)):
        for k in range(vec.size):
            hi = vec.copy()
            lo = vec.copy()
            hi[k] += step
            lo[k] -= step
            if is_beta:
                out.append((value(hi, gamma) - value(lo, gamma)) / (2 * step))
            else:
                out.append((value(beta, hi) - value(beta, lo)) / (2 * step))
    return np.array(out)


def initial_params(p: int, config: TrainConfig) -> QaoaParams:
    if config.seed is None:
        return QaoaParams(np.full(p, config.init_value), np.full(p, config.init_value))
    rng = np.random.default_rng(config.seed)
    return QaoaParams(rng.uniform(0.0, math.pi / 4, p), rng.uniform(0.0, math.pi / 4, p))


def train_adam(m: IsingModel, p: int, config: TrainConfig | None = None) -> TrainTrace:
    """Minimize <Hc> with Adam for exactly max_iters steps.

    The returned parameters are the best seen over the whole run (the last
    iterate is not necessarily the best).  Deterministic for a fixed
    config.
    """
    config = config or TrainConfig()
    config.validate()
    _check_size(m.n)
    if p < 1:
        raise ValueError("layer count p must be >= 1")
    energies = energy_table(m)
    params = initial_params(p, config)
    theta = np.concatenate([params.beta, params.gamma])
    mom = np.zeros_like(theta)
    vel = np.zeros_like(theta)
    b1, b2, eps = config.adam_beta1, config.adam_beta2, config.adam_eps

    trace = np.empty(config.max_iters)
    best_val = math.inf
    best_theta = theta.copy()
    use_fd = config.gradient_method == "finite_difference"
    for t in range(1, config.max_iters + 1):
        beta, gamma = theta[:p], theta[p:]
        if use_fd:
            grad_vec = _fd_gradient(energies, m.n, beta, gamma)
            amps = _evolve(energies, m.n, beta, gamma)
            val = float(np.dot(np.abs(amps) ** 2, energies))
        else:
            val, gb, gg = _value_and_grad(energies, m.n, beta, gamma)
            grad_vec = np.concatenate([gb, gg])
        trace[t - 1] = val
        if val < best_val:
            best_val = val
            best_theta = theta.copy()
        mom = b1 * mom + (1 - b1) * grad_vec
        vel = b2 * vel + (1 - b2) * grad_vec**2
        m_hat = mom / (1 - b1**t)
        v_hat = vel / (1 - b2**t)
        theta = theta - config.step_size * m_hat / (np.sqrt(v_hat) + eps)

    final_amps = _evolve(energies, m.n, theta[:p], theta[p:])
    final_val = float(np.dot(np.abs(final_amps) ** 2, energies))
    if final_val < best_val:
        best_val = final_val
        best_theta = theta.copy()
    best = QaoaParams(best_theta[:p].copy(), best_theta[p:].copy())
    return TrainTrace(expectations=trace, final_params=best, final_expectation=best_val)


def landscape_scan(
    m: IsingModel,
    beta_range: tuple[float, float] = (-math.pi / 4, math.pi / 4),
    gamma_range: tuple[float, float] = (-math.pi / 4, math.pi / 4),
    points: int | tuple[int, int] = 100,
    threads: int = 1,
    p: int = 1,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """p=1 expectation over an equidistant (beta, gamma) grid.

    Returns (betas, gammas, grid) with grid[i, j] the expectation at
    (betas[i], gammas[j]); both axes ascend.  Grid points are independent,
    so rows can be computed on worker threads with deterministic placement.
    """
    if p != 1:
        raise ValueError("landscape scans are defined for a single layer (p=1)")
    _check_size(m.n)
    if isinstance(points, int):
        nb = ng = points
    else:
        nb, ng = points
    if nb < 1 or ng < 1:
        raise ValueError("grid needs at least one point per axis")
    betas = np.linspace(beta_range[0], beta_range[1], nb)
    gammas = np.linspace(gamma_range[0], gamma_range[1], ng)
    energies = energy_table(m)
    size = 1 << m.n
    root = 1.0 / math.sqrt(size)
    # One phase row per gamma, reused across every beta row.
    block = max(1, min(ng, (1 << 22) // size))
    phase_blocks = [
        np.exp(-1j * gammas[s:s + block, None] * energies[None, :]) * root
        for s in range(0, ng, block)
    ]
    grid = np.empty((nb, ng))

    def fill_row(i: int) -> None:
        col = 0
        for phases in phase_blocks:
            batch = phases.copy()
            _rx_all_inplace(batch, m.n, betas[i])
            rows = batch.shape[0]
            grid[i, col:col + rows] = (np.abs(batch) ** 2) @ energies
            col += rows

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill_row, range(nb)))
    else:
        for i in range(nb):
            fill_row(i)
    return betas, gammas, grid
