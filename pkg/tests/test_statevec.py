"""Tests for the dense statevector simulator."""

import math

import numpy as np
import pytest

from qubokit import statevec as sv
from qubokit.errors import ResourceLimitError

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def random_state(rng, n) -> sv.StateVector:
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return sv.StateVector(n, amps / np.linalg.norm(amps))


class TestInit:
    def test_zero_state(self):
        s = sv.init_zero(2)
        assert s.amps[0] == 1.0 and np.all(s.amps[1:] == 0)

    def test_single_qubit(self):
        assert np.array_equal(sv.init_zero(1).amps, [1.0, 0.0])

    def test_norm_is_one(self):
        for n in (1, 3, 7):
            assert sv.init_zero(n).norm() == 1.0

    def test_guard(self):
        with pytest.raises(ResourceLimitError):
            sv.init_zero(27)
        with pytest.raises(ResourceLimitError):
            sv.init_zero(0)


class TestSingleQubitGates:
    def test_hadamard_on_zero(self):
        s = sv.apply_h(sv.init_zero(1), 0)
        assert np.allclose(s.amps, [INV_SQRT2, INV_SQRT2])

    def test_hadamard_is_involution(self):
        rng = np.random.default_rng(1)
        s = random_state(rng, 3)
        back = sv.apply_h(sv.apply_h(s, 1), 1)
        assert np.allclose(back.amps, s.amps, atol=1e-12)

    def test_x_on_msb_convention(self):
        # Qubit 0 is the most significant bit: X on qubit 0 of |00000000>
        # lands on basis index 128 = 2^7.
        s = sv.apply_x(sv.init_zero(8), 0)
        assert s.amps[128] == 1.0
        assert np.count_nonzero(s.amps) == 1

    def test_rx_pi_flips_with_phase(self):
        s = sv.apply_rx(sv.init_zero(1), 0, math.pi)
        assert s.amps[0] == pytest.approx(0.0, abs=1e-15)
        assert s.amps[1] == pytest.approx(-1j, abs=1e-15)

    def test_rz_phases(self):
        theta = 0.7
        s = sv.apply_rz(sv.apply_h(sv.init_zero(1), 0), 0, theta)
        assert s.amps[0] == pytest.approx(INV_SQRT2 * np.exp(-0.5j * theta))
        assert s.amps[1] == pytest.approx(INV_SQRT2 * np.exp(0.5j * theta))

    def test_rz_angles_add_up_to_global_phase(self):
        rng = np.random.default_rng(2)
        s = random_state(rng, 2)
        a = sv.apply_rz(sv.apply_rz(s, 1, 0.3), 1, 0.9)
        b = sv.apply_rz(s, 1, 1.2)
        assert sv.fidelity(a, b) == pytest.approx(1.0, abs=1e-12)

    def test_value_semantics(self):
        s = sv.init_zero(2)
        sv.apply_x(s, 0)
        assert s.amps[0] == 1.0  # original untouched

    def test_index_guard(self):
        with pytest.raises(ValueError):
            sv.apply_h(sv.init_zero(2), 2)


class TestTwoQubitGates:
    def test_bell_state(self):
        s = sv.apply_cx(sv.apply_h(sv.init_zero(2), 0), 0, 1)
        assert np.allclose(s.amps, [INV_SQRT2, 0, 0, INV_SQRT2])

    def test_cx_control_not_set_is_identity(self):
        s = sv.apply_cx(sv.init_zero(2), 0, 1)
        assert s.amps[0] == 1.0

    def test_cx_reversed_roles(self):
        # control 1, target 0 acting on |01> flips the MSB: |01> -> |11>
        s = sv.apply_x(sv.init_zero(2), 1)
        s = sv.apply_cx(s, 1, 0)
        assert s.amps[3] == 1.0

    def test_cx_is_involution(self):
        rng = np.random.default_rng(3)
        s = random_state(rng, 4)
        back = sv.apply_cx(sv.apply_cx(s, 2, 0), 2, 0)
        assert np.allclose(back.amps, s.amps, atol=1e-12)

    def test_cz_symmetric_phase(self):
        rng = np.random.default_rng(4)
        s = random_state(rng, 2)
        a = sv.apply_cz(s, 0, 1)
        b = sv.apply_cz(s, 1, 0)
        assert np.allclose(a.amps, b.amps)
        assert a.amps[3] == pytest.approx(-s.amps[3])
        assert a.amps[0] == pytest.approx(s.amps[0])

    def test_rzz_diagonal(self):
        theta = 1.1
        s = sv.StateVector(2, np.full(4, 0.5, dtype=complex))
        out = sv.apply_rzz(s, 0, 1, theta)
        eq = 0.5 * np.exp(-0.5j * theta)
        ne = 0.5 * np.exp(0.5j * theta)
        assert np.allclose(out.amps, [eq, ne, ne, eq])

    def test_same_qubit_rejected(self):
        with pytest.raises(ValueError):
            sv.apply_cx(sv.init_zero(2), 1, 1)


class TestDiagonalPhase:
    def test_gamma_zero_is_identity(self):
        rng = np.random.default_rng(5)
        s = random_state(rng, 3)
        out = sv.apply_diagonal_phase(s, np.arange(8.0), 0.0)
        assert np.array_equal(out.amps, s.amps)

    def test_uniform_energies_global_phase_only(self):
        rng = np.random.default_rng(6)
        s = random_state(rng, 3)
        out = sv.apply_diagonal_phase(s, np.full(8, 2.5), 0.8)
        assert np.allclose(sv.probabilities(out), sv.probabilities(s))
        assert sv.fidelity(out, s) == pytest.approx(1.0, abs=1e-12)

    def test_matches_gate_by_gate_cost_layer(self):
        # exp(-i*gamma*Hc) as one phase table must equal the RZ/RZZ product
        # up to the global phase carried by the offset.
        from qubokit import didactic, qaoa

        m = didactic.didactic_ising()
        energies = qaoa.energy_table(m)
        gamma = 0.37
        rng = np.random.default_rng(7)
        s = random_state(rng, 4)
        fast = sv.apply_diagonal_phase(s, energies, gamma)
        gated = s
        for i, hi in enumerate(m.h):
            if hi != 0.0:
                gated = sv.apply_rz(gated, i, 2.0 * gamma * hi)
        for (i, j), rij in sorted(m.r.items()):
            gated = sv.apply_rzz(gated, i, j, 2.0 * gamma * rij)
        assert sv.fidelity(fast, gated) == pytest.approx(1.0, abs=1e-9)
        per_amp = fast.amps * np.conj(gated.amps)
        nz = np.abs(gated.amps) > 1e-12
        phases = per_amp[nz] / np.abs(per_amp[nz])
        assert np.ptp(np.angle(phases * np.conj(phases[0]))) < 1e-9

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            sv.apply_diagonal_phase(sv.init_zero(2), np.zeros(3), 0.1)


class TestMeasurement:
    def test_bell_probabilities(self):
        s = sv.apply_cx(sv.apply_h(sv.init_zero(2), 0), 0, 1)
        p = sv.probabilities(s)
        assert p[0] == pytest.approx(0.5) and p[3] == pytest.approx(0.5)
        assert p[1] == p[2] == 0.0

    def test_expectation_of_basis_state(self):
        energies = np.array([3.0, -1.0, 2.0, 7.0])
        s = sv.init_zero(2)
        assert sv.expectation_diagonal(s, energies) == 3.0

    def test_expectation_uniform_superposition_didactic(self):
        from qubokit import didactic, qaoa

        energies = qaoa.energy_table(didactic.didactic_ising())
        s = sv.uniform_superposition(4)
        # mean of the objective over all 16 assignments
        assert sv.expectation_diagonal(s, energies) == pytest.approx(-1.5)

    def test_sampling_deterministic_and_supported(self):
        s = sv.apply_cx(sv.apply_h(sv.init_zero(2), 0), 0, 1)
        counts = sv.sample(s, 4000, seed=11)
        again = sv.sample(s, 4000, seed=11)
        assert counts.counts == again.counts
        assert counts.total == 4000
        assert set(counts.counts) <= {0, 3}
        assert counts.counts[0] + counts.counts[3] == 4000

    def test_deterministic_state_all_shots_on_it(self):
        s = sv.apply_x(sv.init_zero(3), 1)
        counts = sv.sample(s, 100, seed=0)
        assert counts.counts == {2: 100}

    def test_shots_validation(self):
        with pytest.raises(ValueError):
            sv.sample(sv.init_zero(1), 0, seed=1)


class TestUnitarity:
    def test_norm_preserved_over_random_circuit(self):
        rng = np.random.default_rng(8)
        n = 6
        s = sv.init_zero(n)
        for _ in range(1000):
            kind = rng.integers(0, 6)
            q = int(rng.integers(0, n))
            if kind == 0:
                s = sv.apply_h(s, q)
            elif kind == 1:
                s = sv.apply_x(s, q)
            elif kind == 2:
                s = sv.apply_rx(s, q, float(rng.normal()))
            elif kind == 3:
                s = sv.apply_rz(s, q, float(rng.normal()))
            else:
                q2 = int(rng.integers(0, n))
                if q2 == q:
                    q2 = (q2 + 1) % n
                if kind == 4:
                    s = sv.apply_cx(s, q, q2)
                else:
                    s = sv.apply_rzz(s, q, q2, float(rng.normal()))
        assert s.norm() == pytest.approx(1.0, abs=1e-9)
