"""Tests for the separation LP, its simplex solver, and weight tuning."""

import itertools

import numpy as np
import pytest

from qubokit import oracle, simplex, tuner
from qubokit.boost import PenaltyWeights, build_qubo, builtin_instance

UH = UF = 1e-6


class TestEnergyDecomposition:
    def test_affine_identity_at_spot_weights(self):
        instance, _ = builtin_instance("instance1")
        dec = tuner.decompose_energies(instance)
        for m5, m6 in ((8.507, 1.877), (2.0, 0.3), (0.0, 0.0)):
            design = build_qubo(instance, PenaltyWeights(5, 5, 5, 5, m5, m6))
            direct = oracle.enumerate_model(design.model).energies
            recombined = dec.e0 + m5 * dec.e1 + m6 * dec.e2
            scale = np.maximum(np.abs(direct), 1.0)
            assert np.max(np.abs(direct - recombined) / scale) < 1e-9

    def test_violation_sign_and_value_at_optimum(self):
        # satisfied resonance constraint => negative violation:
        # g(98) = 1 - (22uH)(54uF) / (15 / (2*pi*1e5))^2
        instance, _ = builtin_instance("instance1")
        dec = tuner.decompose_energies(instance)
        tau = instance.spec.lc_threshold
        expected = 1.0 - (22 * UH * 54 * UF) / tau
        assert expected < 0
        assert dec.e1[98] == pytest.approx(expected, rel=1e-12)

    def test_violation_positive_for_small_lc(self):
        # 10 uH with 54 uF sits below the LC threshold
        instance, _ = builtin_instance("instance1")
        dec = tuner.decompose_energies(instance)
        idx = int("10101000", 2)  # xL0, xC0, z0_0
        assert dec.e1[idx] > 0

    def test_quadratic_coefficient_is_square(self):
        instance, _ = builtin_instance("instance2")
        dec = tuner.decompose_energies(instance)
        assert np.array_equal(dec.e2, dec.e1 * dec.e1)

    def test_classes_match_oracle(self):
        instance, weights = builtin_instance("instance1")
        dec = tuner.decompose_energies(instance)
        design = build_qubo(instance, weights)
        spectrum = oracle.classify(oracle.enumerate_model(design.model), instance)
        assert np.array_equal(dec.classes, spectrum.classes)


class TestBuildSeparationLp:
    def test_variable_layout_and_bounds(self):
        instance, _ = builtin_instance("instance1")
        lp = tuner.build_separation_lp(tuner.decompose_energies(instance), 50.0)
        assert lp.var_names == ("m5", "m6", "u", "v", "gap")
        assert lp.bounds[0] == (0.0, 50.0) and lp.bounds[1] == (0.0, 50.0)
        assert lp.bounds[2] == (None, None)
        assert lp.row_labels[-1] == "gap_link"
        kinds = {label.split(":")[0] for label in lp.row_labels[:-1]}
        assert kinds == {"feasible", "infeasible"}

    def test_pruning_keeps_all_feasible_support(self):
        # every feasible state has a distinct violation value, so the three
        # feasible rows of the smallest instance survive pruning
        instance, _ = builtin_instance("instance1")
        lp = tuner.build_separation_lp(tuner.decompose_energies(instance))
        feas_rows = [l for l in lp.row_labels if l.startswith("feasible:")]
        assert sorted(int(l.split(":")[1]) for l in feas_rows) == [81, 98, 148]

    def test_minimal_two_state_problem(self):
        dec = tuner.EnergyDecomposition(
            n=1,
            e0=np.array([1.0, 5.0]),
            e1=np.array([-1.0, 0.5]),
            e2=np.array([1.0, 0.25]),
            classes=np.array([oracle.CLASS_FEASIBLE, oracle.CLASS_INFEASIBLE], dtype=np.int8),
        )
        lp = tuner.build_separation_lp(dec, 10.0)
        assert len(lp.row_labels) == 3  # one per class plus the gap link

    def test_zero_upper_bound_freezes_weights(self):
        # with M5 = M6 = 0 the best gap is the unpenalized separation,
        # which is negative for this instance
        instance, _ = builtin_instance("instance1")
        dec = tuner.decompose_energies(instance)
        result = tuner.solve_lp(tuner.build_separation_lp(dec, 0.0))
        feas = dec.classes != oracle.CLASS_INFEASIBLE
        expected_gap = dec.e0[~feas].min() - dec.e0[feas].max()
        assert expected_gap < 0
        assert result.gap == pytest.approx(expected_gap, abs=1e-9)
        assert not result.separation_ok

    def test_single_class_rejected(self):
        dec = tuner.EnergyDecomposition(
            n=1,
            e0=np.array([1.0, 2.0]),
            e1=np.zeros(2),
            e2=np.zeros(2),
            classes=np.array([oracle.CLASS_FEASIBLE, oracle.CLASS_FEASIBLE], dtype=np.int8),
        )
        with pytest.raises(ValueError):
            tuner.build_separation_lp(dec)


def vertex_enumeration_max(c, a_ub, b_ub, upper):
    """Best vertex over all n-subsets of {constraints, x>=0, x<=upper}."""
    nvars = c.size
    rows = [a_ub[k] for k in range(a_ub.shape[0])]
    rhs = list(b_ub)
    for i in range(nvars):
        e = np.zeros(nvars)
        e[i] = -1.0
        rows.append(e)
        rhs.append(0.0)
        e2 = np.zeros(nvars)
        e2[i] = 1.0
        rows.append(e2)
        rhs.append(upper[i])
    rows = np.array(rows)
    rhs = np.array(rhs)
    best = None
    for combo in itertools.combinations(range(rows.shape[0]), nvars):
        a = rows[list(combo)]
        if abs(np.linalg.det(a)) < 1e-10:
            continue
        x = np.linalg.solve(a, rhs[list(combo)])
        if np.all(rows @ x <= rhs + 1e-7):
            value = float(c @ x)
            if best is None or value > best:
                best = value
    return best


class TestSimplex:
    def test_two_ceilings(self):
        # maximize g subject to g <= 3 and g <= 5
        result = simplex.maximize(
            np.array([1.0]),
            np.array([[1.0], [1.0]]),
            np.array([3.0, 5.0]),
            [(None, None)],
        )
        assert result.status == simplex.STATUS_OPTIMAL
        assert result.objective == pytest.approx(3.0)

    def test_known_two_variable_vertex(self):
        # maximize x + y s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0;
        # vertex enumeration puts the optimum at x = 8/5, y = 6/5.
        c = np.array([1.0, 1.0])
        a = np.array([[1.0, 2.0], [3.0, 1.0]])
        b = np.array([4.0, 6.0])
        result = simplex.maximize(c, a, b, [(0.0, None), (0.0, None)])
        assert result.objective == pytest.approx(14.0 / 5.0)
        assert np.allclose(result.x, [8.0 / 5.0, 6.0 / 5.0])
        oracle_best = vertex_enumeration_max(c, a, b, np.array([100.0, 100.0]))
        assert result.objective == pytest.approx(oracle_best, abs=1e-9)

    def test_negative_rhs_needs_phase_one(self):
        # maximize -x s.t. -x <= -2 (i.e. x >= 2), x in [0, 10]
        result = simplex.maximize(
            np.array([-1.0]), np.array([[-1.0]]), np.array([-2.0]), [(0.0, 10.0)]
        )
        assert result.status == simplex.STATUS_OPTIMAL
        assert result.x[0] == pytest.approx(2.0)

    def test_infeasible_detected(self):
        result = simplex.maximize(
            np.array([1.0]), np.array([[1.0]]), np.array([-1.0]), [(0.0, None)]
        )
        assert result.status == simplex.STATUS_INFEASIBLE

    def test_unbounded_detected(self):
        result = simplex.maximize(
            np.array([1.0]), np.zeros((0, 1)), np.zeros(0), [(0.0, None)]
        )
        assert result.status == simplex.STATUS_UNBOUNDED

    def test_free_variables(self):
        # maximize x - y with x <= 1, -y <= 2 (y >= -2), both free
        result = simplex.maximize(
            np.array([1.0, -1.0]),
            np.array([[1.0, 0.0], [0.0, -1.0]]),
            np.array([1.0, 2.0]),
            [(None, None), (None, None)],
        )
        assert result.objective == pytest.approx(3.0)

    def test_matches_vertex_enumeration_on_random_lps(self):
        rng = np.random.default_rng(2024)
        checked = 0
        for _ in range(100):
            nvars = int(rng.integers(2, 7))
            max_rows = {2: 15, 3: 15, 4: 10, 5: 6, 6: 6}[nvars]
            m = int(rng.integers(1, max_rows + 1))
            a = rng.normal(0, 1, (m, nvars))
            b = rng.uniform(0.5, 3.0, m)  # origin strictly feasible
            c = rng.normal(0, 1, nvars)
            upper = rng.uniform(1.0, 5.0, nvars)
            result = simplex.maximize(
                c, a, b, [(0.0, float(u)) for u in upper]
            )
            assert result.status == simplex.STATUS_OPTIMAL
            oracle_best = vertex_enumeration_max(c, a, b, upper)
            assert oracle_best is not None
            assert result.objective == pytest.approx(oracle_best, abs=1e-7)
            checked += 1
        assert checked == 100


class TestTuneWeights:
    @pytest.mark.parametrize("name", ["instance1", "instance2", "instance3"])
    def test_separation_after_retuning(self, name):
        instance, _ = builtin_instance(name)
        result = tuner.tune_weights(instance)
        assert result.separation_ok
        design = build_qubo(instance, PenaltyWeights(5, 5, 5, 5, result.m5, result.m6))
        spectrum = oracle.classify(oracle.enumerate_model(design.model), instance)
        report = oracle.separation_report(spectrum)
        assert report.gap == pytest.approx(result.gap, abs=1e-7)
        assert report.gap > 0

    def test_instance1_tuned_ground_state(self):
        instance, _ = builtin_instance("instance1")
        result = tuner.tune_weights(instance)
        design = build_qubo(instance, PenaltyWeights(5, 5, 5, 5, result.m5, result.m6))
        spectrum = oracle.enumerate_model(design.model)
        assert oracle.ground_states(spectrum) == [98]

    def test_tuned_weights_reproduce_bundled_values(self):
        # The LP optimum lands within a fraction of a percent of the weight
        # pairs shipped with the instances; treat that as a regression net.
        for name in ("instance1", "instance2", "instance3"):
            instance, bundled = builtin_instance(name)
            result = tuner.tune_weights(instance)
            assert result.m5 == pytest.approx(bundled.m5, rel=0.02)
            assert result.m6 == pytest.approx(bundled.m6, rel=0.05)

    def test_active_rows_name_supporting_states(self):
        instance, _ = builtin_instance("instance1")
        result = tuner.tune_weights(instance)
        assert "gap_link" in result.active_rows
        assert any(label.startswith("feasible:") for label in result.active_rows)
        assert any(label.startswith("infeasible:") for label in result.active_rows)

    def test_result_serializes(self):
        instance, _ = builtin_instance("instance1")
        result = tuner.tune_weights(instance)
        payload = result.as_dict()
        assert set(payload) == {"M5", "M6", "gap", "separation_ok", "active_rows"}
        assert payload["separation_ok"] is True
