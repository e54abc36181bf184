"""End-to-end tests of the command-line surface."""

import json

import numpy as np
import pytest

from qubokit import cli


def run(args):
    return cli.main(args)


class TestSpectrum:
    def test_instance1_csv(self, tmp_path):
        assert run(["spectrum", "instance1", "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "spectrum.csv").read_text().splitlines()
        assert lines[0] == "index,bitstring,energy,class"
        assert len(lines) == 257
        row98 = lines[99].split(",")
        assert row98[0] == "98" and row98[3] == "optimal"
        assert (tmp_path / "spectrum.svg").read_text().startswith("<svg")

    def test_weight_override_changes_energies(self, tmp_path):
        override = tmp_path / "weights.json"
        override.write_text(json.dumps({"M5": 0.0, "M6": 0.0}))
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert run(["spectrum", "instance1", "--out", str(out_a)]) == 0
        assert run(["spectrum", "instance1", "--out", str(out_b),
                    "--weights", str(override)]) == 0
        assert (out_a / "spectrum.csv").read_text() != (out_b / "spectrum.csv").read_text()

    def test_didactic_spectrum(self, tmp_path):
        assert run(["spectrum", "didactic", "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "spectrum.csv").read_text().splitlines()
        assert len(lines) == 17
        assert lines[10].split(",")[:2] == ["9", "1001"]


class TestTune:
    def test_writes_tune_json(self, tmp_path):
        assert run(["tune", "instance1", "--out", str(tmp_path)]) == 0
        payload = json.loads((tmp_path / "tune.json").read_text())
        assert payload["separation_ok"] is True
        assert payload["M5"] > 0 and payload["gap"] > 0

    def test_didactic_rejected(self, tmp_path, capsys):
        assert run(["tune", "didactic", "--out", str(tmp_path)]) == 2
        assert "configuration error" in capsys.readouterr().err


class TestTrain:
    def test_merits_and_probs_files(self, tmp_path):
        assert run(["train", "instance1", "--p", "1..2", "--iters", "50",
                    "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "merits.csv").read_text().splitlines()
        assert lines[0] == (
            "p,prob_optimal,prob_feasible,cop,tts,"
            "most_probable_index,most_probable_class"
        )
        assert len(lines) == 3
        for p in (1, 2):
            rows = (tmp_path / f"probs_p{p}.csv").read_text().splitlines()
            assert rows[0] == "index,bitstring,probability,class"
            total = sum(float(r.split(",")[2]) for r in rows[1:])
            assert total == pytest.approx(1.0, abs=1e-9)
        summary = json.loads((tmp_path / "train_summary.json").read_text())
        assert set(summary) == {"1", "2"}
        assert (tmp_path / "probabilities.svg").exists()
        assert (tmp_path / "cop.svg").exists()
        assert (tmp_path / "tts.svg").exists()

    def test_single_p_value(self, tmp_path):
        assert run(["train", "didactic", "--p", "2", "--iters", "50",
                    "--out", str(tmp_path)]) == 0
        assert (tmp_path / "probs_p2.csv").exists()

    def test_threaded_run_is_identical(self, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert run(["train", "didactic", "--p", "1..3", "--iters", "60",
                    "--out", str(out_a)]) == 0
        assert run(["train", "didactic", "--p", "1..3", "--iters", "60",
                    "--threads", "3", "--out", str(out_b)]) == 0
        assert (out_a / "merits.csv").read_bytes() == (out_b / "merits.csv").read_bytes()

    def test_sampled_frequencies(self, tmp_path):
        assert run(["train", "didactic", "--p", "1", "--iters", "30",
                    "--shots", "512", "--seed", "5", "--out", str(tmp_path)]) == 0
        rows = (tmp_path / "probs_p1.csv").read_text().splitlines()[1:]
        freqs = [float(r.split(",")[2]) for r in rows]
        assert sum(freqs) == pytest.approx(1.0, abs=1e-12)
        assert all(round(f * 512, 6) == int(round(f * 512)) for f in freqs)

    def test_sampled_frequencies_converge_to_exact(self, tmp_path):
        # 3-sigma multinomial bound per basis state
        shots = 20000
        out_exact = tmp_path / "exact"
        out_shots = tmp_path / "shots"
        args = ["train", "didactic", "--p", "2", "--iters", "400"]
        assert run(args + ["--out", str(out_exact)]) == 0
        assert run(args + ["--shots", str(shots), "--seed", "3",
                           "--out", str(out_shots)]) == 0

        def column(path):
            rows = (path / "probs_p2.csv").read_text().splitlines()[1:]
            return np.array([float(r.split(",")[2]) for r in rows])

        exact = column(out_exact)
        sampled = column(out_shots)
        sigma = np.sqrt(np.maximum(exact * (1 - exact), 1e-12) / shots)
        assert np.all(np.abs(sampled - exact) <= 3.0 * sigma + 1e-12)

    def test_empty_range_rejected(self, tmp_path, capsys):
        assert run(["train", "instance1", "--p", "3..1", "--iters", "10",
                    "--out", str(tmp_path)]) == 2
        assert not (tmp_path / "merits.csv").exists()


class TestLandscape:
    def test_small_grid(self, tmp_path):
        assert run(["landscape", "instance1", "--points", "3",
                    "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "landscape.csv").read_text().splitlines()
        assert lines[0] == "beta,gamma,expectation"
        assert len(lines) == 10  # 3x3 grid
        betas = [float(r.split(",")[0]) for r in lines[1:]]
        assert betas == sorted(betas)
        assert (tmp_path / "landscape.svg").read_text().startswith("<svg")


class TestCircuit:
    def test_didactic_decomposed_stats(self, tmp_path):
        assert run(["circuit", "didactic", "--p", "1", "--decompose",
                    "--iters", "20", "--out", str(tmp_path)]) == 0
        stats = json.loads((tmp_path / "stats.json").read_text())
        # 3 couplings -> 3 RZZ -> 6 CX after decomposition
        assert stats["two_qubit_count"] == 6
        assert stats["decomposed"] is True
        assert set(stats["gate_counts"]) == {"h", "rz", "cx"}
        text = (tmp_path / "ansatz.qasm").read_text()
        assert text.startswith("OPENQASM 2.0;")
        assert "rzz" not in text

    def test_instance_circuit_roundtrip(self, tmp_path):
        from qubokit import circuit as qc

        assert run(["circuit", "instance1", "--p", "2", "--iters", "20",
                    "--out", str(tmp_path)]) == 0
        parsed = qc.parse_qasm((tmp_path / "ansatz.qasm").read_text())
        assert parsed.n == 8
        stats = json.loads((tmp_path / "stats.json").read_text())
        assert stats["depth"] > 0


class TestDidacticWalkthrough:
    def test_produces_full_artifact_set(self, tmp_path, capsys):
        assert run(["didactic", "--iters", "40", "--out", str(tmp_path)]) == 0
        for name in ("spectrum.csv", "merits.csv", "probs_p1.csv", "probs_p3.csv",
                     "ansatz.qasm", "stats.json"):
            assert (tmp_path / name).exists(), name
        out = capsys.readouterr().out
        assert "ground state(s): [9]" in out


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 2

    def test_unknown_flag_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["spectrum", "instance1", "--bogus"])
        assert exc.value.code == 2

    def test_missing_instance_file(self, tmp_path, capsys):
        assert run(["spectrum", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 2

    def test_infeasible_instance_exit_code(self, tmp_path, capsys):
        payload = {
            "spec": {"v_s": 12, "R": 10, "d": 0.5, "f_sw": 1e5,
                     "di_max": 0.001, "dv_max": 0.2, "kappa": 15},
            "inductors": [{"uH": 10, "cost": 0.5}],
            "capacitors": [{"uF": 54, "cost": 1.0}],
        }
        path = tmp_path / "too_tight.json"
        path.write_text(json.dumps(payload))
        assert run(["spectrum", str(path), "--out", str(tmp_path)]) == 3
        assert "infeasible" in capsys.readouterr().err

    def test_resource_guard_exit_code(self, tmp_path, capsys):
        # 4 inductors x 5 capacitors -> 29 qubits, over the enumeration guard
        payload = {
            "spec": {"v_s": 12, "R": 10, "d": 0.5, "f_sw": 1e5,
                     "di_max": 3, "dv_max": 0.2, "kappa": 15},
            "inductors": [{"uH": u, "cost": 1.0} for u in (10, 22, 47, 100)],
            "capacitors": [{"uF": u, "cost": 1.0} for u in (54, 115, 253, 400, 500)],
        }
        path = tmp_path / "big.json"
        path.write_text(json.dumps(payload))
        assert run(["spectrum", str(path), "--out", str(tmp_path)]) == 4
        assert "resource guard" in capsys.readouterr().err


class TestOutputHygiene:
    def test_failed_run_removes_partial_outputs(self, tmp_path, monkeypatch):
        from qubokit import qaoa as qaoa_mod

        calls = {"n": 0}
        original = qaoa_mod.train_adam

        def explode_on_second(m, p, config=None):
            calls["n"] += 1
            if calls["n"] >= 2:
                raise RuntimeError("synthetic failure")
            return original(m, p, config)

        monkeypatch.setattr(cli.qaoa, "train_adam", explode_on_second)
        config = cli.ExperimentConfig(
            problem="didactic",
            p_values=[1, 2],
            out_dir=tmp_path / "run",
            train=cli.TrainConfig(max_iters=5),
        )
        with pytest.raises(RuntimeError):
            cli.run_experiment(config)
        leftovers = list((tmp_path / "run").glob("*")) if (tmp_path / "run").exists() else []
        assert leftovers == []
