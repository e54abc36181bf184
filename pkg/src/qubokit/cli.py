"""Command-line experiment runner.

Subcommands drive the full pipeline at desk scale: exact spectra with
classification, penalty-weight tuning, QAOA training sweeps with figures
of merit, p=1 landscape grids, and gate-level circuit export.  Every plot
gets a CSV twin; runs are deterministic for a fixed configuration and
seed, and outputs are removed again if a run fails partway.

Exit codes: 0 success, 2 configuration error, 3 infeasible instance,
4 resource guard.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bitconv, circuit, didactic, merits, oracle, qaoa, svgplot, tuner
from .boost import (
    BUILTIN_INSTANCES,
    DesignInstance,
    PenaltyWeights,
    build_qubo,
    builtin_instance,
    load_instance,
)
from .errors import InfeasibleConstraintError, ResourceLimitError
from .pbool import IsingModel, qubo_to_ising
from .qaoa import TrainConfig
from .statevec import probabilities, sample


@dataclass
class Problem:
    """A ready-to-run optimization target with ground-truth classification."""

    name: str
    n: int
    ising: IsingModel
    classes: np.ndarray
    instance: DesignInstance | None = None
    weights: PenaltyWeights | None = None


def load_problem(name_or_path: str, weights_path: str | None = None) -> Problem:
    if name_or_path == "didactic":
        model = didactic.didactic_ising()
        classes = np.full(1 << model.n, oracle.CLASS_FEASIBLE, dtype=np.int8)
        classes[didactic.OPTIMAL_INDEX] = oracle.CLASS_OPTIMAL
        return Problem(name="didactic", n=model.n, ising=model, classes=classes)
    if name_or_path in BUILTIN_INSTANCES:
        instance, weights = builtin_instance(name_or_path)
    else:
        instance, weights = load_instance(name_or_path)
        if weights is None:
            weights = PenaltyWeights()
    if weights_path is not None:
        with open(weights_path, encoding="utf-8") as fh:
            w = json.load(fh)
        weights = PenaltyWeights(
            m1=float(w.get("M1", weights.m1)),
            m2=float(w.get("M2", weights.m2)),
            m3=float(w.get("M3", weights.m3)),
            m4=float(w.get("M4", weights.m4)),
            m5=float(w.get("M5", weights.m5)),
            m6=float(w.get("M6", weights.m6)),
        )
    design = build_qubo(instance, weights)
    model = qubo_to_ising(design.model)
    spectrum = oracle.classify(oracle.enumerate_model(design.model), instance)
    return Problem(
        name=Path(name_or_path).stem,
        n=instance.n_qubits,
        ising=model,
        classes=spectrum.classes,
        instance=instance,
        weights=weights,
    )


class OutputSet:
    """Collects written files so a failed run can clean up after itself."""

    def __init__(self, out_dir: Path) -> None:
        self.out_dir = out_dir
        self.paths: list[Path] = []

    def open(self, name: str):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        self.paths.append(path)
        return open(path, "w", encoding="utf-8", newline="\n")

    def path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        self.paths.append(path)
        return path

    def discard_all(self) -> None:
        for path in self.paths:
            path.unlink(missing_ok=True)


@dataclass
class ExperimentConfig:
    problem: str
    p_values: list[int]
    out_dir: Path
    train: TrainConfig = field(default_factory=TrainConfig)
    shots: int | None = None
    seed: int = 0
    threads: int = 1
    weights_path: str | None = None

    def validate(self) -> None:
        if not self.p_values:
            raise ValueError("empty layer range")
        if any(p < 1 for p in self.p_values):
            raise ValueError("layer counts must be >= 1")
        self.train.validate()


def _write_probs_csv(fh, probs: np.ndarray, classes: np.ndarray, n: int) -> None:
    fh.write("index,bitstring,probability,class\n")
    for idx in range(1 << n):
        label = oracle.CLASS_LABELS[int(classes[idx])]
        fh.write(f"{idx},{bitconv.bitstring(idx, n)},{float(probs[idx])!r},{label}\n")


def run_experiment(config: ExperimentConfig) -> merits.MeritReport:
    """Train each requested layer count and report figures of merit.

    Probabilities are exact statevector values unless shots are requested,
    in which case empirical frequencies from a seeded sampler are reported
    instead.
    """
    config.validate()
    problem = load_problem(config.problem, config.weights_path)
    outputs = OutputSet(config.out_dir)
    try:
        def train_one(p: int):
            trace = qaoa.train_adam(problem.ising, p, config.train)
            state = qaoa.qaoa_state(problem.ising, trace.final_params)
            probs = probabilities(state)
            if config.shots is not None:
                counts = sample(state, config.shots, config.seed + p)
                probs = np.zeros_like(probs)
                for idx, cnt in counts.counts.items():
                    probs[idx] = cnt / config.shots
            return trace, probs

        # Each layer count trains independently; the compiled kernels drop
        # the GIL, so worker threads give real parallelism with results
        # placed deterministically by p.
        if config.threads > 1 and len(config.p_values) > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                trained = list(pool.map(train_one, config.p_values))
        else:
            trained = [train_one(p) for p in config.p_values]

        rows = []
        summary: dict[str, dict] = {}
        for p, (trace, probs) in zip(config.p_values, trained):
            row = merits.merit_row(p, probs, problem.classes, problem.n,
                                   trace.final_expectation)
            rows.append(row)
            with outputs.open(f"probs_p{p}.csv") as fh:
                _write_probs_csv(fh, probs, problem.classes, problem.n)
            summary[str(p)] = {
                "expectation": trace.final_expectation,
                "beta": [float(b) for b in trace.final_params.beta],
                "gamma": [float(g) for g in trace.final_params.gamma],
            }
        with outputs.open("merits.csv") as fh:
            fh.write(
                "p,prob_optimal,prob_feasible,cop,tts,"
                "most_probable_index,most_probable_class\n"
            )
            for row in rows:
                fh.write(
                    f"{row.p},{row.prob_optimal!r},{row.prob_feasible!r},"
                    f"{row.cop!r},{row.tts!r},{row.most_probable_index},"
                    f"{row.most_probable_class}\n"
                )
        with outputs.open("train_summary.json") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        ps = np.array([row.p for row in rows], dtype=float)
        svgplot.line_plot(
            outputs.path("probabilities.svg"),
            {
                "P(optimal)": (ps, np.array([row.prob_optimal for row in rows])),
                "P(feasible)": (ps, np.array([row.prob_feasible for row in rows])),
            },
            title=f"{problem.name}: solution probability vs layers",
            xlabel="layers p",
            ylabel="probability",
        )
        svgplot.line_plot(
            outputs.path("cop.svg"),
            {"CoP": (ps, np.array([row.cop for row in rows]))},
            title=f"{problem.name}: coefficient of performance",
            xlabel="layers p",
            ylabel="CoP",
        )
        finite_tts = np.array(
            [row.tts if math.isfinite(row.tts) else np.nan for row in rows]
        )
        svgplot.line_plot(
            outputs.path("tts.svg"),
            {"TTS": (ps, finite_tts)},
            title=f"{problem.name}: time to solution (99%)",
            xlabel="layers p",
            ylabel="shots",
            log_y=True,
        )
        return merits.MeritReport(n=problem.n, rows=tuple(rows))
    except Exception:
        outputs.discard_all()
        raise


def _parse_p_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _cmd_spectrum(args) -> int:
    problem = load_problem(args.instance, args.weights)
    spectrum = oracle.enumerate_model(problem.ising, threads=args.threads)
    classified = oracle.Spectrum(
        n=spectrum.n,
        indices=spectrum.indices,
        energies=spectrum.energies,
        classes=problem.classes[spectrum.indices],
    )
    outputs = OutputSet(Path(args.out))
    with outputs.open("spectrum.csv") as fh:
        oracle.write_spectrum_csv(classified, fh)
    svgplot.spectrum_plot(
        outputs.path("spectrum.svg"),
        classified.energies,
        classified.classes,
        title=f"{problem.name}: energy spectrum",
    )
    grounds = oracle.ground_states(classified)
    print(f"states: {1 << problem.n}  ground: {grounds}")
    if problem.instance is not None:
        report = oracle.separation_report(classified)
        print(
            f"max_feasible={report.max_feasible_energy!r} "
            f"min_infeasible={report.min_infeasible_energy!r} gap={report.gap!r}"
        )
    return 0


def _cmd_tune(args) -> int:
    if args.instance == "didactic":
        raise ValueError("tuning needs a constrained instance, not the didactic model")
    problem = load_problem(args.instance)
    result = tuner.tune_weights(problem.instance, weight_upper_bound=args.bound)
    outputs = OutputSet(Path(args.out))
    with outputs.open("tune.json") as fh:
        json.dump(result.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(
        f"M5={result.m5!r} M6={result.m6!r} gap={result.gap!r} "
        f"separation_ok={result.separation_ok}"
    )
    return 0


def _cmd_train(args) -> int:
    config = ExperimentConfig(
        problem=args.instance,
        p_values=_parse_p_range(args.p),
        out_dir=Path(args.out),
        train=TrainConfig(max_iters=args.iters, step_size=args.step),
        shots=args.shots,
        seed=args.seed,
        threads=args.threads,
        weights_path=args.weights,
    )
    report = run_experiment(config)
    for row in report.rows:
        print(
            f"p={row.p} P(opt)={row.prob_optimal:.4f} P(feas)={row.prob_feasible:.4f} "
            f"CoP={row.cop:.2f} TTS={row.tts} top=|{row.most_probable_index}> "
            f"({row.most_probable_class})"
        )
    return 0


def _cmd_landscape(args) -> int:
    problem = load_problem(args.instance, args.weights)
    betas, gammas, grid = qaoa.landscape_scan(
        problem.ising, points=args.points, threads=args.threads
    )
    outputs = OutputSet(Path(args.out))
    with outputs.open("landscape.csv") as fh:
        fh.write("beta,gamma,expectation\n")
        for i, b in enumerate(betas):
            for j, g in enumerate(gammas):
                fh.write(f"{float(b)!r},{float(g)!r},{float(grid[i, j])!r}\n")
    svgplot.heatmap(
        outputs.path("landscape.svg"), betas, gammas, grid,
        title=f"{problem.name}: p=1 expectation landscape",
    )
    lowest = np.unravel_index(np.argmin(grid), grid.shape)
    print(
        f"grid_min={float(grid[lowest])!r} at beta={float(betas[lowest[0]])!r} "
        f"gamma={float(gammas[lowest[1]])!r}"
    )
    return 0


def _cmd_circuit(args) -> int:
    problem = load_problem(args.instance, args.weights)
    trace = qaoa.train_adam(problem.ising, args.p, TrainConfig(max_iters=args.iters))
    ansatz = circuit.build_qaoa_circuit(problem.ising, trace.final_params)
    if args.decompose:
        ansatz = circuit.decompose(ansatz)
    outputs = OutputSet(Path(args.out))
    with outputs.open("ansatz.qasm") as fh:
        fh.write(circuit.export_qasm(ansatz))
    stats = {
        "n": ansatz.n,
        "p": args.p,
        "depth": circuit.depth(ansatz),
        "two_qubit_count": circuit.two_qubit_count(ansatz),
        "gate_counts": circuit.gate_census(ansatz),
        "decomposed": bool(args.decompose),
        "expectation": trace.final_expectation,
    }
    with outputs.open("stats.json") as fh:
        json.dump(stats, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(
        f"depth={stats['depth']} two_qubit_count={stats['two_qubit_count']} "
        f"gates={sum(stats['gate_counts'].values())}"
    )
    return 0


def _cmd_didactic(args) -> int:
    model = didactic.didactic_ising()
    print("chain model: offset and fields/couplings of the spin form")
    print(f"offset={model.offset!r} h={[float(x) for x in model.h]} "
          f"r={ {k: float(v) for k, v in sorted(model.r.items())} }")
    spectrum = oracle.enumerate_model(model)
    grounds = oracle.ground_states(spectrum)
    print(f"ground state(s): {grounds} at energy {float(spectrum.energies[grounds[0]])!r}")

    rc = _cmd_spectrum(
        argparse.Namespace(instance="didactic", weights=None, out=args.out, threads=1)
    )
    if rc:
        return rc
    config = ExperimentConfig(
        problem="didactic",
        p_values=[1, 2, 3],
        out_dir=Path(args.out),
        train=TrainConfig(max_iters=args.iters),
    )
    report = run_experiment(config)
    for row in report.rows:
        print(
            f"p={row.p}: <Hc>={row.expectation:.4f} "
            f"P(|{didactic.OPTIMAL_INDEX}>)={row.prob_optimal:.4f}"
        )
    return _cmd_circuit(
        argparse.Namespace(
            instance="didactic", weights=None, p=1, iters=args.iters,
            decompose=False, out=args.out,
        )
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubokit",
        description="QUBO/Ising workbench: spectra, weight tuning, QAOA, circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, weights_flag=True):
        p.add_argument("instance", help="built-in name (didactic, instance1..3) or JSON path")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker thread cap")
        p.add_argument("--seed", type=int, default=0,
                       help="random seed where sampling applies")
        if weights_flag:
            p.add_argument("--weights", default=None, help="JSON file overriding M1..M6")

    p_spec = sub.add_parser("spectrum", help="enumerate and classify all energies")
    common(p_spec)
    p_spec.set_defaults(func=_cmd_spectrum)

    p_tune = sub.add_parser("tune", help="tune (M5, M6) by the separation LP")
    common(p_tune, weights_flag=False)
    p_tune.add_argument("--bound", type=float, default=tuner.DEFAULT_WEIGHT_UPPER_BOUND,
                        help="upper bound for the tuned weights")
    p_tune.set_defaults(func=_cmd_tune)

    p_train = sub.add_parser("train", help="train the ansatz over a range of layer counts")
    common(p_train)
    p_train.add_argument("--p", required=True, help="layer count or range A..B")
    p_train.add_argument("--iters", type=int, default=2000, help="optimizer iterations")
    p_train.add_argument("--step", type=float, default=1e-3, help="optimizer step size")
    p_train.add_argument("--shots", type=int, default=None,
                         help="report sampled frequencies instead of exact probabilities")
    p_train.set_defaults(func=_cmd_train)

    p_land = sub.add_parser("landscape", help="p=1 expectation grid over (beta, gamma)")
    common(p_land)
    p_land.add_argument("--points", type=int, default=100, help="grid points per axis")
    p_land.set_defaults(func=_cmd_landscape)

    p_circ = sub.add_parser("circuit", help="export the trained ansatz as OpenQASM")
    common(p_circ)
    p_circ.add_argument("--p", type=int, required=True, help="layer count")
    p_circ.add_argument("--iters", type=int, default=2000, help="optimizer iterations")
    p_circ.add_argument("--decompose", action="store_true",
                        help="rewrite onto the {H, RZ, CX} gate set")
    p_circ.set_defaults(func=_cmd_circuit)

    p_did = sub.add_parser("didactic", help="full walkthrough of the textbook model")
    p_did.add_argument("--out", default="out", help="output directory")
    p_did.add_argument("--iters", type=int, default=2000, help="optimizer iterations")
    p_did.add_argument("--threads", type=int, default=1, help="worker thread cap")
    p_did.add_argument("--seed", type=int, default=0,
                       help="random seed where sampling applies")
    p_did.set_defaults(func=_cmd_didactic)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleConstraintError as exc:
        print(f"infeasible instance: {exc}", file=sys.stderr)
        return 3
    except ResourceLimitError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
