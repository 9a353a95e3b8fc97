"""Command-line entry point.

Subcommands:
  train        train an agent on the configured instance, write run artifacts
  baseline     evaluate one of the fixed ansatzes (qaoa1, qaoa2, maqaoa,
               qaoaplus, linear) under the 10-run random-restart protocol
  brute-force  write the exact spectrum of the configured instance
  matrix       run a (problem x topology x size x algorithm) grid into one CSV
  eval         re-score a saved circuit file on the configured instance

Exit codes: 0 success, 1 runtime failure, 2 invalid configuration or usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .agent.training import train
from .ansatz import BASELINE_BUILDERS, build_baseline
from .circuits import Circuit, transpiled_counts
from .config import RunConfig, load_config, load_matrix_config, write_json
from .errors import ConfigurationError
from .metrics import approximation_ratio, evaluate_circuit
from .problems import instance_to_json_dict, make_instance
from .qsim import estimate_expectation, exact_expectation, sample_shots
from .seeding import REWARD_STREAM, derive_seed

_STEP_COLUMNS = (
    "epoch",
    "worker",
    "episode",
    "step",
    "action_id",
    "reward",
    "expectation",
    "depth",
    "n_gates",
    "patience",
    "done",
    "evaluations",
    "opt_seed",
    "reward_seed",
    "obs_seed",
)

_EPOCH_COLUMNS = (
    "epoch",
    "steps",
    "episodes_completed",
    "mean_reward",
    "mean_episode_return",
    "best_reward",
    "pi_loss",
    "vf_loss",
    "vf_loss_final",
    "kl",
    "clip_fraction",
    "entropy",
    "pi_steps",
)


def _format_cell(value) -> str:
    if isinstance(value, float):  # includes numpy float64
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, columns: tuple[str, ...], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row[c]) for c in columns])


def _out_dir(cfg: RunConfig, args) -> Path:
    out = Path(args.out) if args.out else Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args) -> RunConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.workers is not None:
        cfg.rl.workers = args.workers
    return cfg


def cmd_train(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg, args)
    inst = cfg.build_instance()
    write_json(out / "config.json", {**cfg.snapshot(), "instance": instance_to_json_dict(inst)})

    result = train(inst, cfg.train_config(), cfg.master_seed)
    _write_csv(out / "steps.csv", _STEP_COLUMNS, result.steps)
    _write_csv(out / "epochs.csv", _EPOCH_COLUMNS, result.history)
    result.best_circuit.save(out / "best_circuit.json")

    # fresh shot re-estimate of the best circuit at its trained parameters
    est_seed = derive_seed(cfg.master_seed, REWARD_STREAM)
    estimate = estimate_expectation(
        sample_shots(result.best_circuit, cfg.shots, est_seed), inst.ham
    )
    counts = transpiled_counts(result.best_circuit)
    report = {
        "best_reward": result.best_reward,
        "best_expectation_during_training": result.best_expectation,
        "reestimated_expectation": estimate,
        "approx_ratio": approximation_ratio(estimate, inst.spectrum, clamp=True),
        "exact_expectation": exact_expectation(result.best_circuit, inst.ham),
        "exact_approx_ratio": approximation_ratio(
            exact_expectation(result.best_circuit, inst.ham), inst.spectrum, clamp=True
        ),
        "feasibility_threshold_ar": inst.spectrum.feasibility_threshold_ar,
        "single_qubit_gates": counts.single_qubit,
        "two_qubit_gates": counts.two_qubit,
        "depth": counts.depth,
    }
    write_json(out / "report.json", report)
    print(f"run artifacts written to {out}")
    return 0


def _baseline_report(cfg: RunConfig, inst, algorithm: str, out: Path) -> dict:
    circuit = build_baseline(algorithm, inst)
    report = evaluate_circuit(
        circuit,
        inst,
        n_runs=cfg.eval_runs,
        n_shots=cfg.shots,
        seed=cfg.master_seed,
        max_iterations=cfg.optimizer.max_iterations,
        method=cfg.optimizer.method,
    )
    doc = {
        "algorithm": algorithm,
        "n_params": circuit.n_params,
        "feasibility_threshold_ar": inst.spectrum.feasibility_threshold_ar,
        **report.to_json_dict(),
    }
    write_json(out / "report.json", doc)
    runs = [
        {"run": i, "ratio": r, "estimate": e}
        for i, (r, e) in enumerate(zip(report.per_run_ratios, report.per_run_estimates))
    ]
    _write_csv(out / "runs.csv", ("run", "ratio", "estimate"), runs)
    return doc


def cmd_baseline(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg, args)
    inst = cfg.build_instance()
    write_json(out / "config.json", {**cfg.snapshot(), "instance": instance_to_json_dict(inst)})
    doc = _baseline_report(cfg, inst, args.algorithm, out)
    print(f"{args.algorithm}: mean A.R. {doc['approx_ratio']:.4f} over {doc['n_runs']} runs -> {out}")
    return 0


def cmd_brute_force(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg, args)
    inst = cfg.build_instance()
    spectrum = inst.spectrum
    doc = {
        "e_min": spectrum.e_min,
        "e_max": spectrum.e_max,
        "feasibility_threshold_ar": spectrum.feasibility_threshold_ar,
        "degenerate": spectrum.degenerate,
        "e_feasible_worst": spectrum.e_feasible_worst,
        "argmin_bitstrings": [
            format(b, f"0{inst.n}b")[::-1] for b in spectrum.ground_states
        ],  # qubit 0 first
        "argmin_indices": list(spectrum.ground_states),
        "n_ground_states": spectrum.n_ground,
        "instance": instance_to_json_dict(inst),
    }
    write_json(out / "spectrum.json", doc)
    print(f"e_min={spectrum.e_min} e_max={spectrum.e_max} -> {out / 'spectrum.json'}")
    return 0


def cmd_matrix(args) -> int:
    cfg, matrix = load_matrix_config(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    out = _out_dir(cfg, args)
    rows = []
    for kind in matrix["problems"]:
        for topology in matrix["topologies"]:
            for n in matrix["sizes"]:
                for algorithm in matrix["algorithms"]:
                    cell = out / f"{kind}_{topology}_{n}_{algorithm}"
                    cell.mkdir(parents=True, exist_ok=True)
                    report_path = cell / "report.json"
                    if args.resume and report_path.is_file():
                        with open(report_path) as fh:
                            doc = json.load(fh)
                    else:
                        inst = make_instance(
                            topology, n, cfg.problem.seed, kind, cfg.problem.penalty, er_p=cfg.problem.er_p
                        )
                        doc = _baseline_report(cfg, inst, algorithm, cell)
                        doc["feasibility_threshold_ar"] = inst.spectrum.feasibility_threshold_ar
                    rows.append(
                        {
                            "problem": kind,
                            "topology": topology,
                            "n": n,
                            "algorithm": algorithm,
                            "approx_ratio": doc["approx_ratio"],
                            "threshold": doc["feasibility_threshold_ar"] or 0.0,
                            "single_qubit": doc["single_qubit_gates"],
                            "two_qubit": doc["two_qubit_gates"],
                            "depth": doc["depth"],
                        }
                    )
    _write_csv(
        out / "matrix.csv",
        ("problem", "topology", "n", "algorithm", "approx_ratio", "threshold", "single_qubit", "two_qubit", "depth"),
        rows,
    )
    print(f"{len(rows)} cells -> {out / 'matrix.csv'}")
    return 0


def cmd_eval(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg, args)
    inst = cfg.build_instance()
    circuit_path = Path(args.circuit)
    if not circuit_path.is_file():
        raise ConfigurationError(f"circuit file not found: {circuit_path}")
    circuit = Circuit.load(circuit_path)
    if circuit.n_qubits != inst.n:
        raise ConfigurationError(
            f"circuit on {circuit.n_qubits} qubits vs instance on {inst.n}"
        )
    report = evaluate_circuit(
        circuit,
        inst,
        n_runs=args.runs,
        n_shots=cfg.shots,
        seed=cfg.master_seed,
        random_init=args.random_init,
        optimize=args.reoptimize,
        max_iterations=cfg.optimizer.max_iterations,
        method=cfg.optimizer.method,
    )
    doc = {
        "circuit": str(circuit_path),
        "exact_approx_ratio": approximation_ratio(exact_expectation(circuit, inst.ham), inst.spectrum, clamp=True),
        **report.to_json_dict(),
    }
    write_json(out / "eval_report.json", doc)
    print(f"A.R. {report.approx_ratio:.4f} -> {out / 'eval_report.json'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rlansatz", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="INI config file")
        p.add_argument("--seed", type=int, default=None, help="override master_seed")
        p.add_argument("--workers", type=int, default=None, help="override rl.workers")
        p.add_argument("--out", default=None, help="override output directory")

    p_train = sub.add_parser("train", help="train the gate-appending agent")
    add_common(p_train)
    p_train.set_defaults(func=cmd_train)

    p_base = sub.add_parser("baseline", help="evaluate a fixed ansatz")
    add_common(p_base)
    p_base.add_argument("algorithm", choices=sorted(BASELINE_BUILDERS))
    p_base.set_defaults(func=cmd_baseline)

    p_bf = sub.add_parser("brute-force", help="write the exact spectrum")
    add_common(p_bf)
    p_bf.set_defaults(func=cmd_brute_force)

    p_matrix = sub.add_parser("matrix", help="run an experiment grid")
    add_common(p_matrix)
    p_matrix.add_argument("--resume", action="store_true", help="skip cells with a report.json")
    p_matrix.set_defaults(func=cmd_matrix)

    p_eval = sub.add_parser("eval", help="re-score a saved circuit")
    add_common(p_eval)
    p_eval.add_argument("--circuit", required=True, help="circuit JSON file")
    p_eval.add_argument("--runs", type=int, default=1)
    p_eval.add_argument("--reoptimize", action="store_true", help="re-optimize parameters first")
    p_eval.add_argument("--random-init", action="store_true", help="randomize parameters per run")
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
