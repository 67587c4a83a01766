#!/usr/bin/env python3
"""Main CLI for the quantum-walk transport simulator."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict

from src.comparison import compare_maps
from src.config import SOLVERS, ExperimentConfig
from src.errors import TransportError
from src.experiment import run_experiment
from src.quantum.qasm import to_qasm
from src.report_generator import ReportGenerator, read_flux_csv
from src.walk.coin import CoinMode
from src.walk.registers import allocate_registers
from src.walk.source import build_source_prep
from src.walk.step import POSTSELECTION_NOTE, build_walk_step


def _grover_k(value: str):
    if value == "auto":
        return value
    try:
        k = int(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError("expected an integer or 'auto'") from e
    if k < 0:
        raise argparse.ArgumentTypeError("k must be nonnegative")
    return k


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        type=str,
        default="config/experiment.yaml",
        help="Path to experiment configuration file",
    )
    common.add_argument("--seed", type=int, default=None, help="Root seed (default: from config)")
    common.add_argument("--out", type=str, default=None, help="Output directory")
    common.add_argument("--steps", type=int, default=None, help="Walk steps")
    common.add_argument("--shots", type=int, default=None, help="Walk / swap-test shots")
    common.add_argument("--particles", type=int, default=None, help="Monte Carlo particles")
    common.add_argument(
        "--trace", type=int, default=None, help="Monte Carlo histories to dump as trajectories"
    )
    common.add_argument(
        "--grover-k", type=_grover_k, default=None, help="Grover iterations or 'auto'"
    )
    common.add_argument(
        "--absorb-mode",
        type=str,
        choices=["self-loop", "kill"],
        default=None,
        help="Measured-walk treatment of stay outcomes",
    )
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(
        description="Particle transport as a discrete-time quantum walk, with classical baselines"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SOLVERS:
        sub.add_parser(name, parents=[common], help=f"Run the {name} solver")
    compare = sub.add_parser(
        "compare",
        parents=[common],
        help="Run all configured solvers and compare, or compare existing flux CSVs",
    )
    compare.add_argument("csv", nargs="*", help="Flux CSV files to compare pairwise")
    qasm = sub.add_parser("export-qasm", parents=[common], help="Write OpenQASM 2.0 circuits")
    qasm.add_argument(
        "--circuit",
        choices=["all", "source", "coin", "boundary", "shift", "step"],
        default="all",
        help="Circuit to export (default: all)",
    )
    return parser


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig(args.config)
    config.override(
        seed=args.seed,
        output_dir=args.out,
        steps=args.steps,
        shots=args.shots,
        swap_shots=args.shots,
        particles=args.particles,
        trace_particles=args.trace,
        grover_k=args.grover_k,
        absorb_mode=args.absorb_mode,
    )
    return config


def _compare_csvs(paths) -> int:
    fluxes = {Path(p).name: read_flux_csv(p) for p in paths}
    names = list(fluxes)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            m = compare_maps(fluxes[a], fluxes[b])
            print(f"✓ {a} vs {b}: cosine {m.cosine:.6f}, TV {m.total_variation:.6f}")
    return 0


def _export_qasm(config: ExperimentConfig, which: str) -> Dict[str, str]:
    geometry, source = config.geometry, config.source
    registers = allocate_registers(geometry.n_x, geometry.n_y)
    step = build_walk_step(geometry, registers, CoinMode.GATE, use_qft_blocks=False)
    circuits = {
        "source": build_source_prep(source, registers, geometry),
        "coin": step.coin.circuit,
        "boundary": step.boundary,
        "shift": step.shift,
        "step": step.circuit,
    }
    generator = ReportGenerator(config.output_dir)
    written = {}
    for name, circuit in circuits.items():
        if which not in ("all", name):
            continue
        comments = [POSTSELECTION_NOTE] if name in ("coin", "step") else None
        written[name] = generator.write_text(f"{name}.qasm", to_qasm(circuit, comments))
    return written


def main():
    """Main entry point for the transport simulator."""
    parser = build_parser()
    args = parser.parse_args()

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        config = _load_config(args)
    except (FileNotFoundError, TransportError) as e:
        print(f"Error: {e}")
        sys.exit(1)

    print("=" * 80)
    print("Quantum Walk Transport")
    print("=" * 80)
    print(f"Configuration: {args.config}")
    print(f"Command: {args.command}")
    print(f"Seed: {config.seed}")
    print(f"Output: {config.output_dir}")
    print("=" * 80)

    try:
        if args.command == "compare" and args.csv:
            print("\n[Comparing flux maps...]")
            sys.exit(_compare_csvs(args.csv))

        if args.command == "export-qasm":
            print("\n[Exporting circuits...]")
            for name, path in _export_qasm(config, args.circuit).items():
                print(f"✓ {name}: {path}")
        else:
            if args.command != "compare":
                config.override(solvers=[args.command])
            print(f"\n[Running {', '.join(config.solvers)}...]")
            result = run_experiment(config)
            for name, seconds in result.comparison.runtimes.items():
                if name in result.comparison.failures:
                    print(f"✗ {name}: {result.comparison.failures[name]}")
                else:
                    print(f"✓ {name}: {seconds:.2f} s")
            for pair, m in result.comparison.metrics.items():
                print(f"  {pair}: cosine {m.cosine:.4f}, TV {m.total_variation:.4f}")
            print(f"✓ Manifest saved to: {result.outputs['manifest']}")
            if not result.ok:
                sys.exit(1)
    except (FileNotFoundError, TransportError, ValueError) as e:
        print(f"Error: {e}")
        sys.exit(1)

    print("\n" + "=" * 80)
    print("✓ Complete!")
    print("=" * 80)


if __name__ == "__main__":
    main()
