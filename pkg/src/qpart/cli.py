"""Command-line front end: ``qpart {partition,plan,randgen,bench}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .bench import ExperimentSpec, emit_csv, emit_jsonl, run_experiment, summarize
from .errors import QpartError
from .evolve import GaParams, PROFILES, run_ga
from .igraph import build_interaction_graph, check_fits, cut_cost
from .partition import PARTITIONERS, QpuConfig, default_partitioner, partition
from .qasm import generate_random_circuit, layerize, load_qasm, to_qasm

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise UsageError(message)


# flag name -> GaParams field
_GA_FLAGS = {
    "population": "population_size",
    "generations": "generations",
    "tournament_size": "tournament_size",
    "crossover_prob": "crossover_prob",
    "mutation_prob": "mutation_prob",
    "mutation_constant": "mutation_constant",
    "zero_prob": "zero_intro_prob",
    "init_mutations": "init_mutations",
}


def _add_ga_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("genetic algorithm")
    g.add_argument("--profile", choices=sorted(PROFILES), help="named GA preset")
    g.add_argument("--population", type=int)
    g.add_argument("--generations", type=int)
    g.add_argument("--tournament-size", type=int)
    g.add_argument("--crossover-prob", type=float)
    g.add_argument("--mutation-prob", type=float)
    g.add_argument("--mutation-constant", type=int)
    g.add_argument("--zero-prob", type=float, help="probability of introducing an empty block")
    g.add_argument("--init-mutations", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qpart", description="Bell-pair-aware qubit allocation for distributed circuits.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    p = sub.add_parser("partition", help="single-block baseline allocation")
    p.add_argument("--qasm", required=True, type=Path)
    p.add_argument("--qpus", required=True, help="comma-separated QPU capacities, e.g. 8,8")
    p.add_argument("--partitioner", choices=PARTITIONERS)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("plan", help="optimise a blocking with the genetic algorithm")
    p.add_argument("--qasm", required=True, type=Path)
    p.add_argument("--qpus", required=True)
    p.add_argument("--mab", type=int, help="maximum number of blocks")
    p.add_argument("--partitioner", choices=PARTITIONERS)
    p.add_argument("--seed", type=int)
    p.add_argument("--config", type=Path, help="GA parameters as TOML or JSON")
    p.add_argument("--threads", type=int, default=1, help="accepted for symmetry; plan runs single-threaded")
    p.add_argument("--out", type=Path)
    _add_ga_flags(p)

    p = sub.add_parser("randgen", help="write a random CNOT-only circuit as QASM")
    p.add_argument("--qubits", required=True, type=int)
    p.add_argument("--cx", required=True, type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("bench", help="run an experiment sweep and write CSV")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--jsonl", type=Path, help="also write rows as JSON lines")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--record-runtime", action="store_true", default=None,
                   help="fill runtime_ms (makes the CSV non-reproducible)")
    _add_ga_flags(p)
    return parser


def _load_config(path: Path) -> dict:
    if path.suffix == ".json":
        return json.loads(path.read_text())
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _seed(flag: int | None, config_value: int | None = None) -> int:
    if flag is not None:
        return flag
    if config_value is not None:
        return int(config_value)
    env = os.environ.get("QPART_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise QpartError(f"QPART_SEED must be an integer, got {env!r}") from None
    return 0


def _ga_overrides(args) -> dict:
    out = {}
    for flag, name in _GA_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            out[name] = value
    return out


def _pick_partitioner(requested: str | None, qpus: QpuConfig) -> str:
    if requested is None:
        return default_partitioner(qpus)
    if requested == "kl" and not (qpus.num_qpus == 2 and qpus.homogeneous):
        raise QpartError("--partitioner kl needs exactly two QPUs of equal capacity")
    return requested


def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def cmd_partition(args) -> int:
    circuit = load_qasm(args.qasm)
    qpus = QpuConfig.parse(args.qpus)
    check_fits(circuit.num_qubits, qpus.capacities)
    method = _pick_partitioner(args.partitioner, qpus)
    graph = build_interaction_graph(circuit)
    # Same seed derivation as the single-block baseline inside ``plan``.
    depth = layerize(circuit, cx_only=True).depth
    alloc = partition(graph, qpus, method, np.random.default_rng([_seed(args.seed), 0, depth]))
    cost = cut_cost(graph, alloc)
    payload = {
        "partitioner": method,
        "capacities": list(qpus.capacities),
        "allocation": alloc.to_json(),
        "cut_cost": cost,
    }
    if args.out:
        _write(args.out, json.dumps(payload, indent=2) + "\n")
    print(f"{args.qasm.name}: {circuit.num_qubits} qubits, {circuit.cx_count} CX; "
          f"{method} cut = {cost} Bell pairs")
    return EXIT_OK


def cmd_plan(args) -> int:
    circuit = load_qasm(args.qasm)
    qpus = QpuConfig.parse(args.qpus)
    check_fits(circuit.num_qubits, qpus.capacities)
    config = _load_config(args.config) if args.config else {}
    method = _pick_partitioner(args.partitioner or config.get("partitioner"), qpus)
    if args.profile:
        config["profile"] = args.profile
    config.update(_ga_overrides(args))
    if args.mab is not None:
        config["max_blocks"] = args.mab
    config["rng_seed"] = _seed(args.seed, config.get("rng_seed"))
    config["partitioner"] = method
    params = GaParams.from_mapping(config)
    lc = layerize(circuit, cx_only=True)
    report = run_ga(lc, qpus, params)
    doc = report.to_dict()
    doc["circuit"] = {"file": args.qasm.name, "qubits": circuit.num_qubits,
                      "cx": circuit.cx_count, "depth": lc.depth}
    doc["params"] = {f.name: getattr(params, f.name) for f in fields(params)}
    if args.out:
        _write(args.out, json.dumps(doc, indent=2) + "\n")
    used = len(report.blocks)
    print(f"total Bell pairs: {report.total} "
          f"({report.gate_teleports} gate + {report.qubit_teleports} qubit teleports, {used} blocks)")
    print(f"baseline ({method}, single block): {report.baseline}; "
          f"improvement: {report.improvement_pct:.2f}%")
    return EXIT_OK


def cmd_randgen(args) -> int:
    circuit = generate_random_circuit(args.qubits, args.cx, _seed(args.seed))
    _write(args.out, to_qasm(circuit))
    return EXIT_OK


def cmd_bench(args) -> int:
    data = _load_config(args.config)
    data["seed"] = _seed(args.seed, data.get("seed"))
    ga = dict(data.get("ga", {}) or {})
    if args.profile:
        ga["profile"] = args.profile
    ga.update(_ga_overrides(args))
    data["ga"] = ga
    spec = ExperimentSpec.from_mapping(data)
    if args.record_runtime is not None:
        spec = replace(spec, record_runtime=args.record_runtime)
    rows = run_experiment(spec, threads=args.threads)
    _write(args.out, emit_csv(rows))
    if args.jsonl:
        _write(args.jsonl, emit_jsonl(rows))
    for (n, cx, mab), mean in sorted(summarize(rows).items()):
        print(f"qubits={n} cx={cx} mab={mab}: mean improvement {mean:.2f}%")
    print(f"{len(rows)} rows written to {args.out}")
    return EXIT_OK


COMMANDS = {"partition": cmd_partition, "plan": cmd_plan, "randgen": cmd_randgen, "bench": cmd_bench}


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.error("a command is required")
    except UsageError as exc:
        print(f"qpart: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (QpartError, OSError, ValueError, tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        print(f"qpart: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"qpart: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run_command())
