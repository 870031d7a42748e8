"""Experiment harness: blocked plans versus single-block partitioning.

An experiment is described by a TOML file::

    name = "fig6"
    seed = 42
    repetitions = 20
    mab = [10, 50, 100]
    qpus = [8, 8]          # or: num_qpus = 2 (equal QPUs sized per circuit)
    partitioner = "kl"     # optional; default kl for 2 equal QPUs, else gpa
    record_runtime = false

    [random]
    num_qubits = [16]
    cx = [1000, 2000, 3000]

    [qasm]                 # alternative circuit source
    dir = "QASMBench/large"
    files = ["adder_n118.qasm"]

    [ga]
    profile = "test"
    generations = 20
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .evolve import GaParams, PROFILES, improvement, run_ga
from .igraph import check_fits
from .partition import PARTITIONERS, QpuConfig, default_partitioner
from .qasm import LayeredCircuit, generate_random_circuit, layerize, load_qasm

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger(__name__)

CSV_HEADER = (
    "circuit_id", "qubits", "cx", "depth", "mab", "baseline", "mha",
    "improvement_pct", "runtime_ms", "seed",
)


@dataclass(frozen=True)
class ResultRow:
    circuit_id: str
    qubits: int
    cx: int
    depth: int
    mab: int
    baseline: int
    mha: int
    improvement_pct: float
    runtime_ms: float | None
    seed: int

    def csv_fields(self) -> list[str]:
        return [
            self.circuit_id, str(self.qubits), str(self.cx), str(self.depth),
            str(self.mab), str(self.baseline), str(self.mha),
            f"{self.improvement_pct:.2f}",
            "" if self.runtime_ms is None else f"{self.runtime_ms:.1f}",
            str(self.seed),
        ]


@dataclass
class ExperimentSpec:
    mab: list[int] = field(default_factory=lambda: [10])
    repetitions: int = 1
    seed: int = 0
    qpus: tuple[int, ...] | None = None
    num_qpus: int = 2
    partitioner: str | None = None
    random_qubits: list[int] = field(default_factory=list)
    random_cx: list[int] = field(default_factory=list)
    qasm_dir: str | None = None
    qasm_files: list[str] = field(default_factory=list)
    ga: GaParams = field(default_factory=lambda: PROFILES["default"])
    record_runtime: bool = False
    name: str = "experiment"

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.mab or any(m < 1 for m in self.mab):
            raise ValueError("mab must be a non-empty list of positive integers")
        if self.partitioner is not None and self.partitioner not in PARTITIONERS:
            raise ValueError(f"unknown partitioner {self.partitioner!r}")
        if self.num_qpus < 1:
            raise ValueError("num_qpus must be >= 1")

    def qpus_for(self, num_qubits: int) -> QpuConfig:
        cfg = QpuConfig(self.qpus) if self.qpus else QpuConfig.equal(num_qubits, self.num_qpus)
        check_fits(num_qubits, cfg.capacities)
        return cfg

    @classmethod
    def from_mapping(cls, data: dict) -> ExperimentSpec:
        data = dict(data)
        rnd = data.pop("random", {}) or {}
        qasm = data.pop("qasm", {}) or {}
        ga = GaParams.from_mapping(data.pop("ga", {}) or {})
        if "qpus" in data:
            data["qpus"] = tuple(int(c) for c in data["qpus"])
        return cls(
            random_qubits=[int(x) for x in _as_list(rnd.get("num_qubits", []))],
            random_cx=[int(x) for x in _as_list(rnd.get("cx", []))],
            qasm_dir=qasm.get("dir"),
            qasm_files=list(qasm.get("files", [])),
            ga=ga,
            **data,
        )

    @classmethod
    def load(cls, path) -> ExperimentSpec:
        with open(path, "rb") as fh:
            return cls.from_mapping(tomllib.load(fh))


def _as_list(x) -> list:
    return list(x) if isinstance(x, (list, tuple)) else [x]


def derive_seed(*parts: int) -> int:
    """Stable 31-bit seed from a tuple of non-negative integers."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0] & 0x7FFFFFFF)


def run_comparison(
    lc: LayeredCircuit,
    qpus: QpuConfig,
    params: GaParams,
    circuit_id: str = "",
    record_runtime: bool = True,
) -> ResultRow:
    """Run the GA once and compare its plan with the single-block baseline."""
    t0 = time.perf_counter()
    report = run_ga(lc, qpus, params)
    elapsed = (time.perf_counter() - t0) * 1000.0
    return ResultRow(
        circuit_id=circuit_id,
        qubits=lc.circuit.num_qubits,
        cx=lc.circuit.cx_count,
        depth=lc.depth,
        mab=params.max_blocks,
        baseline=report.baseline,
        mha=report.total,
        improvement_pct=improvement(report.baseline, report.total),
        runtime_ms=elapsed if record_runtime else None,
        seed=params.rng_seed,
    )


@dataclass(frozen=True)
class _Cell:
    circuit_id: str
    source: tuple  # ("random", n, cx, seed) or ("qasm", path)
    mab: int
    seed: int


def _run_cell(spec: ExperimentSpec, cell: _Cell) -> ResultRow:
    if cell.source[0] == "random":
        _, n, cx, cseed = cell.source
        circuit = generate_random_circuit(n, cx, cseed)
    else:
        circuit = load_qasm(cell.source[1])
    lc = layerize(circuit, cx_only=True)
    qpus = spec.qpus_for(circuit.num_qubits)
    method = spec.partitioner or default_partitioner(qpus)
    params = replace(spec.ga, max_blocks=cell.mab, partitioner=method, rng_seed=cell.seed)
    return run_comparison(lc, qpus, params, cell.circuit_id, spec.record_runtime)


def _cells(spec: ExperimentSpec) -> list[_Cell]:
    cells = []
    for n in spec.random_qubits:
        for cx in spec.random_cx:
            for rep in range(spec.repetitions):
                s = derive_seed(spec.seed, n, cx, rep)
                cid = f"rand_q{n}_cx{cx}_r{rep}"
                cells += [_Cell(cid, ("random", n, cx, s), m, s) for m in spec.mab]
    if spec.qasm_files or spec.qasm_dir:
        root = Path(spec.qasm_dir or ".")
        files = spec.qasm_files or sorted(p.name for p in root.glob("*.qasm"))
        for idx, name in enumerate(files):
            path = root / name
            if not path.is_file():
                log.warning("skipping missing benchmark circuit %s", path)
                continue
            for rep in range(spec.repetitions):
                s = derive_seed(spec.seed, 1_000_000 + idx, rep)
                cid = f"{Path(name).stem}_r{rep}"
                cells += [_Cell(cid, ("qasm", str(path)), m, s) for m in spec.mab]
    return cells


def run_experiment(spec: ExperimentSpec, threads: int = 1) -> list[ResultRow]:
    """Run every (circuit, repetition, MAB) cell; row order is fixed by the spec."""
    cells = _cells(spec)
    if threads <= 1 or len(cells) <= 1:
        return [_run_cell(spec, c) for c in cells]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_run_cell, [spec] * len(cells), cells))


def random_sweep(spec: ExperimentSpec, threads: int = 1) -> list[ResultRow]:
    """Random-circuit part of an experiment only."""
    return run_experiment(replace(spec, qasm_dir=None, qasm_files=[]), threads)


def emit_csv(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)  # RFC 4180: CRLF line ends, minimal quoting
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(r.csv_fields())
    return buf.getvalue()


def write_csv(rows: Sequence[ResultRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(emit_csv(rows))


def emit_jsonl(rows: Iterable[ResultRow]) -> str:
    return "".join(json.dumps(asdict(r)) + "\n" for r in rows)


def summarize(rows: Sequence[ResultRow]) -> dict[tuple[int, int, int], float]:
    """Mean improvement per (qubits, cx, mab)."""
    acc: dict[tuple[int, int, int], list[float]] = {}
    for r in rows:
        acc.setdefault((r.qubits, r.cx, r.mab), []).append(r.improvement_pct)
    return {k: float(np.mean(v)) for k, v in acc.items()}
