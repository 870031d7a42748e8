from __future__ import annotations

import itertools
import random
from pathlib import Path

import pytest

from qpart.igraph import Allocation, build_interaction_graph, cut_cost
from qpart.qasm import Circuit, Gate, GateKind

DATA = Path(__file__).parent / "data"


def cx(*pairs) -> Circuit:
    n = max(max(p) for p in pairs) + 1 if pairs else 1
    return Circuit(n, tuple(Gate(GateKind.CX, p, i, "cx") for i, p in enumerate(pairs)))


def random_allocation(rng: random.Random, n: int, caps: tuple[int, ...]) -> Allocation:
    slots = [q for q, c in enumerate(caps) for _ in range(c)]
    rng.shuffle(slots)
    return Allocation(tuple(slots[:n]), caps)


def audit_total(report, lc) -> int:
    """Recompute a plan's Bell pairs from its reported allocations only."""
    total = 0
    prev = None
    for b in report.blocks:
        gates = [i for layer in lc.layers[b.start:b.stop] for i in layer]
        total += cut_cost(build_interaction_graph(lc.circuit, gates), b.allocation)
        if prev is not None:
            total += sum(1 for x, y in zip(prev, b.allocation.assignment) if x != y)
        prev = b.allocation.assignment
    return total


def all_allocations(n: int, caps: tuple[int, ...]):
    for assign in itertools.product(range(len(caps)), repeat=n):
        if all(assign.count(q) <= c for q, c in enumerate(caps)):
            yield assign


@pytest.fixture
def fixture20_text() -> str:
    return (DATA / "fixture20.qasm").read_text()


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
