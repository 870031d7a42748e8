"""Weighted qubit interaction graphs and partition cut costs."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapacityError, ShapeMismatch
from .qasm import BlockSlice, Circuit, cx_pairs


@dataclass(frozen=True)
class InteractionGraph:
    """Undirected graph whose edge weight counts CX gates between two qubits.

    ``weights`` is keyed by normalized ``(min, max)`` pairs; a missing key
    means weight zero.
    """

    num_qubits: int
    weights: Mapping[tuple[int, int], int]

    def __post_init__(self):
        clean = {}
        for (u, v), w in self.weights.items():
            if u == v:
                raise ValueError(f"self-loop on qubit {u}")
            if w < 0:
                raise ValueError(f"negative weight on ({u}, {v})")
            if not (0 <= u < self.num_qubits and 0 <= v < self.num_qubits):
                raise ValueError(f"edge ({u}, {v}) outside {self.num_qubits} qubits")
            if w:
                key = (u, v) if u < v else (v, u)
                clean[key] = clean.get(key, 0) + int(w)
        object.__setattr__(self, "weights", clean)

    def weight(self, u: int, v: int) -> int:
        return self.weights.get((u, v) if u < v else (v, u), 0)

    @property
    def total_weight(self) -> int:
        return sum(self.weights.values())

    def matrix(self) -> np.ndarray:
        """Dense symmetric weight matrix."""
        m = np.zeros((self.num_qubits, self.num_qubits), dtype=np.int64)
        for (u, v), w in self.weights.items():
            m[u, v] = m[v, u] = w
        return m

    def to_dot(self, name: str = "interaction") -> str:
        lines = [f"graph {name} {{"]
        lines += [f"  q{u};" for u in range(self.num_qubits)]
        lines += [f'  q{u} -- q{v} [label="{w}"];' for (u, v), w in sorted(self.weights.items())]
        lines.append("}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edges(cls, num_qubits: int, edges: Iterable[tuple[int, int]]) -> InteractionGraph:
        counts = Counter((u, v) if u < v else (v, u) for u, v in edges)
        return cls(num_qubits, dict(counts))


@dataclass(frozen=True)
class Allocation:
    """Qubit to QPU assignment that respects per-QPU capacities."""

    assignment: tuple[int, ...]
    capacities: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))
        object.__setattr__(self, "capacities", tuple(int(c) for c in self.capacities))
        k = len(self.capacities)
        load = [0] * k
        for q, a in enumerate(self.assignment):
            if not 0 <= a < k:
                raise ValueError(f"qubit {q} assigned to QPU {a}, only {k} QPUs")
            load[a] += 1
        for a, (used, cap) in enumerate(zip(load, self.capacities)):
            if used > cap:
                raise CapacityError(f"QPU {a} holds {used} qubits but has capacity {cap}")

    @property
    def num_qubits(self) -> int:
        return len(self.assignment)

    @property
    def num_qpus(self) -> int:
        return len(self.capacities)

    def groups(self) -> list[frozenset[int]]:
        out = [set() for _ in self.capacities]
        for q, a in enumerate(self.assignment):
            out[a].add(q)
        return [frozenset(g) for g in out]

    def relabel(self, mapping: Sequence[int]) -> Allocation:
        """Move every qubit on QPU ``a`` to QPU ``mapping[a]``."""
        return Allocation(tuple(mapping[a] for a in self.assignment), self.capacities)

    def to_json(self) -> list[int]:
        return list(self.assignment)


def build_interaction_graph(
    circuit: Circuit, block: BlockSlice | Iterable[int] | None = None
) -> InteractionGraph:
    """Count CX gates per qubit pair over a slice (or the whole circuit)."""
    if isinstance(block, BlockSlice):
        block = block.gate_indices
    return InteractionGraph.from_edges(circuit.num_qubits, cx_pairs(circuit, block))


def cut_cost(graph: InteractionGraph, allocation: Allocation | Sequence[int]) -> int:
    """Total weight of edges whose endpoints sit on different QPUs."""
    assignment = allocation.assignment if isinstance(allocation, Allocation) else allocation
    if len(assignment) != graph.num_qubits:
        raise ShapeMismatch(
            f"allocation covers {len(assignment)} qubits, graph has {graph.num_qubits}"
        )
    return sum(w for (u, v), w in graph.weights.items() if assignment[u] != assignment[v])


def check_fits(num_qubits: int, capacities: Sequence[int]) -> None:
    if any(c < 0 for c in capacities):
        raise CapacityError(f"negative capacity in {list(capacities)}")
    if sum(capacities) < num_qubits:
        raise CapacityError(
            f"{num_qubits} qubits do not fit QPU capacities {list(capacities)} "
            f"(total {sum(capacities)})"
        )
