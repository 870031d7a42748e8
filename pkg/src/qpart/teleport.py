"""Qubit teleportations between the allocations of consecutive blocks.

The groups of the next block may be relabelled onto any physical QPU large
enough to hold them. The cheapest relabelling is the assignment maximising
the number of qubits that stay put; every other qubit is teleported once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import Infeasible, ShapeMismatch, TooLarge
from .igraph import Allocation

BRUTE_FORCE_MAX_QPUS = 6


@dataclass(frozen=True)
class OverlapMatrix:
    """``entries[a, b]`` qubits on QPU ``a`` before and in group ``b`` after.

    ``feasible[a, b]`` says group ``b`` fits on physical QPU ``a``.
    """

    entries: np.ndarray
    feasible: np.ndarray

    @property
    def num_qpus(self) -> int:
        return self.entries.shape[0]


def build_overlap(prev: Allocation, nxt: Allocation) -> OverlapMatrix:
    if prev.num_qubits != nxt.num_qubits or prev.capacities != nxt.capacities:
        raise ShapeMismatch("allocations differ in qubit count or QPU capacities")
    k = prev.num_qpus
    entries = np.zeros((k, k), dtype=np.int64)
    np.add.at(entries, (np.asarray(prev.assignment, dtype=int), np.asarray(nxt.assignment, dtype=int)), 1)
    sizes = np.bincount(np.asarray(nxt.assignment, dtype=int), minlength=k)
    caps = np.asarray(prev.capacities)
    feasible = sizes[None, :] <= caps[:, None]
    return OverlapMatrix(entries, feasible)


def min_teleports(prev: Allocation, nxt: Allocation) -> tuple[int, tuple[int, ...]]:
    """Fewest qubit teleportations to go from ``prev`` to a relabelling of ``nxt``.

    Returns ``(teleports, relabeling)`` where ``relabeling[b]`` is the physical
    QPU that receives group ``b`` of ``nxt``. Among optimal relabelings the one
    keeping the most labels unchanged is preferred.
    """
    ov = build_overlap(prev, nxt)
    k = ov.num_qpus
    n = prev.num_qubits
    # Scale so the identity bonus (< k + 1 in total) only breaks ties.
    score = ov.entries * (k + 1) + np.eye(k, dtype=np.int64)
    penalty = (n + 1) * (k + 1) * (k + 1)
    score = np.where(ov.feasible, score, -penalty)
    rows, cols = linear_sum_assignment(score, maximize=True)
    if not ov.feasible[rows, cols].all():
        raise Infeasible("no capacity-respecting relabeling of the next allocation exists")
    relabel = [0] * k
    for a, b in zip(rows, cols):
        relabel[b] = int(a)
    kept = int(ov.entries[rows, cols].sum())
    return n - kept, tuple(relabel)


def brute_force_teleports(prev: Allocation, nxt: Allocation) -> int:
    """Minimum moved qubits over every capacity-feasible QPU permutation."""
    if prev.num_qubits != nxt.num_qubits or prev.capacities != nxt.capacities:
        raise ShapeMismatch("allocations differ in qubit count or QPU capacities")
    k = prev.num_qpus
    if k > BRUTE_FORCE_MAX_QPUS:
        raise TooLarge(f"brute force limited to {BRUTE_FORCE_MAX_QPUS} QPUs, got {k}")
    sizes = [0] * k
    for b in nxt.assignment:
        sizes[b] += 1
    best = None
    for perm in itertools.permutations(range(k)):
        if any(sizes[b] > prev.capacities[perm[b]] for b in range(k)):
            continue
        moved = sum(1 for p, b in zip(prev.assignment, nxt.assignment) if perm[b] != p)
        if best is None or moved < best:
            best = moved
    if best is None:
        raise Infeasible("no capacity-respecting relabeling of the next allocation exists")
    return best


def moved_qubits(prev: Allocation, nxt: Allocation) -> int:
    """Qubits whose physical QPU differs between two labelled allocations."""
    return sum(1 for a, b in zip(prev.assignment, nxt.assignment) if a != b)
