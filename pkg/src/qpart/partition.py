"""In-block qubit allocation: Kernighan-Lin, greedy supernode growth, brute force."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, TooLarge
from .igraph import Allocation, InteractionGraph, check_fits

BRUTE_FORCE_MAX_QUBITS = 12


@dataclass(frozen=True)
class QpuConfig:
    capacities: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "capacities", tuple(int(c) for c in self.capacities))
        if not self.capacities:
            raise CapacityError("at least one QPU is required")
        if any(c < 1 for c in self.capacities):
            raise CapacityError(f"every QPU needs capacity >= 1, got {list(self.capacities)}")

    @property
    def num_qpus(self) -> int:
        return len(self.capacities)

    @property
    def homogeneous(self) -> bool:
        return len(set(self.capacities)) == 1

    @classmethod
    def parse(cls, text: str) -> QpuConfig:
        try:
            return cls(tuple(int(x) for x in text.split(",") if x.strip()))
        except ValueError as exc:
            raise CapacityError(f"bad QPU capacity list {text!r}: {exc}") from None

    @classmethod
    def equal(cls, num_qubits: int, num_qpus: int) -> QpuConfig:
        """``num_qpus`` identical QPUs just large enough for ``num_qubits``."""
        return cls((max(1, math.ceil(num_qubits / num_qpus)),) * num_qpus)


# ---------------------------------------------------------------------------
# Kernighan-Lin


def _kl_pass(w: np.ndarray, side: np.ndarray) -> tuple[int, np.ndarray]:
    """One K-L pass. Returns the best prefix gain and the resulting sides."""
    a_free = np.flatnonzero(~side)
    b_free = np.flatnonzero(side)
    same = side[:, None] == side[None, :]
    d = np.where(same, -w, w).sum(axis=1)  # external - internal cost
    swaps = []
    gains = []
    for _ in range(min(len(a_free), len(b_free))):
        g = d[a_free][:, None] + d[b_free][None, :] - 2 * w[np.ix_(a_free, b_free)]
        k = int(np.argmax(g))
        i, j = divmod(k, len(b_free))
        a, b = a_free[i], b_free[j]
        gains.append(int(g[i, j]))
        swaps.append((a, b))
        a_free = np.delete(a_free, i)
        b_free = np.delete(b_free, j)
        d[a_free] += 2 * w[a_free, a] - 2 * w[a_free, b]
        d[b_free] += 2 * w[b_free, b] - 2 * w[b_free, a]
    if not gains:
        return 0, side
    cum = np.cumsum(gains)
    best = int(np.argmax(cum))
    if cum[best] <= 0:
        return 0, side
    out = side.copy()
    for a, b in swaps[: best + 1]:
        out[a], out[b] = True, False
    return int(cum[best]), out


def kl_bipartition(
    graph: InteractionGraph, sizes: Sequence[int], rng_seed: int | np.random.Generator = 0
) -> Allocation:
    """Kernighan-Lin bipartition into QPUs of the given capacities.

    The graph is padded with isolated dummy vertices up to ``sum(sizes)`` so
    that every swap preserves the part sizes; dummies are stripped at the end.
    The initial split is a seeded random permutation.
    """
    if len(sizes) != 2:
        raise CapacityError(f"K-L partitions into exactly 2 QPUs, got {len(sizes)}")
    n = graph.num_qubits
    check_fits(n, sizes)
    s0, s1 = int(sizes[0]), int(sizes[1])
    total = s0 + s1
    w = np.zeros((total, total), dtype=np.int64)
    w[:n, :n] = graph.matrix()
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    side = np.zeros(total, dtype=bool)
    side[rng.permutation(total)[s0:]] = True
    while True:
        gain, side = _kl_pass(w, side)
        if gain <= 0:
            break
    return Allocation(tuple(int(s) for s in side[:n]), (s0, s1))


# ---------------------------------------------------------------------------
# Greedy Partitioning Algorithm


def gpa_partition(graph: InteractionGraph, qpus: QpuConfig | Sequence[int]) -> Allocation:
    """Greedy supernode growth, filling QPUs from the largest capacity down.

    Each QPU's supernode is seeded with the lower endpoint of the heaviest
    edge among unallocated qubits, then repeatedly absorbs the unallocated
    qubit with the largest total weight into it. A filled QPU is frozen.
    Qubits with no connection to any growing supernode are placed last, in
    QPU index order. Ties go to the smallest qubit index.
    """
    caps = qpus.capacities if isinstance(qpus, QpuConfig) else tuple(qpus)
    n = graph.num_qubits
    check_fits(n, caps)
    w = graph.matrix()
    assign = [-1] * n
    free = np.ones(n, dtype=bool)
    order = sorted(range(len(caps)), key=lambda q: (-caps[q], q))
    load = [0] * len(caps)
    for qpu in order:
        link = np.zeros(n, dtype=np.int64)  # weight from each node to the supernode
        while load[qpu] < caps[qpu] and free.any():
            if load[qpu] == 0:
                sub = np.where(free[:, None] & free[None, :], w, 0)
                if sub.max(initial=0) <= 0:
                    break
                target = int(np.argmax(sub)) // n  # row-major: smallest u of heaviest edge
            else:
                cand = np.where(free, link, -1)
                target = int(np.argmax(cand))
                if cand[target] <= 0:
                    break
            assign[target] = qpu
            free[target] = False
            load[qpu] += 1
            link += w[target]
    for u in range(n):
        if assign[u] < 0:
            qpu = next(q for q in range(len(caps)) if load[q] < caps[q])
            assign[u] = qpu
            load[qpu] += 1
    return Allocation(tuple(assign), caps)


# ---------------------------------------------------------------------------
# exhaustive oracle


def brute_force_partition(
    graph: InteractionGraph, qpus: QpuConfig | Sequence[int]
) -> tuple[Allocation, int]:
    """Exact minimum-cut allocation by branch and bound (small graphs only).

    Equal-capacity QPUs are interchangeable, so a qubit may open at most one
    new empty QPU per capacity class.
    """
    caps = qpus.capacities if isinstance(qpus, QpuConfig) else tuple(qpus)
    n = graph.num_qubits
    if n > BRUTE_FORCE_MAX_QUBITS:
        raise TooLarge(f"brute force limited to {BRUTE_FORCE_MAX_QUBITS} qubits, got {n}")
    check_fits(n, caps)
    w = graph.matrix().tolist()
    k = len(caps)
    assign = [-1] * n
    load = [0] * k
    best_cost = math.inf
    best_assign: list[int] = []

    def rec(u: int, cost: int) -> None:
        nonlocal best_cost, best_assign
        if cost >= best_cost:
            return
        if u == n:
            best_cost, best_assign = cost, assign.copy()
            return
        seen_empty = set()
        wu = w[u]
        for q in range(k):
            if load[q] >= caps[q]:
                continue
            if load[q] == 0:
                if caps[q] in seen_empty:
                    continue
                seen_empty.add(caps[q])
            extra = sum(wu[v] for v in range(u) if assign[v] != q)
            assign[u] = q
            load[q] += 1
            rec(u + 1, cost + extra)
            load[q] -= 1
            assign[u] = -1

    rec(0, 0)
    return Allocation(tuple(best_assign), caps), int(best_cost)


PARTITIONERS = ("kl", "gpa")


def partition(
    graph: InteractionGraph,
    qpus: QpuConfig,
    method: str = "kl",
    rng_seed: int | np.random.Generator = 0,
) -> Allocation:
    """Dispatch to the named in-block partitioner."""
    if method == "kl":
        return kl_bipartition(graph, qpus.capacities, rng_seed)
    if method == "gpa":
        return gpa_partition(graph, qpus)
    raise ValueError(f"unknown partitioner {method!r}; choose from {PARTITIONERS}")


def default_partitioner(qpus: QpuConfig) -> str:
    return "kl" if qpus.num_qpus == 2 and qpus.homogeneous else "gpa"
