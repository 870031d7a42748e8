"""Genetic search over circuit blockings.

A genotype is a vector of block depths summing to the circuit's layer count.
Its fitness is the number of Bell pairs needed to run the circuit: non-local
CX gates inside every block plus qubit teleportations between consecutive
non-empty blocks.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Sequence

import numpy as np

from .errors import Impossible, SumMismatch
from .igraph import Allocation, InteractionGraph, build_interaction_graph, cut_cost
from .partition import QpuConfig, partition
from .qasm import LayeredCircuit, slice_blocks
from .teleport import min_teleports

Genotype = list[int]


@dataclass(frozen=True)
class GaParams:
    population_size: int = 50
    generations: int = 100
    tournament_size: int = 3
    crossover_prob: float = 0.7
    mutation_prob: float = 0.3
    mutation_constant: int | None = None  # None: max(1, round(L / (10 K)))
    zero_intro_prob: float = 0.1
    init_mutations: int = 100_000
    max_blocks: int = 10
    partitioner: str = "kl"
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.max_blocks < 1:
            raise ValueError("max_blocks must be >= 1")
        if self.generations < 0 or self.init_mutations < 0:
            raise ValueError("generations and init_mutations must be >= 0")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")
        for name in ("crossover_prob", "mutation_prob", "zero_intro_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.mutation_constant is not None and self.mutation_constant < 0:
            raise ValueError("mutation_constant must be >= 0")

    def step_size(self, total_layers: int) -> int:
        if self.mutation_constant is not None:
            return self.mutation_constant
        return max(1, round(total_layers / (10 * self.max_blocks)))

    @classmethod
    def from_mapping(cls, data: dict) -> GaParams:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known - {"profile"}
        if unknown:
            raise ValueError(f"unknown GA parameters: {sorted(unknown)}")
        base = PROFILES[data.get("profile", "default")]
        return replace(base, **{k: v for k, v in data.items() if k in known})


PROFILES = {
    "default": GaParams(),
    # Small enough for CI; used by the test and acceptance suites.
    "test": GaParams(population_size=16, generations=12, init_mutations=1_000),
}


# ---------------------------------------------------------------------------
# genotype operators


def homogeneous_genotype(total_layers: int, length: int) -> Genotype:
    q, r = divmod(total_layers, length)
    return [q + 1 if i < r else q for i in range(length)]


def shift_depth(g: Genotype, src: int, dst: int, amount: int) -> Genotype:
    """Move up to ``amount`` layers from block ``src`` to block ``dst``, in place."""
    moved = min(amount, g[src])
    g[src] -= moved
    g[dst] += moved
    return g


def introduce_zero(g: Genotype, idx: int) -> Genotype:
    """Empty block ``idx`` and spread its layers evenly over the others, in place.

    Any remainder goes one layer each to the lowest-indexed other blocks.
    """
    others = [k for k in range(len(g)) if k != idx]
    if not others:
        return g
    q, r = divmod(g[idx], len(others))
    g[idx] = 0
    for n, k in enumerate(others):
        g[k] += q + (1 if n < r else 0)
    return g


def mutate(g: Sequence[int], params: GaParams, rng: random.Random, total_layers: int | None = None) -> Genotype:
    out = list(g)
    k = len(out)
    if k < 2:
        return out
    step = params.step_size(sum(out) if total_layers is None else total_layers)
    i, j = rng.sample(range(k), 2)
    if rng.random() < 0.5:
        shift_depth(out, j, i, step)
    else:
        shift_depth(out, i, j, step)
    if rng.random() < params.zero_intro_prob:
        introduce_zero(out, rng.randrange(k))
    return out


def rebalance(g: Sequence[int], total_layers: int) -> Genotype:
    """Deterministically adjust ``g`` so it sums to ``total_layers``.

    Excess is removed one layer at a time, cycling over blocks from largest
    to smallest (original values, ties by index) and skipping empty ones.
    A deficit is added one layer at a time cycling from index 0.
    """
    if total_layers < 0:
        raise Impossible(f"cannot rebalance to negative total {total_layers}")
    out = list(g)
    if any(v < 0 for v in out):
        raise ValueError(f"negative entry in {out}")
    excess = sum(out) - total_layers
    if excess > 0:
        order = sorted(range(len(out)), key=lambda k: (-out[k], k))
        while excess:
            for k in order:
                if excess == 0:
                    break
                if out[k] > 0:
                    out[k] -= 1
                    excess -= 1
    elif excess < 0:
        if not out:
            raise Impossible("cannot rebalance an empty genotype to a positive total")
        k = 0
        while excess:
            out[k % len(out)] += 1
            excess += 1
            k += 1
    return out


def two_point_swap(a: Sequence[int], b: Sequence[int], lo: int, hi: int) -> tuple[Genotype, Genotype]:
    c1, c2 = list(a), list(b)
    c1[lo:hi], c2[lo:hi] = list(b[lo:hi]), list(a[lo:hi])
    return c1, c2


def crossover(
    a: Sequence[int], b: Sequence[int], rng: random.Random, total_layers: int | None = None
) -> tuple[Genotype, Genotype]:
    if len(a) != len(b):
        raise ValueError("parents must have equal length")
    total = sum(a) if total_layers is None else total_layers
    k = len(a)
    if k < 2:
        return rebalance(a, total), rebalance(b, total)
    lo = rng.randint(1, k)
    hi = rng.randint(1, k - 1)
    if hi >= lo:
        hi += 1
    else:
        lo, hi = hi, lo
    c1, c2 = two_point_swap(a, b, lo, hi)
    return rebalance(c1, total), rebalance(c2, total)


def generate_individuals(params: GaParams, total_layers: int, rng: random.Random) -> list[Genotype]:
    """Initial population: mutated homogeneous vectors plus the single-block genotype."""
    k = params.max_blocks
    base = homogeneous_genotype(total_layers, k)
    pop = []
    for _ in range(params.population_size):
        g = list(base)
        for _ in range(params.init_mutations):
            g = mutate(g, params, rng, total_layers)
        pop.append(g)
    pop[0] = single_block(total_layers, k)
    return pop


def single_block(total_layers: int, length: int) -> Genotype:
    return [total_layers] + [0] * (length - 1)


def tournament(pop: list[Genotype], fits: list[int], count: int, size: int, rng: random.Random) -> list[Genotype]:
    """``count`` winners of size-``size`` tournaments drawn with replacement."""
    winners = []
    n = len(pop)
    for _ in range(count):
        best = None
        for _ in range(size):
            i = rng.randrange(n)
            if best is None or fits[i] < fits[best]:
                best = i
        winners.append(pop[best])
    return winners


# ---------------------------------------------------------------------------
# fitness


@dataclass(frozen=True)
class BlockPlan:
    start: int
    stop: int
    allocation: Allocation
    cut_cost: int
    relabeling: tuple[int, ...]


@dataclass
class PlanReport:
    genotype: Genotype
    blocks: list[BlockPlan]
    teleports: list[int]
    total: int
    baseline: int
    capacities: tuple[int, ...]
    partitioner: str
    history: list[int] = field(default_factory=list)

    @property
    def gate_teleports(self) -> int:
        return sum(b.cut_cost for b in self.blocks)

    @property
    def qubit_teleports(self) -> int:
        return sum(self.teleports)

    @property
    def improvement_pct(self) -> float:
        return improvement(self.baseline, self.total)

    def to_dict(self) -> dict:
        return {
            "genotype": list(self.genotype),
            "capacities": list(self.capacities),
            "partitioner": self.partitioner,
            "blocks": [
                {
                    "layers": [b.start, b.stop],
                    "allocation": b.allocation.to_json(),
                    "cut_cost": b.cut_cost,
                    "relabeling": list(b.relabeling),
                }
                for b in self.blocks
            ],
            "teleports": list(self.teleports),
            "gate_teleports": self.gate_teleports,
            "qubit_teleports": self.qubit_teleports,
            "total": self.total,
            "baseline": self.baseline,
            "improvement_pct": round(self.improvement_pct, 6),
            "history": list(self.history),
        }


def improvement(baseline: int, total: int) -> float:
    """Percentage saving over the baseline; 0 when the baseline costs nothing."""
    if baseline <= 0:
        return 0.0
    return (baseline - total) / baseline * 100.0


class FitnessEvaluator:
    """Scores genotypes for one circuit, caching blocks and whole genotypes.

    Each block is partitioned with a seed derived from the run seed and the
    block's layer range, so a genotype's fitness does not depend on when or
    how often it is evaluated. Caches are plain dicts; concurrent writers
    store identical values.
    """

    def __init__(self, lc: LayeredCircuit, qpus: QpuConfig, partitioner: str = "kl", seed: int = 0):
        self.lc = lc
        self.qpus = qpus
        self.partitioner = partitioner
        self.seed = seed
        self._blocks: dict[tuple[int, int], tuple[InteractionGraph, Allocation, int]] = {}
        self._fitness: dict[tuple[int, ...], int] = {}

    def block(self, start: int, stop: int) -> tuple[InteractionGraph, Allocation, int]:
        key = (start, stop)
        hit = self._blocks.get(key)
        if hit is None:
            gates = [i for layer in self.lc.layers[start:stop] for i in layer]
            graph = build_interaction_graph(self.lc.circuit, gates)
            rng = np.random.default_rng([self.seed, start, stop])
            alloc = partition(graph, self.qpus, self.partitioner, rng)
            hit = (graph, alloc, cut_cost(graph, alloc))
            self._blocks[key] = hit
        return hit

    def _walk(self, genotype: Sequence[int]):
        slices = slice_blocks(self.lc, genotype)
        parts = [self.block(s.start, s.stop) for s in slices]
        # A block without CX gates is free under any allocation, so it keeps
        # its neighbour's placement instead of forcing pointless teleports.
        lead = next((a for g, a, _ in parts if g.weights), None)
        prev = None
        for s, (graph, alloc, cost) in zip(slices, parts):
            if not graph.weights:
                alloc = prev if prev is not None else (lead or alloc)
            if prev is None:
                moves, relabel = 0, tuple(range(self.qpus.num_qpus))
            else:
                moves, relabel = min_teleports(prev, alloc)
            placed = alloc.relabel(relabel)
            yield s, placed, cost, moves, relabel
            prev = placed

    def fitness(self, genotype: Sequence[int]) -> int:
        key = tuple(genotype)
        hit = self._fitness.get(key)
        if hit is None:
            if sum(key) != self.lc.depth:
                raise SumMismatch(f"block depths sum to {sum(key)}, circuit depth is {self.lc.depth}")
            hit = sum(cost + moves for _, _, cost, moves, _ in self._walk(key))
            self._fitness[key] = hit
        return hit

    def report(self, genotype: Sequence[int], history: Sequence[int] = ()) -> PlanReport:
        blocks, teleports = [], []
        for i, (s, placed, cost, moves, relabel) in enumerate(self._walk(genotype)):
            blocks.append(BlockPlan(s.start, s.stop, placed, cost, relabel))
            if i:
                teleports.append(moves)
        total = sum(b.cut_cost for b in blocks) + sum(teleports)
        baseline = self.fitness(single_block(self.lc.depth, 1))
        return PlanReport(
            list(genotype), blocks, teleports, total, baseline,
            self.qpus.capacities, self.partitioner, list(history),
        )


def evaluate_fitness(
    genotype: Sequence[int], lc: LayeredCircuit, qpus: QpuConfig, partitioner: str = "kl", seed: int = 0
) -> int:
    return FitnessEvaluator(lc, qpus, partitioner, seed).fitness(genotype)


def run_ga(lc: LayeredCircuit, qpus: QpuConfig, params: GaParams = GaParams()) -> PlanReport:
    """Evolve blockings and return the plan of the best genotype ever seen."""
    rng = random.Random(params.rng_seed)
    ev = FitnessEvaluator(lc, qpus, params.partitioner, params.rng_seed)
    total = lc.depth
    n = params.population_size

    pop = generate_individuals(params, total, rng)
    fits = [ev.fitness(g) for g in pop]
    best = min(range(n), key=fits.__getitem__)
    hof, hof_fit = list(pop[best]), fits[best]
    history = [hof_fit]

    for _ in range(params.generations):
        offspring = [list(g) for g in tournament(pop, fits, n, params.tournament_size, rng)]
        for i in range(1, n, 2):
            if rng.random() < params.crossover_prob:
                offspring[i - 1], offspring[i] = crossover(offspring[i - 1], offspring[i], rng, total)
        for i in range(n):
            if rng.random() < params.mutation_prob:
                offspring[i] = mutate(offspring[i], params, rng, total)
        pop = offspring
        fits = [ev.fitness(g) for g in pop]
        best = min(range(n), key=fits.__getitem__)
        if fits[best] < hof_fit:
            hof, hof_fit = list(pop[best]), fits[best]
        history.append(hof_fit)

    return ev.report(hof, history)


def params_dict(params: GaParams) -> dict:
    return asdict(params)
