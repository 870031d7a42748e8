"""Network-cost-aware qubit allocation for distributed quantum circuits."""

__version__ = "0.1.0"

from .errors import (
    CapacityError, Impossible, Infeasible, InvalidSize, ParseError, QpartError,
    QubitIndexError, ShapeMismatch, SumMismatch, TooLarge, UnsupportedGate,
)
from .evolve import FitnessEvaluator, GaParams, PlanReport, evaluate_fitness, run_ga
from .igraph import Allocation, InteractionGraph, build_interaction_graph, cut_cost
from .partition import QpuConfig, brute_force_partition, gpa_partition, kl_bipartition
from .qasm import Circuit, Gate, GateKind, generate_random_circuit, layerize, parse_qasm, slice_blocks
from .teleport import brute_force_teleports, build_overlap, min_teleports
