"""OpenQASM 2.0 ingestion, ASAP layering and block slicing.

Only the subset needed for network-cost analysis is understood: single-qubit
gates, ``cx``, register declarations, ``measure``, ``barrier`` and ``reset``.
Every quantum register is flattened into one index space in declaration order.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidSize, ParseError, QubitIndexError, SumMismatch, UnsupportedGate

# qelib1.inc single-qubit gates plus the builtin U.
SINGLE_QUBIT_GATES = frozenset(
    {
        "U", "u", "u0", "u1", "u2", "u3", "p", "id", "x", "y", "z", "h",
        "s", "sdg", "t", "tdg", "rx", "ry", "rz", "sx", "sxdg",
    }
)
CX_GATES = frozenset({"cx", "CX"})
# Everything else qelib1.inc defines acts on 2+ qubits and is rejected.
MULTI_QUBIT_GATES = frozenset(
    {
        "cz", "cy", "ch", "swap", "ccx", "cswap", "crx", "cry", "crz", "cu1",
        "cu3", "cp", "csx", "cu", "rxx", "rzz", "rccx", "rc3x", "c3x",
        "c3sqrtx", "c4x",
    }
)

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_REG_DECL = re.compile(rf"^(qreg|creg)\s+({_IDENT})\s*\[\s*(\d+)\s*\]$")
_ARG = re.compile(rf"^({_IDENT})(?:\s*\[\s*(\d+)\s*\])?$")
_GATE_DEF = re.compile(rf"^gate\s+({_IDENT})\s*(?:\([^)]*\))?\s*([^{{]*)\{{", re.S)


class GateKind(enum.Enum):
    UNARY = "unary"
    CX = "cx"


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    seq: int
    name: str = ""

    def __post_init__(self):
        if self.kind is GateKind.CX:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"cx needs two distinct qubits, got {self.qubits}")
        elif len(self.qubits) != 1:
            raise ValueError(f"unary gate needs one qubit, got {self.qubits}")


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 1:
            raise InvalidSize("a circuit needs at least one qubit")
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.num_qubits:
                    raise QubitIndexError(f"qubit {q} outside 0..{self.num_qubits - 1}")

    @property
    def cx_count(self) -> int:
        return sum(1 for g in self.gates if g.kind is GateKind.CX)

    @property
    def unary_count(self) -> int:
        return sum(1 for g in self.gates if g.kind is GateKind.UNARY)

    def cx_only(self) -> Circuit:
        """Copy with unary gates dropped and ``seq`` renumbered."""
        kept = [g for g in self.gates if g.kind is GateKind.CX]
        return Circuit(
            self.num_qubits,
            tuple(Gate(GateKind.CX, g.qubits, i, g.name) for i, g in enumerate(kept)),
        )

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "gates": [
                {"kind": g.kind.value, "name": g.name, "qubits": list(g.qubits)}
                for g in self.gates
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> Circuit:
        gates = tuple(
            Gate(GateKind(g["kind"]), tuple(g["qubits"]), i, g.get("name", ""))
            for i, g in enumerate(data["gates"])
        )
        return cls(int(data["num_qubits"]), gates)


@dataclass(frozen=True)
class LayeredCircuit:
    circuit: Circuit
    layers: tuple[tuple[int, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class BlockSlice:
    start: int
    stop: int
    gate_indices: tuple[int, ...] = field(default=())

    @property
    def layer_range(self) -> range:
        return range(self.start, self.stop)

    @property
    def depth(self) -> int:
        return self.stop - self.start


# ---------------------------------------------------------------------------
# parsing


def _strip_comments(text: str) -> str:
    return re.sub(r"//[^\n]*", "", text)


def _split_args(s: str) -> list[str]:
    return [a.strip() for a in s.split(",") if a.strip()]


class _Parser:
    def __init__(self):
        self.qregs: dict[str, tuple[int, int]] = {}  # name -> (offset, size)
        self.cregs: set[str] = set()
        self.num_qubits = 0
        self.custom_arity: dict[str, int] = {}
        self.gates: list[Gate] = []

    def resolve(self, arg: str) -> list[int]:
        m = _ARG.match(arg)
        if not m:
            raise ParseError(f"malformed qubit argument {arg!r}")
        name, idx = m.group(1), m.group(2)
        if name not in self.qregs:
            raise ParseError(f"unknown quantum register {name!r}")
        offset, size = self.qregs[name]
        if idx is None:
            return list(range(offset, offset + size))
        i = int(idx)
        if i >= size:
            raise QubitIndexError(f"{name}[{i}] out of bounds for register of size {size}")
        return [offset + i]

    def apply(self, name: str, args: list[str]) -> None:
        if name in CX_GATES:
            arity = 2
        elif name in SINGLE_QUBIT_GATES:
            arity = 1
        elif name in self.custom_arity:
            arity = self.custom_arity[name]
            if arity != 1:
                raise UnsupportedGate(f"user gate {name!r} acts on {arity} qubits")
        elif name in MULTI_QUBIT_GATES:
            raise UnsupportedGate(f"gate {name!r} is not supported (only single-qubit gates and cx)")
        else:
            raise UnsupportedGate(f"unknown gate {name!r}")
        if len(args) != arity:
            if arity == 1 and len(args) > 1:
                raise UnsupportedGate(f"gate {name!r} given {len(args)} qubits")
            raise ParseError(f"gate {name!r} expects {arity} arguments, got {len(args)}")
        resolved = [self.resolve(a) for a in args]
        if arity == 1:
            for q in resolved[0]:
                self.gates.append(Gate(GateKind.UNARY, (q,), len(self.gates), name))
            return
        ctrl, tgt = resolved
        if len(ctrl) > 1 and len(tgt) > 1 and len(ctrl) != len(tgt):
            raise ParseError(f"register size mismatch in {name} {', '.join(args)}")
        width = max(len(ctrl), len(tgt))
        for k in range(width):
            c = ctrl[k] if len(ctrl) > 1 else ctrl[0]
            t = tgt[k] if len(tgt) > 1 else tgt[0]
            if c == t:
                raise ParseError(f"cx with identical control and target qubit {c}")
            self.gates.append(Gate(GateKind.CX, (c, t), len(self.gates), name))

    def statement(self, stmt: str) -> None:
        head = stmt.split(None, 1)[0] if stmt else ""
        if head == "OPENQASM":
            version = stmt.split(None, 1)[1].strip() if " " in stmt else ""
            if not version.startswith("2"):
                raise ParseError(f"unsupported OpenQASM version {version!r}")
            return
        if head == "include":
            return
        if head in ("qreg", "creg"):
            m = _REG_DECL.match(stmt)
            if not m:
                raise ParseError(f"malformed register declaration {stmt!r}")
            kind, name, size = m.group(1), m.group(2), int(m.group(3))
            if name in self.qregs or name in self.cregs:
                raise ParseError(f"register {name!r} declared twice")
            if kind == "qreg":
                self.qregs[name] = (self.num_qubits, size)
                self.num_qubits += size
            else:
                self.cregs.add(name)
            return
        if head == "if" or stmt.startswith("if("):
            raise UnsupportedGate("classically controlled operations are not supported")
        if head == "measure":
            if "->" not in stmt:
                raise ParseError(f"malformed measure {stmt!r}")
            self.resolve(stmt[len("measure"):].split("->")[0].strip())
            return
        if head in ("barrier", "reset"):
            for a in _split_args(stmt[len(head):]):
                self.resolve(a)
            return
        if head == "opaque":
            raise UnsupportedGate(f"opaque gate declarations are not supported: {stmt!r}")
        # gate application: name[(params)] args
        m = re.match(rf"^({_IDENT})\s*", stmt)
        if not m:
            raise ParseError(f"cannot parse statement {stmt!r}")
        name, rest = m.group(1), stmt[m.end():]
        if rest.startswith("("):
            depth, end = 0, -1
            for k, ch in enumerate(rest):
                depth += ch == "("
                depth -= ch == ")"
                if depth == 0:
                    end = k
                    break
            if end < 0:
                raise ParseError(f"unbalanced parentheses in {stmt!r}")
            rest = rest[end + 1:]
        args = _split_args(rest)
        if not args:
            raise ParseError(f"gate {name!r} has no qubit arguments")
        self.apply(name, args)


def parse_qasm(text: str) -> Circuit:
    """Parse OpenQASM 2.0 source into a flat :class:`Circuit`.

    Raises :class:`UnsupportedGate` for gates on more than one qubit other
    than ``cx`` (and for unknown opcodes or ``if``), :class:`ParseError` for
    malformed syntax and :class:`QubitIndexError` for out-of-range indices.
    """
    p = _Parser()
    src = _strip_comments(text)
    pos = 0
    while True:
        src_rest = src[pos:].lstrip()
        if not src_rest:
            break
        pos = len(src) - len(src_rest)
        gm = _GATE_DEF.match(src_rest)
        if gm:
            close = src_rest.find("}", gm.end())
            if close < 0:
                raise ParseError(f"unterminated gate definition {gm.group(1)!r}")
            p.custom_arity[gm.group(1)] = len(_split_args(gm.group(2)))
            pos += close + 1
            continue
        end = src_rest.find(";")
        if end < 0:
            raise ParseError(f"missing ';' after {src_rest[:40]!r}")
        stmt = " ".join(src_rest[:end].split())
        pos += end + 1
        if stmt:
            p.statement(stmt)
    if p.num_qubits == 0:
        raise ParseError("program declares no quantum register")
    return Circuit(p.num_qubits, tuple(p.gates))


def load_qasm(path) -> Circuit:
    with open(path) as fh:
        return parse_qasm(fh.read())


def to_qasm(circuit: Circuit) -> str:
    """Emit a circuit as OpenQASM 2.0 over a single register ``q``."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circuit.num_qubits}];"]
    for g in circuit.gates:
        if g.kind is GateKind.CX:
            lines.append(f"cx q[{g.qubits[0]}],q[{g.qubits[1]}];")
        else:
            name = g.name if g.name in SINGLE_QUBIT_GATES else "id"
            lines.append(f"{name} q[{g.qubits[0]}];")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# layering and slicing


def layerize(circuit: Circuit, cx_only: bool = False) -> LayeredCircuit:
    """ASAP layering: each gate goes one layer after its latest predecessor.

    With ``cx_only`` the unary gates are removed first, which is the depth
    used for partitioning since unary gates never consume Bell pairs.
    """
    if cx_only:
        circuit = circuit.cx_only()
    frontier = [0] * circuit.num_qubits  # next free layer per qubit
    layers: list[list[int]] = []
    for idx, g in enumerate(circuit.gates):
        layer = max(frontier[q] for q in g.qubits)
        if layer == len(layers):
            layers.append([])
        layers[layer].append(idx)
        for q in g.qubits:
            frontier[q] = layer + 1
    return LayeredCircuit(circuit, tuple(tuple(l) for l in layers))


def slice_blocks(lc: LayeredCircuit, genotype: Sequence[int]) -> list[BlockSlice]:
    """Cut the layers into consecutive blocks; zero-depth blocks are dropped."""
    if any(d < 0 for d in genotype):
        raise ValueError(f"negative block depth in {list(genotype)}")
    if sum(genotype) != lc.depth:
        raise SumMismatch(f"block depths sum to {sum(genotype)}, circuit depth is {lc.depth}")
    out = []
    start = 0
    for d in genotype:
        if d == 0:
            continue
        stop = start + d
        gates = tuple(i for layer in lc.layers[start:stop] for i in layer)
        out.append(BlockSlice(start, stop, gates))
        start = stop
    return out


# ---------------------------------------------------------------------------
# random circuits


def generate_random_circuit(num_qubits: int, num_cx: int, rng_seed: int = 0) -> Circuit:
    """CNOT-only circuit with each gate on a uniform ordered pair of distinct qubits."""
    if num_qubits < 2:
        raise InvalidSize("random circuits need at least 2 qubits")
    if num_cx < 0:
        raise InvalidSize("gate count must be non-negative")
    rng = np.random.default_rng(rng_seed)
    ctrl = rng.integers(0, num_qubits, size=num_cx)
    tgt = rng.integers(0, num_qubits - 1, size=num_cx)
    tgt = tgt + (tgt >= ctrl)
    gates = tuple(
        Gate(GateKind.CX, (int(c), int(t)), i, "cx")
        for i, (c, t) in enumerate(zip(ctrl.tolist(), tgt.tolist()))
    )
    return Circuit(num_qubits, gates)


def cx_pairs(circuit: Circuit, gate_indices: Iterable[int] | None = None):
    """Yield ``(u, v)`` for each CX gate (optionally restricted to indices)."""
    gates = circuit.gates
    idx = range(len(gates)) if gate_indices is None else gate_indices
    for i in idx:
        g = gates[i]
        if g.kind is GateKind.CX:
            yield g.qubits
