import itertools
import random

import numpy as np
import pytest

from qpart.errors import Infeasible, ShapeMismatch, TooLarge
from qpart.igraph import Allocation
from qpart.teleport import brute_force_teleports, build_overlap, min_teleports, moved_qubits

from .conftest import random_allocation


def A(assign, caps=(2, 2)):
    return Allocation(tuple(assign), caps)


def test_overlap_entries():
    assert build_overlap(A([0, 0, 1, 1]), A([0, 1, 0, 1])).entries.tolist() == [[1, 1], [1, 1]]
    assert build_overlap(A([0, 0, 1, 1]), A([1, 1, 0, 0])).entries.tolist() == [[0, 2], [2, 0]]
    ov = build_overlap(A([0, 0, 1], (2, 2)), A([0, 0, 1], (2, 2)))
    assert ov.entries.tolist() == [[2, 0], [0, 1]]
    assert ov.feasible.all()


def test_overlap_feasibility():
    ov = build_overlap(A([0, 0, 0, 1], (3, 1)), A([1, 0, 0, 0], (3, 1)))
    # group 0 of next holds 3 qubits and only fits QPU 0
    assert ov.feasible.tolist() == [[True, True], [False, True]]


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        build_overlap(A([0, 1]), A([0, 1, 1]))
    with pytest.raises(ShapeMismatch):
        min_teleports(A([0, 1], (2, 2)), A([0, 1], (1, 3)))


def test_label_swap_is_free():
    n, relabel = min_teleports(A([0, 0, 1, 1]), A([1, 1, 0, 0]))
    assert n == 0 and relabel == (1, 0)


def test_identity():
    a = A([0, 1, 1, 0])
    assert min_teleports(a, a) == (0, (0, 1))
    b = Allocation((0, 0, 0), (3, 3, 3))  # two empty groups stay put
    assert min_teleports(b, b) == (0, (0, 1, 2))


def test_two_moves_by_enumeration():
    prev, nxt = [0, 0, 1, 1], [0, 1, 0, 1]
    moves = [sum(p != perm[b] for p, b in zip(prev, nxt)) for perm in itertools.permutations(range(2))]
    assert moves == [2, 2]
    assert min_teleports(A(prev), A(nxt))[0] == 2
    assert brute_force_teleports(A(prev), A(nxt)) == 2


def test_relabeling_realises_count():
    rng = random.Random(3)
    for _ in range(200):
        caps = (3, 3, 3)
        a, b = random_allocation(rng, 8, caps), random_allocation(rng, 8, caps)
        n, relabel = min_teleports(a, b)
        assert moved_qubits(a, b.relabel(relabel)) == n


def test_rotation_and_single_qpu():
    prev = Allocation((0, 0, 1, 1, 2, 2), (2, 2, 2))
    rot = Allocation((1, 1, 2, 2, 0, 0), (2, 2, 2))
    assert brute_force_teleports(prev, rot) == 0
    assert min_teleports(prev, rot)[0] == 0
    one = Allocation((0, 0, 0), (3,))
    assert brute_force_teleports(one, one) == 0 == min_teleports(one, one)[0]


def test_heterogeneous_restricts_relabeling():
    # sending next-group 0 = {q0, q4} to QPU 2 would save a move, but QPU 2 holds 1
    caps = (2, 2, 1)
    prev = Allocation((0, 0, 1, 1, 2), caps)
    nxt = Allocation((0, 2, 1, 1, 0), caps)
    assert min_teleports(prev, nxt) == (2, (0, 1, 2))
    assert brute_force_teleports(prev, nxt) == 2
    homog = (2, 2, 2)
    assert min_teleports(Allocation(prev.assignment, homog), Allocation(nxt.assignment, homog))[0] == 1


def test_mismatched_capacities():
    prev = Allocation((0, 0, 1, 1), (2, 2))
    nxt = Allocation((0, 0, 0, 1), (3, 1))
    with pytest.raises(ShapeMismatch):
        min_teleports(prev, nxt)


def test_brute_force_guard():
    a = Allocation((0,), (1,) * 7)
    with pytest.raises(TooLarge):
        brute_force_teleports(a, a)


def test_oracle_equivalence_heterogeneous():
    rng = random.Random(8)
    for _ in range(300):
        k = rng.randint(1, 4)
        caps = tuple(rng.randint(1, 5) for _ in range(k))
        n = rng.randint(1, sum(caps))
        a, b = random_allocation(rng, n, caps), random_allocation(rng, n, caps)
        try:
            expected = brute_force_teleports(a, b)
        except Infeasible:
            with pytest.raises(Infeasible):
                min_teleports(a, b)
            continue
        assert min_teleports(a, b)[0] == expected


def test_properties_homogeneous():
    rng = random.Random(21)
    for _ in range(300):
        k = rng.randint(1, 4)
        caps = (rng.randint(1, 5),) * k
        n = rng.randint(1, sum(caps))
        a, b = random_allocation(rng, n, caps), random_allocation(rng, n, caps)
        t, _ = min_teleports(a, b)
        assert t == min_teleports(b, a)[0]
        assert 0 <= t <= n
        ov = build_overlap(a, b).entries
        best = max(sum(ov[p[j], j] for j in range(k)) for p in itertools.permutations(range(k)))
        assert t == n - best
        perm = list(range(k))
        rng.shuffle(perm)
        assert min_teleports(a, a.relabel(perm))[0] == 0
