from fractions import Fraction
import itertools
import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from knapcount.errors import InputError
from knapcount.intknap import (
    IntKnapsackInstance,
    approx_count_int,
    build_interval_approx,
    exact_count_int,
)
from knapcount.knap01 import Knapsack01Instance, approx_count, exact_count
from knapcount.oracle import int_solutions
from knapcount.rational import layer_eps

SMALL = IntKnapsackInstance((1, 1), 2, (2, 3))


def test_exact_examples():
    assert exact_count_int(SMALL) == 6 == len(int_solutions(SMALL))
    roomy = IntKnapsackInstance((3, 2, 7), 100, (2, 5, 4))
    assert exact_count_int(roomy) == 3 * 6 * 5
    ones = IntKnapsackInstance((4, 7, 2, 9), 12, (1, 1, 1, 1))
    assert exact_count_int(ones) == exact_count(Knapsack01Instance((4, 7, 2, 9), 12))


def test_zero_range_and_zero_weight():
    inst = IntKnapsackInstance((5, 0, 2), 4, (0, 6, 3))
    assert exact_count_int(inst) == len(int_solutions(inst)) == 7 * 3
    assert approx_count_int(inst, Fraction(1, 10)) == 21


def test_all_accept_program():
    inst = IntKnapsackInstance((1, 2, 3), 100, (3, 4, 5))
    prog = build_interval_approx(inst, Fraction(1, 10))
    # unreachable partial sums past the largest prefix may be kept; every reachable one rounds to the top
    live = [{0}]
    for i in range(3):
        live.append({prog.step(i, j, k) for j in live[-1] for k in range(inst.u[i] + 1)})
    assert live == [{0}] * 4
    assert [prog.counts[i][0] for i in range(4)] == [120, 30, 6, 1]
    assert all(prog.probability(i, 0) == 1 for i in range(4))


def test_tiny_eta_exact_and_delta_examples():
    assert build_interval_approx(SMALL, Fraction(1, 10**6)).root_count == 6
    assert 6 <= approx_count_int(SMALL, Fraction(1, 10)) <= Fraction(66, 10)
    assert approx_count_int(IntKnapsackInstance((1,), 10**6, (10**6,)), Fraction(1, 10)) == 10**6 + 1
    with pytest.raises(InputError):
        approx_count_int(SMALL, 0)


def test_unit_ranges_match_knap01():
    rng = random.Random(4)
    for _ in range(20):
        n = rng.randint(1, 10)
        a = [rng.randint(0, 60) for _ in range(n)]
        b = rng.randint(0, 200)
        eps = layer_eps(Fraction(1, 10), n)
        prog = build_interval_approx(IntKnapsackInstance(a, b, [1] * n), eps, strict=False)
        assert prog.root_count == approx_count(Knapsack01Instance(a, b), Fraction(1, 10))


def test_validation_and_json():
    with pytest.raises(InputError):
        IntKnapsackInstance((1, 2), 3, (1,))
    with pytest.raises(InputError):
        IntKnapsackInstance.from_json({"a": [1], "b": 1})
    assert IntKnapsackInstance.from_json(SMALL.to_json()) == SMALL
    with pytest.raises(InputError):
        SMALL.satisfied((3, 0))


def test_huge_ranges_fast():
    inst = IntKnapsackInstance((3, 5, 7), 10**10, (10**9,) * 3)
    t0 = time.perf_counter()
    prog = build_interval_approx(inst, layer_eps(Fraction(1, 2), 3))
    assert time.perf_counter() - t0 < 1.0
    assert max(prog.widths) < 2000
    assert all(len(e) <= len(prog.sums[i + 1]) + 1 for i in range(3) for e in prog.edge_sets[i])


boxes = st.integers(1, 5).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(0, 25), min_size=n, max_size=n),
        st.lists(st.integers(0, 8), min_size=n, max_size=n),
        st.integers(0, 150),
    )
)


@settings(max_examples=60, deadline=None)
@given(boxes, st.sampled_from([Fraction(1, 2), Fraction(1, 10)]))
def test_sandwich_partition_order(data, delta):
    a, u, b = data
    inst = IntKnapsackInstance(a, b, u)
    n = inst.n
    exact = exact_count_int(inst)
    eta = layer_eps(delta, n)
    prog = build_interval_approx(inst, eta)
    assert exact <= prog.root_count <= (1 + eta) ** n * exact
    for i in range(n):
        for j, edges in enumerate(prog.edge_sets[i]):
            assert edges[0][0] == 0 and edges[-1][1] == u[i]
            assert all(p[1] + 1 == q[0] for p, q in zip(edges, edges[1:]))
            targets = [t for _, _, t in edges if t is not None]
            assert targets == sorted(targets)
        counts = prog.counts[i + 1]
        assert all(x >= y for x, y in zip(counts, counts[1:]))
    for x in itertools.islice(itertools.product(*(range(k + 1) for k in u)), 300):
        if inst.satisfied(x):
            assert prog(x) == 1
    # a larger partial sum never accepts a suffix that a smaller one rejects
    rng = random.Random(sum(a) + b)
    for i in range(1, n):
        width = len(prog.sums[i])
        for _ in range(10):
            j, k = sorted(rng.randrange(width) for _ in range(2))
            z = [rng.randint(0, u[t]) for t in range(i, n)]
            assert walk(prog, i, k, z) <= walk(prog, i, j, z)


def walk(prog, layer, j, suffix):
    for t, label in enumerate(suffix):
        j = prog.step(layer + t, j, label)
    return int(j is not None)
