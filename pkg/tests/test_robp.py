from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from knapcount.errors import InputError
from knapcount.knap01 import Knapsack01Instance, exact_program
from knapcount.robp import (
    Robp,
    SmallSpaceSource,
    accept_counts,
    all_strings,
    eval_prob,
    evaluate,
    intersect,
    uniform_accept_source,
)

K235 = exact_program(Knapsack01Instance((2, 3, 5), 5))


def test_eval_examples():
    assert Robp.constant(2, True)("00") == 1
    assert evaluate(K235, "110") == 1
    assert K235("011") == 0


def test_eval_length_mismatch():
    with pytest.raises(InputError):
        K235("01")


def test_accept_counts_examples():
    assert accept_counts(Robp.constant(3, True)).root == 8
    assert accept_counts(Robp.constant(3, False)).root == 0
    assert accept_counts(K235).root == 5


def test_eval_prob_examples():
    assert eval_prob(K235, SmallSpaceSource.uniform(3)) == Fraction(5, 8)
    for z in all_strings(3):
        assert eval_prob(K235, SmallSpaceSource.point_mass(z)) == K235(z)
    D = uniform_accept_source(K235)
    assert eval_prob(Robp.constant(3, True), D) == 1


def test_eval_prob_length_mismatch():
    with pytest.raises(InputError):
        eval_prob(K235, SmallSpaceSource.uniform(2))


def test_uniform_accept_examples():
    D = uniform_accept_source(Robp.constant(2, True))
    assert all(p == (Fraction(1, 2), Fraction(1, 2)) for layer in D.probs for p in layer)
    xor = Robp.from_transitions(2, 0, lambda i, s, b: s ^ b, lambda s: s == 1)
    assert uniform_accept_source(xor).distribution() == {"01": Fraction(1, 2), "10": Fraction(1, 2)}
    D = uniform_accept_source(exact_program(Knapsack01Instance((2, 3), 3)))
    assert D.distribution() == {s: Fraction(1, 3) for s in ("00", "10", "01")}


def test_uniform_accept_empty():
    with pytest.raises(InputError):
        uniform_accept_source(Robp.constant(2, False))


def test_intersect_examples():
    assert all(intersect([K235])(x) == K235(x) for x in all_strings(3))
    both = intersect([Robp.constant(3, True), K235])
    assert all(both(x) == K235(x) for x in all_strings(3))
    other = exact_program(Knapsack01Instance((1, 1, 1), 1))
    assert accept_counts(intersect([K235, other])).root == 4
    with pytest.raises(InputError):
        intersect([])


def test_source_validation():
    with pytest.raises(InputError):
        SmallSpaceSource(((0,), (0,)), (((0, 0),),), ((Fraction(1, 2), Fraction(1, 3)),))


def test_json_roundtrip():
    M = Robp.from_json(K235.to_json())
    assert all(M(x) == K235(x) for x in all_strings(3))
    D = uniform_accept_source(K235)
    assert SmallSpaceSource.from_json(D.to_json()).distribution() == D.distribution()


small_instances = st.integers(1, 9).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 40), min_size=n, max_size=n), st.integers(0, 120))
)


@settings(max_examples=60, deadline=None)
@given(small_instances, small_instances)
def test_properties(first, second):
    a1, b1 = first
    a2, b2 = second
    n = min(len(a1), len(a2))
    M1 = exact_program(Knapsack01Instance(a1[:n], b1))
    M2 = exact_program(Knapsack01Instance(a2[:n], b2))
    both = intersect([M1, M2])
    accepted = [x for x in all_strings(n) if M1(x)]
    assert all(both(x) == (M1(x) and M2(x)) for x in all_strings(n))
    assert accept_counts(M1).root == len(accepted)
    assert eval_prob(M1, SmallSpaceSource.uniform(n)) * 2**n == len(accepted)
    D = uniform_accept_source(M1)
    dist = D.distribution()
    assert sum(dist.values()) == 1
    assert all(p == Fraction(1, len(accepted)) for p in dist.values())
    assert len(dist) == len(accepted)
