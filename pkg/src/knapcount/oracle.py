"""Brute-force enumerators used as ground truth for small instances."""

from itertools import product

from .contingency import Lattice, compositions
from .errors import CapacityError
from .robp import all_strings

ENUM_LIMIT = 1 << 24


def _guard(size, what):
    if size > ENUM_LIMIT:
        raise CapacityError(f"{what}: {size} candidates is too many to enumerate")


def knap01_solutions(inst):
    _guard(1 << inst.n, "0/1 knapsack enumeration")
    return [x for x in all_strings(inst.n) if inst.satisfied(x)]


def multi_solutions(inst):
    _guard(1 << inst.n, "multi-knapsack enumeration")
    return [x for x in all_strings(inst.n) if inst.satisfied(x)]


def int_solutions(inst):
    size = 1
    for u in inst.u:
        size *= u + 1
    _guard(size, "integer knapsack enumeration")
    return [x for x in product(*(range(u + 1) for u in inst.u)) if inst.satisfied(x)]


def hamming_slice(n, r):
    return [x for x in all_strings(n) if sum(x) == r]


def _columns(inst):
    cols = [list(compositions(cj, inst.m)) for cj in inst.c]
    size = 1
    for col in cols:
        size *= len(col)
    _guard(size, "contingency enumeration")
    return cols


def ct_tables(inst):
    """All tables of the instance (CT or CT' per its mode), as tuples of columns."""
    out = []
    for cols in product(*_columns(inst)):
        rows = [sum(col[i] for col in cols) for i in range(inst.m)]
        if inst.mode == "ct":
            ok = rows == list(inst.r)
        else:
            ok = all(s <= ri for s, ri in zip(rows, inst.r))
        if ok:
            out.append(cols)
    return out


def superset_tables(inst):
    """The dense superset S of a reduced CT' instance, by enumeration."""
    lat = Lattice(inst.r, inst.c)
    out = []
    for cols in product(*_columns(inst)):
        totals = [0] * inst.m
        for col in cols:
            for i, t in enumerate(lat.h(col)):
                totals[i] += t
        if all(t <= lat.N for t in totals):
            out.append(cols)
    return out
