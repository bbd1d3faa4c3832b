"""Counting solutions of k simultaneous knapsack constraints.

Pipeline: rescale every row to total weight O(n^3) (the rescaled solution
set U contains the true one and is only polynomially larger), take the
uniform distribution on U as a small-space source, round each original
row under that source, intersect the rounded rows and evaluate the
intersection exactly under the source.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import CapacityError, InputError
from .knap01 import Knapsack01Instance, exact_program
from .monotone import KnapsackSpace, round_under_source
from .rational import check_unit_interval, layer_eps
from .robp import accept_counts, as_bits, eval_prob, intersect, uniform_accept_source

DELTA_COST_CAP = 2**60


@dataclass(frozen=True)
class MultiKnapsackInstance:
    rows: tuple

    def __post_init__(self):
        rows = tuple(
            r if isinstance(r, Knapsack01Instance) else Knapsack01Instance(*r) for r in self.rows
        )
        if not rows:
            raise InputError("need at least one constraint row")
        if len({r.n for r in rows}) != 1:
            raise InputError("all rows must have the same number of variables")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self):
        return self.rows[0].n

    @property
    def k(self):
        return len(self.rows)

    def satisfied(self, x):
        bits = as_bits(x)
        return all(r.satisfied(bits) for r in self.rows)

    @classmethod
    def from_json(cls, doc):
        try:
            return cls(tuple(Knapsack01Instance.from_json(r) for r in doc["rows"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"multi-knapsack instance needs 'rows': {exc}")

    def to_json(self):
        return {"rows": [r.to_json() for r in self.rows]}


@dataclass(frozen=True)
class DyerRoundedInstance:
    rows: tuple
    original: MultiKnapsackInstance

    @property
    def row_weights(self):
        return tuple(r.total_weight for r in self.rows)

    def as_instance(self):
        return MultiKnapsackInstance(self.rows)


def dyer_round(inst):
    """Rescale each row to capacity n^2 with a'_j = floor(n^2 a_j / b).

    Coefficients are capped at n^2 + 1: such an item is already infeasible
    on its own in both the original and the rescaled row.
    """
    n = inst.n
    big = n * n
    rows = []
    for row in inst.rows:
        if row.b == 0:
            a2 = tuple(big + 1 if x else 0 for x in row.a)
        else:
            a2 = tuple(min(big * x // row.b, big + 1) for x in row.a)
        rows.append(Knapsack01Instance(a2, big))
    return DyerRoundedInstance(tuple(rows), inst)


@dataclass(frozen=True)
class MultiCount:
    estimate: Fraction
    union_size: int
    delta: Fraction
    eps: Fraction
    rounded: DyerRoundedInstance
    row_widths: tuple
    product_width: int


def run_multi(inst, eps):
    eps = check_unit_interval(eps, "eps")
    n, k = inst.n, inst.k
    if k * (n + 1) ** k > DELTA_COST_CAP:
        raise CapacityError(f"k(n+1)^k = {k * (n + 1) ** k} is beyond the supported range")
    rounded = dyer_round(inst)
    union = intersect([exact_program(r) for r in rounded.rows])
    counts = accept_counts(union)
    source = uniform_accept_source(union, counts)
    delta = eps / (2 * k * (n + 1) ** k)
    programs = []
    for row in inst.rows:
        rounded_row = round_under_source(KnapsackSpace(row.a, row.b), source, delta=delta)
        programs.append(rounded_row.to_robp())
    joint = intersect(programs)
    estimate = counts.root * eval_prob(joint, source)
    return MultiCount(
        estimate=estimate,
        union_size=counts.root,
        delta=delta,
        eps=layer_eps(delta, n),
        rounded=rounded,
        row_widths=tuple(M.width for M in programs),
        product_width=joint.width,
    )


def count_multi(inst, eps):
    """Estimate N with |solutions| <= N <= (1+eps)|solutions| (exact rational)."""
    return run_multi(inst, eps).estimate
