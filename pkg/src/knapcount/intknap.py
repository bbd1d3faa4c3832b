"""Integer knapsack: x_i ranges over {0..u_i} instead of {0, 1}.

The rounded program is an interval program (see ``interval``): a state is
a partial sum, and all labels of one layer that land on the same kept
target are stored as a single ``(lo, hi, target)`` interval.  Counts are
integers over the suffix box, so a layer's implicit denominator is the
product of ``u_j + 1`` over the remaining items.
"""

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import prod

import numpy as np

from .budget import check_cells
from .errors import InputError
from .interval import IntervalProgram, edge_intervals
from .knap01 import _nonneg_int, _round_layer, int_vector
from .rational import layer_eps, parse_rational

# int64 headroom for the vectorised count; larger layers fall back to Python ints
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class IntKnapsackInstance:
    a: tuple
    b: int
    u: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", int_vector(self.a, "a"))
        object.__setattr__(self, "b", _nonneg_int(self.b, "b"))
        object.__setattr__(self, "u", int_vector(self.u, "u"))
        if len(self.a) != len(self.u):
            raise InputError(f"a has {len(self.a)} entries but u has {len(self.u)}")

    @property
    def n(self):
        return len(self.a)

    @property
    def W(self):
        return sum(x * y for x, y in zip(self.a, self.u)) + self.b

    @property
    def U(self):
        return max(self.u, default=0)

    @property
    def box_size(self):
        return prod(x + 1 for x in self.u)

    def satisfied(self, x):
        x = tuple(int(v) for v in x)
        if len(x) != self.n or any(not 0 <= v <= t for v, t in zip(x, self.u)):
            raise InputError(f"{x} is not in the box of ranges {self.u}")
        return sum(ai * xi for ai, xi in zip(self.a, x)) <= self.b

    @classmethod
    def from_json(cls, doc):
        try:
            return cls(doc["a"], doc["b"], doc["u"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"integer knapsack instance needs 'a', 'b' and 'u': {exc}")

    def to_json(self):
        return {"a": [str(x) for x in self.a], "b": str(self.b), "u": [str(x) for x in self.u]}


def exact_count_int(inst):
    """|KNAP(a, b, u)| by a DP over partial sums clamped at b+1."""
    if inst.W - inst.b <= inst.b:
        return inst.box_size
    cap = inst.b + 1
    sums = {0: 1}
    for ai, ui in zip(inst.a, inst.u):
        if ai == 0:
            sums = {s: c * (ui + 1) for s, c in sums.items()}
            continue
        check_cells(len(sums) * (min(ui, cap // ai + 1) + 1), "integer knapsack DP")
        nxt = {}
        for s, c in sums.items():
            if s >= cap:
                nxt[cap] = nxt.get(cap, 0) + c * (ui + 1)
                continue
            # labels past the cap all clamp to one state
            fit = min(ui, (cap - s - 1) // ai)
            for k in range(fit + 1):
                t = s + ai * k
                nxt[t] = nxt.get(t, 0) + c
            if fit < ui:
                nxt[cap] = nxt.get(cap, 0) + c * (ui - fit)
        sums = nxt
    return sum(c for s, c in sums.items() if s <= inst.b)


@dataclass(frozen=True, eq=False)
class IntervalRoundedProgram(IntervalProgram):
    """``counts[L][j]`` counts accepted suffixes from ``sums[L][j]``; ``edges[L][j]`` its label intervals."""

    eta: Fraction = None
    strict: bool = True
    counts: tuple = ()
    edge_sets: tuple = ()

    @property
    def root_count(self):
        return self.counts[0][0]

    def probability(self, layer, j):
        return Fraction(self.counts[layer][j], prod(u + 1 for u in self.ranges[layer:]))

    def edges(self, layer, j):
        return self.edge_sets[layer][j]


def _counter(next_sums, next_counts, cap, weight, top, box):
    """Accepted-suffix count at any partial sum ``v <= cap`` of the current layer.

    Uses the interval edges of ``v``: each label interval contributes its
    length times the count of the kept target it rounds to.
    """
    if weight == 0:
        def count_at(v):
            return (top + 1) * next_counts[bisect_right(next_sums, v) - 1]
        return count_at

    if box < _INT64_SAFE and cap + 1 < _INT64_SAFE:
        lows = np.asarray(next_sums, dtype=np.int64)
        highs = np.append(lows[1:], np.int64(cap + 1))
        cs = np.asarray(next_counts, dtype=np.int64)
        limit = top + 1

        def count_at(v):
            # labels k with v + weight*k below s: clip(ceil((s - v)/weight), 0, top+1)
            n_hi = np.clip(-((v - highs) // weight), 0, limit)
            n_lo = np.clip(-((v - lows) // weight), 0, limit)
            return int(np.dot(n_hi - n_lo, cs))

        return count_at

    def count_at(v):
        total = 0
        for lo, hi, t in edge_intervals(next_sums, cap, v, weight, top):
            if t is not None:
                total += (hi - lo + 1) * next_counts[t]
        return total

    return count_at


def build_interval_approx(inst, eta, strict=True):
    """Round the exact integer-knapsack program from the last layer backwards.

    A new breakpoint starts at the smallest partial sum whose count is
    strictly below ``1/(1+eta)`` of the previous breakpoint's (at most that
    ratio when ``strict`` is False).
    """
    eta = parse_rational(eta)
    if eta <= 0:
        raise InputError("eta must be positive")
    n, a, b, u = inst.n, inst.a, inst.b, inst.u
    sums = [None] * (n + 1)
    counts = [None] * (n + 1)
    sums[n], counts[n] = (0,), (1,)
    box = 1
    for layer in range(n - 1, -1, -1):
        box *= u[layer] + 1
        count_at = _counter(sums[layer + 1], counts[layer + 1], b, a[layer], u[layer], box)
        if layer == 0:
            sums[0], counts[0] = (0,), (count_at(0),)
        else:
            sums[layer], counts[layer] = _round_layer(count_at, b, eta, strict)
    edge_sets = tuple(
        tuple(edge_intervals(sums[i + 1], b, v, a[i], u[i]) for v in sums[i]) for i in range(n)
    )
    return IntervalRoundedProgram(
        weights=a,
        ranges=u,
        cap=b,
        sums=tuple(sums),
        eta=eta,
        strict=strict,
        counts=tuple(counts),
        edge_sets=edge_sets,
    )


def approx_count_int(inst, delta):
    """An integer N with |KNAP(a,b,u)| <= N <= (1+delta)|KNAP(a,b,u)|."""
    eta = layer_eps(delta, inst.n)
    return build_interval_approx(inst, eta).root_count
