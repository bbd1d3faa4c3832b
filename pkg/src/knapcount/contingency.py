"""Approximate counting of contingency tables with a few rows.

A table has m rows and n columns of nonnegative integers.  CT(r, c) fixes
both row and column sums; CT'(r, c) fixes column sums and bounds row sums
from above.  Counting CT reduces to CT' by dropping the last column.

The count works over a dense superset S of CT': column j is any vector of
B(j) = {y : sum(y) = c_j}, coarsened through h_i(y) = floor(2n^2 y_i / r_i),
and the coarse column sums must stay within 2n^2 in every row.  Uniform
sampling from S is a small-space process whose state is the coarse prefix
sum ``u``; every row constraint is rounded as an interval program under the
conditional suffix distributions, and the rounded rows are intersected by
a DP over their joint states.

All quantities are kept as integer counts over S (a probability times the
matching suffix count), so the final answer is an exact integer.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, prod

from .budget import check_cells
from .errors import InputError
from .interval import IntervalProgram, edge_intervals
from .knap01 import _round_layer, int_vector
from .rational import check_unit_interval

MODES = ("ct", "ct_prime")


@dataclass(frozen=True)
class ContingencyInstance:
    r: tuple
    c: tuple
    mode: str = "ct_prime"

    def __post_init__(self):
        object.__setattr__(self, "r", int_vector(self.r, "r"))
        object.__setattr__(self, "c", int_vector(self.c, "c"))
        if self.mode not in MODES:
            raise InputError(f"mode must be one of {MODES}, got {self.mode!r}")

    @property
    def m(self):
        return len(self.r)

    @property
    def n(self):
        return len(self.c)

    @property
    def R(self):
        return max(self.r + self.c, default=0)

    @classmethod
    def from_json(cls, doc):
        try:
            return cls(doc["r"], doc["c"], doc.get("mode", "ct_prime"))
        except (KeyError, TypeError, AttributeError) as exc:
            raise InputError(f"contingency instance needs 'r' and 'c': {exc}")

    def to_json(self):
        return {"r": [str(x) for x in self.r], "c": [str(x) for x in self.c], "mode": self.mode}

    def relaxed(self):
        """The CT' instance with the same count, or None when the count is 0.

        Equality mode drops the last column (its entries are forced by the
        row sums).  Rows with r_i = 0 are all-zero and are removed.
        """
        r, c = self.r, self.c
        if self.mode == "ct":
            if sum(r) != sum(c):
                return None
            c = c[:-1]
        r = tuple(x for x in r if x > 0)
        return ContingencyInstance(r, c, "ct_prime")


def binom(top, k):
    return comb(top, k) if top >= 0 else 0


def box_simplex_count(total, intervals):
    """#{y >= 0 : sum(y) = total, lo_i <= y_i <= hi_i}, by inclusion-exclusion."""
    m = len(intervals)
    if m == 0:
        return int(total == 0)
    lows = [max(lo, 0) for lo, _ in intervals]
    spans = []
    for lo, (_, hi) in zip(lows, intervals):
        if hi < lo:
            return 0
        spans.append(hi - lo + 1)
    rest = total - sum(lows)
    if rest < 0:
        return 0
    count = 0
    for mask in range(1 << m):
        cut, sign = rest, 1
        for i in range(m):
            if mask >> i & 1:
                cut -= spans[i]
                sign = -sign
        if cut >= 0:
            count += sign * binom(cut + m - 1, m - 1)
    return count


class Lattice:
    """The coarsening h and the per-column distributions of h(y) for y in B(j)."""

    def __init__(self, r, c):
        self.r, self.c = tuple(r), tuple(c)
        self.m, self.n = len(r), len(c)
        self.N = 2 * self.n * self.n
        self.columns = tuple(self._support(cj) for cj in self.c)

    def h(self, y):
        return tuple(self.N * yi // ri for yi, ri in zip(y, self.r))

    def preimage(self, k, t, cj):
        """{y in [0, cj] : floor(N y / r_k) = t} as a closed interval."""
        N, rk = self.N, self.r[k]
        lo = -(-t * rk // N)
        hi = -(-(t + 1) * rk // N) - 1
        return max(lo, 0), min(hi, cj)

    def _support(self, cj):
        """Pairs (z, delta_j(z), preimage intervals) for every z with delta_j(z) > 0."""
        N, m = self.N, self.m
        ranges = [range(0, min(N * cj // rk, N) + 1) for rk in self.r]
        boxes = prod(len(x) for x in ranges)
        if binom(cj + m - 1, m - 1) < boxes:
            # fewer column vectors than coarse cells: tally h over B(j) directly
            seen = {}
            for y in compositions(cj, m):
                z = self.h(y)
                if all(t <= N for t in z):
                    seen[z] = seen.get(z, 0) + 1
            cells = sorted(seen)
        else:
            check_cells(boxes, "coarse column support")
            cells = product(*ranges)
        out = []
        for z in cells:
            iv = tuple(self.preimage(k, t, cj) for k, t in enumerate(z))
            d = box_simplex_count(cj, iv)
            if d:
                out.append((z, d, iv))
        return tuple(out)

    def shift(self, u, z):
        """u + z, or None when it leaves the lattice."""
        w = tuple(a + b for a, b in zip(u, z))
        return w if all(t <= self.N for t in w) else None


def compositions(total, parts):
    """All y >= 0 of the given length summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True, eq=False)
class SuffixTable:
    """f(k, t) = number of column suffixes y_{k+1..n} with t + sum h(y) <= N; |S| = f(0, 0).

    Entries are computed on demand and cached, so only lattice points that
    the sampling process can reach are ever filled in.
    """

    lattice: Lattice

    def __post_init__(self):
        lat = self.lattice

        @lru_cache(maxsize=None)
        def f(k, t):
            if k == lat.n:
                return 1
            total = 0
            for z, d, _ in lat.columns[k]:
                w = lat.shift(t, z)
                if w is not None:
                    total += d * f(k + 1, w)
            return total

        object.__setattr__(self, "f", f)

    @property
    def size(self):
        return self.f(0, (0,) * self.lattice.m)

    def delta(self, j, z):
        """Number of y in B(j) (1-based column j) with h(y) = z."""
        for z2, d, _ in self.lattice.columns[j - 1]:
            if z2 == z:
                return d
        return 0

    def reachable(self):
        """Coarse prefix sums of positive suffix count, per layer."""
        lat = self.lattice
        layers = [{(0,) * lat.m}]
        for k in range(lat.n):
            nxt = set()
            for u in layers[-1]:
                for z, _, _ in lat.columns[k]:
                    w = lat.shift(u, z)
                    if w is not None and self.f(k + 1, w):
                        nxt.add(w)
            check_cells(len(nxt), "reachable coarse prefixes")
            layers.append(nxt)
        return [sorted(x) for x in layers]


def build_suffix_table(inst):
    inst = _as_relaxed(inst)
    return SuffixTable(Lattice(inst.r, inst.c))


def _as_relaxed(inst):
    if inst.mode != "ct_prime" or any(x == 0 for x in inst.r):
        raise InputError("expected a reduced CT' instance (see ContingencyInstance.relaxed)")
    return inst


def _clip(lo, hi, iv):
    a, b = max(lo, iv[0]), min(hi, iv[1])
    return (a, b) if a <= b else None


@dataclass(frozen=True, eq=False)
class RowProgram(IntervalProgram):
    """Interval program for one row constraint; ``values[L][u]`` lists the
    accepted suffix counts in S from every kept state of layer L given the
    coarse prefix ``u``."""

    row: int = 0
    eta: Fraction = None
    values: tuple = ()


def build_row_program(inst, i, eta, table, strict=True):
    inst = _as_relaxed(inst)
    lat = table.lattice
    n, cap = lat.n, inst.r[i]
    reach = table.reachable()
    sums = [None] * (n + 1)
    values = [None] * (n + 1)
    sums[n] = (0,)
    values[n] = {u: (1,) for u in reach[n]}
    for layer in range(n - 1, -1, -1):
        nxt_sums, nxt_vals = sums[layer + 1], values[layer + 1]
        cj = lat.c[layer]
        column = lat.columns[layer]
        memo = {}

        def q_at(u, v):
            key = (u, v)
            hit = memo.get(key)
            if hit is not None:
                return hit
            edges = edge_intervals(nxt_sums, cap, v, 1, cj)
            total = 0
            for z, _, iv in column:
                w = lat.shift(u, z)
                row = nxt_vals.get(w) if w is not None else None
                if row is None:
                    continue
                for lo, hi, t in edges:
                    if t is None or not row[t]:
                        continue
                    own = _clip(lo, hi, iv[i])
                    if own is not None:
                        total += box_simplex_count(cj, iv[:i] + (own,) + iv[i + 1:]) * row[t]
            memo[key] = total
            return total

        if layer == 0:
            kept = (0,)
        else:
            found = set()
            for u in reach[layer]:
                found.update(_round_layer(lambda v, u=u: q_at(u, v), cap, eta, strict)[0])
            kept = tuple(sorted(found))
        sums[layer] = kept
        values[layer] = {u: tuple(q_at(u, v) for v in kept) for u in reach[layer]}
    return RowProgram(
        weights=(1,) * n, ranges=lat.c, cap=cap, sums=tuple(sums),
        row=i, eta=eta, values=tuple(values),
    )


def joint_accept_count(inst, programs, table):
    """Number of tables X in S whose rows are accepted by the given row programs.

    Rows without a program are unconstrained (beyond membership in S).
    """
    lat = table.lattice
    n = lat.n
    rows = [M.row for M in programs]
    edges = [
        [[edge_intervals(M.sums[L + 1], M.cap, v, 1, lat.c[L]) for v in M.sums[L]] for L in range(n)]
        for M in programs
    ]

    @lru_cache(maxsize=None)
    def J(layer, states, u):
        if layer == n:
            return 1
        cj = lat.c[layer]
        total = 0
        for z, _, iv in lat.columns[layer]:
            w = lat.shift(u, z)
            if w is None or not table.f(layer + 1, w):
                continue
            options = []
            for p, row in enumerate(rows):
                opts = []
                for lo, hi, t in edges[p][layer][states[p]]:
                    if t is not None:
                        own = _clip(lo, hi, iv[row])
                        if own is not None:
                            opts.append((t, own))
                if not opts:
                    break
                options.append(opts)
            else:
                intervals = list(iv)
                for combo in product(*options):
                    for row, (_, own) in zip(rows, combo):
                        intervals[row] = own
                    count = box_simplex_count(cj, intervals)
                    if count:
                        total += count * J(layer + 1, tuple(t for t, _ in combo), w)
        return total

    return J(0, (0,) * len(programs), (0,) * lat.m)


def joint_accept_prob(inst, programs, table):
    """Pr over uniform X in S that every row program accepts its row."""
    return Fraction(joint_accept_count(inst, programs, table), table.size)


@dataclass(frozen=True)
class ContingencyCount:
    estimate: int
    s_size: int
    eta: Fraction
    reduced: ContingencyInstance
    widths: tuple


def _exact(value, reduced):
    return ContingencyCount(value, value, Fraction(0), reduced, ())


def run_ct(inst, eps):
    eps = check_unit_interval(eps, "eps")
    red = inst.relaxed()
    if red is None:
        return _exact(0, inst)
    m, n = red.m, red.n
    if n == 0:
        return _exact(1, red)
    if m == 0:
        return _exact(int(not any(red.c)), red)
    if sum(red.c) > sum(red.r):
        return _exact(0, red)  # no table fits, and the superset S gives no guarantee here
    if n == 1:
        # one column: CT' is a single box-simplex count
        return _exact(box_simplex_count(red.c[0], tuple((0, x) for x in red.r)), red)
    table = build_suffix_table(red)
    eta = eps / (m * n ** (m + 1))
    programs = [build_row_program(red, i, eta, table) for i in range(m)]
    count = joint_accept_count(red, programs, table)
    return ContingencyCount(count, table.size, eta, red, tuple(M.widths for M in programs))


def count_ct(inst, eps):
    """N with |CT| <= N <= (1+eps)|CT| (or the CT' analogue, per the instance's mode)."""
    return run_ct(inst, eps).estimate
