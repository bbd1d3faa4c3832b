"""Interval programs: integer-labelled layered programs with succinct edges.

Every state is a partial sum.  On layer ``i`` the label ``k`` in
``0..ranges[i]`` moves a state ``v`` to ``v + weights[i] * k``, which is
then rounded to the largest kept sum not above it; sums above ``cap``
reject.  Because targets are monotone in ``k``, the labels leading to one
kept target form an interval, so an edge set is stored as ``(lo, hi,
target)`` triples with ``target`` None for the rejecting sink.
"""

from bisect import bisect_right
from dataclasses import dataclass

from .errors import InputError


def round_down(sums, cap, total):
    """Index of the kept sum that ``total`` rounds to, or None past the cap."""
    if total > cap:
        return None
    return bisect_right(sums, total) - 1


def edge_intervals(next_sums, cap, v, weight, top):
    """Partition ``0..top`` by the next-layer kept state that ``v + weight*k`` rounds to."""
    if v > cap:
        return ((0, top, None),)
    j = bisect_right(next_sums, v) - 1
    if weight == 0:
        return ((0, top, j),)
    out = []
    lo = 0
    last = len(next_sums) - 1
    while lo <= top:
        # labels in [lo, hi] stay below the next kept sum (or the cap)
        bound = next_sums[j + 1] if j < last else cap + 1
        hi = min(top, (bound - 1 - v) // weight)
        if hi >= lo:
            out.append((lo, hi, j))
            lo = hi + 1
        if j == last:
            break
        j += 1
    if lo <= top:
        out.append((lo, top, None))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class IntervalProgram:
    weights: tuple
    ranges: tuple
    cap: int
    sums: tuple

    @property
    def n(self):
        return len(self.weights)

    @property
    def widths(self):
        return tuple(len(s) for s in self.sums)

    def edges(self, layer, j):
        return edge_intervals(
            self.sums[layer + 1], self.cap, self.sums[layer][j], self.weights[layer], self.ranges[layer]
        )

    def step(self, layer, j, label):
        if j is None:
            return None
        if not 0 <= label <= self.ranges[layer]:
            raise InputError(f"label {label} outside 0..{self.ranges[layer]} on layer {layer}")
        return round_down(self.sums[layer + 1], self.cap, self.sums[layer][j] + self.weights[layer] * label)

    def __call__(self, x):
        x = tuple(int(v) for v in x)
        if len(x) != self.n:
            raise InputError(f"input has length {len(x)}, program reads {self.n} values")
        j = 0
        for i, label in enumerate(x):
            j = self.step(i, j, label)
        return int(j is not None)
