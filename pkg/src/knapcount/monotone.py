"""Rounding implicitly described monotone programs under a small-space source.

A monotone state space orders every layer so that lower states accept a
subset of what higher states accept.  ``round_under_source`` walks the
layers backwards and, for every source state ``u`` of a layer, keeps only
the states at which the acceptance probability under the suffix
distribution ``D^u`` has dropped by a factor ``1+eps``.  Transitions into
a layer are then rounded upward to the nearest kept state, which can only
enlarge the accepted set.
"""

from abc import ABC, abstractmethod
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
import math

from .errors import InputError, OracleContractError
from .rational import layer_eps, parse_rational
from .robp import Robp, as_bits


class MonotoneStateSpace(ABC):
    """Oracle interface for an exponential-width monotone program.

    ``compare(u, v, layer)`` returns -1 when ``u`` is strictly below ``v``
    (accepts a subset), 0 when equal and 1 otherwise.  ``midpoint(u, v,
    layer)`` is only asked for ``u`` below ``v`` and returns a state
    strictly between them, roughly halving the gap, or None if they are
    adjacent.
    """

    n: int

    @abstractmethod
    def start(self): ...

    @abstractmethod
    def top(self, layer): ...

    @abstractmethod
    def bottom(self, layer): ...

    @abstractmethod
    def transition(self, state, layer, bit): ...

    @abstractmethod
    def accept(self, state): ...

    @abstractmethod
    def compare(self, u, v, layer): ...

    @abstractmethod
    def midpoint(self, u, v, layer): ...


class KnapsackSpace(MonotoneStateSpace):
    """Partial sums clamped at b+1; a larger sum sits lower in the order."""

    def __init__(self, a, b):
        self.a = tuple(int(x) for x in a)
        self.b = int(b)
        self.n = len(self.a)

    def start(self):
        return 0

    def top(self, layer):
        return 0

    def bottom(self, layer):
        return self.b + 1

    def transition(self, state, layer, bit):
        return min(state + self.a[layer] * bit, self.b + 1)

    def accept(self, state):
        return state <= self.b

    def compare(self, u, v, layer):
        return (u < v) - (u > v)

    def midpoint(self, u, v, layer):
        if u - v >= 2:
            return (u + v) // 2
        return None


class ConstantSpace(MonotoneStateSpace):
    def __init__(self, n, value=True):
        self.n = n
        self.value = bool(value)

    def start(self):
        return 0

    def top(self, layer):
        return 0

    def bottom(self, layer):
        return 0

    def transition(self, state, layer, bit):
        return 0

    def accept(self, state):
        return self.value

    def compare(self, u, v, layer):
        return 0

    def midpoint(self, u, v, layer):
        return None


@dataclass(frozen=True, eq=False)
class SourcedRoundedProgram:
    """The rounded program: ``states[L]`` is the kept set of layer L in ascending order.

    ``probs[L][k][u]`` is the acceptance probability of ``states[L][k]`` under
    the suffix distribution of source state ``u`` of layer L, and
    ``per_source[L][u]`` the breakpoints contributed by that source state.
    """

    space: MonotoneStateSpace
    source: object
    eps: Fraction
    strict: bool
    states: tuple
    probs: tuple
    per_source: tuple

    @property
    def n(self):
        return len(self.states) - 1

    @property
    def value(self):
        return self.probs[0][0][0]

    @property
    def widths(self):
        return tuple(len(layer) for layer in self.states)

    def round_index(self, layer, state):
        """Index of the lowest kept state at or above ``state``."""
        space = self.space
        key = cmp_to_key(lambda x, y: space.compare(x, y, layer))
        return bisect_left(self.states[layer], key(state), key=key)

    def step(self, layer, state, bit):
        nxt = self.space.transition(state, layer, bit)
        return self.states[layer + 1][self.round_index(layer + 1, nxt)]

    def __call__(self, x):
        bits = as_bits(x)
        if len(bits) != self.n:
            raise InputError(f"input has length {len(bits)}, program reads {self.n} bits")
        state = self.states[0][0]
        for i, bit in enumerate(bits):
            state = self.step(i, state, bit)
        return int(bool(self.space.accept(state)))

    def to_robp(self):
        return Robp.from_transitions(
            self.n, self.states[0][0], self.step, self.space.accept
        )


def _check_between(space, lo, w, hi, layer):
    if not (space.compare(lo, w, layer) < 0 and space.compare(w, hi, layer) < 0):
        raise OracleContractError(
            f"layer {layer}: midpoint {w!r} is not strictly between {lo!r} and {hi!r}"
        )


def _source_breakpoints(space, layer, prob, eps, strict):
    """Breakpoints of one source state, from the top of the order downwards.

    Returns the top state, every state where the probability has dropped by
    ``1+eps`` since the previous breakpoint, and finally the highest state of
    probability zero (when one exists) so that zero-probability states never
    round up onto a positive one.
    """
    p, q = eps.numerator, eps.denominator
    top, bottom = space.top(layer), space.bottom(layer)
    cur, pcur = top, prob(top)
    found = [top]
    if pcur == 0:
        return found

    def drops(value, ref):
        lhs, rhs = value * (q + p), ref * q
        return lhs < rhs if strict else lhs <= rhs

    def search(lo, hi, pred):
        # lo satisfies pred, hi does not; returns the highest state satisfying it
        while True:
            w = space.midpoint(lo, hi, layer)
            if w is None:
                return lo
            _check_between(space, lo, w, hi, layer)
            if pred(w):
                lo = w
            else:
                hi = w

    pbottom = prob(bottom)
    while space.compare(bottom, cur, layer) < 0 and drops(pbottom, pcur):
        ref = pcur
        m = search(bottom, cur, lambda v: drops(prob(v), ref))
        pm = prob(m)
        if pm == 0:
            break
        found.append(m)
        cur, pcur = m, pm
    if pbottom == 0:
        found.append(search(bottom, cur, lambda v: prob(v) == 0))
    return found


def round_under_source(space, source, delta=None, eps=None, strict=True):
    """Build the rounded program for ``space`` under ``source``.

    Either ``delta`` (overall error, split as delta/(2n) per layer) or the
    per-layer ``eps`` must be given.  With ``strict`` a new breakpoint needs
    a drop strictly below ``1/(1+eps)``; otherwise a drop to exactly that
    ratio suffices.
    """
    n = space.n
    if source.n != n:
        raise InputError(f"state space reads {n} bits but source emits {source.n}")
    if eps is None:
        if delta is None:
            raise InputError("give delta or eps")
        eps = layer_eps(delta, n)
    eps = parse_rational(eps)
    if eps <= 0:
        raise InputError("eps must be positive")

    states = [None] * (n + 1)
    probs = [None] * (n + 1)
    per_source = [None] * (n + 1)
    one, zero = Fraction(1), Fraction(0)

    def sort_layer(found, layer):
        key = cmp_to_key(lambda x, y: space.compare(x, y, layer))
        return tuple(sorted(set(found), key=key))

    # last layer: the suffix is empty, so every source state sees the accept bit
    width_n = len(source.layers[n])
    final_prob = lambda v: one if space.accept(v) else zero
    found_n = _source_breakpoints(space, n, final_prob, eps, strict)
    states[n] = sort_layer(found_n, n)
    probs[n] = tuple((final_prob(v),) * width_n for v in states[n])
    per_source[n] = tuple(len(found_n) for _ in range(width_n))

    for layer in range(n - 1, -1, -1):
        nxt_states, nxt_probs = states[layer + 1], probs[layer + 1]
        key = cmp_to_key(lambda x, y, L=layer + 1: space.compare(x, y, L))
        nxt_keys = [key(s) for s in nxt_states]
        s_edges, s_probs = source.edges[layer], source.probs[layer]
        targets = {}

        def rounded(v):
            pair = targets.get(v)
            if pair is None:
                pair = tuple(
                    bisect_left(nxt_keys, key(space.transition(v, layer, bit)))
                    for bit in (0, 1)
                )
                targets[v] = pair
            return pair

        def prob(v, u):
            k0, k1 = rounded(v)
            (p0, p1), (u0, u1) = s_probs[u], s_edges[u]
            total = zero
            if p0:
                total += p0 * nxt_probs[k0][u0]
            if p1:
                total += p1 * nxt_probs[k1][u1]
            return total

        if layer == 0:
            start = space.start()
            states[0] = (start,)
            probs[0] = ((prob(start, 0),),)
            per_source[0] = (1,)
            break

        width = len(source.layers[layer])
        found_all, counts = [], []
        for u in range(width):
            found = _source_breakpoints(space, layer, lambda v, u=u: prob(v, u), eps, strict)
            found_all.extend(found)
            counts.append(len(found))
        states[layer] = sort_layer(found_all, layer)
        probs[layer] = tuple(tuple(prob(v, u) for u in range(width)) for v in states[layer])
        per_source[layer] = tuple(counts)

    if n == 0:
        start = space.start()
        states[0] = (start,)
        probs[0] = ((final_prob(start),),)
        per_source[0] = (1,)

    return SourcedRoundedProgram(
        space, source, eps, strict, tuple(states), tuple(probs), tuple(per_source)
    )


def count_under_source(space, source, delta, strict=True):
    """Estimate of Pr_D[accept] that is at least the truth and at most (1+delta) times it."""
    return round_under_source(space, source, delta=delta, strict=strict).value


def per_source_bound(source, eps):
    """Upper bound on breakpoints contributed by each source state, per layer.

    Positive acceptance probabilities under ``D^u`` lie between the least
    positive walk probability from ``u`` and 1, and consecutive positive
    breakpoints differ by a factor of at least ``1+eps``.
    """
    least = source.min_path_probs()
    log1p = math.log1p(float(eps))
    out = []
    for layer in least:
        row = []
        for pmin in layer:
            span = math.log(pmin.denominator) - math.log(pmin.numerator)
            row.append(2 + span / log1p)
        out.append(row)
    return out
