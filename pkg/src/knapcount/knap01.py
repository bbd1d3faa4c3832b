"""0/1 knapsack: exact counting, the rounded-program FPTAS and a uniform sampler.

The rounded program keeps, per layer, an ascending list of partial sums
(breakpoints).  Each breakpoint stores its number of accepting suffixes as
an int whose implicit denominator is ``2**(n - layer)``; partial sums above
the capacity all collapse onto one rejecting sink that is never stored.
"""

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
import math
import re

import numpy as np

from .budget import check_cells
from .errors import InputError, SamplingError
from .rational import layer_eps, parse_rational
from .robp import Robp, as_bits, bits_str

_DECIMAL = re.compile(r"\+?\d+")


def _nonneg_int(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise InputError(f"{what} must be an integer or decimal string, got {value!r}")
    if isinstance(value, str):
        if not _DECIMAL.fullmatch(value.strip()):
            raise InputError(f"{what} is not a decimal integer: {value!r}")
        value = int(value)
    if value < 0:
        raise InputError(f"{what} must be nonnegative, got {value}")
    return value


def int_vector(values, what):
    if isinstance(values, (str, bytes)):
        raise InputError(f"{what} must be a list")
    return tuple(_nonneg_int(v, f"{what}[{k}]") for k, v in enumerate(values))


@dataclass(frozen=True)
class Knapsack01Instance:
    a: tuple
    b: int

    def __post_init__(self):
        object.__setattr__(self, "a", int_vector(self.a, "a"))
        object.__setattr__(self, "b", _nonneg_int(self.b, "b"))

    @property
    def n(self):
        return len(self.a)

    @property
    def total_weight(self):
        return sum(self.a) + self.b

    def weight(self, x):
        return sum(ai for ai, xi in zip(self.a, as_bits(x)) if xi)

    def satisfied(self, x):
        return self.weight(x) <= self.b

    @classmethod
    def from_json(cls, doc):
        try:
            return cls(doc["a"], doc["b"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"knapsack instance needs 'a' and 'b': {exc}")

    def to_json(self):
        return {"a": [str(x) for x in self.a], "b": str(self.b)}


def exact_count(inst):
    """|KNAP(a, b)| by dynamic programming over distinct clamped partial sums."""
    cap = inst.b + 1
    sums = {0: 1}
    for ai in inst.a:
        nxt = dict(sums)
        for s, c in sums.items():
            t = min(s + ai, cap)
            nxt[t] = nxt.get(t, 0) + c
        check_cells(len(nxt), "exact partial-sum table")
        sums = nxt
    return sum(c for s, c in sums.items() if s <= inst.b)


def exact_program(inst):
    """The width-W program whose layer-i states are the reachable clamped partial sums."""
    cap = inst.b + 1
    a = inst.a
    return Robp.from_transitions(
        inst.n, 0, lambda i, s, bit: min(s + a[i] * bit, cap), lambda s: s <= inst.b
    )


@dataclass(frozen=True, eq=False)
class RoundedProgram:
    a: tuple
    b: int
    eps: Fraction
    strict: bool
    sums: tuple
    counts: tuple
    root_count: int

    @property
    def n(self):
        return len(self.a)

    @property
    def widths(self):
        """Live breakpoints per layer (the rejecting sink is not included)."""
        return tuple(len(layer) for layer in self.sums)

    @property
    def max_width(self):
        return max(self.widths)

    def up(self, layer, total):
        """Index of the breakpoint a partial sum rounds to, or None for the sink."""
        if total > self.b:
            return None
        return bisect_right(self.sums[layer], total) - 1

    def step(self, layer, j, bit):
        if j is None:
            return None
        return self.up(layer + 1, self.sums[layer][j] + self.a[layer] * bit)

    def count(self, layer, j):
        return 0 if j is None else self.counts[layer][j]

    def probability(self, layer, j):
        return Fraction(self.count(layer, j), 2 ** (self.n - layer))

    def __call__(self, x):
        bits = as_bits(x)
        if len(bits) != self.n:
            raise InputError(f"input has length {len(bits)}, program reads {self.n} bits")
        j = 0
        for i, bit in enumerate(bits):
            j = self.step(i, j, bit)
        return int(j is not None)

    def to_robp(self):
        sink = "reject"

        def step(i, s, bit):
            if s == sink:
                return sink
            j = self.up(i + 1, s + self.a[i] * bit)
            return sink if j is None else self.sums[i + 1][j]

        return Robp.from_transitions(self.n, 0, step, lambda s: s != sink)


def _counter(next_sums, next_counts, weight, b):
    """Accepting-suffix count at an arbitrary partial sum ``v <= b`` of the current layer."""

    def count_at(v):
        total = next_counts[bisect_right(next_sums, v) - 1]
        t = v + weight
        if t <= b:
            total += next_counts[bisect_right(next_sums, t) - 1]
        return total

    return count_at


def _round_layer(count_at, b, eps, strict):
    # new breakpoint once count*(q+p) <= ref*q, i.e. count <= ref/(1+eps)
    p, q = eps.numerator, eps.denominator
    qp = q + p
    if strict:
        def drops(v, rq):
            return count_at(v) * qp < rq
    else:
        def drops(v, rq):
            return count_at(v) * qp <= rq

    sums, counts = [0], [count_at(0)]
    while sums[-1] < b:
        rq = counts[-1] * q
        if not drops(b, rq):
            break
        lo, hi = sums[-1], b  # predicate false at lo, true at hi
        while hi - lo > 1:
            mid = (lo + hi) >> 1
            if drops(mid, rq):
                hi = mid
            else:
                lo = mid
        sums.append(hi)
        counts.append(count_at(hi))
    return tuple(sums), tuple(counts)


def build_approx(inst, eps, strict=False):
    """Round the exact program layer by layer, from the last layer back to the first.

    A new breakpoint starts at the smallest partial sum whose count has
    dropped to at most ``1/(1+eps)`` of the previous breakpoint's (strictly
    below it when ``strict``); it is located by binary search because
    counts are non-increasing in the partial sum.
    """
    eps = parse_rational(eps)
    if eps <= 0:
        raise InputError("eps must be positive")
    n, a, b = inst.n, inst.a, inst.b
    sums = [None] * (n + 1)
    counts = [None] * (n + 1)
    sums[n], counts[n] = (0,), (1,)
    for layer in range(n - 1, 0, -1):
        count_at = _counter(sums[layer + 1], counts[layer + 1], a[layer], b)
        sums[layer], counts[layer] = _round_layer(count_at, b, eps, strict)
    root = _counter(sums[1], counts[1], a[0], b)(0) if n else 1
    sums[0], counts[0] = (0,), (root,)
    return RoundedProgram(a, b, eps, strict, tuple(sums), tuple(counts), root)


def width_bound(n, eps):
    return 2 + n * math.log(2) / math.log1p(float(eps))


def approx_count(inst, delta):
    """An integer N with |KNAP(a,b)| <= N <= (1+delta)|KNAP(a,b)|."""
    eps = layer_eps(delta, inst.n)
    return build_approx(inst, eps).root_count


def retries_for(eta):
    eta = parse_rational(eta)
    if not 0 < eta < 1:
        raise InputError("eta must lie in (0, 1)")
    return math.ceil(math.log(1 / eta) / math.log(10)) + 1


def draw_generator(seed, index):
    """Independent counter-based stream for one draw."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def randbelow(gen, bound):
    """Uniform int in [0, bound) for arbitrary-precision ``bound``."""
    nbits = bound.bit_length()
    words = (nbits + 63) // 64
    excess = words * 64 - nbits
    while True:
        raw = gen.bit_generator.random_raw(words)
        value = 0
        for w in np.atleast_1d(raw):
            value = (value << 64) | int(w)
        value >>= excess
        if value < bound:
            return value


class Sampler:
    """Uniform sampler over KNAP(a, b): walk the rounded program, reject non-solutions."""

    def __init__(self, inst, program=None):
        self.inst = inst
        self.program = program or build_approx(inst, layer_eps(Fraction(1, 10), inst.n))
        self.attempts = 0
        self.rejections = 0

    def walk(self, gen):
        prog = self.program
        j = 0
        bits = []
        for i in range(prog.n):
            j0, j1 = prog.step(i, j, 0), prog.step(i, j, 1)
            c0 = prog.count(i + 1, j0)
            c1 = prog.count(i + 1, j1)
            bit = 0 if randbelow(gen, c0 + c1) < c0 else 1
            bits.append(bit)
            j = j1 if bit else j0
        return tuple(bits)

    def draw(self, seed, index, retries):
        gen = draw_generator(seed, index)
        for _ in range(retries):
            self.attempts += 1
            bits = self.walk(gen)
            if self.inst.satisfied(bits):
                return bits
            self.rejections += 1
        raise SamplingError(index, retries)


def sample(inst, seed, m, eta=Fraction(1, 1000)):
    """``m`` exactly uniform solutions; a draw that exhausts its retries raises SamplingError."""
    if m < 0:
        raise InputError("sample count must be nonnegative")
    retries = retries_for(eta)
    sampler = Sampler(inst)
    return [bits_str(sampler.draw(seed, k, retries)) for k in range(m)]
