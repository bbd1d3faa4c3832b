"""Constructors for common small-space sources."""

from fractions import Fraction
from math import comb

from .errors import InputError
from .rational import parse_rational
from .robp import SmallSpaceSource

ZERO, ONE = Fraction(0), Fraction(1)


def hamming_slice_source(n, r):
    """Uniform distribution over the n-bit strings of Hamming weight exactly r.

    State ``(i, w)`` means ``w`` ones among the first ``i`` bits; only weights
    that can still be completed to ``r`` are kept, so the width is at most r+1.
    """
    if not 0 <= r <= n:
        raise InputError(f"Hamming weight r={r} must lie in [0, n={n}]")

    def alive(i, w):
        return w <= r and r - w <= n - i

    layers = [[w for w in range(i + 1) if alive(i, w)] for i in range(n + 1)]
    edges, probs = [], []
    for i in range(n):
        pos = {w: k for k, w in enumerate(layers[i + 1])}
        e_row, p_row = [], []
        for w in layers[i]:
            p1 = Fraction(comb(n - i - 1, r - w - 1), comb(n - i, r - w)) if r > w else ZERO
            t0 = pos.get(w)
            t1 = pos.get(w + 1)
            # a forbidden move gets probability 0 and is parked on the allowed one
            e_row.append((t1 if t0 is None else t0, t0 if t1 is None else t1))
            p_row.append((1 - p1, p1))
        edges.append(tuple(e_row))
        probs.append(tuple(p_row))
    labels = tuple(tuple((i, w) for w in layer) for i, layer in enumerate(layers))
    return SmallSpaceSource(labels, tuple(edges), tuple(probs))


def product_source(ps):
    """Independent bits with Pr[x_i = 1] = ps[i]."""
    ps = [parse_rational(p) for p in ps]
    for k, p in enumerate(ps):
        if not 0 <= p <= 1:
            raise InputError(f"p[{k}] = {p} is not a probability")
    n = len(ps)
    return SmallSpaceSource(
        tuple((0,) for _ in range(n + 1)),
        tuple(((0, 0),) for _ in range(n)),
        tuple(((1 - p, p),) for p in ps),
    )


def symmetric_source(weights):
    """Pr[x] = weights[|x|] / sum_k weights[k] * C(n, k) for n = len(weights) - 1."""
    ws = [parse_rational(w) for w in weights]
    if not ws:
        raise InputError("symmetric source needs n+1 weights")
    if any(w < 0 for w in ws):
        raise InputError("symmetric weights must be nonnegative")
    n = len(ws) - 1
    if sum(w * comb(n, k) for k, w in enumerate(ws)) == 0:
        raise InputError("symmetric weights are all zero")

    def mass(i, k):
        # total weight of all completions of a prefix of length i with k ones
        return sum(comb(n - i, j) * ws[k + j] for j in range(n - i + 1))

    edges, probs = [], []
    for i in range(n):
        e_row, p_row = [], []
        for k in range(i + 1):
            total = mass(i, k)
            if total:
                p1 = Fraction(mass(i + 1, k + 1)) / total
            else:
                p1 = ZERO  # unreachable with positive probability
            e_row.append((k, k + 1))
            p_row.append((1 - p1, p1))
        edges.append(tuple(e_row))
        probs.append(tuple(p_row))
    labels = tuple(tuple((i, k) for k in range(i + 1)) for i in range(n + 1))
    return SmallSpaceSource(labels, tuple(edges), tuple(probs))
