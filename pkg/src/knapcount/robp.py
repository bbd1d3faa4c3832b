"""Explicit layered read-once branching programs and small-space sources.

Both structures are stored by layer: ``layers[i]`` holds opaque, hashable
state labels in insertion order, and ``edges[i][j] = (t0, t1)`` gives the
indices (into ``layers[i + 1]``) reached from state ``j`` of layer ``i`` on
bits 0 and 1.  Counts are Python ints and probabilities are Fractions, so
every quantity computed here is exact.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
import itertools

from .budget import check_cells
from .errors import InputError
from .rational import from_num_den, to_num_den


def as_bits(x):
    """Normalise ``"0110"`` / ``[0, 1, 1, 0]`` / ``(False, True)`` to a tuple of ints."""
    if isinstance(x, str):
        if any(ch not in "01" for ch in x):
            raise InputError(f"not a bit-string: {x!r}")
        return tuple(int(ch) for ch in x)
    bits = tuple(int(b) for b in x)
    if any(b not in (0, 1) for b in bits):
        raise InputError(f"not a bit vector: {x!r}")
    return bits


def bits_str(bits):
    return "".join(str(b) for b in bits)


def _check_layered(layers, edges):
    if not layers or len(layers[0]) != 1:
        raise InputError("layer 0 must contain exactly one state")
    if len(edges) != len(layers) - 1:
        raise InputError("need one edge table per layer transition")
    for i, table in enumerate(edges):
        if len(table) != len(layers[i]):
            raise InputError(f"layer {i}: edge table does not cover every state")
        size = len(layers[i + 1])
        for pair in table:
            if len(pair) != 2 or not all(0 <= t < size for t in pair):
                raise InputError(f"layer {i}: transition {pair} leaves the next layer")


def _bfs_layers(n, start, step, cell_limit_what):
    """Materialise the states reachable from ``start`` under ``step(i, state, bit)``."""
    layers = [[start]]
    edges = []
    for i in range(n):
        index = {}
        nxt = []
        table = []
        for state in layers[i]:
            pair = []
            for bit in (0, 1):
                target = step(i, state, bit)
                k = index.get(target)
                if k is None:
                    k = index[target] = len(nxt)
                    nxt.append(target)
                pair.append(k)
            table.append(tuple(pair))
        check_cells(len(nxt), cell_limit_what)
        layers.append(nxt)
        edges.append(tuple(table))
    return tuple(tuple(layer) for layer in layers), tuple(edges)


@dataclass(frozen=True, eq=False)
class Robp:
    layers: tuple
    edges: tuple
    accept: tuple

    def __post_init__(self):
        _check_layered(self.layers, self.edges)
        if len(self.accept) != len(self.layers[-1]):
            raise InputError("every final-layer state needs one accept label")

    @property
    def n(self):
        return len(self.layers) - 1

    @property
    def width(self):
        return max(len(layer) for layer in self.layers)

    @cached_property
    def index(self):
        return tuple({label: k for k, label in enumerate(layer)} for layer in self.layers)

    @classmethod
    def from_transitions(cls, n, start, step, accept):
        """Build the reachable part of an implicitly described program.

        ``step(i, state, bit)`` maps a layer-``i`` state to its layer-``i+1``
        successor and ``accept(state)`` labels final states.
        """
        layers, edges = _bfs_layers(n, start, step, "branching program layer")
        return cls(layers, edges, tuple(bool(accept(s)) for s in layers[-1]))

    @classmethod
    def constant(cls, n, value):
        return cls.from_transitions(n, 0, lambda i, s, b: 0, lambda s: value)

    def run(self, x):
        """Index of the final-layer state reached on input ``x``."""
        bits = as_bits(x)
        if len(bits) != self.n:
            raise InputError(f"input has length {len(bits)}, program reads {self.n} bits")
        state = 0
        for i, bit in enumerate(bits):
            state = self.edges[i][state][bit]
        return state

    def __call__(self, x):
        return int(self.accept[self.run(x)])

    def to_json(self):
        return {
            "n": self.n,
            "layers": [[str(label) for label in layer] for layer in self.layers],
            "transitions": [[list(pair) for pair in table] for table in self.edges],
            "accept": [int(a) for a in self.accept],
        }

    @classmethod
    def from_json(cls, doc):
        try:
            layers = tuple(tuple(layer) for layer in doc["layers"])
            edges = tuple(tuple(tuple(pair) for pair in table) for table in doc["transitions"])
            accept = tuple(bool(a) for a in doc["accept"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed program document: {exc}")
        return cls(layers, edges, accept)


def evaluate(M, x):
    """M(x) as 0/1."""
    return M(x)


class AcceptCounts:
    """Per-state number of accepting suffixes, ``counts[i][j]`` for state j of layer i."""

    def __init__(self, counts):
        self.counts = counts

    def __getitem__(self, key):
        i, j = key
        return self.counts[i][j]

    @property
    def root(self):
        return self.counts[0][0]

    def probability(self, i, j):
        n = len(self.counts) - 1
        return Fraction(self.counts[i][j], 2 ** (n - i))


def accept_counts(M):
    counts = [None] * (M.n + 1)
    counts[M.n] = [int(a) for a in M.accept]
    for i in range(M.n - 1, -1, -1):
        nxt = counts[i + 1]
        counts[i] = [nxt[t0] + nxt[t1] for t0, t1 in M.edges[i]]
    return AcceptCounts(counts)


@dataclass(frozen=True, eq=False)
class SmallSpaceSource:
    """A layered random walk; ``probs[i][j] = (p0, p1)`` at state j of layer i."""

    layers: tuple
    edges: tuple
    probs: tuple

    def __post_init__(self):
        _check_layered(self.layers, self.edges)
        if len(self.probs) != len(self.edges):
            raise InputError("need one probability table per layer transition")
        for i, table in enumerate(self.probs):
            if len(table) != len(self.layers[i]):
                raise InputError(f"layer {i}: probability table does not cover every state")
            for p0, p1 in table:
                if not (isinstance(p0, Fraction) and isinstance(p1, Fraction)):
                    raise InputError("source probabilities must be exact Fractions")
                if p0 < 0 or p1 < 0 or p0 + p1 != 1:
                    raise InputError(f"layer {i}: edge probabilities {p0}, {p1} do not sum to 1")

    @property
    def n(self):
        return len(self.layers) - 1

    @property
    def width(self):
        return max(len(layer) for layer in self.layers)

    @classmethod
    def uniform(cls, n):
        half = Fraction(1, 2)
        return cls(
            tuple((0,) for _ in range(n + 1)),
            tuple(((0, 0),) for _ in range(n)),
            tuple(((half, half),) for _ in range(n)),
        )

    @classmethod
    def point_mass(cls, z):
        bits = as_bits(z)
        one, zero = Fraction(1), Fraction(0)
        return cls(
            tuple((0,) for _ in range(len(bits) + 1)),
            tuple(((0, 0),) for _ in bits),
            tuple((((one, zero) if b == 0 else (zero, one)),) for b in bits),
        )

    def string_prob(self, x):
        bits = as_bits(x)
        if len(bits) != self.n:
            raise InputError(f"string has length {len(bits)}, source emits {self.n} bits")
        p = Fraction(1)
        state = 0
        for i, bit in enumerate(bits):
            p *= self.probs[i][state][bit]
            if not p:
                return p
            state = self.edges[i][state][bit]
        return p

    def distribution(self):
        """All strings with positive probability, as ``{bit-string: probability}``."""
        frontier = {((), 0): Fraction(1)}
        for i in range(self.n):
            nxt = {}
            for (prefix, state), mass in frontier.items():
                for bit in (0, 1):
                    p = self.probs[i][state][bit]
                    if p:
                        key = (prefix + (bit,), self.edges[i][state][bit])
                        nxt[key] = nxt.get(key, 0) + mass * p
            frontier = nxt
        return {bits_str(prefix): mass for (prefix, _), mass in frontier.items()}

    def min_path_probs(self):
        """For each state, the least positive probability of any walk to the last layer."""
        best = [None] * (self.n + 1)
        best[self.n] = [Fraction(1)] * len(self.layers[self.n])
        for i in range(self.n - 1, -1, -1):
            row = []
            for j, (t0, t1) in enumerate(self.edges[i]):
                cands = [p * best[i + 1][t] for p, t in zip(self.probs[i][j], (t0, t1)) if p]
                row.append(min(cands))
            best[i] = row
        return best

    def to_json(self):
        return {
            "n": self.n,
            "layers": [[str(label) for label in layer] for layer in self.layers],
            "transitions": [[list(pair) for pair in table] for table in self.edges],
            "probabilities": [
                [[to_num_den(p0), to_num_den(p1)] for p0, p1 in table] for table in self.probs
            ],
        }

    @classmethod
    def from_json(cls, doc):
        try:
            layers = tuple(tuple(layer) for layer in doc["layers"])
            edges = tuple(tuple(tuple(pair) for pair in table) for table in doc["transitions"])
            probs = tuple(
                tuple((from_num_den(p0), from_num_den(p1)) for p0, p1 in table)
                for table in doc["probabilities"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed source document: {exc}")
        return cls(layers, edges, probs)


def eval_prob(M, D):
    """Pr_{x <- D}[M(x) = 1], by a forward pass over reachable (source, program) pairs."""
    if M.n != D.n:
        raise InputError(f"program reads {M.n} bits but source emits {D.n}")
    mass = {(0, 0): Fraction(1)}
    for i in range(M.n):
        nxt = {}
        d_edges, d_probs, m_edges = D.edges[i], D.probs[i], M.edges[i]
        for (u, v), w in mass.items():
            for bit in (0, 1):
                p = d_probs[u][bit]
                if p:
                    key = (d_edges[u][bit], m_edges[v][bit])
                    nxt[key] = nxt.get(key, 0) + w * p
        check_cells(len(nxt), "source x program pair table")
        mass = nxt
    return sum((w for (_, v), w in mass.items() if M.accept[v]), Fraction(0))


def uniform_accept_source(M, counts=None):
    """The uniform distribution on M's accept set, as a source over M's live states."""
    counts = counts or accept_counts(M)
    if counts.root == 0:
        raise InputError("empty accept set: program accepts no input")
    keep = [[0]]
    for i in range(M.n):
        seen = {}
        for j in keep[i]:
            for t in M.edges[i][j]:
                if counts[i + 1, t] and t not in seen:
                    seen[t] = len(seen)
        keep.append(list(seen))
    position = [{j: k for k, j in enumerate(layer)} for layer in keep]
    edges, probs = [], []
    for i in range(M.n):
        e_row, p_row = [], []
        for j in keep[i]:
            t0, t1 = M.edges[i][j]
            c0, c1 = counts[i + 1, t0], counts[i + 1, t1]
            total = c0 + c1
            # a zero-probability edge is parked on its live sibling
            k0 = position[i + 1][t0] if c0 else position[i + 1][t1]
            k1 = position[i + 1][t1] if c1 else position[i + 1][t0]
            e_row.append((k0, k1))
            p_row.append((Fraction(c0, total), Fraction(c1, total)))
        edges.append(tuple(e_row))
        probs.append(tuple(p_row))
    layers = tuple(tuple(M.layers[i][j] for j in keep[i]) for i in range(M.n + 1))
    return SmallSpaceSource(layers, tuple(edges), tuple(probs))


def intersect(programs):
    """Product program accepting the intersection; only reachable tuples are built."""
    programs = list(programs)
    if not programs:
        raise InputError("intersect needs at least one program")
    n = programs[0].n
    if any(M.n != n for M in programs):
        raise InputError("all programs must read the same number of bits")
    if len(programs) == 1:
        return programs[0]

    def step(i, state, bit):
        return tuple(M.edges[i][s][bit] for M, s in zip(programs, state))

    def accept(state):
        return all(M.accept[s] for M, s in zip(programs, state))

    layers, edges = _bfs_layers(n, (0,) * len(programs), step, "product program layer")
    labelled = tuple(
        tuple(tuple(M.layers[i][s] for M, s in zip(programs, state)) for state in layer)
        for i, layer in enumerate(layers)
    )
    return Robp(labelled, edges, tuple(accept(s) for s in layers[-1]))


def all_strings(n):
    return itertools.product((0, 1), repeat=n)
