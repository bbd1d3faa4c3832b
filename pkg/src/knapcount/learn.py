"""Learning a branching program from membership queries.

A function is an almost-ROBP when, on every layer, its prefixes cluster
into at most W balls of small radius in suffix-disagreement distance
d(f_x, f_y) = Pr_z[f(x z) != f(y z)].  The learner grows one layer at a
time: each extension ``x + (b,)`` of a kept prefix either merges into the
first kept prefix of the new layer within distance 3*eps, or becomes a new
representative.  The layer-n representatives are labelled by one query.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .errors import InputError
from .rational import check_unit_interval, parse_rational
from .robp import Robp, all_strings, as_bits, bits_str
from .knap01 import int_vector, _nonneg_int


class MembershipOracle:
    """Query access to f: {0,1}^n -> {0,1}; ``queries`` counts every call."""

    def __init__(self, func, n, name="f"):
        self.func = func
        self.n = n
        self.name = name
        self.queries = 0

    def __call__(self, x):
        self.queries += 1
        return int(bool(self.func(as_bits(x))))

    def peek(self, x):
        """Evaluate without counting (used for error measurement, not learning)."""
        return int(bool(self.func(as_bits(x))))


def halfspace_oracle(a, b):
    a = int_vector(a, "a")
    b = _nonneg_int(b, "b")

    def f(x):
        return sum(ai for ai, xi in zip(a, x) if xi) <= b

    return MembershipOracle(f, len(a), "halfspace")


def _truth_table(table, k):
    if isinstance(table, str):
        bits = as_bits(table)
    else:
        bits = tuple(int(bool(v)) for v in table)
    if len(bits) != 1 << k:
        raise InputError(f"truth table needs {1 << k} entries, got {len(bits)}")
    return bits


def k_function_oracle(halfspaces, truth_table):
    """f(x) = g(h_1(x), ..., h_k(x)); the table index reads h_1 as the most significant bit."""
    hs = [h if isinstance(h, MembershipOracle) else halfspace_oracle(*h) for h in halfspaces]
    if not hs:
        raise InputError("need at least one halfspace")
    n = hs[0].n
    if any(h.n != n for h in hs):
        raise InputError("halfspaces disagree on n")
    g = _truth_table(truth_table, len(hs))

    def f(x):
        index = 0
        for h in hs:
            index = index << 1 | h.peek(x)
        return g[index]

    return MembershipOracle(f, n, "function_of_halfspaces")


def oracle_from_json(doc):
    try:
        kind = doc["type"]
        hs = [(h["a"], h["b"]) for h in doc["halfspaces"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"oracle spec needs 'type' and 'halfspaces': {exc}")
    if kind == "halfspace":
        if len(hs) != 1:
            raise InputError("a halfspace oracle takes exactly one halfspace")
        return halfspace_oracle(*hs[0])
    if kind == "function_of_halfspaces":
        if "truth_table" not in doc:
            raise InputError("function_of_halfspaces needs 'truth_table'")
        return k_function_oracle(hs, doc["truth_table"])
    raise InputError(f"unknown oracle type {kind!r}")


def sample_count(n, W, eps, delta):
    """Hoeffding: L suffixes put one estimate within eps except w.p. delta/(2nW^2)."""
    return math.ceil(math.log(4 * n * W * W / delta) / (2 * eps * eps))


@dataclass(frozen=True)
class AlmostRobpParams:
    eps: Fraction
    W: int
    delta: Fraction
    n: int

    def __post_init__(self):
        object.__setattr__(self, "eps", check_unit_interval(self.eps, "eps"))
        object.__setattr__(self, "delta", check_unit_interval(self.delta, "delta"))
        if self.W < 1:
            raise InputError("width cap W must be at least 1")

    @property
    def L(self):
        return sample_count(max(self.n, 1), self.W, self.eps, self.delta)

    @classmethod
    def for_halfspaces(cls, eps_final, n, k, delta=Fraction(1, 100)):
        """Parameters under which a function of k halfspaces is learned to error eps_final."""
        eps_final = parse_rational(eps_final)
        eps0 = eps_final / (8 * n * k)
        W = math.ceil((1 / eps0) ** k)
        return cls(eps0, W, delta, n)


def _stream(seed, *path):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *path])))


def estimate_distance(f, x, y, L, rng=None):
    """Fraction of suffixes z on which f(x z) and f(y z) differ.

    With ``L`` at least the number of suffixes the distance is computed
    exactly over all of them; otherwise ``L`` uniform suffixes are drawn
    from ``rng``.
    """
    x, y = as_bits(x), as_bits(y)
    if len(x) != len(y):
        raise InputError("prefixes must have the same length")
    if x == y:
        return Fraction(0)
    rest = f.n - len(x)
    if L >= 1 << rest:
        suffixes = all_strings(rest)
        total = 1 << rest
    else:
        if rng is None:
            raise InputError("sampled distance estimates need a random stream")
        suffixes = (tuple(row) for row in rng.integers(0, 2, size=(L, rest)).tolist())
        total = L
    differ = sum(f(x + z) != f(y + z) for z in suffixes)
    return Fraction(differ, total)


@dataclass(frozen=True)
class LearnResult:
    failed: bool
    program: Robp
    queries: int
    widths: tuple
    failed_layer: int = None


def learn(f, n, params, seed=0):
    if f.n != n:
        raise InputError(f"oracle reads {f.n} bits, asked to learn on {n}")
    eps3 = 3 * params.eps
    L = params.L
    start_queries = f.queries
    truth = {}

    def table(x):
        # full suffix truth table of x, as a bitmask indexed by suffix order
        mask = truth.get(x)
        if mask is None:
            mask = 0
            for k, z in enumerate(all_strings(n - len(x))):
                if f(x + z):
                    mask |= 1 << k
            truth[x] = mask
        return mask

    def close(layer, cand_index, cand, rep_index, rep):
        rest = n - layer
        if L >= 1 << rest:
            d = Fraction((table(cand) ^ table(rep)).bit_count(), 1 << rest)
        else:
            d = estimate_distance(f, cand, rep, L, _stream(seed, layer, cand_index, rep_index))
        return d <= eps3

    reps = [()]
    layers = [((),)]
    edges = []
    for layer in range(1, n + 1):
        new = []
        table_edges = []
        cand_index = 0
        for x in reps:
            pair = []
            for bit in (0, 1):
                cand = x + (bit,)
                target = None
                for k, y in enumerate(new):
                    if close(layer, cand_index, cand, k, y):
                        target = k
                        break
                if target is None:
                    target = len(new)
                    new.append(cand)
                    if len(new) > params.W:
                        return LearnResult(True, None, f.queries - start_queries,
                                           tuple(len(l) for l in layers), layer)
                pair.append(target)
                cand_index += 1
            table_edges.append(tuple(pair))
        truth.clear()  # tables are only compared within one layer
        reps = new
        layers.append(tuple(new))
        edges.append(tuple(table_edges))
    accept = tuple(bool(f(x)) for x in reps)
    labels = tuple(tuple(bits_str(x) for x in layer) for layer in layers)
    program = Robp(labels, tuple(edges), accept)
    return LearnResult(False, program, f.queries - start_queries, program_widths(program))


def program_widths(M):
    return tuple(len(layer) for layer in M.layers)


def measure_error(M, f, samples=None, seed=0):
    """Pr over uniform x of M(x) != f(x): exact by enumeration when ``samples`` is None."""
    if M.n != f.n:
        raise InputError("program and oracle disagree on n")
    if samples is None:
        if M.n > 20:
            raise InputError("exact error measurement is limited to n <= 20; pass samples")
        wrong = sum(M(x) != f.peek(x) for x in all_strings(M.n))
        return Fraction(wrong, 1 << M.n)
    if samples < 1:
        raise InputError("samples must be positive")
    gen = _stream(seed, 0)
    xs = gen.integers(0, 2, size=(samples, M.n)).tolist()
    wrong = sum(M(x) != f.peek(x) for x in xs)
    return Fraction(wrong, samples)
