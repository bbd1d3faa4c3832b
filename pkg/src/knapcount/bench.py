"""Scaling ladder for the 0/1 rounded program.

Two phases on seeded random instances with weights below 2**16 and
capacity half the total weight: n doubling at fixed eps, then 1/eps
doubling at fixed n.  Each rung records the widest layer, the width bound
2 + n ln2 / ln(1+eps) and the build time.
"""

from dataclasses import dataclass, asdict
from fractions import Fraction
import random
import time

from .knap01 import Knapsack01Instance, build_approx, width_bound

WEIGHT_BITS = 16
WIDTH_GROWTH_CAP = 2.2
TIME_GROWTH_CAP = 2.5


@dataclass
class Rung:
    phase: str
    n: int
    eps: Fraction
    width: int
    bound: float
    elapsed_ms: float

    @property
    def within_bound(self):
        return self.width <= self.bound


def random_instance(n, seed):
    rng = random.Random(f"bench:{seed}:{n}")
    a = [rng.randint(1, 1 << WEIGHT_BITS) for _ in range(n)]
    return Knapsack01Instance(a, sum(a) // 2)


def run_rung(phase, n, eps, seed):
    inst = random_instance(n, seed)
    t0 = time.perf_counter()
    prog = build_approx(inst, eps)
    elapsed = (time.perf_counter() - t0) * 1000
    return Rung(phase, n, eps, prog.max_width, width_bound(n, eps), elapsed)


def ladder(seed=0, ns=(64, 128, 256), eps=Fraction(1, 10), eps_n=64, doublings=3):
    rows = [run_rung("n", n, eps, seed) for n in ns]
    for k in range(doublings + 1):
        rows.append(run_rung("inv_eps", eps_n, eps / (1 << k), seed))
    return rows


def growth(rows, phase, attr):
    values = [getattr(r, attr) for r in rows if r.phase == phase]
    return [b / a if a else float("inf") for a, b in zip(values, values[1:])]


@dataclass
class TrendReport:
    bound_ok: bool
    width_ok: bool
    time_ok: bool
    width_growth: list
    time_growth: list


def check_trend(rows):
    wg = growth(rows, "inv_eps", "width")
    tg = growth(rows, "inv_eps", "elapsed_ms")
    return TrendReport(
        bound_ok=all(r.within_bound for r in rows),
        width_ok=all(g <= WIDTH_GROWTH_CAP for g in wg),
        time_ok=all(g <= TIME_GROWTH_CAP for g in tg),
        width_growth=wg,
        time_growth=tg,
    )


def row_dict(rung):
    d = asdict(rung)
    d["eps"] = f"{rung.eps.numerator}/{rung.eps.denominator}"
    d["bound"] = round(rung.bound, 2)
    d["elapsed_ms"] = round(rung.elapsed_ms, 3)
    return d
