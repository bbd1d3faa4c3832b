"""``knapcount`` command line.

Every subcommand writes one JSON document (or a two-line TSV table) to
standard output.  Big integers are decimal strings and rationals "p/q".
Exit codes: 0 ok, 1 oracle cross-check violated, 2 bad input, 3 capacity,
4 sampling failure, 5 learner FAIL.
"""

import argparse
from fractions import Fraction
from math import comb
import json
import sys
import time

from . import bench as bench_mod
from .contingency import ContingencyInstance, run_ct
from .errors import InputError, KnapcountError
from .intknap import IntKnapsackInstance, approx_count_int, exact_count_int
from .knap01 import Knapsack01Instance, Sampler, build_approx, exact_count, retries_for
from .learn import AlmostRobpParams, learn, measure_error, oracle_from_json
from .monotone import KnapsackSpace, round_under_source
from .multiknap import MultiKnapsackInstance, run_multi
from .oracle import ct_tables, int_solutions, multi_solutions
from .rational import check_unit_interval, layer_eps, parse_rational, rational_str
from .robp import SmallSpaceSource, accept_counts, all_strings, bits_str
from .sources import hamming_slice_source, product_source, symmetric_source

ORACLE_MAX_N = 16
ORACLE_MAX_BOX = 1 << 20
EXIT_ORACLE = 1
EXIT_LEARN_FAIL = 5


def read_json(path):
    if path is None:
        raise InputError("--file is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}")


def rat(q):
    return rational_str(Fraction(q))


def sandwich(exact, estimate, slack):
    return exact <= estimate <= (1 + slack) * exact


def need_small(n, what):
    if n > ORACLE_MAX_N:
        raise InputError(f"--oracle enumerates {what}; n = {n} exceeds {ORACLE_MAX_N}")


def add_oracle(out, exact, estimate, slack):
    out["exact"] = str(exact) if isinstance(exact, int) else rat(exact)
    out["oracle_ok"] = sandwich(exact, estimate, slack)


def cmd_count01(args):
    inst = Knapsack01Instance.from_json(read_json(args.file))
    delta = check_unit_interval(args.delta or "1/10", "delta")
    prog = build_approx(inst, layer_eps(delta, inst.n))
    out = {"count": str(prog.root_count), "delta": rat(delta), "n": inst.n,
           "max_width": prog.max_width}
    if args.oracle:
        need_small(inst.n, "2^n strings")
        add_oracle(out, exact_count(inst), prog.root_count, delta)
    return out


def cmd_sample01(args):
    inst = Knapsack01Instance.from_json(read_json(args.file))
    eta = parse_rational(args.eta or "1/1000")
    retries = retries_for(eta)
    m = 10 if args.samples is None else args.samples
    if m < 0:
        raise InputError("--samples must be nonnegative")
    sampler = Sampler(inst)
    draws = [bits_str(sampler.draw(args.seed, k, retries)) for k in range(m)]
    out = {"count": str(sampler.program.root_count), "delta": "1/10", "eta": rat(eta),
           "seed": str(args.seed), "samples": draws, "attempts": sampler.attempts,
           "rejections": sampler.rejections}
    if args.oracle:
        out["oracle_ok"] = all(inst.satisfied(x) for x in draws)
    return out


def cmd_count_multi(args):
    inst = MultiKnapsackInstance.from_json(read_json(args.file))
    eps = check_unit_interval(args.eps or "1/10", "eps")
    res = run_multi(inst, eps)
    out = {"count": rat(res.estimate), "eps": rat(eps), "n": inst.n, "k": inst.k,
           "rounded_weight_per_row": [str(w) for w in res.rounded.row_weights],
           "product_width": res.product_width}
    if args.oracle:
        need_small(inst.n, "2^n strings")
        add_oracle(out, len(multi_solutions(inst)), res.estimate, eps)
    return out


def cmd_count_int(args):
    inst = IntKnapsackInstance.from_json(read_json(args.file))
    delta = check_unit_interval(args.delta or "1/10", "delta")
    N = approx_count_int(inst, delta)
    out = {"count": str(N), "delta": rat(delta), "n": inst.n}
    if args.oracle:
        if inst.box_size > ORACLE_MAX_BOX:
            raise InputError(f"--oracle enumerates the box; {inst.box_size} points is too many")
        exact = len(int_solutions(inst))
        if exact != exact_count_int(inst):
            raise KnapcountError("enumeration and DP disagree")
        add_oracle(out, exact, N, delta)
    return out


def cmd_count_ct(args):
    inst = ContingencyInstance.from_json(read_json(args.file))
    eps = check_unit_interval(args.eps or "1/10", "eps")
    res = run_ct(inst, eps)
    out = {"count": str(res.estimate), "eps": rat(eps), "mode": inst.mode,
           "superset_size": str(res.s_size), "eta": rat(res.eta)}
    if args.oracle:
        add_oracle(out, len(ct_tables(inst)), res.estimate, eps)
    return out


def load_source(spec, n):
    kind, _, arg = (spec or "uniform").partition(":")
    if kind == "uniform":
        return SmallSpaceSource.uniform(n)
    if kind == "hamming":
        try:
            r = int(arg)
        except ValueError:
            raise InputError(f"hamming source needs an integer weight, got {arg!r}")
        return hamming_slice_source(n, r)
    if kind in ("product", "symmetric", "robp"):
        doc = read_json(arg)
        if kind == "robp":
            src = SmallSpaceSource.from_json(doc)
        else:
            if not isinstance(doc, list):
                raise InputError(f"{kind} source file must hold a JSON list")
            values = [str(v) for v in doc]
            src = product_source(values) if kind == "product" else symmetric_source(values)
        if src.n != n:
            raise InputError(f"source emits {src.n} bits, instance has {n}")
        return src
    raise InputError(f"unknown source {spec!r}")


def cmd_count_source(args):
    inst = Knapsack01Instance.from_json(read_json(args.file))
    delta = check_unit_interval(args.delta or "1/10", "delta")
    source = load_source(args.source, inst.n)
    prog = round_under_source(KnapsackSpace(inst.a, inst.b), source, delta=delta)
    out = {"count": rat(prog.value), "delta": rat(delta), "source": args.source or "uniform",
           "max_width": max(prog.widths)}
    if args.source and args.source.startswith("hamming:"):
        out["scaled_count"] = rat(prog.value * comb(inst.n, int(args.source[8:])))
    if args.oracle:
        need_small(inst.n, "the source support")
        exact = sum(p for x, p in source.distribution().items() if inst.satisfied(x))
        add_oracle(out, exact, prog.value, delta)
    return out


def cmd_learn(args):
    f = oracle_from_json(read_json(args.file))
    eps = check_unit_interval(args.eps or "1/10", "eps")
    delta = check_unit_interval(args.delta or "1/100", "delta")
    k = 1 if f.name == "halfspace" else len(read_json(args.file)["halfspaces"])
    params = AlmostRobpParams.for_halfspaces(eps, f.n, k, delta)
    res = learn(f, f.n, params, seed=args.seed)
    if res.failed:
        return {"failed": True, "queries": res.queries, "failed_layer": res.failed_layer,
                "eps": rat(eps), "delta": rat(delta)}, EXIT_LEARN_FAIL
    M = res.program
    if f.n <= 20:
        err = measure_error(M, f)
    else:
        err = measure_error(M, f, samples=args.samples or 10000, seed=args.seed)
    out = {"count": str(accept_counts(M).root), "eps": rat(eps), "delta": rat(delta),
           "failed": False, "queries": res.queries, "measured_error": rat(err),
           "width": M.width, **M.to_json()}
    return out


def detect_instance(doc):
    if not isinstance(doc, dict):
        raise InputError("instance file must hold a JSON object")
    if "rows" in doc:
        return MultiKnapsackInstance.from_json(doc)
    if "r" in doc:
        return ContingencyInstance.from_json(doc)
    if "u" in doc:
        return IntKnapsackInstance.from_json(doc)
    return Knapsack01Instance.from_json(doc)


def cmd_oracle(args):
    inst = detect_instance(read_json(args.file))
    if isinstance(inst, Knapsack01Instance):
        if args.source:
            need_small(inst.n, "the source support")
            src = load_source(args.source, inst.n)
            value = sum(p for x, p in src.distribution().items() if inst.satisfied(x))
            return {"count": rat(value), "source": args.source}
        need_small(inst.n, "2^n strings")
        count = sum(1 for x in all_strings(inst.n) if inst.satisfied(x))
    elif isinstance(inst, MultiKnapsackInstance):
        need_small(inst.n, "2^n strings")
        count = len(multi_solutions(inst))
    elif isinstance(inst, IntKnapsackInstance):
        count = len(int_solutions(inst))
    else:
        count = len(ct_tables(inst))
    return {"count": str(count)}


def cmd_bench(args):
    rows = bench_mod.ladder(seed=args.seed)
    trend = bench_mod.check_trend(rows)
    if not trend.time_ok:
        print("warning: build time grew faster than 2.5x per doubling of 1/eps "
              f"({', '.join(f'{g:.2f}' for g in trend.time_growth)})", file=sys.stderr)
    if args.plot:
        from .plotting import plot_ladder

        plot_ladder(rows, args.plot)
    out = {"rows": [bench_mod.row_dict(r) for r in rows], "bound_ok": trend.bound_ok,
           "width_growth_ok": trend.width_ok, "time_growth_ok": trend.time_ok,
           "plot": args.plot}
    code = 0 if trend.bound_ok and trend.width_ok else EXIT_ORACLE
    return out, code


COMMANDS = {
    "count01": cmd_count01,
    "sample01": cmd_sample01,
    "count-multi": cmd_count_multi,
    "count-int": cmd_count_int,
    "count-ct": cmd_count_ct,
    "count-source": cmd_count_source,
    "learn": cmd_learn,
    "oracle": cmd_oracle,
    "bench": cmd_bench,
}


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def build_parser():
    parser = _Parser(prog="knapcount", description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=sorted(COMMANDS))
    parser.add_argument("--file", help="instance or oracle JSON")
    parser.add_argument("--delta", help="relative error (or learner confidence), e.g. 0.1 or 1/10")
    parser.add_argument("--eps", help="relative error for count-multi / count-ct, target error for learn")
    parser.add_argument("--eta", help="sampler failure probability per draw (default 1/1000)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--oracle", action="store_true", help="cross-check against enumeration")
    parser.add_argument("--source", help="uniform | hamming:R | product:FILE | symmetric:FILE | robp:FILE")
    parser.add_argument("--format", choices=("json", "tsv"), default="json")
    parser.add_argument("--plot", help="bench: write the ladder figure to this PNG")
    return parser


def render_tsv(out):
    if "rows" in out:
        rows = out["rows"]
        keys = list(rows[0]) if rows else []
        lines = ["\t".join(keys)]
        lines += ["\t".join(str(r[k]) for k in keys) for r in rows]
        return "\n".join(lines)
    keys = [k for k, v in out.items() if not isinstance(v, (list, dict))]
    return "\t".join(keys) + "\n" + "\t".join(_cell(out[k]) for k in keys)


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return "" if v is None else str(v)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgError as exc:
        print(f"knapcount: {exc}", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    try:
        result = COMMANDS[args.subcommand](args)
    except KnapcountError as exc:
        print(f"knapcount: {exc}", file=sys.stderr)
        return exc.exit_code
    out, code = result if isinstance(result, tuple) else (result, 0)
    out["elapsed_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    if out.get("oracle_ok") is False:
        print("knapcount: oracle cross-check failed", file=sys.stderr)
        code = EXIT_ORACLE
    print(render_tsv(out) if args.format == "tsv" else json.dumps(out, indent=2))
    return code
