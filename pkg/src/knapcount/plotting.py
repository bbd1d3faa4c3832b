"""PNG rendering of the bench ladder."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _legend(ax, twin):
    h1, l1 = ax.get_legend_handles_labels()
    h2, l2 = twin.get_legend_handles_labels()
    ax.legend(h1 + h2, l1 + l2, loc="upper left")


def plot_ladder(rows, path):
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    by_n = [r for r in rows if r.phase == "n"]
    by_eps = [r for r in rows if r.phase == "inv_eps"]

    if by_n:
        ns = [r.n for r in by_n]
        left.plot(ns, [r.width for r in by_n], "o-", label="widest layer")
        left.plot(ns, [r.bound for r in by_n], "--", label="width bound")
        twin = left.twinx()
        twin.plot(ns, [r.elapsed_ms for r in by_n], "s:", color="tab:red", label="build ms")
        twin.set_ylabel("build time (ms)")
        left.set_xscale("log", base=2)
        left.set_xlabel("n")
        left.set_ylabel("width")
        left.set_title(f"n ladder, eps = {by_n[0].eps}")
        _legend(left, twin)

    if by_eps:
        inv = [float(1 / r.eps) for r in by_eps]
        right.plot(inv, [r.width for r in by_eps], "o-", label="widest layer")
        right.plot(inv, [r.bound for r in by_eps], "--", label="width bound")
        twin = right.twinx()
        twin.plot(inv, [r.elapsed_ms for r in by_eps], "s:", color="tab:red", label="build ms")
        twin.set_ylabel("build time (ms)")
        right.set_xscale("log", base=2)
        right.set_xlabel("1/eps")
        right.set_title(f"1/eps ladder, n = {by_eps[0].n}")
        _legend(right, twin)

    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
