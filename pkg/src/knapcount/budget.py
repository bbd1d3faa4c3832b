import os

from .errors import CapacityError

DEFAULT_BUDGET_MB = 1024
# rough per-cell footprint of a dict entry holding a small int / Fraction
BYTES_PER_CELL = 96


def budget_bytes():
    raw = os.environ.get("KNAPCOUNT_MEM_BUDGET_MB")
    if raw is None:
        return DEFAULT_BUDGET_MB * 2**20
    try:
        mb = float(raw)
    except ValueError:
        raise CapacityError(f"KNAPCOUNT_MEM_BUDGET_MB is not a number: {raw!r}")
    return int(mb * 2**20)


def check_cells(cells, what):
    """Raise CapacityError when ``cells`` table entries would exceed the budget."""
    if cells * BYTES_PER_CELL > budget_bytes():
        raise CapacityError(
            f"{what}: {cells} cells exceed memory budget "
            f"({budget_bytes() // 2**20} MB; set KNAPCOUNT_MEM_BUDGET_MB)"
        )
