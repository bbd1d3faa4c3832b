"""Exact rational helpers: parsing, formatting and per-layer error budgets."""

from fractions import Fraction

from .errors import InputError


def parse_rational(text):
    """Parse ``"0.1"``, ``"1/10"`` or ``"1e-3"`` into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {text!r}")


def rational_str(q):
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def check_unit_interval(value, name):
    """Require ``0 < value <= 1``."""
    value = parse_rational(value)
    if not 0 < value <= 1:
        raise InputError(f"{name} must lie in (0, 1], got {rational_str(value)}")
    return value


def compounded_within(eps, n, delta):
    """True iff (1+eps)^n <= 1+delta, decided with integer arithmetic."""
    eps, delta = Fraction(eps), Fraction(delta)
    p, q = eps.numerator, eps.denominator
    # (q+p)^n / q^n <= (d+e)/d  with delta = e/d
    e, d = delta.numerator, delta.denominator
    return (q + p) ** n * d <= (d + e) * q**n


def layer_eps(delta, n):
    """Per-layer error eps = delta/(2n), halved until (1+eps)^n <= 1+delta holds."""
    delta = check_unit_interval(delta, "delta")
    if n == 0:
        return delta
    eps = delta / (2 * n)
    while not compounded_within(eps, n, delta):
        eps /= 2
    return eps


def to_num_den(q):
    q = Fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def from_num_den(obj):
    try:
        return Fraction(int(obj["num"]), int(obj["den"]))
    except (KeyError, TypeError, ValueError, ZeroDivisionError):
        raise InputError(f"bad probability object: {obj!r}")
