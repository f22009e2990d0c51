"""Deterministic text rendering for report values.

Every report renderer funnels values through these helpers so that repeated
runs produce byte-identical output.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["fmt", "fmt_exact", "fmt_float", "machine_value"]


def fmt_float(x: float) -> str:
    if x != x:
        return "nan"
    if x in (float("inf"), float("-inf")):
        return "inf" if x > 0 else "-inf"
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.12g}"


def fmt_exact(x) -> str:
    """Exact form: fractions as p/q, floats at full determinism."""
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return fmt_float(x)
    return str(x)


def machine_value(v) -> str:
    """Single-token value for line-oriented key=value output."""
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, Fraction):
        return fmt_exact(v)
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, frozenset):
        return ",".join(str(x) for x in sorted(v)) or "-"
    if isinstance(v, (tuple, list)):
        return ",".join(machine_value(x) for x in v) or "-"
    return str(v)


def fmt(x) -> str:
    """Readable form: exact value plus a short decimal approximation."""
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator} (~{float(x):.6g})"
    if isinstance(x, float):
        return fmt_float(x)
    if isinstance(x, frozenset):
        return "{" + ", ".join(str(v) for v in sorted(x)) + "}"
    if isinstance(x, (tuple, list)):
        return "(" + ", ".join(fmt(v) for v in x) + ")"
    if x is None:
        return "-"
    return str(x)
