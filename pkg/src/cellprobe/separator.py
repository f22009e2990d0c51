"""Staged greedy separators: remove a small blocker set B so that many probe
sets become pairwise disjoint.

Both procedures run stages i = 0..q over the family Q(1)\\B, ..., Q(n)\\B.
A stage either finds enough greedily-disjoint sets and stops, or unions the
elements of the greedy family into B (a covering: every set then loses at
least one element).  Empty sets are disjoint from everything, so the family
of all-empty sets always succeeds, which bounds the stage count by q + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConsistencyError, ParameterError, SizeError

_BRACKET_EXPONENT_LIMIT = 10_000


def _as_sets(family) -> list[frozenset]:
    sets = [frozenset(int(e) for e in s) for s in family]
    if not sets:
        raise ParameterError("separator needs a nonempty family of sets")
    return sets


def greedy_disjoint(family) -> tuple[int, ...]:
    """1-based indices of a maximal disjoint subfamily, scanning in index order."""
    chosen = []
    used: set = set()
    for idx, s in enumerate(family, start=1):
        s = frozenset(s)
        if used.isdisjoint(s):
            chosen.append(idx)
            used |= s
    return tuple(chosen)


def pairwise_disjoint(sets) -> bool:
    seen: set = set()
    for s in sets:
        s = set(s)
        if seen & s:
            return False
        seen |= s
    return True


@dataclass(frozen=True)
class StageLog:
    stage: int
    disjoint_found: int
    threshold: object          # Fraction | float
    success: bool
    b_size: int                # |B| after the stage
    b_bound: object            # invariant bound on |B| at this point
    invariant_ok: bool


@dataclass(frozen=True)
class SeparatorResult:
    """Blocker B, disjoint-family query indices V (1-based), and witness w = |V|."""

    B: frozenset
    V: tuple[int, ...]
    w: int
    n: int
    q: int
    gap: Fraction
    k0: Fraction
    stages_run: int
    log: tuple[StageLog, ...]


def find_separator(family, g) -> SeparatorResult:
    """Find B with |B| <= w/g leaving >= w in [n/(g*q)^q, n] disjoint sets.

    Stage i succeeds when the greedy count reaches k0*(g*q)^i where
    k0 = n/(g*q)^q; otherwise B absorbs every element of the greedy family.
    """
    sets = _as_sets(family)
    n = len(sets)
    q = max(len(s) for s in sets)
    gap = Fraction(g)
    if gap < 1:
        raise ParameterError(f"gap must be >= 1, got {g}")
    k0 = Fraction(n) / (gap * q) ** q if q else Fraction(n)
    blocker: set = set()
    log: list[StageLog] = []
    for i in range(q + 1):
        reduced = [s - blocker for s in sets]
        chosen = greedy_disjoint(reduced)
        threshold = k0 * (gap * q) ** i
        bound_now = k0 * gap ** (i - 1) * q ** i if i >= 1 else Fraction(0)
        if len(chosen) >= threshold:
            log.append(StageLog(i, len(chosen), threshold, True,
                                len(blocker), bound_now, len(blocker) <= bound_now))
            return SeparatorResult(
                B=frozenset(blocker), V=chosen, w=len(chosen), n=n, q=q,
                gap=gap, k0=k0, stages_run=i + 1, log=tuple(log),
            )
        for v in chosen:
            blocker |= reduced[v - 1]
        bound_after = k0 * gap ** i * q ** (i + 1)
        log.append(StageLog(i, len(chosen), threshold, False,
                            len(blocker), bound_after, len(blocker) <= bound_after))
    raise ConsistencyError("separator failed to terminate; stage q cannot fail")


@dataclass(frozen=True)
class BracketSeparatorResult:
    """Separator with the bracket schedule: exponents a, b with b = c*a.

    ``size_floor_ok`` records whether n/lg^b n >= 1 held (it cannot at desk
    scale once b is moderately large); ``b_size_ok`` records |B| <= n/lg^b n.
    """

    B: frozenset
    V: tuple[int, ...]
    a: int
    b: int
    n: int
    q: int
    c: int
    stages_run: int
    log: tuple[StageLog, ...]
    size_floor_ok: bool
    b_size_ok: bool

    @property
    def w(self) -> int:
        return len(self.V)


def _meets(count: int, n: int, lg_l: float, exponent: int) -> bool:
    """count >= n / (lg n)^exponent, compared in log space to dodge overflow."""
    if count <= 0:
        return False
    return math.log2(count) + exponent * lg_l >= math.log2(n) - 1e-12


def find_separator_brackets(family, c: int, require_preconditions: bool = True) -> BracketSeparatorResult:
    """Stage-i success threshold n/(lg n)^(d^(q-i)) with d = 2c; then a = d^(q-i), b = c*a.

    The guarantee arithmetic assumes q <= (lg lg n)/c and n large; with
    ``require_preconditions`` off the schedule still runs and the result
    records which size bounds actually held.
    """
    sets = _as_sets(family)
    n = len(sets)
    c = int(c)
    if c < 4:
        raise ParameterError(f"the bracket schedule needs c >= 4, got {c}")
    if n < 4:
        raise ParameterError(f"need n >= 4 so lg lg n is positive, got {n}")
    q = max(len(s) for s in sets)
    if require_preconditions and q > math.log2(math.log2(n)) / c:
        raise ParameterError(
            f"q = {q} exceeds (lg lg n)/c = {math.log2(math.log2(n)) / c:.4f}"
        )
    d = 2 * c
    if d ** q > _BRACKET_EXPONENT_LIMIT:
        raise SizeError(f"schedule exponent d^q = {d ** q} exceeds {_BRACKET_EXPONENT_LIMIT}")
    lg_l = math.log2(math.log2(n))
    blocker: set = set()
    log: list[StageLog] = []
    for i in range(q + 1):
        reduced = [s - blocker for s in sets]
        chosen = greedy_disjoint(reduced)
        exponent = d ** (q - i)
        # threshold n/L^exponent rendered as a float when it fits
        threshold = n * 2.0 ** (-exponent * lg_l) if exponent * lg_l < 1000 else 0.0
        if _meets(len(chosen), n, lg_l, exponent):
            a, b = exponent, c * exponent
            b_size_ok = _b_within(len(blocker), n, lg_l, b)
            log.append(StageLog(i, len(chosen), threshold, True,
                                len(blocker), f"n/lg^{b} n", b_size_ok))
            return BracketSeparatorResult(
                B=frozenset(blocker), V=chosen, a=a, b=b, n=n, q=q, c=c,
                stages_run=i + 1, log=tuple(log),
                size_floor_ok=math.log2(n) >= b * lg_l - 1e-12,
                b_size_ok=b_size_ok,
            )
        for v in chosen:
            blocker |= reduced[v - 1]
        next_exp = c * d ** (q - i - 1)
        log.append(StageLog(i, len(chosen), threshold, False,
                            len(blocker), f"n/lg^{next_exp} n",
                            _b_within(len(blocker), n, lg_l, next_exp)))
    raise ConsistencyError("bracket separator failed to terminate; stage q cannot fail")


def _b_within(b_size: int, n: int, lg_l: float, exponent: int) -> bool:
    """|B| <= n / (lg n)^exponent, in log space."""
    if b_size == 0:
        return True
    return math.log2(b_size) + exponent * lg_l <= math.log2(n) + 1e-12
