"""Balanced-bracket combinatorics: matching, Catalan counts, ballot-walk probabilities.

Convention: bit 1 is an open bracket and bit 0 is a closed bracket, so every
prefix of a balanced string has at least as many ones as zeros.  The empty
string (n = 0) counts as balanced.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .bits import Bits
from .errors import DomainError, ParameterError, RangeError, SizeError

# Full enumeration beyond this length is too large to be useful at desk scale.
ENUMERATION_LIMIT = 28


def is_balanced(bits) -> bool:
    """True when every prefix has #open >= #closed and the totals are equal."""
    depth = 0
    for b in bits:
        if b not in (0, 1):
            raise DomainError(f"bracket strings are 0/1 sequences, got {b!r}")
        depth += 1 if b else -1
        if depth < 0:
            return False
    return depth == 0


def scan_matches(bits) -> tuple:
    """Stack-scan partner map for an arbitrary 0/1 string.

    Entry k is the 1-based partner of position k+1, or None when that bracket
    stays unmatched within the string.  A closed bracket always pairs with the
    most recent unmatched open bracket, if any.
    """
    partners: list = [None] * len(bits)
    stack: list[int] = []
    for pos, b in enumerate(bits):
        if b == 1:
            stack.append(pos)
        elif stack:
            opener = stack.pop()
            partners[opener] = pos + 1
            partners[pos] = opener + 1
    return tuple(partners)


def match_index(bits, i: int) -> int:
    """1-based partner of position ``i`` in a balanced string."""
    bits = tuple(bits)
    if not is_balanced(bits):
        raise DomainError("match_index is only defined on balanced strings")
    if not 1 <= i <= len(bits):
        raise RangeError(f"position {i} out of range 1..{len(bits)}")
    return scan_matches(bits)[i - 1]


def catalan_count(n: int) -> int:
    """Number of balanced bracket strings of length ``n`` (n even, n >= 0)."""
    if n < 0 or n % 2:
        raise ParameterError(f"balanced strings need even non-negative length, got {n}")
    half = n // 2
    return math.comb(n, half) // (half + 1)


def enumerate_bal(n: int) -> list[Bits]:
    """All balanced strings of length ``n`` in lexicographic order (0 < 1)."""
    if n < 0 or n % 2:
        raise ParameterError(f"balanced strings need even non-negative length, got {n}")
    if n > ENUMERATION_LIMIT:
        raise SizeError(f"refusing to enumerate balanced strings of length {n} > {ENUMERATION_LIMIT}")
    out: list[Bits] = []
    buf = [0] * n

    def rec(pos: int, depth: int) -> None:
        if pos == n:
            out.append(tuple(buf))
            return
        if depth > 0:
            buf[pos] = 0
            rec(pos + 1, depth - 1)
        # an open bracket is legal while the remaining positions can close it
        if depth + 1 <= n - pos - 1:
            buf[pos] = 1
            rec(pos + 1, depth + 1)

    rec(0, 0)
    return out


def unmatched_open_prob(d: int) -> Fraction:
    """Pr over uniform x in {0,1}^d that x_1 is open and never matched in x.

    Counted by a nesting-level walk: after the forced open at position 1 the
    level starts at 1 and must never return to 0.
    """
    if d < 1:
        raise ParameterError(f"window length must be >= 1, got {d}")
    levels = {1: 1}
    for _ in range(d - 1):
        nxt: dict[int, int] = {}
        for level, ways in levels.items():
            nxt[level + 1] = nxt.get(level + 1, 0) + ways
            if level - 1 >= 1:
                nxt[level - 1] = nxt.get(level - 1, 0) + ways
        levels = nxt
    return Fraction(sum(levels.values()), 2**d)


def unmatched_close_prob(d: int) -> Fraction:
    """Pr over uniform x in {0,1}^d that x_d is closed and never matched in x.

    Tracks the stack height (count of currently unmatched opens); closes that
    arrive at height 0 are absorbed.  x_d is an unmatched close exactly when
    the height is 0 after the first d-1 bits.
    """
    if d < 1:
        raise ParameterError(f"window length must be >= 1, got {d}")
    heights = {0: 1}
    for _ in range(d - 1):
        nxt: dict[int, int] = {}
        for height, ways in heights.items():
            nxt[height + 1] = nxt.get(height + 1, 0) + ways
            down = max(height - 1, 0)
            nxt[down] = nxt.get(down, 0) + ways
        heights = nxt
    return Fraction(heights.get(0, 0), 2**d)
