"""Sweep extraction of index pairs whose left gap dominates the right gap.

From ascending indices v_1 < ... < v_w in [1, n] the sweep produces an even
subsequence v'_1 < ... < v'_{w'} with

    v'_{2k+1} - v'_{2k} >= c * (v'_{2k+2} - v'_{2k+1}),   v'_0 := 0,

of length w' >= 2*floor(w/(c*lg n)).  Each window of t = floor(c*lg n)
consecutive indices must contain a qualifying position; otherwise the gaps
would grow geometrically past n.  At small n that existence argument can
genuinely fail, in which case the sweep raises a diagnostic error naming the
stuck window instead of looping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CellProbeError, ParameterError


class StretcherWindowError(CellProbeError):
    """No position in the current window satisfied the gap inequality."""

    def __init__(self, s: int, window: tuple[int, ...], pairs_so_far: tuple):
        super().__init__(
            f"no qualifying index in the window starting at position {s}: {window}"
        )
        self.s = s
        self.window = window
        self.pairs_so_far = pairs_so_far


@dataclass(frozen=True)
class StretchPair:
    """One selected pair with the gaps that witness the inequality."""

    prev: int    # v'_{2k} (0 for the first pair)
    left: int    # v'_{2k+1}
    right: int   # v'_{2k+2}

    @property
    def left_gap(self) -> int:
        return self.left - self.prev

    @property
    def right_gap(self) -> int:
        return self.right - self.left

    def satisfies(self, c) -> bool:
        return self.left_gap >= Fraction(c) * self.right_gap


@dataclass(frozen=True)
class StretcherResult:
    v_prime: tuple[int, ...]
    w_prime: int
    pairs: tuple[StretchPair, ...]
    n: int
    c: Fraction
    t: int
    w: int
    guarantee: int            # 2*floor(w/(c*lg n))
    guarantee_ok: bool


def find_stretcher(indices, n: int, c) -> StretcherResult:
    """Run the window sweep, always taking the first qualifying position."""
    v = tuple(int(x) for x in indices)
    if any(v[k] >= v[k + 1] for k in range(len(v) - 1)):
        raise ParameterError("indices must be strictly ascending")
    if v and not (1 <= v[0] and v[-1] <= n):
        raise ParameterError(f"indices must lie in [1, {n}]")
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    cf = Fraction(c)
    if cf <= 1:
        raise ParameterError(f"c must be > 1, got {c}")
    w = len(v)
    t = math.floor(float(cf) * math.log2(n))
    guarantee = 2 * math.floor(w / (float(cf) * math.log2(n)))

    seq = (0,) + v  # sentinel v_0 := 0
    pairs: list[StretchPair] = []
    s = 0
    while t >= 1 and s <= w - t:
        for i in range(1, t):
            if seq[s + i] - seq[s] >= cf * (seq[s + i + 1] - seq[s + i]):
                pairs.append(StretchPair(prev=seq[s], left=seq[s + i], right=seq[s + i + 1]))
                s = s + i + 1
                break
        else:
            raise StretcherWindowError(
                s, window=seq[s:s + t + 1], pairs_so_far=tuple(pairs)
            )

    v_prime = tuple(x for p in pairs for x in (p.left, p.right))
    return StretcherResult(
        v_prime=v_prime,
        w_prime=len(v_prime),
        pairs=tuple(pairs),
        n=n,
        c=cf,
        t=t,
        w=w,
        guarantee=guarantee,
        guarantee_ok=len(v_prime) >= guarantee,
    )
