"""Exact entropy and statistical-distance toolkit over explicit finite distributions.

Probabilities are kept as exact rationals whenever the caller supplies them
that way; entropies are real-valued (bits, base-2 logs).  Inequality checks
elsewhere in the package compare against these values with a 1e-9 tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import fsum

import numpy as np

from .errors import DomainError, ParameterError, SizeError

Outcome = tuple[int, ...]

_SUM_TOL = 1e-12


def _lg(p) -> float:
    """log2 of a probability; splits Fractions to keep precision on tiny values."""
    if isinstance(p, Fraction):
        return math.log2(p.numerator) - math.log2(p.denominator)
    return math.log2(p)


class Distribution:
    """Finite probability mass function over equal-length int tuples.

    Zero-probability outcomes are dropped on construction; iteration order is
    the sorted order of outcomes, so downstream reports are deterministic.
    """

    __slots__ = ("_items",)

    def __init__(self, pmf):
        items = []
        exact = True
        for outcome, p in pmf.items():
            outcome = tuple(outcome)
            if not isinstance(p, Fraction):
                exact = False
            if p < 0:
                raise ParameterError(f"negative probability {p} for {outcome}")
            if p == 0:
                continue
            items.append((outcome, p))
        if not items:
            raise ParameterError("distribution needs at least one outcome of positive mass")
        arity = len(items[0][0])
        if any(len(o) != arity for o, _ in items):
            raise DomainError("distribution outcomes must share one arity")
        total = sum(p for _, p in items)
        if exact:
            if total != 1:
                raise ParameterError(f"probabilities sum to {total}, expected exactly 1")
        elif abs(float(total) - 1.0) > _SUM_TOL:
            raise ParameterError(f"probabilities sum to {float(total)}, expected 1")
        items.sort(key=lambda kv: kv[0])
        self._items = tuple(items)

    @classmethod
    def uniform(cls, outcomes) -> "Distribution":
        outcomes = [tuple(o) for o in outcomes]
        if len(set(outcomes)) != len(outcomes):
            raise ParameterError("uniform support contains repeated outcomes")
        p = Fraction(1, len(outcomes))
        return cls({o: p for o in outcomes})

    @classmethod
    def from_counts(cls, counts) -> "Distribution":
        total = sum(counts.values())
        return cls({tuple(o): Fraction(c, total) for o, c in counts.items() if c})

    def items(self):
        return self._items

    def support(self) -> tuple[Outcome, ...]:
        return tuple(o for o, _ in self._items)

    def prob(self, outcome) -> Fraction:
        outcome = tuple(outcome)
        for o, p in self._items:
            if o == outcome:
                return p
        return Fraction(0)

    @property
    def arity(self) -> int:
        return len(self._items[0][0])

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other) -> bool:
        return isinstance(other, Distribution) and self._items == other._items

    def __repr__(self) -> str:
        return f"Distribution({len(self._items)} outcomes over {self.arity} coordinates)"

    def is_uniform(self) -> bool:
        first = self._items[0][1]
        return all(p == first for _, p in self._items)

    def marginal(self, coords) -> "Distribution":
        coords = tuple(coords)
        acc: dict[Outcome, object] = {}
        for o, p in self._items:
            key = tuple(o[c] for c in coords)
            acc[key] = acc.get(key, 0) + p
        return Distribution(acc)

    def given(self, coords, value) -> "Distribution":
        """Conditional distribution (over full outcomes) given coords == value."""
        coords = tuple(coords)
        value = tuple(value)
        hits = [(o, p) for o, p in self._items if tuple(o[c] for c in coords) == value]
        if not hits:
            raise DomainError(f"conditioning event {value} on coords {coords} has probability 0")
        total = sum(p for _, p in hits)
        return Distribution({o: p / total for o, p in hits})

    def integer_counts(self):
        """(rows, counts, denom) with counts/denom == probabilities, all exact ints."""
        denom = 1
        for _, p in self._items:
            if not isinstance(p, Fraction):
                raise ParameterError("integer_counts requires exact rational probabilities")
            denom = denom * p.denominator // math.gcd(denom, p.denominator)
        rows = [o for o, _ in self._items]
        counts = [int(p * denom) for _, p in self._items]
        return rows, counts, denom


def entropy(dist: Distribution) -> float:
    """Shannon entropy in bits."""
    return fsum(-float(p) * _lg(p) for _, p in dist.items())


def conditional_entropy(dist: Distribution, target, given) -> float:
    """H(target-coords | given-coords), computed from the definition.

    An empty ``given`` yields the unconditional entropy of the target marginal.
    """
    target = tuple(target)
    given = tuple(given)
    if not given:
        return entropy(dist.marginal(target))
    groups: dict[Outcome, dict[Outcome, object]] = {}
    weights: dict[Outcome, object] = {}
    for o, p in dist.items():
        g = tuple(o[c] for c in given)
        t = tuple(o[c] for c in target)
        bucket = groups.setdefault(g, {})
        bucket[t] = bucket.get(t, 0) + p
        weights[g] = weights.get(g, 0) + p
    parts = []
    for g in sorted(groups):
        w = weights[g]
        h = fsum(-float(p / w) * _lg(p / w) for p in groups[g].values())
        parts.append(float(w) * h)
    return fsum(parts)


def tv_distance(d1: Distribution, d2: Distribution):
    """Total variation distance (1/2 L1); exact when both pmfs are exact."""
    if d1.arity != d2.arity:
        raise DomainError(f"cannot compare supports of arity {d1.arity} and {d2.arity}")
    p1 = dict(d1.items())
    p2 = dict(d2.items())
    keys = sorted(set(p1) | set(p2))
    diff = sum(abs(p1.get(k, 0) - p2.get(k, 0)) for k in keys)
    return diff / 2


def tv_from_uniform(dist: Distribution, space_size: int):
    """TV distance to the uniform distribution on a space of ``space_size`` points.

    Outcomes outside the support contribute only missing mass, so the space is
    never materialised.
    """
    if space_size < len(dist):
        raise ParameterError("space smaller than the support it must contain")
    inv = Fraction(1, space_size)
    present = sum(abs(p - inv) for _, p in dist.items())
    missing = (space_size - len(dist)) * inv
    return (present + missing) / 2


@dataclass(frozen=True)
class HighEntropyCheck:
    """Outcome of the near-uniformity test for a high-entropy distribution."""

    entropy: float
    floor: float            # lg|S| - alpha
    precondition_ok: bool
    distance: object        # Fraction | None
    bound: float            # 4 * sqrt(alpha)
    holds: bool


def check_high_entropy_uniform(dist: Distribution, space, alpha: float) -> HighEntropyCheck:
    """Check that entropy >= lg|S| - alpha forces TV-closeness 4*sqrt(alpha) to uniform.

    ``space`` is the ambient set S the distribution lives in.  When the entropy
    precondition fails the check reports that instead of a distance.
    """
    if alpha < 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha}")
    space = {tuple(s) for s in space}
    if not set(dist.support()) <= space:
        raise DomainError("distribution support is not contained in the given space")
    h = entropy(dist)
    floor = math.log2(len(space)) - alpha
    if h < floor - 1e-9:
        return HighEntropyCheck(h, floor, False, None, 4 * math.sqrt(alpha), False)
    dist_tv = tv_from_uniform(dist, len(space))
    bound = 4 * math.sqrt(alpha)
    return HighEntropyCheck(h, floor, True, dist_tv, bound, float(dist_tv) <= bound + 1e-9)


# ---------------------------------------------------------------------------
# good-index extraction


@dataclass(frozen=True)
class GoodSetReport:
    """Indices that survive an entropy/closeness filter, plus the bookkeeping.

    ``good`` uses 1-based indices (block k, or the k-th kept cell column).
    ``scores`` holds the measured quantity each index was judged by: the
    conditional entropy for blocks, the marginal entropy deficiency for cells.
    """

    kind: str
    good: tuple[int, ...]
    deficiency: float
    parameter: float
    scores: tuple[float, ...]
    size_bound: float
    size_bound_ok: bool


def validate_blocks(sizes, n: int) -> tuple[int, ...]:
    sizes = tuple(int(s) for s in sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ParameterError(f"block sizes must be positive, got {sizes}")
    if sum(sizes) != n:
        raise ParameterError(f"block sizes {sizes} sum to {sum(sizes)}, expected {n}")
    return sizes


def as_uniform_distribution(x) -> Distribution:
    if isinstance(x, Distribution):
        if not x.is_uniform():
            raise ParameterError("expected a uniform distribution over the input set")
        return x
    return Distribution.uniform(x)


def good_blocks(x_set, sizes, eps) -> GoodSetReport:
    """Blocks whose conditional entropy given earlier blocks is nearly full.

    Input is (the uniform distribution over) a set X of n-bit strings and a
    partition of the n coordinates into consecutive blocks.  Block i is good
    when H(Z_i | Z_1..Z_{i-1}) >= s_i - eps, measured exactly from X.  At
    least k - a/eps blocks are good, where a = n - lg|X|.
    """
    dist = as_uniform_distribution(x_set)
    eps = float(eps)
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    n = dist.arity
    sizes = validate_blocks(sizes, n)
    a = n - math.log2(len(dist))
    scores = []
    good = []
    start = 0
    for k, size in enumerate(sizes, start=1):
        block = tuple(range(start, start + size))
        prefix = tuple(range(start))
        h = conditional_entropy(dist, block, prefix)
        scores.append(h)
        if h >= size - eps:
            good.append(k)
        start += size
    size_bound = len(sizes) - a / eps
    return GoodSetReport(
        kind="blocks",
        good=tuple(good),
        deficiency=a,
        parameter=eps,
        scores=tuple(scores),
        size_bound=size_bound,
        size_bound_ok=len(good) >= size_bound - 1e-9,
    )


class CountMatrix:
    """Integer-count view of an exact distribution, for subset statistics.

    Rows are the support outcomes, ``counts[i]/denom`` their probabilities.
    All derived quantities (joint counts, TV distances) stay exact.
    """

    def __init__(self, dist: Distribution):
        rows, counts, denom = dist.integer_counts()
        self.rows = np.asarray(rows, dtype=np.int64)
        self.counts = np.asarray(counts, dtype=np.int64)
        self.denom = denom
        self.width = self.rows.shape[1] if self.rows.ndim == 2 else 0

    def joint_counts(self, cols, alphabet: int):
        """Sorted (key, count) pairs for the projection onto ``cols``."""
        cols = tuple(cols)
        if alphabet ** len(cols) >= 2 ** 62:
            # folded keys would overflow int64; group through Python ints
            grouped: dict[int, int] = {}
            for row, cnt in zip(self.rows.tolist(), self.counts.tolist()):
                key = 0
                for c in cols:
                    key = key * alphabet + row[c]
                grouped[key] = grouped.get(key, 0) + cnt
            keys = sorted(grouped)
            return keys, [grouped[k] for k in keys]
        key = np.zeros(len(self.rows), dtype=np.int64)
        for c in cols:
            key = key * alphabet + self.rows[:, c]
        uniq, inverse = np.unique(key, return_inverse=True)
        acc = np.zeros(len(uniq), dtype=np.int64)
        np.add.at(acc, inverse, self.counts)
        return uniq, acc

    def tv_uniform(self, cols, alphabet: int) -> Fraction:
        """Exact TV distance between the projection onto ``cols`` and uniform."""
        cols = tuple(cols)
        space = alphabet ** len(cols)
        if not cols:
            return Fraction(0)
        _, acc = self.joint_counts(cols, alphabet)
        if isinstance(acc, list):
            present = sum(abs(cnt * space - self.denom) for cnt in acc)
        elif space * self.denom < 2 ** 62:
            present = int(np.abs(acc * space - self.denom).sum())
        else:
            present = sum(abs(cnt * space - self.denom) for cnt in acc.tolist())
        missing = (space - len(acc)) * self.denom
        return Fraction(present + missing, 2 * self.denom * space)

    def column_entropy(self, col: int) -> float:
        _, acc = self.joint_counts((col,), 1 + int(self.rows[:, col].max(initial=0)))
        d = self.denom
        return fsum(-(c / d) * math.log2(c / d) for c in acc.tolist())


def good_cells(dist: Distribution, q: int, eta, alphabet: int, max_subsets: int = 200_000) -> GoodSetReport:
    """Cell columns G such that every q-subset of G is jointly eta-close to uniform.

    Builds G greedily: all q-subsets are tested exactly once; while any subset
    fails, the worst index among those appearing in failing subsets (largest
    marginal entropy deficiency, then most failures, then smallest index) is
    dropped, which only ever removes subsets from consideration.  The lemma's
    floor |G| >= u' - 16*q*a/eta^2 is reported, not enforced.
    """
    if q < 1:
        raise ParameterError(f"subset size must be >= 1, got {q}")
    if alphabet < 2:
        raise ParameterError(f"alphabet must be >= 2, got {alphabet}")
    eta_f = Fraction(eta) if not isinstance(eta, Fraction) else eta
    if eta_f <= 0:
        raise ParameterError(f"eta must be positive, got {eta}")
    u = dist.arity
    n_subsets = math.comb(u, q)
    if n_subsets > max_subsets:
        raise SizeError(f"{n_subsets} subsets of size {q} exceed the exhaustive limit {max_subsets}")
    cm = CountMatrix(dist)
    a = u * math.log2(alphabet) - math.log2(len(dist))
    deficiency = tuple(math.log2(alphabet) - cm.column_entropy(c) for c in range(u))

    failing = []
    for subset in combinations(range(u), q):
        if cm.tv_uniform(subset, alphabet) > eta_f:
            failing.append(subset)

    alive = set(range(u))
    while failing:
        involved: dict[int, int] = {}
        for subset in failing:
            for c in subset:
                involved[c] = involved.get(c, 0) + 1
        worst = max(involved, key=lambda c: (deficiency[c], involved[c], -c))
        alive.discard(worst)
        failing = [s for s in failing if worst not in s]

    good = tuple(c + 1 for c in sorted(alive))
    size_bound = u - 16 * q * a / float(eta_f) ** 2
    return GoodSetReport(
        kind="cells",
        good=good,
        deficiency=a,
        parameter=float(eta_f),
        scores=deficiency,
        size_bound=size_bound,
        size_bound_ok=len(good) >= size_bound - 1e-9,
    )
