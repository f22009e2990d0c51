"""Threshold analysis for prefix sums of a high-entropy block.

Given indices p < i < j with ell = i - p and d = j - i, the analysis finds
the largest integer t such that the good prefixes still carry sum-tail mass
1/4 at t, then evaluates the three probability statements

    P_upper = Pr[sum of first j bits >= s],   s  = t + (ell+d)/2 + c^(1/3)*sqrt(d)
    P_lower = Pr[sum of first i bits <  s'],  s' = t + ell/2
    P_joint = Pr[both]

all in exact rational arithmetic.  Two routes are provided: enumeration over
an explicit distribution, and a closed binomial form for the exactly uniform
distribution on {0,1}^n, which never materializes the space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import DomainError, HypothesisError, ParameterError
from .infotheory import Distribution, conditional_entropy, entropy

_TOL = 1e-9


def binomial_point(n_trials: int, k: int) -> Fraction:
    """Pr[Bin(n_trials, 1/2) = k], exactly."""
    if n_trials < 0:
        raise ParameterError(f"trial count must be >= 0, got {n_trials}")
    if k < 0 or k > n_trials:
        return Fraction(0)
    return Fraction(math.comb(n_trials, k), 2 ** n_trials)


def binomial_tail(n_trials: int, threshold) -> Fraction:
    """Pr[Bin(n_trials, 1/2) >= threshold]; the threshold may be any real."""
    if n_trials < 0:
        raise ParameterError(f"trial count must be >= 0, got {n_trials}")
    lo = max(0, math.ceil(threshold))
    if lo > n_trials:
        return Fraction(0)
    total = sum(math.comb(n_trials, k) for k in range(lo, n_trials + 1))
    return Fraction(total, 2 ** n_trials)


def _sixth_root(m: int):
    """Exact integer sixth root of m >= 0, or None."""
    if m < 2:
        return m
    lo, hi = 1, 1 << (m.bit_length() // 6 + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** 6 < m:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** 6 == m else None


def stretch_term(c, d):
    """c^(1/3)*sqrt(d) as an exact Fraction when c^2*d^3 is a perfect 6th power."""
    if isinstance(c, Rational) and isinstance(d, Rational) and c >= 0 and d >= 0:
        m = Fraction(c) ** 2 * Fraction(d) ** 3
        num, den = _sixth_root(m.numerator), _sixth_root(m.denominator)
        if num is not None and den is not None:
            return Fraction(num, den)
    return float(c) ** (1 / 3) * math.sqrt(d)


@dataclass(frozen=True)
class PrefixSetReport:
    """The good prefixes A and the hypothesis measurements behind them."""

    A: tuple
    pr_A: Fraction
    hypothesis_entropy: float   # H(Z | Y) as measured
    hypothesis_floor: float     # ell + d - 1/c
    hypothesis_ok: bool
    member_floor: float         # ell + d - 2/c
    claim_half_ok: bool         # Pr[Y in A] >= 1/2


def good_prefix_set(dist: Distribution, p: int, j: int, c,
                    require_hypothesis: bool = True) -> PrefixSetReport:
    """Prefixes y of length p whose conditional block (p..j] keeps near-full entropy.

    Zero-probability prefixes are excluded (their conditional entropy is
    undefined and they carry no mass).  When the entropy hypothesis
    H(block | prefix) >= (j-p) - 1/c fails, either raises or reports per
    ``require_hypothesis``.
    """
    n = dist.arity
    if not 0 <= p < j <= n:
        raise ParameterError(f"need 0 <= p < j <= {n}, got p={p} j={j}")
    if float(c) <= 0:
        raise ParameterError(f"c must be positive, got {c}")
    y_coords = tuple(range(p))
    z_coords = tuple(range(p, j))
    span = j - p
    measured = conditional_entropy(dist, z_coords, y_coords)
    floor = span - 1 / float(c)
    hypothesis_ok = measured >= floor - _TOL
    if require_hypothesis and not hypothesis_ok:
        raise HypothesisError(
            f"H(block|prefix) = {measured:.9f} below the floor {floor:.9f}",
            measured=measured,
        )
    member_floor = span - 2 / float(c)
    # one pass: bucket the block distribution under each prefix value
    buckets: dict[tuple, dict[tuple, Fraction]] = {}
    weights: dict[tuple, Fraction] = {}
    for outcome, prob in dist.items():
        y = outcome[:p]
        z = outcome[p:j]
        bucket = buckets.setdefault(y, {})
        bucket[z] = bucket.get(z, 0) + prob
        weights[y] = weights.get(y, 0) + prob
    members = []
    pr_a = Fraction(0)
    for y in sorted(buckets):
        w = weights[y]
        h = entropy(Distribution({z: pz / w for z, pz in buckets[y].items()}))
        if h >= member_floor - _TOL:
            members.append(y)
            pr_a += w
    return PrefixSetReport(
        A=tuple(members),
        pr_A=pr_a,
        hypothesis_entropy=measured,
        hypothesis_floor=floor,
        hypothesis_ok=hypothesis_ok,
        member_floor=member_floor,
        claim_half_ok=pr_a >= Fraction(1, 2),
    )


@dataclass(frozen=True)
class ThresholdReport:
    t: int
    pr_at_t: Fraction        # Pr[Y in A and sum >= t]
    pr_at_next: Fraction     # Pr[Y in A and sum >= t+1], necessarily < 1/4
    pr_lower_tail: Fraction  # Pr[Y in A and sum <= t]


def find_threshold(dist: Distribution, a_set, p: int) -> ThresholdReport:
    """Largest integer t with Pr[prefix in A and prefix-sum >= t] >= 1/4."""
    members = {tuple(y) for y in a_set}
    mass_by_sum: dict[int, Fraction] = {}
    for outcome, prob in dist.items():
        y = outcome[:p]
        if y in members:
            s = sum(y)
            mass_by_sum[s] = mass_by_sum.get(s, 0) + prob
    total = sum(mass_by_sum.values(), Fraction(0))
    quarter = Fraction(1, 4)
    if total < quarter:
        raise DomainError(
            f"Pr[prefix in A] = {total} < 1/4; no threshold integer exists"
        )
    t = 0
    tail = total  # Pr[sum >= 0] over A
    while True:
        next_tail = sum((m for s, m in mass_by_sum.items() if s >= t + 1), Fraction(0))
        if next_tail < quarter:
            break
        t += 1
        tail = next_tail
    lower = sum((m for s, m in mass_by_sum.items() if s <= t), Fraction(0))
    return ThresholdReport(t=t, pr_at_t=tail, pr_at_next=next_tail, pr_lower_tail=lower)


@dataclass(frozen=True)
class EntropySumWitness:
    """Everything the threshold analysis measured, with exact probabilities."""

    p: int
    i: int
    j: int
    ell: int
    d: int
    c: object
    ratio_ok: bool              # ell >= c*d
    prefix_report: PrefixSetReport | None
    a_size: int
    pr_A: Fraction
    t: int
    threshold_report: ThresholdReport
    s: object                   # t + (ell+d)/2 + c^(1/3)*sqrt(d); Fraction when exact
    s_prime: Fraction
    s_exact: bool
    P_upper: Fraction
    P_lower: Fraction           # strict: sum < s'
    P_lower_leq: Fraction       # variant: sum <= s'
    P_joint: Fraction
    block_bound: Fraction       # Pr[sum over (i, j] >= d/2 + c^(1/3)*sqrt(d)]
    holds_upper: bool
    holds_lower: bool
    holds_joint: bool

    @property
    def holds(self) -> bool:
        return self.holds_upper and self.holds_lower and self.holds_joint

    @property
    def strict_vs_leq_differs(self) -> bool:
        return self.P_lower != self.P_lower_leq


def _validate_indices(n: int, p: int, i: int, j: int, c) -> tuple[int, int, bool]:
    if not 0 <= p < i < j <= n:
        raise ParameterError(f"need 0 <= p < i < j <= {n}, got p={p} i={i} j={j}")
    if float(c) <= 0:
        raise ParameterError(f"c must be positive, got {c}")
    ell, d = i - p, j - i
    return ell, d, ell >= float(c) * d


def _finish(p, i, j, ell, d, c, prefix_report, a_size, pr_a, threshold,
            P_upper, P_lower, P_lower_leq, P_joint, block_bound) -> EntropySumWitness:
    term = stretch_term(c, d)
    s_exact = isinstance(term, Fraction)
    s = Fraction(threshold.t) + Fraction(ell + d, 2) + term if s_exact \
        else threshold.t + (ell + d) / 2 + term
    tenth, thousandth = Fraction(1, 10), Fraction(1, 1000)
    return EntropySumWitness(
        p=p, i=i, j=j, ell=ell, d=d, c=c,
        ratio_ok=ell >= float(c) * d,
        prefix_report=prefix_report,
        a_size=a_size,
        pr_A=pr_a,
        t=threshold.t,
        threshold_report=threshold,
        s=s,
        s_prime=Fraction(threshold.t) + Fraction(ell, 2),
        s_exact=s_exact,
        P_upper=P_upper,
        P_lower=P_lower,
        P_lower_leq=P_lower_leq,
        P_joint=P_joint,
        block_bound=block_bound,
        holds_upper=P_upper >= tenth,
        holds_lower=P_lower >= tenth,
        holds_joint=P_joint <= thousandth,
    )


def entropy_sum_analysis(dist: Distribution, p: int, i: int, j: int, c,
                         require_hypothesis: bool = True) -> EntropySumWitness:
    """Exact threshold analysis by enumeration over the distribution's support."""
    ell, d, _ = _validate_indices(dist.arity, p, i, j, c)
    prefix = good_prefix_set(dist, p, j, c, require_hypothesis=require_hypothesis)
    threshold = find_threshold(dist, prefix.A, p)
    term = stretch_term(c, d)
    s_cut = Fraction(threshold.t) + Fraction(ell + d, 2) + term if isinstance(term, Fraction) \
        else threshold.t + (ell + d) / 2 + term
    sp_cut = Fraction(threshold.t) + Fraction(ell, 2)
    blk_cut = Fraction(d, 2) + term if isinstance(term, Fraction) else d / 2 + term

    P_upper = Fraction(0)
    P_lower = Fraction(0)
    P_lower_leq = Fraction(0)
    P_joint = Fraction(0)
    block_bound = Fraction(0)
    for outcome, prob in dist.items():
        sum_j = sum(outcome[:j])
        sum_i = sum(outcome[:i])
        upper = sum_j >= s_cut
        lower = sum_i < sp_cut
        if upper:
            P_upper += prob
        if lower:
            P_lower += prob
        if sum_i <= sp_cut:
            P_lower_leq += prob
        if upper and lower:
            P_joint += prob
        if sum_j - sum_i >= blk_cut:
            block_bound += prob
    return _finish(p, i, j, ell, d, c, prefix, len(prefix.A), prefix.pr_A,
                   threshold, P_upper, P_lower, P_lower_leq, P_joint, block_bound)


def entropy_sum_analysis_uniform(n: int, p: int, i: int, j: int, c) -> EntropySumWitness:
    """Same analysis for the exactly uniform distribution on {0,1}^n, in closed form.

    Every prefix is good (each conditional block is exactly uniform), so A is
    all of {0,1}^p and the three probabilities reduce to binomial sums over
    independent prefix/gap/block coordinates.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    ell, d, _ = _validate_indices(n, p, i, j, c)

    # t: largest integer with Pr[Bin(p) >= t] >= 1/4 (A carries all the mass)
    quarter = Fraction(1, 4)
    if binomial_tail(p, 0) < quarter:
        raise DomainError("impossible: the full space has mass 1")
    t = 0
    while binomial_tail(p, t + 1) >= quarter:
        t += 1
    threshold = ThresholdReport(
        t=t,
        pr_at_t=binomial_tail(p, t),
        pr_at_next=binomial_tail(p, t + 1),
        pr_lower_tail=Fraction(1) - binomial_tail(p, t + 1),
    )

    term = stretch_term(c, d)
    exact = isinstance(term, Fraction)
    s_cut = Fraction(t) + Fraction(ell + d, 2) + term if exact else t + (ell + d) / 2 + term
    sp_cut = Fraction(t) + Fraction(ell, 2)
    blk_cut = Fraction(d, 2) + term if exact else d / 2 + term

    P_upper = binomial_tail(j, s_cut)
    # strict <: complement of Pr[Bin(i) >= s'], and <= uses >= s'+ (just past s')
    P_lower = Fraction(1) - binomial_tail(i, sp_cut)
    if Fraction(sp_cut).denominator == 1:
        P_lower_leq = Fraction(1) - binomial_tail(i, int(sp_cut) + 1)
    else:
        P_lower_leq = P_lower
    # P_joint: split on the first-i sum a < s', then the d block needs >= s - a
    P_joint = Fraction(0)
    for a in range(0, i + 1):
        if not a < sp_cut:
            break
        P_joint += binomial_point(i, a) * binomial_tail(d, s_cut - a)
    block_bound = binomial_tail(d, blk_cut)
    return _finish(p, i, j, ell, d, c, None, 2 ** p, Fraction(1),
                   threshold, P_upper, P_lower, P_lower_leq, P_joint, block_bound)
