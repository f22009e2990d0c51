"""Bracket matching, Catalan enumeration, and unmatched-bracket walk probabilities."""

import math
from fractions import Fraction

import pytest

from cellprobe import (
    DomainError,
    ParameterError,
    RangeError,
    SizeError,
    catalan_count,
    enumerate_bal,
    is_balanced,
    match_index,
    scan_matches,
    unmatched_close_prob,
    unmatched_open_prob,
)


def test_is_balanced():
    assert is_balanced(())
    assert is_balanced((1, 0, 1, 1, 0, 0))
    assert not is_balanced((0, 1))
    assert not is_balanced((1, 1, 0))
    with pytest.raises(DomainError):
        is_balanced((1, 2, 0))


def test_scan_matches_balanced_and_partial():
    # "(()())" with 1 = open
    assert scan_matches((1, 1, 0, 1, 0, 0)) == (6, 3, 2, 5, 4, 1)
    # unmatched brackets map to None
    assert scan_matches((0, 1)) == (None, None)
    assert scan_matches((1, 0, 1)) == (2, 1, None)


def test_match_index_and_its_errors():
    bits = (1, 1, 0, 1, 0, 0)
    assert match_index(bits, 1) == 6
    assert match_index(bits, 6) == 1
    assert match_index(bits, 2) == 3
    with pytest.raises(DomainError):
        match_index((1, 1, 0), 1)
    with pytest.raises(RangeError):
        match_index(bits, 0)
    with pytest.raises(RangeError):
        match_index(bits, 7)


def test_catalan_count_matches_enumeration():
    assert [catalan_count(n) for n in (2, 4, 6, 8)] == [1, 2, 5, 14]
    for n in range(0, 14, 2):
        strings = enumerate_bal(n)
        assert len(strings) == catalan_count(n)
        assert all(is_balanced(s) for s in strings)
        assert strings == sorted(strings)
        assert len(set(strings)) == len(strings)


def test_enumerate_bal_conventions():
    assert enumerate_bal(0) == [()]
    with pytest.raises(ParameterError):
        enumerate_bal(3)
    with pytest.raises(ParameterError):
        catalan_count(-2)
    with pytest.raises(SizeError):
        enumerate_bal(30)


def _brute_open(d: int) -> Fraction:
    hits = 0
    for x in range(2 ** d):
        bits = tuple((x >> k) & 1 for k in range(d))
        if bits[0] == 1 and scan_matches(bits)[0] is None:
            hits += 1
    return Fraction(hits, 2 ** d)


def _brute_close(d: int) -> Fraction:
    hits = 0
    for x in range(2 ** d):
        bits = tuple((x >> k) & 1 for k in range(d))
        if bits[-1] == 0 and scan_matches(bits)[-1] is None:
            hits += 1
    return Fraction(hits, 2 ** d)


def test_unmatched_probabilities_match_brute_force():
    for d in range(1, 13):
        assert unmatched_open_prob(d) == _brute_open(d)
        assert unmatched_close_prob(d) == _brute_close(d)


def test_unmatched_frozen_values():
    assert unmatched_open_prob(1) == Fraction(1, 2)
    assert unmatched_open_prob(3) == Fraction(1, 4)
    assert unmatched_open_prob(4) == Fraction(3, 16)
    with pytest.raises(ParameterError):
        unmatched_open_prob(0)


def test_open_equals_close_by_reversal():
    for d in range(1, 15):
        assert unmatched_open_prob(d) == unmatched_close_prob(d)


def test_walk_identity_and_sqrt_floor():
    minimum = None
    for d in range(1, 21):
        p = unmatched_open_prob(d)
        assert p == Fraction(math.comb(d - 1, (d - 1) // 2), 2 ** d)
        if d >= 4:
            val = math.sqrt(d) * float(p)
            minimum = val if minimum is None else min(minimum, val)
    assert minimum == pytest.approx(0.375, abs=1e-12)
    assert 4 * unmatched_open_prob(4) ** 2 >= Fraction(9, 64)
