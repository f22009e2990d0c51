"""Non-adaptive cell-probe schemes: encoders, probe sets, decoders, restriction.

A scheme stores inputs from a domain (every bit string, or the balanced
bracket strings) in ``u`` cells over a fixed alphabet.  Query ``i`` reads only
the cells in its probe set and feeds their values, ordered by cell index, to
its decoder.  Queries are 1-indexed at the API surface; cells are 0-indexed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import accumulate, product
from typing import Callable

from .bits import Bits, validate_bits
from .brackets import catalan_count, enumerate_bal, is_balanced, scan_matches
from .errors import (
    ConsistencyError,
    DomainError,
    ParameterError,
    RangeError,
)

DOMAIN_ALL = "all_bitstrings"
DOMAIN_BAL = "balanced_brackets"

KIND_SUM = "sum"
KIND_MATCH = "match"


def prefix_sum(x: Bits, i: int) -> int:
    """Ground-truth Sum(i): number of ones among the first i bits."""
    return sum(x[:i])


def prefix_sum_all(x: Bits) -> tuple[int, ...]:
    return tuple(accumulate(x))


def match_all(x: Bits) -> tuple[int, ...]:
    """Ground-truth Match(i) for every position of a balanced string."""
    matches = scan_matches(x)
    if any(m is None for m in matches):
        raise DomainError("match oracle needs a balanced bracket string")
    return matches  # type: ignore[return-value]


class TableEncoder:
    """Encoder backed by an explicit input -> cells table."""

    __slots__ = ("table",)

    def __init__(self, table):
        self.table = {tuple(k): tuple(v) for k, v in table.items()}

    def __call__(self, x: Bits) -> tuple[int, ...]:
        try:
            return self.table[tuple(x)]
        except KeyError:
            raise DomainError(f"input {x} not present in the encoder table") from None

    def __eq__(self, other):
        return isinstance(other, TableEncoder) and self.table == other.table


class TableDecoder:
    """Decoder backed by a probe-values -> answer table.

    Value tuples that never arise from the domain default to 0, keeping the
    decoder total without bloating serialized tables.
    """

    __slots__ = ("table", "default")

    def __init__(self, table, default: int = 0):
        self.table = {tuple(k): int(v) for k, v in table.items()}
        self.default = default

    def __call__(self, values: tuple[int, ...]) -> int:
        return self.table.get(tuple(values), self.default)

    def __eq__(self, other):
        return (
            isinstance(other, TableDecoder)
            and self.table == other.table
            and self.default == other.default
        )


def _normalize_probe(cells, u: int) -> tuple[int, ...]:
    probe = tuple(sorted(set(int(c) for c in cells)))
    if probe and not (0 <= probe[0] and probe[-1] < u):
        raise ParameterError(f"probe set {probe} not within cells [0, {u})")
    return probe


@dataclass(frozen=True, eq=False)
class Scheme:
    """A non-adaptive cell-probe data structure (Enc, Q, d).

    ``probes[i-1]`` is the sorted probe set of query i; decoder i receives the
    probed values in that same (ascending cell index) order.
    """

    n: int
    u: int
    cell_alphabet: int
    domain: str
    kind: str
    probes: tuple[tuple[int, ...], ...]
    encoder: Callable[[Bits], tuple[int, ...]]
    decoders: tuple[Callable[[tuple[int, ...]], int], ...]
    builtin: tuple | None = field(default=None)

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        if self.u < 0:
            raise ParameterError(f"u must be >= 0, got {self.u}")
        if self.cell_alphabet < 2:
            raise ParameterError(f"cell alphabet must be >= 2, got {self.cell_alphabet}")
        if self.domain not in (DOMAIN_ALL, DOMAIN_BAL):
            raise ParameterError(f"unknown domain {self.domain!r}")
        if self.kind not in (KIND_SUM, KIND_MATCH):
            raise ParameterError(f"unknown query kind {self.kind!r}")
        if self.kind == KIND_MATCH and self.domain != DOMAIN_BAL:
            raise ParameterError("match queries are only defined over balanced brackets")
        if self.domain == DOMAIN_BAL and self.n % 2:
            raise ParameterError("balanced bracket domain needs even n")
        if len(self.probes) != self.n:
            raise ParameterError(f"need {self.n} probe sets, got {len(self.probes)}")
        object.__setattr__(
            self, "probes", tuple(_normalize_probe(p, self.u) for p in self.probes)
        )
        if len(self.decoders) != self.n:
            raise ParameterError(f"need {self.n} decoders, got {len(self.decoders)}")

    @property
    def q(self) -> int:
        return max((len(p) for p in self.probes), default=0)

    def domain_size(self) -> int:
        if self.domain == DOMAIN_ALL:
            return 2 ** self.n
        return catalan_count(self.n)

    def inputs(self):
        """All domain elements in lexicographic order."""
        if self.domain == DOMAIN_ALL:
            yield from product((0, 1), repeat=self.n)
        else:
            yield from enumerate_bal(self.n)

    def contains(self, x) -> bool:
        try:
            x = validate_bits(x)
        except DomainError:
            return False
        if len(x) != self.n:
            return False
        return self.domain == DOMAIN_ALL or is_balanced(x)

    def encode(self, x: Bits) -> tuple[int, ...]:
        cells = self.encoder(x)
        if len(cells) != self.u:
            raise ConsistencyError(f"encoder produced {len(cells)} cells, scheme has {self.u}")
        m = self.cell_alphabet
        if any(not (0 <= v < m) for v in cells):
            raise ConsistencyError(f"encoder output {cells} leaves the cell alphabet [0, {m})")
        return tuple(cells)

    def answer(self, x: Bits, i: int) -> int:
        cells = self.encode(x)
        probe = self.probes[i - 1]
        return self.decoders[i - 1](tuple(cells[c] for c in probe))

    def oracle_all(self, x: Bits) -> tuple[int, ...]:
        """Ground-truth answers for every query on x, per the scheme's kind."""
        if self.kind == KIND_SUM:
            return prefix_sum_all(x)
        return match_all(x)

    def __eq__(self, other):
        if not isinstance(other, Scheme):
            return NotImplemented
        header = (self.n, self.u, self.cell_alphabet, self.domain, self.kind, self.probes)
        if header != (other.n, other.u, other.cell_alphabet, other.domain, other.kind, other.probes):
            return False
        if self.builtin is not None or other.builtin is not None:
            return self.builtin == other.builtin
        return self.encoder == other.encoder and self.decoders == other.decoders


def answer_query(scheme: Scheme, x, i: int) -> int:
    """Sum(i) or Match(i) as the scheme computes it, with full input validation."""
    x = validate_bits(x)
    if not scheme.contains(x):
        raise DomainError(f"input {x} is outside the scheme's domain ({scheme.domain})")
    if not 1 <= i <= scheme.n:
        raise RangeError(f"query index {i} outside [1, {scheme.n}]")
    return scheme.answer(x, i)


def redundancy(scheme: Scheme) -> float:
    """Stored bits minus information-theoretic minimum: u*lg(alphabet) - lg|domain|."""
    size = scheme.domain_size()
    if size < 1:
        raise DomainError("scheme domain is empty")
    return scheme.u * math.log2(scheme.cell_alphabet) - math.log2(size)


@dataclass(frozen=True)
class Counterexample:
    x: Bits
    i: int
    got: int
    expected: int


@dataclass(frozen=True)
class VerificationReport:
    status: str                 # "pass" | "fail"
    checked: int                # (input, query) pairs examined
    inputs_checked: int
    failures: int
    counterexample: Counterexample | None

    @property
    def ok(self) -> bool:
        return self.status == "pass"


def verify_scheme(scheme: Scheme, oracle=None, max_inputs: int | None = None) -> VerificationReport:
    """Exhaustively compare every scheme answer against the ground truth.

    Inputs run in lexicographic order (optionally capped at ``max_inputs``),
    queries in ascending order, so a reported counterexample is the first one.
    An ``oracle(x, i)`` override replaces the built-in ground truth.
    """
    probes = scheme.probes
    decoders = scheme.decoders
    n = scheme.n
    checked = 0
    inputs_checked = 0
    failures = 0
    first: Counterexample | None = None
    for x in scheme.inputs():
        if max_inputs is not None and inputs_checked >= max_inputs:
            break
        inputs_checked += 1
        cells = scheme.encode(x)
        expected_all = None if oracle is not None else scheme.oracle_all(x)
        for i in range(1, n + 1):
            probe = probes[i - 1]
            got = decoders[i - 1](tuple(cells[c] for c in probe))
            expected = oracle(x, i) if oracle is not None else expected_all[i - 1]
            checked += 1
            if got != expected:
                failures += 1
                if first is None:
                    first = Counterexample(x=x, i=i, got=got, expected=expected)
    status = "pass" if failures == 0 else "fail"
    return VerificationReport(status, checked, inputs_checked, failures, first)


def most_likely_cell_values(scheme: Scheme, b_cells) -> tuple[tuple[int, ...], tuple[Bits, ...]]:
    """Modal value z of the cells in B over the domain, and its preimage set X.

    Ties go to the lexicographically smallest z.  The pigeonhole bound
    |X| >= |domain| / alphabet^|B| always holds for the returned X.
    """
    b_sorted = tuple(sorted(set(int(c) for c in b_cells)))
    if b_sorted and not (0 <= b_sorted[0] and b_sorted[-1] < scheme.u):
        raise ParameterError(f"cell set {b_sorted} not within [0, {scheme.u})")
    if not b_sorted:
        return (), tuple(scheme.inputs())
    counts: dict[tuple[int, ...], int] = {}
    for x in scheme.inputs():
        cells = scheme.encode(x)
        key = tuple(cells[c] for c in b_sorted)
        counts[key] = counts.get(key, 0) + 1
    best_count = max(counts.values())
    z = min(k for k, v in counts.items() if v == best_count)
    survivors = tuple(
        x for x in scheme.inputs()
        if tuple(scheme.encode(x)[c] for c in b_sorted) == z
    )
    return z, survivors


@dataclass(frozen=True)
class RestrictedScheme:
    """A scheme with the cells in B hardwired to the fixed values z.

    ``reduced_probes`` keeps original cell indices; ``renamed_probes`` maps
    them into [0, u') over the surviving cells, matching the order of
    ``restricted_encoding``.  On every surviving input the reduced decoders
    reproduce the base scheme's answers.
    """

    base: Scheme
    fixed_cells: tuple[int, ...]
    fixed_values: tuple[int, ...]
    surviving: tuple[Bits, ...]
    kept_cells: tuple[int, ...]
    reduced_probes: tuple[tuple[int, ...], ...]
    renamed_probes: tuple[tuple[int, ...], ...]

    @property
    def u_prime(self) -> int:
        return len(self.kept_cells)

    def restricted_encoding(self, x: Bits) -> tuple[int, ...]:
        cells = self.base.encode(x)
        return tuple(cells[c] for c in self.kept_cells)

    def encodings(self) -> tuple[tuple[int, ...], ...]:
        """Enc'(x) for every surviving x, in the surviving order (set Y)."""
        return tuple(self.restricted_encoding(x) for x in self.surviving)

    def decode_reduced(self, i: int, values: tuple[int, ...]) -> int:
        """Apply d'_i: merge fixed cell values back in, then run the base decoder."""
        fixed = dict(zip(self.fixed_cells, self.fixed_values))
        probe = self.base.probes[i - 1]
        it = iter(values)
        merged = tuple(fixed[c] if c in fixed else next(it) for c in probe)
        return self.base.decoders[i - 1](merged)

    def answer(self, x: Bits, i: int) -> int:
        if not 1 <= i <= self.base.n:
            raise RangeError(f"query index {i} outside [1, {self.base.n}]")
        cells = self.base.encode(x)
        values = tuple(cells[c] for c in self.reduced_probes[i - 1])
        return self.decode_reduced(i, values)


def restrict_scheme(scheme: Scheme, b_cells, z=None, survivors=None) -> RestrictedScheme:
    """Fix the cells in B to z and keep only the inputs X that agree with z.

    With z/survivors omitted they default to the most likely value and its
    preimage.  Supplying an x whose encoding disagrees with z is an error.
    """
    b_sorted = tuple(sorted(set(int(c) for c in b_cells)))
    if z is None or survivors is None:
        z, survivors = most_likely_cell_values(scheme, b_sorted)
    z = tuple(z)
    survivors = tuple(tuple(x) for x in survivors)
    if len(z) != len(b_sorted):
        raise ConsistencyError(f"{len(b_sorted)} cells fixed but {len(z)} values given")
    for x in survivors:
        cells = scheme.encode(x)
        if tuple(cells[c] for c in b_sorted) != z:
            raise ConsistencyError(f"input {x} does not have value {z} on cells {b_sorted}")
    b_set = set(b_sorted)
    kept = tuple(c for c in range(scheme.u) if c not in b_set)
    rename = {c: idx for idx, c in enumerate(kept)}
    reduced = tuple(tuple(c for c in probe if c not in b_set) for probe in scheme.probes)
    renamed = tuple(tuple(rename[c] for c in probe) for probe in reduced)
    return RestrictedScheme(
        base=scheme,
        fixed_cells=b_sorted,
        fixed_values=z,
        surviving=survivors,
        kept_cells=kept,
        reduced_probes=reduced,
        renamed_probes=renamed,
    )


def check_restriction(rs: RestrictedScheme) -> bool:
    """Exhaustive answer-preservation check over the surviving inputs."""
    for x in rs.surviving:
        for i in range(1, rs.base.n + 1):
            if rs.answer(x, i) != rs.base.answer(x, i):
                return False
    return True
