"""Scheme file format: write, read, and byte-identical round trips."""

import pytest

from cellprobe import (
    ParameterError,
    ConsistencyError,
    DomainError,
    Scheme,
    TableDecoder,
    TableEncoder,
    load_scheme,
    read_scheme,
    save_scheme,
    write_scheme,
)
from cellprobe.core import DOMAIN_ALL, KIND_SUM
from cellprobe.schemes import build_bracket_table, build_precomputed_sums, build_two_level_rank


def _table_scheme() -> Scheme:
    n = 2
    inputs = [(0, 0), (0, 1), (1, 0), (1, 1)]
    enc = TableEncoder({x: (x[0], x[0] + x[1]) for x in inputs})
    decs = (TableDecoder({(v,): v for v in range(3)}),
            TableDecoder({(v,): v for v in range(3)}))
    return Scheme(n=n, u=2, cell_alphabet=3, domain=DOMAIN_ALL, kind=KIND_SUM,
                  probes=((0,), (1,)), encoder=enc, decoders=decs)


def test_builtin_round_trip_is_byte_identical():
    sch = build_two_level_rank(8, 2, 4, 9)
    text = write_scheme(sch)
    again = write_scheme(read_scheme(text))
    assert again == text


def test_builtin_round_trip_preserves_equality():
    sch = build_precomputed_sums(6)
    assert read_scheme(write_scheme(sch)) == sch


def test_table_round_trip_is_byte_identical():
    sch = _table_scheme()
    text = write_scheme(sch)
    back = read_scheme(text)
    assert write_scheme(back) == text
    assert back == sch


def test_bracket_scheme_round_trip():
    sch = build_bracket_table(6)
    back = read_scheme(write_scheme(sch))
    assert back == sch
    for x in sch.inputs():
        assert back.oracle_all(x) == sch.oracle_all(x)


def test_save_and_load(tmp_path):
    sch = build_precomputed_sums(4)
    path = tmp_path / "p4.scm"
    save_scheme(sch, path)
    assert load_scheme(path) == sch


def test_read_scheme_rejects_header_mismatch():
    sch = build_precomputed_sums(4)
    text = write_scheme(sch).replace("q: 1", "q: 2")
    with pytest.raises(ConsistencyError):
        read_scheme(text)


def test_read_scheme_rejects_garbage():
    with pytest.raises(ParameterError):
        read_scheme("not a scheme file\n")


def test_empty_probe_line_round_trips():
    n = 1
    enc = TableEncoder({(0,): (0,), (1,): (1,)})
    dec = TableDecoder({(): 0}, default=0)
    sch = Scheme(n=n, u=1, cell_alphabet=2, domain=DOMAIN_ALL, kind=KIND_SUM,
                 probes=((),), encoder=enc, decoders=(dec,))
    text = write_scheme(sch)
    assert "  -" in text
    assert write_scheme(read_scheme(text)) == text
