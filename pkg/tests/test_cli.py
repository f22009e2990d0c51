"""End-to-end command-line behaviour: output shape and exit codes."""

import pytest

from cellprobe.cli import OUTDIR_ENV, main
from cellprobe.core import DOMAIN_ALL, KIND_SUM, Scheme, TableDecoder, TableEncoder
from cellprobe.schemeio import load_scheme, save_scheme
from cellprobe.schemes import build_bracket_table, build_precomputed_sums


@pytest.fixture
def good_scheme(tmp_path):
    path = tmp_path / "precomputed_n8.scm"
    save_scheme(build_precomputed_sums(8, 9), str(path))
    return str(path)


@pytest.fixture
def bad_scheme(tmp_path):
    # one cell holds the input verbatim; the second decoder is off at x=00
    enc = TableEncoder({(0, 0): (0,), (0, 1): (1,), (1, 0): (2,), (1, 1): (3,)})
    dec1 = TableDecoder({(0,): 0, (1,): 0, (2,): 1, (3,): 1})
    dec2 = TableDecoder({(0,): 1, (1,): 1, (2,): 1, (3,): 2})
    scheme = Scheme(n=2, u=1, cell_alphabet=4, domain=DOMAIN_ALL, kind=KIND_SUM,
                    probes=((0,), (0,)), encoder=enc, decoders=(dec1, dec2))
    path = tmp_path / "bad.scm"
    save_scheme(scheme, str(path))
    return str(path)


def test_verify_pass(good_scheme, capsys):
    assert main(["verify", "--scheme", good_scheme]) == 0
    out = capsys.readouterr().out
    assert "status: pass" in out
    assert "inputs_checked: 256" in out


def test_verify_reports_first_counterexample(bad_scheme, capsys):
    assert main(["verify", "--scheme", bad_scheme]) == 1
    out = capsys.readouterr().out
    assert "status: fail" in out
    assert "counterexample_x: 00" in out
    assert "counterexample_i: 2" in out
    assert "counterexample_got: 1" in out
    assert "counterexample_expected: 0" in out


def test_verify_machine_format(good_scheme, capsys):
    assert main(["verify", "--scheme", good_scheme, "--format", "machine"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "status=pass" in lines
    assert all("=" in line for line in lines)


def test_redundancy_output(good_scheme, capsys):
    assert main(["redundancy", "--scheme", good_scheme]) == 0
    out = capsys.readouterr().out
    assert "domain_size: 256" in out


def test_brackets_count_prints_bare_number(capsys):
    assert main(["brackets", "count", "--n", "8"]) == 0
    assert capsys.readouterr().out == "14\n"
    assert main(["brackets", "count", "--n", "8", "--format", "machine"]) == 0
    assert capsys.readouterr().out == "count=14\n"


def test_brackets_match_and_walk(capsys):
    assert main(["brackets", "match", "--x", "110100", "--i", "1"]) == 0
    assert "match: 6" in capsys.readouterr().out
    assert main(["brackets", "walk", "--d", "4", "--format", "machine"]) == 0
    out = capsys.readouterr().out
    assert "open_prob=3/16" in out
    assert "close_prob=3/16" in out


def test_brackets_list(capsys):
    assert main(["brackets", "list", "--n", "4"]) == 0
    assert capsys.readouterr().out == "1010\n1100\n"


def test_separator_prefix_mode(good_scheme, capsys):
    assert main(["separator", "--scheme", good_scheme, "--gap", "4"]) == 0
    out = capsys.readouterr().out
    assert "mode: prefix" in out
    assert "check.w_floor: yes" in out
    assert "check.b_small: yes" in out


def test_stretcher_ok_and_stuck(capsys):
    ok = main(["stretcher", "--indices", ",".join(str(k) for k in range(1, 21)),
               "--n", "256", "--c", "2"])
    assert ok == 0
    out = capsys.readouterr().out
    assert "status: ok" in out
    assert "v_prime: (2, 3, 5, 6)" in out

    stuck = main(["stretcher", "--indices", "1,2,4,8", "--n", "16", "--c", "11/10"])
    assert stuck == 1
    out = capsys.readouterr().out
    assert "status: stuck" in out
    assert "window: (0, 1, 2, 4, 8)" in out


def test_entropy_command(tmp_path, capsys):
    dist = tmp_path / "d.dist"
    dist.write_text(
        "# two uniform bits\n0,0 1/4\n0,1 1/4\n1,0 1/4\n1,1 1/4\n", encoding="utf-8")
    assert main(["entropy", "--dist", str(dist)]) == 0
    assert "entropy: 2" in capsys.readouterr().out
    assert main(["entropy", "--dist", str(dist), "--target", "0", "--given", "1"]) == 0
    assert "conditional_entropy: 1" in capsys.readouterr().out


def test_goodset_blocks_mode(tmp_path, capsys):
    xfile = tmp_path / "x.bits"
    rows = [f"0{a}{b}{c}" for a in "01" for b in "01" for c in "01"]
    xfile.write_text("\n".join(rows) + "\n", encoding="utf-8")
    code = main(["goodset", "blocks", "--x", str(xfile),
                 "--sizes", "1,1,1,1", "--eps", "1/2"])
    assert code == 0
    out = capsys.readouterr().out
    assert "good: (2, 3, 4)" in out
    assert "size_bound_ok: yes" in out


def test_goodset_missing_flags_is_usage_error(capsys):
    assert main(["goodset", "cells"]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "--dist" in err


def test_entropy_sum_uniform(capsys):
    code = main(["entropy-sum", "--uniform", "261", "--p", "1",
                 "--i", "257", "--j", "261", "--c", "64", "--format", "machine"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert "t=1" in lines
    assert "s=139" in lines
    assert "P_lower=1/2" in lines
    assert "holds=yes" in lines


def test_pipeline_writes_report_to_outdir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTDIR_ENV, str(tmp_path))
    scheme_path = tmp_path / "bracket_n8.scm"
    save_scheme(build_bracket_table(8), str(scheme_path))
    code = main(["pipeline", "--scheme", str(scheme_path), "--c", "4",
                 "--out", "report.txt"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("written: ")
    report = (tmp_path / "report.txt").read_text(encoding="utf-8")
    assert "verdict:" in report


def test_pipeline_truncation_exits_nonzero(good_scheme, capsys):
    code = main(["pipeline", "--scheme", good_scheme, "--c", "2"])
    assert code == 1
    assert "truncated: stretcher" in capsys.readouterr().out


def test_build_scheme_roundtrip(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTDIR_ENV, str(tmp_path))
    code = main(["build-scheme", "--name", "two_level_rank", "--n", "8",
                 "--alphabet", "9", "--param", "block=2", "--param", "superblock=4"])
    assert code == 0
    out = capsys.readouterr().out
    assert f"written: {tmp_path}/two_level_rank_n8.scm" in out
    rebuilt = load_scheme(str(tmp_path / "two_level_rank_n8.scm"))
    assert rebuilt.n == 8 and rebuilt.u == 10
    assert main(["verify", "--scheme", str(tmp_path / "two_level_rank_n8.scm")]) == 0
    capsys.readouterr()


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_parameter_errors_exit_two(good_scheme, capsys):
    assert main(["stretcher", "--indices", "4,2", "--n", "8", "--c", "2"]) == 2
    assert capsys.readouterr().err.startswith("error:")
    assert main(["pipeline", "--scheme", good_scheme, "--c", "1"]) == 2
    assert capsys.readouterr().err.startswith("error:")
    assert main(["verify", "--scheme", "/nonexistent/path.scm"]) == 2
    assert capsys.readouterr().err.startswith("error:")
