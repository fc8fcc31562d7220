from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qqfusion import cli
from qqfusion.cli import (
    EXIT_MISMATCH,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VIOLATION,
    CliRequest,
    UsageError,
    main,
    parse_json,
    parse_kr,
    render_json,
    render_text,
    run,
)
from qqfusion.fermionic import MultiplicityResult
from qqfusion.scalars import QPoly, TheoremViolation


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_a1_decompose_all_methods(capsys):
    code, out, _ = run_cli(["decompose", "--algebra", "A1", "--kr", "1:2x2", "--method", "all"], capsys)
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "V[4]: 1 | V[2]: v | V[0]: v^2"
    assert lines[1] == "(msum, nsum, matrix, ctz agree)"


def test_d4_multiplicity(capsys):
    code, out, _ = run_cli(["multiplicity", "--algebra", "D4", "--kr", "1:1", "--kr", "3:3", "--lambda", "0,0,2,1"], capsys)
    assert code == EXIT_OK
    assert out.strip() == "v"


def test_a2_decompose_single_method(capsys):
    code, out, _ = run_cli(["decompose", "--algebra", "A2", "--kr", "1:1x2", "--kr", "2:2", "--method", "matrix"], capsys)
    assert code == EXIT_OK
    assert out.strip() == "V[2,2]: 1 | V[1,1]: v + v^2 | V[0,3]: v | V[0,0]: v^2"


def test_empty_product(capsys):
    code, out, _ = run_cli(["decompose", "--algebra", "E6"], capsys)
    assert code == EXIT_OK
    assert out.strip() == "V[0,0,0,0,0,0]: 1"


def test_json_output(capsys):
    code, out, _ = run_cli(["decompose", "--kr", "1:2x2", "--format", "json"], capsys)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["algebra"] == "A1" and data["v_means"] == "q^-1" and data["method"] == "msum"
    assert data["components"] == [
        {"lambda": [4], "coeffs": {"0": "1"}},
        {"lambda": [2], "coeffs": {"1": "1"}},
        {"lambda": [0], "coeffs": {"2": "1"}},
    ]


def test_verify(capsys):
    code, out, _ = run_cli(["verify", "--algebra", "D4", "--kr", "1:1", "--kr", "3:3"], capsys)
    assert code == EXIT_OK
    assert "(msum, nsum, matrix agree)" in out


def test_verify_json_reports_agreement(capsys):
    code, out, _ = run_cli(["verify", "--kr", "1:1x3", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == EXIT_OK and data["methods_agree"] is True and data["method"] == "all"


def test_mismatch_exit_code(capsys, monkeypatch):
    real = cli.compute

    def broken(fi, method):
        res = real(fi, method)
        if method == "matrix":
            res = MultiplicityResult(res.algebra, {**res.entries, (0,): QPoly({5: 1})}, method="matrix")
        return res

    monkeypatch.setattr(cli, "compute", broken)
    code, _out, err = run_cli(["verify", "--kr", "1:1x2"], capsys)
    assert code == EXIT_MISMATCH
    assert "MISMATCH V[0]: msum=v, nsum=v, matrix=v^5, ctz=v" in err


def test_violation_exit_code(capsys, monkeypatch):
    def explode(fi, method):
        raise TheoremViolation("forced")

    monkeypatch.setattr(cli, "compute", explode)
    code, _out, err = run_cli(["decompose", "--kr", "1:1"], capsys)
    assert code == EXIT_VIOLATION
    assert "forced" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["decompose", "--algebra", "B2"],
        ["decompose", "--kr", "1-1"],
        ["decompose", "--kr", "0:1"],
        ["decompose", "--algebra", "A2", "--kr", "3:1"],
        ["multiplicity", "--kr", "1:1"],
        ["multiplicity", "--kr", "1:1", "--lambda", "x"],
        ["decompose", "--algebra", "A2", "--method", "ctz"],
        ["qsolve", "--n-max", "0"],
    ],
)
def test_usage_errors(argv, capsys):
    code, _out, err = run_cli(argv, capsys)
    assert code == EXIT_USAGE
    assert "error" in err


def test_argparse_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main(["decompose", "--method", "bogus"])
    assert info.value.code == EXIT_USAGE


def test_help_documents_numbering(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    assert "Bourbaki" in out and "QQFUSION_THREADS" in out


def test_qsolve(capsys):
    code, out, _ = run_cli(["qsolve", "--algebra", "A1", "--n-max", "2"], capsys)
    assert code == EXIT_OK
    assert "Q[1,2] = t*Q[1,0]^-1*Q[1,1]^2 - t^{-1}*Q[1,0]^-1" in out.splitlines()
    code, out, _ = run_cli(["qsolve", "--algebra", "A2", "--n-max", "2", "--format", "json"], capsys)
    data = json.loads(out)
    assert data["algebra"] == "A2" and len(data["entries"]) == 2 * 4


def test_selftest(capsys):
    code, out, _ = run_cli(["selftest", "--algebra", "A1"], capsys)
    assert code == EXIT_OK
    assert "change of basis inverse: ok" in out
    assert "FAILED" not in out
    code, out, _ = run_cli(["selftest", "--algebra", "A2", "--format", "json"], capsys)
    assert code == EXIT_OK and json.loads(out)["ok"] is True


def test_parse_kr():
    assert parse_kr("1:2") == (1, 2, 1)
    assert parse_kr("3:1x4") == (3, 1, 4)
    for bad in ("1", "a:b", "1:2x", "1:2x0", "-1:2"):
        with pytest.raises(UsageError):
            parse_kr(bad)


def test_run_rejects_unknown_command():
    with pytest.raises(UsageError):
        run(CliRequest(command="other"), io.StringIO())


def test_render_text_of_empty_result():
    assert render_text(MultiplicityResult("A1", {})) == "0"


weights = st.lists(st.integers(0, 5), min_size=2, max_size=2).map(tuple)
polys = st.dictionaries(st.integers(0, 8), st.integers(1, 10**30), min_size=1, max_size=4).map(QPoly)


@settings(max_examples=60)
@given(st.dictionaries(weights, polys, max_size=5), st.sampled_from(["msum", "nsum", "matrix"]), st.integers(1, 9))
def test_json_round_trip(entries, method, k):
    res = MultiplicityResult("A2", entries, method=method, k_used=k)
    back = parse_json(render_json(res))
    assert back == res and back.method == method and back.k_used == k


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qqfusion", "decompose", "--kr", "1:1x2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "V[2]: 1 | V[0]: v"
