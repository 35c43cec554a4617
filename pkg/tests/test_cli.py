import csv
import io
import json
from fractions import Fraction

import pytest

from tchar.cli import EXIT_INPUT, EXIT_NO, EXIT_OK, EXIT_UNDETERMINED, main
from tchar.models import parse_element, torus_value


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


@pytest.mark.parametrize("argv,code", [
    (["--annihilator", "Z:1"], EXIT_OK),
    (["--annihilator", "Z(2):1"], EXIT_OK),
    (["--annihilator", "Z(2):1", "--gdelta", "--proper"], EXIT_NO),
    (["--annihilator", "Z(2):omega"], EXIT_OK),
    (["--annihilator", "Z(2):1", "--proper"], EXIT_NO),
    (["--annihilator", "Z:1 + Z(2):1", "--gdelta", "--proper"], EXIT_OK),
    (["--annihilator", "Z(2):3 + Z(3):omega", "--gdelta", "--proper"], EXIT_NO),
    (["--annihilator", "Z:2", "--mode", "connected"], EXIT_OK),
    (["--annihilator", "Zp(2,inf):1", "--mode", "connected"], EXIT_NO),
    (["--annihilator", "Z(4):1 + Z:1", "--mode", "connected"], EXIT_NO),
    (["--annihilator", "Z(2:1"], EXIT_INPUT),
])
def test_decide_exit_codes(capsys, argv, code):
    assert run(capsys, "decide", *argv)[0] == code


def test_decide_reports_column(capsys):
    code, _, err = run(capsys, "decide", "--annihilator", "Z:1 + Z(2):x")
    assert code == EXIT_INPUT and "column" in err


def test_decide_reads_file(capsys, tmp_path):
    f = tmp_path / "d.txt"
    f.write_text("# annihilator\nZ(2):omega +\n  Z(3):1\n")
    code, out, _ = run(capsys, "decide", "--annihilator", str(f))
    assert code == EXIT_OK and records(out)


TORUS = "model=torus bases=arith(100,100)"


def test_member_nonmember(capsys):
    code, out, _ = run(capsys, "member", "--element",
                       "model=product bases=geom(2,2) tail=scaledfloor(1/250)")
    (rec,) = records(out)
    assert code == EXIT_NO and rec["outcome"] == "NonMember" and rec["limit"] == "1/250"


def test_member_with_oracle(capsys):
    code, out, _ = run(capsys, "member", "--oracle", "--element", f"{TORUS} prefix=[1,2,3]")
    (rec,) = records(out)
    assert code == EXIT_OK and rec["outcome"] == "Member" and rec["oracle"] == "Member-consistent"


def test_member_undetermined(capsys):
    code, _, _ = run(capsys, "member", "--element", "model=padic p=2 nk=squares tail=periodic([1,0])")
    assert code == EXIT_UNDETERMINED


def test_member_model_mismatch(capsys):
    code, _, err = run(capsys, "member", "--element", f"{TORUS} prefix=[1]",
                       "--sequence", "model=product bases=geom(2,2)")
    assert code == EXIT_INPUT and "differ" in err


def test_member_rejects_multiline(capsys, tmp_path):
    f = tmp_path / "x.txt"
    f.write_text(f"{TORUS} prefix=[1]\n{TORUS} prefix=[2]\n")
    assert run(capsys, "member", "--element", str(f))[0] == EXIT_INPUT


def test_horizon_flag_beats_env(capsys, monkeypatch):
    monkeypatch.setenv("TCHAR_HORIZON", "32")
    _, out, _ = run(capsys, "member", "--element", f"{TORUS} tail=scaledfloor(1/250)")
    assert records(out)[0]["trace_len"] == 32
    _, out, _ = run(capsys, "member", "--horizon", "64", "--element", f"{TORUS} tail=scaledfloor(1/250)")
    assert records(out)[0]["trace_len"] == 64


@pytest.mark.parametrize("value", ["0", "-5", "abc"])
def test_bad_horizon_env(capsys, monkeypatch, value):
    monkeypatch.setenv("TCHAR_HORIZON", value)
    assert run(capsys, "member", "--element", f"{TORUS} prefix=[1]")[0] == EXIT_INPUT


def test_bad_tolerance(capsys):
    assert run(capsys, "member", "--tol", "0", "--element", f"{TORUS} prefix=[1]")[0] == EXIT_INPUT


def test_pair_torus(capsys):
    code, out, _ = run(capsys, "pair", "--model", "torus", "--bases", "geom(2,2)",
                       "--char", "1", "--element", "[1,1]")
    assert code == EXIT_OK and records(out)[0]["angle"] == "5/8"


def test_pair_pretty(capsys):
    _, out, _ = run(capsys, "pair", "--format", "pretty", "--model", "product", "--bases", "geom(2,2)",
                    "--char", "[1,1]", "--element", "[1,3]")
    assert out.strip() == "1/4"


def test_pair_needs_bases(capsys):
    assert run(capsys, "pair", "--model", "torus", "--char", "1", "--element", "[1]")[0] == EXIT_INPUT


def test_encode_round_trip(capsys):
    code, out, _ = run(capsys, "encode", "--bases", "arith(2,1)", "--value", "5/12")
    (rec,) = records(out)
    assert code == EXIT_OK
    assert torus_value(parse_element(rec["element"])) == Fraction(5, 12)


def test_encode_non_terminating(capsys):
    assert run(capsys, "encode", "--bases", "geom(2,2)", "--value", "1/3")[0] == EXIT_INPUT


def test_witness_family_b_to_file(capsys, tmp_path):
    out_file = tmp_path / "w.jsonl"
    code, _, _ = run(capsys, "witness", "--family", "B", "--p", "3", "--scale", "10",
                     "--out", str(out_file))
    rows = records(out_file.read_text())
    assert code == EXIT_OK and rows[-1]["summary"] and all(r["pass"] for r in rows)


def test_witness_auto(capsys):
    code, out, _ = run(capsys, "witness", "--descriptor", "Zp(2,inf):1", "--scale", "10")
    assert code == EXIT_OK and records(out)[-1]["family"] == "B"


@pytest.mark.parametrize("argv", [["--descriptor", "Z(2):omega"], ["--family", "A", "--epsilon", "1/5"],
                                  []])
def test_witness_input_errors(capsys, argv):
    assert run(capsys, "witness", *argv)[0] == EXIT_INPUT


def test_witness_csv(capsys):
    code, out, err = run(capsys, "witness", "--family", "C", "--scale", "8", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and rows and set(rows[0]) >= {"check", "bound", "enclosure", "pass"}
    assert json.loads(err.splitlines()[0])["summary"] is True


def test_verify_sandwich(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "sandwich", "--samples", "500")
    (rec,) = records(out)
    assert code == EXIT_OK and rec["cases"] == 500 and rec["pass"]
