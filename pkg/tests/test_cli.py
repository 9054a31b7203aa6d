import json

import pytest

from catseries.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_single_family(capsys):
    code, out, _ = run(capsys, "verify", "--family", "F8", "--m", "0..2")
    assert code == 0
    assert "summary: 3 passed, 0 failed" in out


def test_verify_json_and_report_file(capsys, tmp_path):
    path = tmp_path / "out.json"
    code, out, _ = run(capsys, "verify", "--family", "F1a,F6", "--m", "0", "--json", "--out", str(path))
    assert code == 0
    data = json.loads(out)
    assert [r["family"] for r in data["reports"]] == ["F1a", "F6"]
    assert json.loads(path.read_text())["summary"]["pass"] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "--family", "F10", "--m", "0"),
        ("verify", "--family", "F1", "--tol", "1e-60", "--prec", "128"),
        ("verify", "--m", "1"),
        ("sum", "--family", "F99", "--m", "0"),
        ("dougall", "--variant", "D-linear", "--x", "-1"),
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "--jobs", "many"])
    assert info.value.code == 2


def test_sum(capsys):
    code, out, _ = run(capsys, "sum", "--family", "F8", "--m", "0", "--eps", "1e-20", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["value"].startswith("6.36619772367581343")
    assert data["strategy"] == "alternating-accel"


def test_constants_respect_environment(capsys, monkeypatch):
    monkeypatch.setenv("CATSERIES_PREC", "128")
    code, out, _ = run(capsys, "constants", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["precision_bits"] == 128
    assert data["constants"]["PI"]["value"].startswith("3.14159265358979323846")


def test_recognize(capsys):
    code, out, _ = run(capsys, "recognize", "--family", "F7", "--m", "0", "--basis", "1,pi^-2,ln2*pi^-2", "--json")
    assert code == 0
    assert json.loads(out)["matches_closed_form"] is True


def test_binomial_sum_subcommand(capsys):
    code, out, _ = run(capsys, "dougall", "--variant", "D-alt-plain", "--x", "7/3", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["variant"] == "D-alt-plain"
