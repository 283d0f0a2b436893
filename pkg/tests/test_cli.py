import csv
import io
import json
import math
import subprocess
import sys

import pytest

from coulomb_opoly import cli
from coulomb_opoly.cli import EXACT


def run(argv, capsys):
    status = cli.main(argv)
    out, err = capsys.readouterr()
    return status, out, err


def run_json(argv, capsys):
    status, out, err = run(argv + ["--format", "json"], capsys)
    assert status == 0, err
    return json.loads(out)


def test_zeros_free_case(capsys):
    rep = run_json(["zeros", "--L", "0", "--eta", "0", "--count", "3", "--tol", "1e-10"], capsys)
    assert list(rep) == ["command", "params", "tol", "results", "error_bounds", "provenance"]
    assert rep["command"] == "zeros"
    assert rep["params"] == {"L": 0, "eta": 0}
    assert rep["results"] == pytest.approx([math.pi, -math.pi, 2 * math.pi], abs=1e-10)
    assert all(0 < e <= 1e-10 for e in rep["error_bounds"])
    assert rep["provenance"]["truncation_order"] >= 64


def test_zeta_first_entry(capsys):
    rep = run_json(["zeta", "--L", "0", "--eta", "0", "--k-max", "4"], capsys)
    assert rep["results"][0] == pytest.approx(1 / 3, rel=1e-15)
    assert rep["error_bounds"] == [EXACT] * 3


def test_bounds_contain_first_zero(capsys):
    bounds = run_json(["bounds", "--L", "0", "--eta", "1", "--s-max", "4"], capsys)["results"]
    zeros = run_json(["zeros", "--L", "0", "--eta", "1", "--count", "2", "--tol", "1e-12"], capsys)["results"]
    r1sq = min(abs(z) for z in zeros) ** 2
    for lo, hi in bounds:
        assert lo < r1sq < hi
    for (lo, hi), (lo2, hi2) in zip(bounds, bounds[1:]):
        assert lo < lo2 and hi2 < hi


@pytest.mark.parametrize(
    "argv, length",
    [
        (["dzeros", "--L", "0.5", "--eta", "0.4", "--count", "4"], 4),
        (["poly", "--L", "0.3", "--eta", "0.7", "--n", "5", "--z", "0.4"], 6),
        (["coeffs", "--L", "0.3", "--eta", "0.7", "--n", "5"], 6),
        (["moments", "--L", "0", "--eta", "1", "--n", "4"], 5),
        (["identity-suite", "--L", "1", "--eta", "0.5", "--n", "3", "--s-max", "3"], 6),
        (["bessel-oracle", "--nu", "1", "--x", "2.5"], 1),
        (["ortho-check", "--L", "0", "--eta", "1", "--count", "60", "--n", "2"], 3),
    ],
)
def test_every_command_reports(argv, length, capsys):
    rep = run_json(argv, capsys)
    assert len(rep["results"]) == length
    assert len(rep["error_bounds"]) == length


def test_every_value_has_an_error_entry(capsys):
    for argv in (["coeffs", "--n", "3"], ["zeta", "--k-max", "5"], ["bessel-oracle"]):
        rep = run_json(argv, capsys)
        for e in rep["error_bounds"]:
            assert e == EXACT or (isinstance(e, (int, float)) and e >= 0)


def test_bessel_oracle_value(capsys):
    from scipy import special

    rep = run_json(["bessel-oracle", "--nu", "1", "--x", "2.5"], capsys)
    assert rep["results"][0] == pytest.approx(special.jv(1, 2.5), rel=1e-14)


def test_csv_layout(capsys):
    status, out, _ = run(["zeta", "--L", "0", "--eta", "0", "--k-max", "4", "--format", "csv"], capsys)
    assert status == 0
    assert "\r" not in out
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["index", "value", "error_bound"]
    assert [r[0] for r in rows[1:]] == ["zeta2", "zeta3", "zeta4"]
    assert float(rows[1][1]) == pytest.approx(1 / 3)
    assert rows[1][2] == EXACT


def test_csv_flattens_pairs(capsys):
    status, out, _ = run(["bounds", "--eta", "1", "--s-max", "2", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert [r[0] for r in rows[1:]] == ["s1.0", "s1.1", "s2.0", "s2.1"]


def test_text_format(capsys):
    status, out, _ = run(["zeros", "--count", "2", "--format", "text"], capsys)
    assert status == 0
    assert out.startswith("zeros  L=0  eta=0")
    assert "truncation order" in out


def test_output_file(tmp_path, capsys):
    target = tmp_path / "zeta.json"
    status, out, _ = run(["zeta", "--k-max", "3", "--output", str(target)], capsys)
    assert status == 0 and out == ""
    assert json.loads(target.read_text())["command"] == "zeta"


def test_unknown_command(capsys):
    status, _, err = run(["frobnicate"], capsys)
    assert status == 64
    assert "usage" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["zeros", "--L", "-2"],
        ["zeros", "--L", "-1", "--eta", "0.5"],
        ["zeros", "--count", "0"],
        ["zeros", "--tol", "-1"],
        ["zeros", "--tol", "nan"],
        ["dzeros", "--L", "-0.7"],
        ["bessel-oracle", "--x", "100"],
        ["zeros", "--truncation-cap", "1"],
    ],
)
def test_domain_errors(argv, capsys):
    status, out, err = run(argv, capsys)
    assert status == 2
    assert out == "" and err.startswith("error:")


def test_unparsable_number(capsys):
    status, _, _ = run(["zeros", "--count", "three"], capsys)
    assert status == 2


def test_convergence_failure(capsys):
    status, _, err = run(["zeros", "--L", "0", "--eta", "1", "--count", "4", "--truncation-cap", "16"], capsys)
    assert status == 3
    assert "best bound" in err


def test_truncation_cap_is_restored(monkeypatch, capsys):
    monkeypatch.delenv("COULOMB_OPOLY_MAX_TRUNC", raising=False)
    run(["zeros", "--count", "2", "--truncation-cap", "4096"], capsys)
    import os

    assert "COULOMB_OPOLY_MAX_TRUNC" not in os.environ


def test_negative_values_parse(capsys):
    rep = run_json(["zeta", "--L", "-0.5", "--eta", "-1.5", "--k-max", "3"], capsys)
    assert rep["params"] == {"L": -0.5, "eta": -1.5}


def test_json_number_format():
    rep = cli.Report("zeta", 0.1, 0.0, 1e-10, [1 / 3, math.inf, 2], [EXACT, None, 0.5])
    text = cli.to_json(rep)
    assert '"results": [0.33333333333333331, null, 2]' in text
    assert '"L": 0.10000000000000001' in text
    assert text.endswith("}\n")


def test_repeated_runs_are_byte_identical():
    cmd = [sys.executable, "-m", "coulomb_opoly", "zeros", "--L", "0.3", "--eta", "0.7", "--count", "5"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
