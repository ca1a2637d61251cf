import csv
import json
import subprocess
import sys

import pytest

from equiframe.cli import SWEEP_HEADER, main


def test_build_and_verify_5(tmp_path, capsys):
    out = tmp_path / "f5.json"
    assert main(["build", "-p", "5", "-m", "2", "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert (data["d"], data["N"], data["p"], data["m"]) == (4, 5, 5, 2)
    assert len(data["synthesis"]) == 4 and len(data["synthesis"][0]) == 5
    assert data["synthesis"][0][0] == pytest.approx([0.5, 0.0])
    assert [z[0] for z in data["diag_unitary"]] == [1.0, -1.0, -1.0, 1.0]
    assert data["companion_angle_sq"] == pytest.approx(5 / 16, rel=1e-12)
    capsys.readouterr()
    assert main(["verify", str(out)]) == 0
    text = capsys.readouterr().out
    assert "FAIL" not in text and "5/16" in text and "1/16" in text


def test_build_17_8(tmp_path, capsys):
    out = tmp_path / "f17.json"
    assert main(["build", "-p", "17", "-m", "8", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["companion_angle_sq"] == pytest.approx(17 / 256, rel=1e-12)
    assert main(["verify", str(out)]) == 0
    assert "17/256" in capsys.readouterr().out


def test_build_rejects_composite(tmp_path):
    out = tmp_path / "bad.json"
    assert main(["build", "-p", "4", "-m", "2", "-o", str(out)]) == 2
    assert not out.exists()
    assert main(["build", "-p", "7", "-m", "4", "-o", str(out)]) == 2
    assert not out.exists()


def test_verify_perturbed_fails(tmp_path):
    out = tmp_path / "f5.json"
    main(["build", "-p", "5", "-o", str(out)])
    data = json.loads(out.read_text())
    data["companion"][1][2][0] += 1e-3
    out.write_text(json.dumps(data))
    assert main(["verify", str(out)]) == 1


def test_verify_malformed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", str(bad)]) == 2
    bad.write_text(json.dumps({"d": 4, "N": 5}))
    assert main(["verify", str(bad)]) == 2
    assert main(["verify", str(tmp_path / "missing.json")]) == 2


def test_search_single(tmp_path):
    out = tmp_path / "s5.json"
    assert main(["search", "-n", "5", "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["n"] == 5 and len(data["hits"]) == 1
    assert data["hits"][0]["vector"] == [0, 1, -1, -1, 1]
    out15 = tmp_path / "s15.json"
    assert main(["search", "-n", "15", "-o", str(out15)]) == 0
    assert json.loads(out15.read_text())["hits"] == []


def test_search_range(tmp_path, capsys):
    out = tmp_path / "range.json"
    assert main(["search", "--range", "3..23", "-o", str(out)]) == 0
    table = json.loads(out.read_text())["table"]
    assert [r["n"] for r in table] == list(range(3, 24))
    assert all(r["ok"] for r in table)


def test_search_ceiling(tmp_path):
    out = tmp_path / "s.json"
    assert main(["search", "-n", "33", "-o", str(out)]) == 2
    assert not out.exists()
    assert main(["search", "--range", "3..59", "--prop2-only", "-o", str(out)]) == 0
    rows = json.loads(out.read_text())["rows"]
    assert [r["p"] for r in rows][-1] == 59 and all(r["ok"] for r in rows)


def test_search_usage_errors():
    assert main(["search"]) == 2
    assert main(["search", "--range", "7-3"]) == 2


def test_theory(capsys, tmp_path):
    out = tmp_path / "t.json"
    assert main(["theory", "-N", "5", "-d", "4", "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["R0"] == 0.25 and data["R"] == 0.2875 and data["eps_R"] == pytest.approx(0.15)
    assert data["QBER"] == pytest.approx(4 / 23)
    assert data["exact"]["QBER"] == "4/23"
    assert "0.173913" in capsys.readouterr().out
    assert main(["theory", "-N", "4", "-d", "4"]) == 2


def test_simulate_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["simulate", "-p", "5", "-m", "2", "-q", "1", "--rounds", "50000", "--seed", "42"]
    assert main(args + ["-o", str(a)]) == 0
    assert main(args + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    for key in ["N", "d", "m", "q", "rounds", "seed", "R_hat", "QBER_hat", "eps_R_hat",
                "stderr", "theory", "mi"]:
        assert key in data
    assert set(data["theory"]) == {"R0", "R", "eps_R", "QBER"}
    assert set(data["mi"]) == {"I_AB", "I_AE", "I_BE", "key_rate"}


def test_simulate_q0(tmp_path):
    out = tmp_path / "q0.json"
    assert main(["simulate", "-p", "5", "-q", "0", "--rounds", "20000", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["QBER_hat"] == 0.0


def test_simulate_invalid(tmp_path):
    out = tmp_path / "x.json"
    assert main(["simulate", "-p", "5", "-q", "1.5", "-o", str(out)]) == 2
    assert main(["simulate", "-p", "9", "-o", str(out)]) == 2
    assert not out.exists()


def test_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--primes", "3,5", "-q", "0,1", "--rounds", "20000",
                 "-o", str(out)]) == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == SWEEP_HEADER
    assert len(rows) == 5
    assert [r[:3] for r in rows[1:]] == [["3", "2", "0.0"], ["3", "2", "1.0"],
                                         ["5", "4", "0.0"], ["5", "4", "1.0"]]


def test_sweep_invalid_grid(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--primes", "3,8", "-o", str(out)]) == 2
    assert main(["sweep", "--primes", "3", "-q", "0,2", "-o", str(out)]) == 2
    assert main(["sweep", "--primes", "", "-o", str(out)]) == 2
    assert not out.exists()


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "equiframe.cli", "--help"],
                         capture_output=True, text=True, check=True)
    for sub in ["build", "verify", "search", "theory", "simulate", "sweep"]:
        assert sub in res.stdout
