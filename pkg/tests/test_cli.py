import json
import subprocess
import sys

import numpy as np
import pytest

from polywave import io
from polywave.cli import main
from polywave.filterbank import ImageBuffer

S3 = np.sqrt(3.0)


def run(*argv):
    return main([str(a) for a in argv])


def test_filters_d4(capsys):
    assert run("filters", "--N", 2, "--xi", 0, "--level", 0) == 0
    doc = json.loads(capsys.readouterr().out)
    assert np.allclose(doc["mask"]["coeffs"], np.array([1 + S3, 3 + S3, 3 - S3, 1 - S3]) / 4, atol=1e-10)
    diag = doc["diagnostics"]
    assert diag["passed"] and diag["qmf_residual"] <= 1e-9 and diag["bezout_residual"] <= 1e-10


def test_filters_first_order_symbol(tmp_path):
    out = tmp_path / "f.json"
    assert run("filters", "--N", 1, "--xi", 1, "--out", out) == 0
    sym = json.loads(out.read_text())["symbol"]
    assert sym["lo"] == -1 and abs(sym["coeffs"][0] - 0.4434094419850370) <= 1e-15


@pytest.mark.parametrize("argv", [
    ["filters", "--N", "0"],
    ["filters", "--N", "11"],
    ["filters", "--xi", "-1"],
    ["verify", "--level", "31"],
    ["cascade", "--L", "17"],
    ["analyze", "-J", "0", "--in", "a", "--out", "b"],
    ["denoise", "--mode", "median", "--in", "a", "--out", "b"],
    ["bogus"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("xi", [0, 1])
def test_verify_passes(xi, capsys):
    assert run("verify", "--N", 2, "--xi", xi) == 0
    out = capsys.readouterr().out
    assert "RESULT: PASS" in out
    if xi == 0:
        assert "PASS  classical limit (xi=0) match" in out


def test_verify_json_report(tmp_path, capsys):
    assert run("verify", "--N", 3, "--xi", 2, "--out", tmp_path / "r.json") == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["passed"] and all(c["passed"] for c in rep["checks"])


def test_verify_grid_env(monkeypatch, capsys):
    monkeypatch.setenv("POLYWAVE_GRID", "128")
    assert run("verify", "--N", 1, "--xi", 1, "--L", 6) == 0
    assert "grid=128" in capsys.readouterr().out


def test_verify_ill_conditioned_oracle_is_skipped(capsys):
    assert run("verify", "--N", 4, "--xi", 30) == 0
    assert "SKIP  closed form vs bezout solve" in capsys.readouterr().out


def test_check_file(tmp_path, capsys):
    good = tmp_path / "good.json"
    assert run("filters", "--N", 3, "--xi", 1, "--out", good) == 0
    assert run("verify", "--check-file", good) == 0
    doc = json.loads(good.read_text())
    doc["mask"]["coeffs"][1] += 1e-3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert run("verify", "--check-file", bad) == 1
    assert "FAIL  qmf residual" in capsys.readouterr().out


def test_check_file_unreadable(tmp_path, capsys):
    (tmp_path / "x.json").write_text("{not json")
    assert run("verify", "--check-file", tmp_path / "x.json") == 1
    assert "cannot read filter file" in capsys.readouterr().err


def test_cascade_files_and_determinism(tmp_path):
    for d in ("a", "b"):
        assert run("cascade", "--N", 2, "--xi", 0, "--L", 8, "--out", tmp_path / d) == 0
    for name in ("fundamental.csv", "father.csv", "mother.csv"):
        a = (tmp_path / "a" / name).read_bytes()
        assert a == (tmp_path / "b" / name).read_bytes()
        assert a.startswith(b"t,value\n")


def test_cascade_haar(tmp_path):
    assert run("cascade", "--N", 1, "--xi", 0, "--L", 4, "--out", tmp_path) == 0
    t, v = np.loadtxt(tmp_path / "fundamental.csv", delimiter=",", skiprows=1).T
    assert np.allclose(v, 1 - np.abs(t))
    _, v = np.loadtxt(tmp_path / "father.csv", delimiter=",", skiprows=1).T
    assert np.allclose(v, 1.0)


def test_signal_roundtrip(tmp_path, rng):
    x = rng.standard_normal(256)
    io.write_signal_csv(tmp_path / "s.csv", x)
    assert run("analyze", "--N", 2, "--xi", 1, "-J", 3, "--in", tmp_path / "s.csv", "--out", tmp_path / "p.json") == 0
    assert run("synthesize", "--in", tmp_path / "p.json", "--out", tmp_path / "r.csv") == 0
    assert np.max(np.abs(io.read_signal_csv(tmp_path / "r.csv") - x)) <= 1e-9


def test_denoise_tau_zero(tmp_path, rng):
    x = rng.standard_normal(64)
    io.write_signal_csv(tmp_path / "s.csv", x)
    assert run("denoise", "--N", 3, "--xi", 2, "-J", 2, "--tau", 0, "--in", tmp_path / "s.csv",
               "--out", tmp_path / "d.csv") == 0
    assert np.max(np.abs(io.read_signal_csv(tmp_path / "d.csv") - x)) <= 1e-9


def test_bad_length_exit_1(tmp_path, rng, capsys):
    io.write_signal_csv(tmp_path / "s.csv", rng.standard_normal(63))
    assert run("analyze", "-J", 3, "--in", tmp_path / "s.csv", "--out", tmp_path / "p.json") == 1
    assert "not divisible by 2^J" in capsys.readouterr().err


def test_parse_error_names_field(tmp_path, capsys):
    (tmp_path / "s.csv").write_text("index,value\n0,1\n1,oops\n")
    assert run("analyze", "-J", 1, "--in", tmp_path / "s.csv", "--out", tmp_path / "p.json") == 1
    assert "field 'value'" in capsys.readouterr().err


def test_missing_pyramid_field(tmp_path, capsys):
    (tmp_path / "p.json").write_text('{"kind": "signal", "N": 2}')
    assert run("synthesize", "--in", tmp_path / "p.json", "--out", tmp_path / "o.csv") == 1
    assert "missing field" in capsys.readouterr().err


def test_missing_input(tmp_path):
    assert run("analyze", "--in", tmp_path / "nope.csv", "--out", tmp_path / "p.json") == 1


def test_image_pipeline(tmp_path, rng):
    img = ImageBuffer.from_array(rng.integers(0, 256, (32, 20)))
    io.write_pgm(tmp_path / "i.pgm", img)
    assert run("analyze", "--N", 2, "-J", 2, "--in", tmp_path / "i.pgm", "--out", tmp_path / "c.json") == 0
    assert json.loads((tmp_path / "c.json").read_text())["kind"] == "image"
    assert run("synthesize", "--in", tmp_path / "c.json", "--out", tmp_path / "o.pgm") == 0
    assert (tmp_path / "o.pgm").read_bytes() == (tmp_path / "i.pgm").read_bytes()
    outs = []
    for name in ("d1.pgm", "d2.pgm"):
        assert run("denoise", "-J", 2, "--tau", 20, "--mode", "hard", "--in", tmp_path / "i.pgm",
                   "--out", tmp_path / name) == 0
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polywave", "filters", "--N", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr
