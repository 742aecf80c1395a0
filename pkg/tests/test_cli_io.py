import json
import math
import subprocess
import sys

import numpy as np
import pytest

from mandeldde import __version__
from mandeldde.cli import main
from mandeldde.io import (Table, build_manifest, format_cell, manifest_path, read_csv,
                          sha256_file, write_csv, write_manifest, write_ppm)


def test_ppm_bytes(tmp_path):
    img = np.arange(2 * 3 * 3, dtype=np.uint8).reshape(2, 3, 3)
    p = tmp_path / "x.ppm"
    write_ppm(img, p)
    data = p.read_bytes()
    assert data == b"P6\n3 2\n255\n" + img.tobytes()
    with pytest.raises(ValueError):
        write_ppm(np.zeros((2, 2)), p)


@pytest.mark.parametrize("value, text", [
    (0.1, "0.10000000000000001"),
    (-0.0, "0"),
    (3, "3"),
    (np.int64(7), "7"),
    (1e-300, "1e-300"),
    (float("nan"), "nan"),
    (-1.5, "-1.5"),
])
def test_format_cell(value, text):
    assert format_cell(value) == text


def test_csv_roundtrip_is_lossless(tmp_path):
    rng = np.random.default_rng(0)
    vals = rng.standard_normal((50, 3)) * 10.0 ** rng.integers(-200, 200, (50, 3))
    p = tmp_path / "t.csv"
    write_csv(Table(["a", "b", "c"], [tuple(r) for r in vals]), p)
    back = read_csv(p)
    assert back.header == ["a", "b", "c"]
    np.testing.assert_array_equal(np.array(back.rows), vals)
    assert b"\r" not in p.read_bytes()
    assert p.read_bytes().endswith(b"\n")


def test_csv_rejects_ragged(tmp_path):
    with pytest.raises(ValueError):
        write_csv(Table(["a", "b"], [(1,)]), tmp_path / "r.csv")


def test_manifest(tmp_path):
    art = tmp_path / "a.csv"
    art.write_text("x\n")
    m = build_manifest("boundary", ["boundary", "--curve", "cardioid"], {"c": 1 + 2j},
                       [art], 0.5, extra=np.float64(1.5))
    path = manifest_path(art)
    assert path.name == "a.manifest.json"
    write_manifest(m, path)
    loaded = json.loads(path.read_text())
    assert loaded["tool_version"] == __version__
    assert loaded["artifacts"] == {"a.csv": sha256_file(art)}
    assert loaded["config"] == {"c": [1.0, 2.0]}
    assert loaded["extra"] == 1.5
    assert loaded["command_line"][:2] == ["mandeldde", "boundary"]


def _manifest(path):
    return json.loads(manifest_path(path).read_text())


def test_cli_boundary_cardioid(tmp_path):
    out = tmp_path / "card.csv"
    assert main(["boundary", "--curve", "cardioid", "--samples", "4", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "phi,c_re,c_im"
    assert lines[1] == "0,0.25,0"
    assert lines[3] == "3.1415926535897931,-0.75,0"
    m = _manifest(out)
    assert m["artifacts"]["card.csv"] == sha256_file(out)
    assert m["config"] == {"curve": "cardioid", "samples": 4, "tau0": 10.0}


def test_cli_boundary_hopf_and_period3(tmp_path):
    out = tmp_path / "hopf.csv"
    assert main(["boundary", "--curve", "hopf", "--tau0", "10", "--samples", "8",
                 "--out", str(out)]) == 0
    t = read_csv(out)
    assert t.header == ["phi", "omega", "c_re", "c_im", "marginal_modulus"]
    row = t.rows[4]
    assert row[0] == math.pi and row[3] == 0 and abs(row[2] + 0.791) < 1e-3
    out3 = tmp_path / "p3.csv"
    assert main(["boundary", "--curve", "period3", "--samples", "8", "--out", str(out3)]) == 0
    assert len(read_csv(out3).rows) == 8


def test_cli_stability(capsys):
    assert main(["stability", "--zr", "-0.5", "--tau0", "10"]) == 0
    assert capsys.readouterr().out.strip().endswith(" stable")
    assert main(["stability", "--cr", "-0.75", "--ci", "0", "--tau0", "10"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("minus") and lines[0].endswith(" stable")
    assert lines[1].startswith("plus") and lines[1].endswith("unstable")
    assert main(["stability", "--tau0", "10"]) == 2
    assert main(["stability", "--zr", "1", "--cr", "1", "--tau0", "10"]) == 2


def test_cli_render_discrete(tmp_path, capsys):
    prefix = tmp_path / "img"
    argv = ["render", "--mode", "discrete", "--width", "12", "--height", "10",
            "--max-iter", "100", "--overlay", "--workers", "1", "--out", str(prefix)]
    assert main(argv) == 0
    ppm = tmp_path / "img.ppm"
    csv = tmp_path / "img.csv"
    assert ppm.read_bytes().startswith(b"P6\n12 10\n255\n")
    assert len(ppm.read_bytes()) == len(b"P6\n12 10\n255\n") + 12 * 10 * 3
    t = read_csv(csv)
    assert t.header == ["i", "j", "c_re", "c_im", "class", "scalar"]
    assert len(t.rows) == 120
    m = json.loads((tmp_path / "img.manifest.json").read_text())
    assert set(m["artifacts"]) == {"img.ppm", "img.csv"}
    assert sum(m["tallies"].values()) == 120
    assert m["config"]["params"]["max_iter"] == 100
    assert "converged=" in capsys.readouterr().out


def test_cli_render_is_worker_independent(tmp_path):
    base = ["render", "--mode", "dde", "--width", "6", "--height", "6", "--tau-end", "150",
            "--re-min", "-1.2", "--re-max", "0.2", "--im-min", "-0.7", "--im-max", "0.7"]
    assert main(base + ["--workers", "1", "--out", str(tmp_path / "a")]) == 0
    assert main(base + ["--workers", "2", "--out", str(tmp_path / "b")]) == 0
    for ext in (".ppm", ".csv"):
        assert (tmp_path / ("a" + ext)).read_bytes() == (tmp_path / ("b" + ext)).read_bytes()


def test_cli_timeseries_and_feigenbaum(tmp_path):
    ts = tmp_path / "ts.csv"
    assert main(["timeseries", "--cr", "0.1", "--ci", "0", "--tau-end", "300", "--stride", "20",
                 "--out", str(ts)]) == 0
    t = read_csv(ts)
    assert t.header == ["tau", "z_re", "z_im", "abs_z"]
    assert t.rows[1][0] == 1.0
    assert _manifest(ts)["outcome"]["kind"] == "converged"

    fb = tmp_path / "fb.csv"
    assert main(["feigenbaum", "--mode", "discrete", "--s-min", "-1", "--s-max", "0.5",
                 "--n", "4", "--max-iter", "2000", "--out", str(fb)]) == 0
    t = read_csv(fb)
    assert t.header == ["s", "c_re", "c_im", "value"]
    m = _manifest(fb)
    assert list(m["diagnostics"]) == ["0.5"]
    assert m["diagnostics"]["0.5"].startswith("escaped")


def test_cli_decay_small(tmp_path, capsys):
    out = tmp_path / "decay.csv"
    assert main(["decay", "--tau-ends", "200,400", "--width", "6", "--height", "6",
                 "--workers", "1", "--out", str(out)]) == 0
    t = read_csv(out)
    assert [r[0] for r in t.rows] == [200, 400]
    assert t.rows[1][-1] <= t.rows[0][-1]
    assert _manifest(out)["config"]["window"] == 100.0
    assert capsys.readouterr().out.count("non_escaped=") == 2


def test_cli_errors(tmp_path):
    assert main([]) == 2
    assert main(["render"]) == 2
    assert main(["boundary", "--curve", "cardioid", "--samples", "1",
                 "--out", str(tmp_path / "x.csv")]) == 2
    missing = tmp_path / "nope" / "x.csv"
    assert main(["boundary", "--curve", "cardioid", "--out", str(missing)]) == 1
    assert main(["render", "--width", "0", "--out", str(tmp_path / "z")]) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "mandeldde", "--version"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert __version__ in res.stdout
