import io
import json

import mpmath as mp
import pytest

from zpower.cli import load_grid, main, save_grid
from zpower.lattice import evolve_grid


def run(argv):
    out = io.StringIO()
    code = main(argv, stdout=out)
    return code, out.getvalue()


def test_evolve_a1_row(tmp_path):
    path = tmp_path / "g.txt"
    code, _ = run(["evolve", "--a", "1", "--n", "10", "--out", str(path)])
    assert code == 0
    assert "10 10 10 10" in path.read_text().splitlines()


def test_bad_exponent_is_config_error(capsys):
    code, _ = run(["evolve", "--a", "3", "--n", "4"])
    assert code == 2
    assert "a must lie" in capsys.readouterr().err


def test_round_trip_bit_exact():
    g = evolve_grid("2/3", 8)
    buf = io.StringIO()
    save_grid(g, buf, a_text="2/3")
    h = load_grid(io.StringIO(buf.getvalue()))
    assert h.N == g.N and h.bits == g.bits
    for site in g.sites():
        assert g[site] == h[site]
    buf2 = io.StringIO()
    save_grid(h, buf2, a_text="2/3")
    assert buf.getvalue() == buf2.getvalue()


def test_verify_detects_corrupted_file(tmp_path):
    path = tmp_path / "g.txt"
    run(["evolve", "--a", "0.5", "--n", "6", "--out", str(path)])
    lines = path.read_text().splitlines()
    for i, line in enumerate(lines):
        if line.startswith("3 4 "):
            n, m, re, im = line.split()
            lines[i] = f"{n} {m} {mp.mpf(re) + mp.mpf('1e-8')} {im}"
    path.write_text("\n".join(lines) + "\n")
    report_path = tmp_path / "r.json"
    code, out = run(["verify", "--grid", str(path), "--out", str(report_path)])
    assert code == 1
    report = json.loads(report_path.read_text())
    assert not report["pass"]
    cr = [c for c in report["checks"] if c["name"] == "cross_ratio"][0]
    assert not cr["pass"]
    # the worst cell is one of the four quadrilaterals touching (3, 4)
    assert any(f"({n}, {m})" in cr["detail"] for n in (2, 3) for m in (3, 4))


@pytest.mark.parametrize("argv", [
    ["evolve", "--a", "2/3", "--n", "6"],
    ["table", "--a", "0.5", "--n", "12"],
    ["moments", "--a", "0.5", "--n", "2", "--m", "3"],
    ["pattern", "--a", "1.5", "--n", "5"],
    ["loggreen", "--n", "10", "--window", "10"],
])
def test_reruns_byte_identical(tmp_path, argv):
    outs = []
    for k in range(2):
        p = tmp_path / f"o{k}"
        code, text = run(argv + ["--out", str(p)])
        assert code == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert len(outs[0]) > 0
