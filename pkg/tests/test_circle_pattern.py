import mpmath as mp
import pytest

from zpower.circle_pattern import (Kite, PatternDoc, PatternError, SvgOptions, extract_pattern,
                                   kites_overlap, negative_kites, overlapping_kites, radius_at,
                                   render_svg)
from zpower.discrete_log import hirota_W
from zpower.lattice import evolve_grid, from_values


def test_a1_small_pattern():
    pat = extract_pattern(evolve_grid(1, 4))
    assert len(pat.circles) == 13
    assert len(pat.points) == 12
    assert len(pat.kites) == 16
    assert pat.max_spread < mp.mpf("1e-60")
    assert pat.max_orthogonality < mp.mpf("1e-60")
    assert negative_kites(pat) == []
    for c in pat.circles:
        assert abs(c.radius - 1) < mp.mpf("1e-60")


def test_radius_is_hirota(grids22):
    g = grids22["2/3"]
    pat = extract_pattern(g)
    for n, m in [(0, 0), (4, 6), (10, 2)]:
        assert abs(radius_at(pat, n, m) - hirota_W(g, n, m)) <= mp.mpf("1e-25")


def test_spread_violation_raises():
    g = evolve_grid("0.5", 6)
    vals = [list(row) for row in g.values]
    vals[2][3] = vals[2][3] + mp.mpf("1e-6")
    bad = from_values(g.a, g.N, g.bits, vals)
    with pytest.raises(PatternError):
        extract_pattern(bad)


def test_overlap_fault_injection():
    k1 = Kite(0, 0, (mp.mpc(0, 0), mp.mpc(1, 0), mp.mpc(1, 1), mp.mpc(0, 1)))
    k2 = Kite(1, 0, (mp.mpc("0.5", "0.5"), mp.mpc("1.5", "0.5"), mp.mpc("1.5", "1.5"), mp.mpc("0.5", "1.5")))
    k3 = Kite(2, 0, (mp.mpc(1, 0), mp.mpc(2, 0), mp.mpc(2, 1), mp.mpc(1, 1)))
    slack = mp.mpf("1e-30")
    assert kites_overlap(k1, k2, slack)
    assert not kites_overlap(k1, k3, slack)
    pat = PatternDoc(2, (), (), (k1, k2), (0, 0, 2, 2), 0, 0)
    assert len(overlapping_kites(pat)) == 1


def test_no_overlaps_a_half():
    pat = extract_pattern(evolve_grid("0.5", 12))
    assert overlapping_kites(pat) == []


def test_svg_deterministic_and_valid():
    import xml.etree.ElementTree as ET
    pat = extract_pattern(evolve_grid("2/3", 6))
    a = render_svg(pat)
    b = render_svg(extract_pattern(evolve_grid("2/3", 6)))
    assert a == b
    root = ET.fromstring(a)
    circles = root.findall(".//{http://www.w3.org/2000/svg}circle")
    assert len(circles) == len(pat.circles)


def test_svg_options_validation():
    with pytest.raises(ValueError):
        SvgOptions(scale=0)
    with pytest.raises(ValueError):
        SvgOptions(stroke_width=-1)
    with pytest.raises(PatternError):
        render_svg(PatternDoc(0, (), (), (), (0, 0, 1, 1), 0, 0))
