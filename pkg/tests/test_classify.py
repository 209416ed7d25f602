import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvespace.classify import (
    E,
    HomotopyClass,
    RegionGeometry,
    census,
    classify_points,
    example_class,
    homotopy_class,
    ray_profile,
    region_audit,
    region_svg,
    sphere,
)
from curvespace.curves import UTPoint

SVG = "{http://www.w3.org/2000/svg}"


def cls(x, y, theta1):
    return homotopy_class(UTPoint((x, y), theta1))


def test_example_points():
    assert cls(2, 0, 0) == sphere(0)
    assert cls(5, 0, 0) == sphere(1)
    assert cls(6, 0, 0) == sphere(2)
    assert cls(-3, 0, 0) == E
    assert cls(4 * math.sqrt(2), 0, 0) == sphere(1)


def test_quarter_turn_ray():
    w = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
    assert cls(2 * w.real, 2 * w.imag, math.pi / 2) == sphere(0)
    assert cls(w.real, w.imag, math.pi / 2) == E


def test_rejects_half_turn():
    with pytest.raises(ValueError):
        UTPoint((1, 0), math.pi)
    with pytest.raises(ValueError):
        RegionGeometry(-math.pi)


def test_class_json_shape():
    assert E.to_dict() == {"kind": "E"}
    assert sphere(2).to_dict() == {"kind": "sphere", "n": 2}
    with pytest.raises(ValueError):
        HomotopyClass("sphere", -1)


def test_centres_on_axis():
    for t in (0.3, 1.2, -2.0):
        g = RegionGeometry(t)
        z = complex(math.cos(t), math.sin(t))
        d = 1 + z
        for key in ("iz-i", "i-iz"):
            c = g.centers[key]
            # collinear with 0 and 1 + z
            assert abs((c * d.conjugate()).imag) < 1e-12
        p = g.centers["i+iz"]
        refl = d * d / abs(d) ** 2 * p.conjugate()
        assert abs(refl - g.centers["-(i+iz)"]) < 1e-12


# -- ray profiles -----------------------------------------------------------------

def test_profile_theta_zero_tiles():
    prof = ray_profile(0.0, 40.0)
    assert prof[0][0] == 0.0
    for (l0, h0, _), (l1, _, _) in zip(prof, prof[1:]):
        assert h0 == l1
    spheres = [p for p in prof if p[2].kind == "sphere"]
    for k in range(4):
        lo, hi, c = spheres[2 * k]
        assert c == sphere(2 * k)
        assert lo == pytest.approx(4 * math.sqrt(k * k + k)) and hi == pytest.approx(4 * (k + 1))
        lo, hi, c = spheres[2 * k + 1]
        assert c == sphere(2 * k + 1)
        assert lo == pytest.approx(4 * (k + 1))
        assert hi == pytest.approx(4 * math.sqrt(k * k + 3 * k + 2))
    # only the initial point 0 is outside the spheres
    assert [p for p in prof if p[2] == E and p[1] > p[0]] == []


def test_profile_quarter_turn():
    prof = ray_profile(math.pi / 2, 10.0)
    s0 = [p for p in prof if p[2] == sphere(0)][0]
    assert s0[0] == pytest.approx(math.sqrt(2)) and s0[1] == pytest.approx(4 - math.sqrt(2))


@pytest.mark.parametrize("theta1", [0.0, 0.4, math.pi / 2, -1.1, 5 / 7 * math.pi, 3.0])
def test_profile_matches_classifier(theta1):
    t_max = 30.0
    prof = ray_profile(theta1, t_max)
    ts = (np.arange(10_000) + 0.5) * t_max / 10_000
    h = theta1 / 2
    got = classify_points(ts * math.cos(h), ts * math.sin(h), theta1)
    for t, code in zip(ts, got):
        for lo, hi, c in prof:
            if lo < t <= hi:
                assert code == (-1 if c == E else c.n)
                break


def test_example_class_matches_profile():
    for x in np.linspace(0.01, 40, 2000):
        assert example_class(x) == cls(x, 0, 0)


@pytest.mark.parametrize("theta1", [0.0, 0.7, -1.5, 2.8])
def test_monotone_onset(theta1):
    prof = ray_profile(theta1, 60.0)
    onset = {}
    for lo, hi, c in prof:
        if c.kind == "sphere" and hi > lo:
            onset.setdefault(c.n, lo)
    ns = sorted(onset)
    assert ns == list(range(len(ns)))
    assert all(onset[n] < onset[n + 1] for n in ns[:-1])


@pytest.mark.parametrize("theta1", [0.4, 2.0])
def test_e_gaps_have_width_2a(theta1):
    a = abs(2 * math.sin(theta1 / 2))
    prof = ray_profile(theta1, 30.0)
    gaps = [hi - lo for lo, hi, c in prof[1:] if c == E]
    assert gaps and all(g == pytest.approx(2 * a) for g in gaps)


# -- symmetry and boundaries ----------------------------------------------------------

@settings(max_examples=200)
@given(st.floats(-30, 30), st.floats(-30, 30), st.floats(-3.1, 3.1))
def test_axis_symmetry(x, y, theta1):
    c2, s2 = math.cos(theta1), math.sin(theta1)
    rx, ry = c2 * x + s2 * y, s2 * x - c2 * y
    assert cls(x, y, theta1) == cls(rx, ry, theta1)


def test_axis_symmetry_bulk():
    rng = np.random.default_rng(0)
    x, y = rng.uniform(-30, 30, (2, 1000))
    for t in rng.uniform(-3.1, 3.1, 10):
        c2, s2 = math.cos(t), math.sin(t)
        assert np.array_equal(classify_points(x, y, t),
                              classify_points(c2 * x + s2 * y, s2 * x - c2 * y, t))


def test_nudge_stability_on_circles():
    rng = np.random.default_rng(1)
    for t in (0.0, 0.9, -2.2):
        g = RegionGeometry(t)
        z = complex(math.cos(t), math.sin(t))
        for centre, r, _ in g.circles(4):
            for ang in rng.uniform(0, 2 * math.pi, 12):
                q = centre + r * complex(math.cos(ang), math.sin(ang))
                v = cls(q.real, q.imag, t)
                for delta in (1e-5, 5e-6):
                    p = q - delta * (1 + z)
                    assert cls(p.real, p.imag, t) == v


def test_conjugation_symmetry():
    rng = np.random.default_rng(2)
    x, y = rng.uniform(-25, 25, (2, 2000))
    for t in (0.5, 1.7, 2.9):
        assert np.array_equal(classify_points(x, y, t), classify_points(x, -y, -t))


# -- census, audit and drawing -------------------------------------------------------------

def test_census_unit_lattice():
    counts = census(((1, 0), (0, 1)), 0.0, 30.0, n_max=8)
    assert all(counts[sphere(n)] > 0 for n in range(9))
    everything = census(((1, 0), (0, 1)), 0.0, 30.0)
    inside = sum(1 for i in range(-30, 31) for j in range(-30, 31) if i * i + j * j <= 900)
    assert sum(everything.values()) == inside
    assert all(counts[k] == v for k, v in everything.items() if k.kind == "E" or k.n <= 8)


def test_census_coarse_lattice_misses_circle():
    counts = census(((4, 0), (0, 4)), 0.0, 60.0)
    assert counts[sphere(1)] == 0
    assert counts[sphere(0)] > 0 and counts[sphere(2)] > 0


def test_census_small_ball_and_bad_lattice():
    counts = census(((1, 0), (0, 1)), 0.0, 0.5)
    assert sum(counts.values()) == 1 and counts[E] == 1
    with pytest.raises(ValueError):
        census(((1, 1), (2, 2)), 0.0, 5.0)


@pytest.mark.parametrize("theta1", [0.0, math.pi / 2, 5 / 7 * math.pi])
def test_audit_clean(theta1):
    rep = region_audit(theta1, k_max=3, grid=300)
    assert rep["ok"], rep


def test_svg_parses_and_draws_expected_circles():
    text = region_svg(0.0, k_max=2, width=400, samples=60)
    root = ET.fromstring(text)
    circles = root.findall(f".//{SVG}circle")
    X, scale = 16.0, 400 / 32.0
    about_origin = sorted(float(c.get("r")) / scale for c in circles
                          if abs(float(c.get("cx")) - X * scale) < 1e-6
                          and abs(float(c.get("cy")) - X * scale) < 1e-6)
    assert sorted(set(round(r, 6) for r in about_origin)) == [4.0, 8.0, 12.0]
    upper = [c for c in circles if abs(float(c.get("cy")) - (X - 2) * scale) < 1e-6]
    assert upper


def test_svg_ray_slice_matches_profile():
    theta1 = 1.0
    text = region_svg(theta1, k_max=2, width=400, samples=80)
    root = ET.fromstring(text)
    X = 16.0
    scale = 400 / (2 * X)
    cell = 2 * X / 80
    rects = root.findall(f".//{SVG}g[@id='shading']/{SVG}rect")
    shade = {}
    for r in rects:
        x0 = float(r.get("x")) / scale - X
        y1 = X - float(r.get("y")) / scale
        shade[(round(x0 / cell), round(y1 / cell))] = int(r.get("data-class"))
    prof = ray_profile(theta1, X)
    h = theta1 / 2
    for lo, hi, c in prof:
        if hi - lo < 4 * cell:
            continue
        t = 0.5 * (lo + hi)
        px, py = t * math.cos(h), t * math.sin(h)
        i, j = math.floor(px / cell), math.floor(py / cell)
        want = -1 if c == E else c.n
        assert shade.get((i, j + 1), -1) == want
