import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wildarc.errors import InfeasibleSpec, OutsideTube
from wildarc.geometry import FORWARD, INVERSE, homothety
from wildarc.io import curve_obj, tube_obj
from wildarc.knots import (DATA_DIR, KnotSpec, build_knot, genus_of, knot_document, shipped_knot,
                           zeta)

from conftest import tube_samples

NS = (0, 1, 2)


# ---------------------------------------------------------------- specs


def test_spec_validation():
    with pytest.raises(InfeasibleSpec):
        KnotSpec(n=1, anchors=(0.0, 1.0), clearance=0.2, tube_radius=0.01)
    with pytest.raises(InfeasibleSpec):
        KnotSpec(n=1, anchors=(0.0, 2.0, 1.0), clearance=0.2, tube_radius=0.01)
    with pytest.raises(InfeasibleSpec):
        KnotSpec(n=1, anchors=(0.0, 1.0, 7.0), clearance=0.2, tube_radius=0.01)
    with pytest.raises(InfeasibleSpec):
        KnotSpec(n=0, anchors=(0.0,), clearance=0.2, tube_radius=0.1)
    with pytest.raises(InfeasibleSpec):
        KnotSpec(n=-1, anchors=(), clearance=0.2, tube_radius=0.01)


def test_clearance_that_cannot_be_met():
    with pytest.raises(InfeasibleSpec):
        build_knot(KnotSpec.standard(1, clearance=2.0, tube_radius=0.02))


@pytest.mark.parametrize("n", [0, 1, 5])
def test_genus(n):
    assert genus_of(KnotSpec.standard(n)) == n


def test_json_round_trip(tmp_path):
    spec = KnotSpec.standard(2)
    doc = knot_document(spec)
    path = tmp_path / "k.json"
    path.write_text(json.dumps(doc))
    back = KnotSpec.from_json(path)
    assert back.n == 2
    assert np.allclose(back.anchors, spec.anchors, atol=1e-12)
    c1, c2 = build_knot(spec), build_knot(back)
    t = np.linspace(-1, 2, 301)
    assert np.max(np.abs(c1.gamma(t) - c2.gamma(t))) <= 1e-12


@pytest.mark.parametrize("n", NS)
def test_shipped_data_matches_generator(n):
    # the data files are frozen output of the generator; regenerate them if this fails on purpose
    shipped = json.loads((DATA_DIR / f"knot_n{n}.json").read_text())
    fresh = json.loads(json.dumps(knot_document(KnotSpec.standard(n))))
    assert shipped["control_points"]["t"] == pytest.approx(fresh["control_points"]["t"], abs=1e-15)
    assert np.allclose(shipped["control_points"]["xyz"], fresh["control_points"]["xyz"], atol=1e-15)


# ---------------------------------------------------------------- curve


@pytest.mark.parametrize("n", NS)
def test_curve_invariants(curves, n):
    c = curves[n]
    spec = c.spec
    assert c.equivariance_residual() <= 1e-9
    assert c.join_mismatch() <= 1e-6
    assert c.min_speed() >= 1e-3
    if n:
        assert c.min_strand_distance(spec.clearance) >= spec.clearance / 2


@pytest.mark.parametrize("n", [3, 4])
def test_curve_invariants_larger_n(n):
    c = build_knot(KnotSpec.standard(n))
    assert c.equivariance_residual() <= 1e-9
    assert c.join_mismatch() <= 1e-6
    assert c.min_speed() >= 1e-3


_MAZUR = build_knot(shipped_knot(1))


@settings(max_examples=60, deadline=None)
@given(st.floats(-30, 30), st.integers(-5, 5))
def test_equivariance_any_shift(t, k):
    c = _MAZUR
    a = c.gamma(np.array([t + k]))[0]
    b = c.gamma(np.array([t]))[0] * 2.0 ** (-k)
    assert np.linalg.norm(a - b) <= 1e-12 * np.linalg.norm(b)


@pytest.mark.parametrize("n", NS)
def test_arcs_lie_in_the_shell(curves, n):
    c = curves[n]
    arcs = c.arcs()
    assert set(arcs) == {"B"} | {f"A{i}" for i in range(1, 2 * n + 1)}
    for label in arcs:
        r2 = np.sum(c.arc_samples(label) ** 2, axis=1)
        assert r2.min() >= 0.25 - 1e-9 and r2.max() <= 1.0 + 1e-9


def test_standard_knot_is_the_ray(curves):
    c = curves[0]
    t = np.linspace(-3, 3, 61)
    g = c.gamma(t)
    assert np.allclose(g[:, 1:], 0.0, atol=1e-15)
    assert np.allclose(g[:, 0], 2.0 ** (-t), rtol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_clasps_link_pairwise(n):
    # the diagram's crossings show up as linking numbers of the closed-up arcs:
    # A_{2j-1} and A_{2j} clasp, every other pair is unlinked
    c = build_knot(KnotSpec.standard(n))
    L = c.linking_matrix()
    expect = np.zeros_like(L)
    for j in range(n):
        expect[2 * j, 2 * j + 1] = expect[2 * j + 1, 2 * j] = 1.0
    assert np.allclose(np.abs(L), expect, atol=0.05)


def test_curve_obj_layout(curves):
    text = curve_obj(curves[1], samples=8)
    lines = text.splitlines()
    assert lines[0] == "o knot"
    assert sum(ln.startswith("v ") for ln in lines) == 9
    assert lines[-1] == "l " + " ".join(str(i) for i in range(1, 10))
    assert curve_obj(curves[1], samples=8) == text


# ---------------------------------------------------------------- tube chart


@pytest.mark.parametrize("n", NS)
def test_frame_and_disjointness(charts, n):
    ch = charts[n]
    assert ch.frame_orthonormality() <= 1e-9
    assert ch.disjointness_margin() >= 0.25
    assert ch.max_curvature_ratio() < 1.0


@pytest.mark.parametrize("n", NS)
def test_zeta_centre_and_boundary(charts, curves, n):
    ch = charts[n]
    for t in (-0.7, 0.0, 0.3, 1.9):
        assert np.allclose(zeta(ch, curves[n].gamma(t)), [t, 0, 0], atol=1e-9)
    rng = np.random.default_rng(3)
    y, p = tube_samples(ch, 200, rng, rmax=2.0)
    y[:, 1:] /= np.linalg.norm(y[:, 1:], axis=1, keepdims=True) / 2.0
    # pull a hair inside so membership is unambiguous
    back, inside = ch.locate(ch.embed(np.column_stack([y[:, 0], y[:, 1:] * (1 - 1e-10)])))
    assert inside.all()
    assert np.max(np.abs(np.sum(back[:, 1:] ** 2, axis=1) - 4.0)) <= 1e-8


@pytest.mark.parametrize("n", NS)
def test_zeta_round_trip_and_conjugacy(charts, n, rng):
    ch = charts[n]
    y, p = tube_samples(ch, 10_000, rng, t_range=(-1.0, 2.0), rmax=1.999)
    back, inside = ch.locate(p)
    assert inside.all()
    assert np.max(np.abs(ch.embed(back) - p)) <= 1e-8
    assert np.max(np.abs(back - y)) <= 1e-8
    shifted, inside2 = ch.locate(homothety(p))
    assert inside2.all()
    assert np.max(np.linalg.norm(shifted - (back + [1.0, 0, 0]), axis=1)) <= 1e-8


def test_zeta_scalar_api(charts):
    ch = charts[1]
    q = zeta(ch, [0.2, 0.3, 0.4], INVERSE)
    assert np.allclose(zeta(ch, q, FORWARD), [0.2, 0.3, 0.4], atol=1e-9)
    with pytest.raises(OutsideTube):
        zeta(ch, [0.0, 0.0, 0.9])
    with pytest.raises(OutsideTube):
        zeta(ch, [0.0, 3.0, 0.0], INVERSE)


def test_standard_chart_is_cylindrical(charts, rng):
    ch = charts[0]
    x = rng.uniform(0.05, 3.0, size=2000)
    rho = ch.r0 * x * np.sqrt(rng.uniform(0, 0.99, size=2000))
    ang = rng.uniform(0, 2 * np.pi, size=2000)
    p = np.column_stack([x, rho * np.cos(ang), rho * np.sin(ang)])
    y, inside = ch.locate(p)
    assert inside.all()
    assert np.allclose(y[:, 0], -np.log2(x), atol=1e-12)
    assert np.allclose(np.hypot(y[:, 1], y[:, 2]), 2 * rho / (ch.r0 * x), atol=1e-9)


def test_tube_obj_layout(charts):
    text = tube_obj(charts[0], rings=3, sides=5)
    lines = text.splitlines()
    assert sum(ln.startswith("v ") for ln in lines) == 4 * 5
    assert sum(ln.startswith("f ") for ln in lines) == 2 * 3 * 5
    # first vertex: ring t=0 on the standard ray, at distance r0 from (1, 0, 0)
    first = np.array([float(v) for v in lines[1].split()[1:]])
    assert first[0] == pytest.approx(1.0, abs=1e-12)
    assert math.hypot(first[1], first[2]) == pytest.approx(charts[0].r0, abs=1e-12)
