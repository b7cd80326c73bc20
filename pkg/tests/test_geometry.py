import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from minigraph import catalog
from minigraph.exprlang import Jet2
from minigraph.geometry import (
    Jet2Map, NotNormalError, first_fundamental_form, grid_minimality_report, map_jets,
    mean_curvature, minimal_residual, normal_frame, parse_pair, sample_point,
    second_fundamental_form,
)
from minigraph.grid import EmptyGridError, GridSpec

slope = st.floats(-50, 50, allow_nan=False)
curv = st.floats(-20, 20, allow_nan=False)


@st.composite
def jets(draw):
    def comp():
        return Jet2(0.0, draw(slope), draw(slope), draw(curv), draw(curv), draw(curv))
    return Jet2Map((0.0, 0.0), comp(), comp())


def _jet_at(f1, f2, x, y):
    return map_jets(parse_pair(f1, f2), x, y)


# --- first fundamental form ------------------------------------------------

def test_metric_of_plane():
    g = first_fundamental_form(_jet_at("0", "0", 0.3, 0.4))
    assert (g.g11, g.g12, g.g22) == (1.0, 0.0, 1.0)


def test_metric_of_osserman_at_origin(osserman):
    j = map_jets(osserman, 0.0, 0.0)
    assert j.fx == (2.0, 0.0) and j.fy == (0.0, 0.5)
    g = first_fundamental_form(j)
    assert (g.g11, g.g12, g.g22) == (5.0, 0.0, 1.25)


def test_osserman_metric_is_conformal_up_to_factor_four(osserman, grid41):
    for x, y in grid41.points()[::7]:
        g = first_fundamental_form(map_jets(osserman, x, y))
        assert abs(g.g12) <= 1e-12 * g.g11
        assert g.g11 == pytest.approx(4 * g.g22, rel=1e-13)


@given(jets())
def test_metric_positivity(j):
    g = first_fundamental_form(j)
    assert g.g11 >= 1 and g.g22 >= 1
    assert g.det >= 1 - 1e-12 * g.g11 * g.g22
    lo, hi = g.eigenvalues()
    assert 0 < lo <= hi


def test_metric_det_equality_branch():
    flat = first_fundamental_form(_jet_at("x^2 + 3", "y^2", 0.0, 0.0))
    assert flat.det == 1.0
    tilted = first_fundamental_form(_jet_at("x^2", "y^2", 0.1, 0.0))
    assert tilted.det > 1.0


# --- normal frame ----------------------------------------------------------

def test_frame_of_plane():
    xi1, xi2 = normal_frame(_jet_at("0", "0", 0.0, 0.0))
    assert xi1 == (0.0, 0.0, 1.0, 0.0) and xi2 == (0.0, 0.0, 0.0, 1.0)


@given(jets())
def test_frame_orthonormal_and_normal(j):
    frame = normal_frame(j)
    for a in range(2):
        for b in range(2):
            assert abs(np.dot(frame[a], frame[b]) - (a == b)) < 1e-12
    for xi in frame:
        for t in j.tangents():
            assert abs(np.dot(xi, t)) < 1e-10


# --- second fundamental form and mean curvature ------------------------------

def test_second_form_of_plane():
    j = _jet_at("0", "0", 0.0, 0.0)
    for xi in normal_frame(j):
        b = second_fundamental_form(j, xi)
        assert (b.b11, b.b12, b.b22) == (0.0, 0.0, 0.0)
        assert mean_curvature(j, xi) == 0.0


def test_paraboloid_at_origin():
    j = _jet_at("x^2 + y^2", "0", 0.0, 0.0)
    xi1, _ = normal_frame(j)
    assert xi1 == (0.0, 0.0, 1.0, 0.0)
    b = second_fundamental_form(j, xi1)
    assert (b.b11, b.b12, b.b22) == (2.0, 0.0, 2.0)
    assert mean_curvature(j, xi1) == 2.0


def test_second_form_bilinear():
    j = _jet_at("x^2*y + sin(y)", "exp(x)*y", 0.4, -0.3)
    xi1, xi2 = normal_frame(j)
    alpha, beta = math.cos(0.7), math.sin(0.7)
    mix = tuple(alpha * p + beta * q for p, q in zip(xi1, xi2))
    b1, b2, bm = (second_fundamental_form(j, xi) for xi in (xi1, xi2, mix))
    for name in ("b11", "b12", "b22"):
        want = alpha * getattr(b1, name) + beta * getattr(b2, name)
        assert getattr(bm, name) == pytest.approx(want, abs=1e-12)


def test_second_form_rejects_tangent_or_unnormalised():
    j = _jet_at("x", "y", 0.0, 0.0)
    with pytest.raises(NotNormalError):
        second_fundamental_form(j, (1.0, 0.0, 0.0, 0.0))
    with pytest.raises(NotNormalError):
        second_fundamental_form(j, (0.0, 0.0, 2.0, 0.0))


def test_osserman_mean_curvature_vanishes(osserman, grid41):
    for x, y in grid41.points():
        s = sample_point(osserman, (x, y))
        assert abs(s.H[0]) < 1e-9 and abs(s.H[1]) < 1e-9


@given(jets(), st.floats(0, 2 * math.pi))
def test_frame_rotation_invariance(j, angle):
    xi1, xi2 = normal_frame(j)
    c, s = math.cos(angle), math.sin(angle)
    r1 = tuple(c * p + s * q for p, q in zip(xi1, xi2))
    r2 = tuple(-s * p + c * q for p, q in zip(xi1, xi2))
    before = mean_curvature(j, xi1) ** 2 + mean_curvature(j, xi2) ** 2
    after = mean_curvature(j, r1) ** 2 + mean_curvature(j, r2) ** 2
    assert after == pytest.approx(before, rel=1e-12, abs=1e-300)


# --- minimal surface residual ------------------------------------------------

def test_residual_examples():
    assert minimal_residual(_jet_at("0", "0", 1.0, 2.0)) == (0.0, 0.0)
    assert minimal_residual(_jet_at("x^2", "y^2", 1.0, 1.0)) == (10.0, 10.0)


def test_residual_holomorphic_graphs_vanish():
    for f1, f2 in (catalog.Z_SQUARED, catalog.CONJ_Z_SQUARED, ("exp(x)*cos(y)", "exp(x)*sin(y)")):
        r = minimal_residual(_jet_at(f1, f2, 0.7, -0.4))
        assert max(map(abs, r)) < 1e-12


@given(jets())
def test_pointwise_equivalence_bounds(j):
    r = np.hypot(*minimal_residual(j))
    g = first_fundamental_form(j)
    lo, hi = g.eigenvalues()
    H = [mean_curvature(j, xi) for xi in normal_frame(j)]
    scale = max(1.0, r)
    # the normal block of the ambient frame has singular values 1/sqrt(eigenvalues of g)
    for h in H:
        assert abs(h) <= r / (2 * g.det) + 1e-12 * scale
    assert r <= 2 * g.det * math.sqrt(hi) * math.hypot(*H) + 1e-10 * scale


def test_pointwise_equivalence_on_examples(osserman):
    minimal, non_minimal = osserman, parse_pair("x^2", "y^2")
    for x, y in [(0.0, 0.0), (1.3, -0.7), (-1.9, 1.9)]:
        s = sample_point(minimal, (x, y))
        lam = min(first_fundamental_form(map_jets(minimal, x, y)).eigenvalues())
        assert s.res_norm < 1e-10
        assert max(map(abs, s.H)) < 1e-10 / (2 * lam)
    for x, y in [(1.0, 1.0), (0.5, -0.3)]:
        s = sample_point(non_minimal, (x, y))
        lam = min(first_fundamental_form(map_jets(non_minimal, x, y)).eigenvalues())
        assert s.res_norm >= 1e-10
        assert max(map(abs, s.H)) >= 1e-10 / (2 * lam)


# --- grid report -------------------------------------------------------------

def test_osserman_report(osserman, grid41):
    rep = grid_minimality_report(osserman, grid41)
    assert rep.verdicts["minimality"] == "minimal"
    assert rep.checks["max_residual_norm"] < 1e-9
    assert rep.checks["max_abs_H1"] < 1e-9 and rep.checks["max_abs_H2"] < 1e-9
    assert rep.details["evaluated_points"] == 41 * 41 and rep.errors == []


def test_non_minimal_report_records_worst_point(grid41):
    rep = grid_minimality_report(parse_pair("x^2", "y^2"), grid41)
    assert rep.verdicts["minimality"] == "non-minimal"
    worst = rep.details["worst_point"]
    assert abs(worst["x"]) == 2.0 and abs(worst["y"]) == 2.0
    assert rep.checks["max_residual_norm"] == pytest.approx(math.hypot(*worst["residual"]))


def test_domain_errors_are_collected(small_grid):
    rep = grid_minimality_report(parse_pair("log(x)", "y"), small_grid)
    assert rep.errors and all(e["x"] <= 0 for e in rep.errors)
    assert rep.details["evaluated_points"] + len(rep.errors) == 121


def test_all_points_failing_is_undetermined():
    rep = grid_minimality_report(parse_pair("log(-1-x^2)", "y"), GridSpec.square(1, 3))
    assert rep.verdicts["minimality"] == "undetermined"


def test_empty_grid():
    with pytest.raises(EmptyGridError, match="empty grid"):
        grid_minimality_report(parse_pair("x", "y"), [])


def test_thread_pool_gives_identical_report(osserman, grid41, monkeypatch):
    serial = grid_minimality_report(osserman, grid41).to_json()
    monkeypatch.setenv("MINIGRAPH_THREADS", "4")
    assert grid_minimality_report(osserman, grid41).to_json() == serial
