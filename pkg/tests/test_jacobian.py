import math
import random

import pytest
from hypothesis import given, strategies as st

from minigraph import catalog
from minigraph.exprlang import DomainError, Jet2
from minigraph.geometry import Jet2Map, map_jets, parse_pair
from minigraph.grid import GridSpec
from minigraph.jacobian import (
    CRClass, RangeVerdict, classify_cr, jacobian, jacobian_range, wirtinger,
)

# O(10) slopes: beyond that the determinant itself cancels in floating point
d = st.floats(-10, 10, allow_nan=False)


@st.composite
def first_order_jets(draw):
    return Jet2Map((0.0, 0.0), Jet2(0.0, draw(d), draw(d), 0, 0, 0), Jet2(0.0, draw(d), draw(d), 0, 0, 0))


def test_jacobian_examples(osserman):
    assert jacobian(map_jets(parse_pair("x", "y"), 3.0, -2.0)) == 1.0
    assert jacobian(map_jets(osserman, 0.0, 0.0)) == 1.0
    assert jacobian(map_jets(parse_pair(*catalog.Z_SQUARED), 1.0, 1.0)) == 8.0


def test_osserman_jacobian_closed_form(osserman):
    rng = random.Random(3)
    for _ in range(100):
        x, y = rng.uniform(-3, 3), rng.uniform(-3, 3)
        want = catalog.osserman_jacobian(x)
        assert jacobian(map_jets(osserman, x, y)) == pytest.approx(want, rel=1e-10)


def test_wirtinger_examples():
    wp = wirtinger(map_jets(parse_pair("x", "-y"), 0.2, 0.9))
    assert wp.f_z == 0 and wp.f_zbar == 1
    f = parse_pair(*catalog.Z_SQUARED)
    for x, y in [(0.0, 0.0), (1.0, -2.0), (0.3, 0.7)]:
        wp = wirtinger(map_jets(f, x, y))
        assert wp.f_zbar == 0
        assert wp.f_z == pytest.approx(2 * complex(x, y), abs=1e-15)


@given(first_order_jets())
def test_wirtinger_identity(j):
    J = jacobian(j)
    assert abs(wirtinger(j).jacobian - J) <= 1e-12 * (1 + abs(J))


def test_wirtinger_identity_on_random_polynomials():
    rng = random.Random(17)
    for _ in range(50):
        c = [round(rng.uniform(-3, 3), 2) for _ in range(10)]
        f1 = f"{c[0]}*x^3 + {c[1]}*x*y + {c[2]}*y^2 + {c[3]}*x + {c[4]}"
        f2 = f"{c[5]}*y^3 + {c[6]}*x^2*y + {c[7]}*x^2 + {c[8]}*y + {c[9]}"
        j = map_jets(parse_pair(f1.replace("+ -", "- "), f2.replace("+ -", "- ")),
                     rng.uniform(-2, 2), rng.uniform(-2, 2))
        J = jacobian(j)
        assert wirtinger(j).jacobian == pytest.approx(J, rel=1e-12, abs=1e-12)


# --- Cauchy-Riemann classification ------------------------------------------

def test_classify_examples(osserman, grid41):
    hol = classify_cr(parse_pair(*catalog.Z_SQUARED), grid41)
    anti = classify_cr(parse_pair(*catalog.CONJ_Z_SQUARED), grid41)
    neither = classify_cr(osserman, grid41)
    assert hol.kind is CRClass.HOLOMORPHIC and hol.jacobian_min >= 0
    assert anti.kind is CRClass.ANTI_HOLOMORPHIC and anti.jacobian_max <= 0
    assert neither.kind is CRClass.NEITHER
    assert neither.jacobian_min < 0 < neither.jacobian_max


def test_classify_constant_is_degenerate(small_grid):
    res = classify_cr(parse_pair("1", "-2"), small_grid)
    assert res.kind is CRClass.HOLOMORPHIC and "degenerate" in res.note


def test_classify_requires_positive_tol(small_grid):
    with pytest.raises(ValueError):
        classify_cr(parse_pair("x", "y"), small_grid, tol=0)


def test_classify_collects_errors(small_grid):
    res = classify_cr(parse_pair("log(x)", "y"), small_grid)
    assert res.errors and res.kind is CRClass.NEITHER


@pytest.mark.parametrize("f1, f2", [
    ("exp(x)*cos(y)", "exp(x)*sin(y)"),
    ("x^3 - 3*x*y^2", "3*x^2*y - y^3"),
    ("sin(x)*cosh(y)", "cos(x)*sinh(y)"),
    ("exp(x)*cos(y)", "-exp(x)*sin(y)"),
    ("x^3 - 3*x*y^2", "-(3*x^2*y - y^3)"),
])
def test_sign_dichotomy(f1, f2, small_grid):
    f = parse_pair(f1, f2)
    res = classify_cr(f, small_grid)
    assert res.kind is not CRClass.NEITHER
    for x, y in small_grid.points():
        J = jacobian(map_jets(f, x, y))
        if res.kind is CRClass.HOLOMORPHIC:
            assert J >= 0
        else:
            assert J <= 0


# --- range evidence ----------------------------------------------------------

def test_range_of_z_squared():
    ev = jacobian_range(parse_pair(*catalog.Z_SQUARED), [1, 2, 3])
    assert ev.verdict is RangeVerdict.ONE_SIDED_NON_NEGATIVE
    assert ev.sampled_min == 0.0 and ev.zero_attained


def test_range_of_conj_z_squared():
    ev = jacobian_range(parse_pair(*catalog.CONJ_Z_SQUARED), [1, 2, 3])
    assert ev.verdict is RangeVerdict.ONE_SIDED_NON_POSITIVE


def test_range_of_osserman(osserman):
    ev = jacobian_range(osserman, [1, 2, 3])
    assert ev.verdict is RangeVerdict.FULL_RANGE_EVIDENCE
    assert ev.sampled_min < -50 and ev.sampled_max > 400
    assert ev.sampled_min == pytest.approx(catalog.osserman_jacobian(3.0), rel=1e-12)
    assert ev.sampled_max == pytest.approx(catalog.osserman_jacobian(-3.0), rel=1e-12)


def test_range_of_identity():
    ev = jacobian_range(parse_pair("x", "y"), [1, 2, 3])
    assert ev.sampled_min == ev.sampled_max == 1.0
    assert ev.verdict is RangeVerdict.BOUNDED_WINDOW


def test_bounded_two_sided_window():
    ev = jacobian_range(parse_pair("sin(x)", "sin(y)"), [1, 2, 3])
    assert ev.sampled_min < 0 < ev.sampled_max
    assert ev.verdict is RangeVerdict.BOUNDED_WINDOW


@pytest.mark.parametrize("f", [catalog.Z_SQUARED, (catalog.OSSERMAN_F1, catalog.OSSERMAN_F2),
                               ("sin(x*y)", "cos(x)"), ("x^3", "y")])
def test_monotone_evidence(f):
    ev = jacobian_range(parse_pair(*f), [0.5, 1, 1.5, 2.5, 4], resolution=13)
    mins, maxs = ev.per_radius_min, ev.per_radius_max
    assert all(b <= a for a, b in zip(mins, mins[1:]))
    assert all(b >= a for a, b in zip(maxs, maxs[1:]))


def test_range_input_validation():
    f = parse_pair("x", "y")
    with pytest.raises(ValueError):
        jacobian_range(f, [])
    with pytest.raises(ValueError):
        jacobian_range(f, [2, 1])
    with pytest.raises(ValueError):
        jacobian_range(f, [0, 1])
    with pytest.raises(DomainError):
        jacobian_range(parse_pair("log(-1-x^2)", "y"), [1])


def test_range_serialises():
    ev = jacobian_range(parse_pair(*catalog.Z_SQUARED), [1, 2], resolution=5)
    out = ev.as_dict()
    assert out["verdict"] == "OneSidedNonNegative"
    assert [r["radius"] for r in out["per_radius"]] == [1.0, 2.0]
    assert len(ev.samples) == 2 * 25
    assert math.isfinite(out["sampled_infimum"])


def test_grid_square_includes_corners():
    pts = GridSpec.square(3, 41).points()
    assert (3.0, 3.0) in pts and (-3.0, -3.0) in pts
