import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clairaut import catalog, numerics
from clairaut.errors import MaxIterations, NoBracket
from clairaut.exprlang import parse
from clairaut.numerics import DEFAULT, ToleranceConfig


def test_tolerance_defaults():
    assert DEFAULT == ToleranceConfig(1e-6, 1e-12, 1e-8, 400)


@pytest.mark.parametrize("bad", [
    {"fd_step": 0.0}, {"root_tol": -1.0}, {"residual_tol": 0.0},
    {"quad_panels": 3}, {"quad_panels": 0},
])
def test_tolerance_validation(bad):
    with pytest.raises(ValueError):
        ToleranceConfig(**bad)


def test_diff_central_examples():
    assert numerics.diff_central(lambda a: a * a, 3.0) == pytest.approx(6.0, abs=1e-6)
    assert numerics.diff_central(lambda a: 1 / a, 2.0) == pytest.approx(-0.25, abs=1e-6)


def test_diff_central_spline_at_knot():
    # d/da of 0.5((a-1)^2-1)^2 + 0.5 is 2(a-1)((a-1)^2-1); at a = 2 both sides give 0
    assert numerics.diff_central(catalog.spline_phi_prime, 2.0) == pytest.approx(0.0, abs=1e-6)
    # at a = 0.5: 4(a-1)((a-1)^2-1) = 4(-0.5)(-0.75) = 1.5
    assert numerics.diff_central(catalog.spline_phi_prime, 0.5) == pytest.approx(1.5, abs=1e-6)


@settings(max_examples=200)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6), st.floats(-10, 10))
def test_diff_central_polynomials(coeffs, a):
    p = np.polynomial.Polynomial(coeffs)
    want = p.deriv()(a)
    got = numerics.diff_central(p, a)
    scale = 1 + abs(want) + sum(abs(c) * (1 + abs(a)) ** k for k, c in enumerate(coeffs))
    assert abs(got - want) <= 1e-5 * scale


def test_diff_onesided():
    f = lambda a: a ** 3
    for d in (1, -1):
        assert numerics.diff_onesided(f, 2.0, d) == pytest.approx(12.0, rel=1e-6)


def test_integrate_examples(backend):
    one = parse("1 + 0*a").function("a", backend=backend)
    lin = parse("a").function("a", backend=backend)
    assert numerics.integrate(one, 0.0, 2.0) == 2.0
    assert numerics.integrate(lin, 0.0, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert numerics.integrate(lambda a: 1.0, 0.0, 2.0) == pytest.approx(2.0, abs=1e-14)


def test_integrate_spline():
    total = numerics.integrate(catalog.spline_phi_prime, 0.0, 4.0)
    assert abs(total - 13 / 5) <= 1e-6


def test_integrate_validation():
    with pytest.raises(ValueError):
        numerics.integrate(lambda a: a, 1.0, 0.0)
    assert numerics.integrate(lambda a: a, 1.0, 1.0) == 0.0


@settings(max_examples=100)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=4), st.floats(-3, 3), st.floats(0, 3))
def test_integrate_exact_on_cubics(coeffs, lo, width):
    p = np.polynomial.Polynomial(coeffs)
    P = p.integ()
    hi = lo + width
    assert abs(numerics.integrate(p, lo, hi) - (P(hi) - P(lo))) <= 1e-12 * (1 + abs(P(hi)) + abs(P(lo)))


def test_find_root_examples(backend):
    r = numerics.find_root(lambda a: a * a - 2, 1.0, 2.0)
    assert abs(r - math.sqrt(2)) <= 1e-12
    f = parse("a^2 - 2").function("a", backend=backend)
    assert abs(numerics.find_root(f, 1.0, 2.0) - math.sqrt(2)) <= 1e-12
    x = 0.5
    assert numerics.find_root(lambda a: 2 * a * x - 1, 0.0, 2.0) == pytest.approx(1.0, abs=1e-12)


def test_find_root_spline():
    r = numerics.find_root(lambda a: catalog.spline_phi_prime(a) - 0.75, 0.0, 1.0)
    assert abs(catalog.spline_phi_prime(r) - 0.75) <= 1e-12


def test_find_root_errors(backend):
    with pytest.raises(NoBracket):
        numerics.find_root(lambda a: a * a + 1, -1.0, 1.0)
    with pytest.raises(NoBracket):
        numerics.find_root(parse("a^2 + 1").function("a", backend=backend), -1.0, 1.0)
    with pytest.raises(MaxIterations):
        # a step function over a huge bracket needs ~1000 halvings
        numerics.find_root(lambda a: -1.0 if a < 0.3 else 1.0, -1e300, 1e300,
                           DEFAULT.with_(root_tol=1e-300))


@settings(max_examples=200)
@given(st.floats(-50, 50), st.floats(0.01, 20), st.floats(0, 1))
def test_find_root_stays_in_bracket(lo, width, frac):
    hi = lo + width
    c = lo + frac * width
    r = numerics.find_root(lambda a: math.atan(a - c), lo, hi)
    assert lo <= r <= hi
    assert abs(math.atan(r - c)) <= 1e-12 or abs(r - c) <= 1e-12 * (1 + abs(r))


def test_sign_change_roots_skip_touching_zeros():
    grid = list(np.linspace(-2, 2, 41))
    roots = numerics.sign_change_roots(lambda a: a * a * (a - 1), grid)
    assert roots == [pytest.approx(1.0, abs=1e-12)]
    crossing = numerics.sign_change_roots(lambda a: a, grid)
    assert crossing == [pytest.approx(0.0, abs=1e-15)]


def test_gradient3_examples():
    g = numerics.gradient3(lambda x, y, z: x * x + y * y + z * z, (1, 2, 3))
    assert g == pytest.approx((2, 4, 6), abs=1e-5)
    cone = lambda x, y, z: (x - z) ** 2 + (y - z) ** 2 - z * z
    assert numerics.gradient3(cone, (2, 1, 1)) == pytest.approx((2, 0, -4), abs=1e-5)
    circ = lambda x, y, z: z * z - 2 * x * z - 2 * y * z + 2 * x * y
    assert numerics.gradient3(circ, (3, 4, 12)) == pytest.approx((-16, -18, 10), abs=1e-4)


def test_gradient3_matches_dual_numbers():
    e = parse("x^2*sin(y) + exp(z/3)*y - ln(1 + x^2 + z^2)")
    rng = np.random.default_rng(7)
    for p in rng.uniform(-2, 2, size=(100, 3)):
        b = dict(zip(("x", "y", "z"), p))
        exact = [e.eval_d(b, v).derivative for v in ("x", "y", "z")]
        fd = numerics.gradient3(lambda x, y, z: e.eval({"x": x, "y": y, "z": z}), p)
        for u, w in zip(fd, exact):
            assert abs(u - w) <= 1e-5 * (1 + abs(w))
