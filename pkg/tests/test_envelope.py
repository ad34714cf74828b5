import math

import numpy as np
import pytest

from clairaut import catalog, envelope
from clairaut.envelope import EnvelopePoint, cross_section_z1
from clairaut.errors import NoBracket
from clairaut.families import (FunctionOfA, ImplicitRelation, InverseMap, ParametricCurve,
                               PlaneFamily, enumerate_branches)
from clairaut.verify import ExplicitGraph, homogeneity_check

INV = FunctionOfA.from_expr("1/a", (0.0, math.inf))
CIRCLE = ImplicitRelation.from_expr("(a-1)^2 + (b-1)^2 - 1", (0.0, 2.0), (-0.5, 2.5))


def circle_branch(sign):
    return next(br for br in enumerate_branches(CIRCLE, 41) if br.crossing == sign)


def test_function_constraint_examples():
    s = envelope.envelope_function_constraint(None, INV, [2.0, 1.0], [4.0, 1.0, 0.0])
    coords = s.coords(accepted_only=False)
    assert coords[0] == pytest.approx((1.0, 4.0, 4.0), abs=1e-12)
    assert coords[4] == pytest.approx((1.0, 1.0, 2.0), abs=1e-12)
    assert coords[2] == (0.0, 0.0, 0.0)
    for p in s.points:
        assert p.z == pytest.approx(2 * math.sqrt(p.x * p.y), abs=1e-12)


def test_function_constraint_membership_invariant():
    s = envelope.envelope_function_constraint(None, INV, np.linspace(0.3, 5, 17), np.linspace(-3, 3, 13))
    assert len(s.accepted) == len(s.points)
    for p in s.accepted:
        assert p.family_residual <= 1e-8 and p.stationarity_residual <= 1e-6


def test_tilted_family_rejected():
    with pytest.raises(ValueError):
        envelope.envelope_function_constraint(PlaneFamily(lambda a, b: 1.0), INV, [1.0], [1.0])
    with pytest.raises(ValueError):
        envelope.envelope_function_constraint(None, INV, [], [1.0])


@pytest.mark.parametrize("phi, grid", [("1/a", (0.3, 4)), ("-a^2/2", (-3, 3))])
def test_scaling_closure(phi, grid):
    c = FunctionOfA.from_expr(phi)
    s = envelope.envelope_function_constraint(None, c, np.linspace(*grid, 10), np.linspace(0.5, 2, 10))
    for pt in s.accepted:
        for sc in (0.5, 2.0, -1.0):
            fres, sres = s.residuals(tuple(sc * v for v in pt.p), pt.param)
            assert fres <= 1e-8 and sres <= 1e-6


def test_projective_curve():
    assert envelope.projective_curve(INV, [2.0, 1.0]) == [pytest.approx((0.25, 1.0)),
                                                         pytest.approx((1.0, 2.0))]
    X, Z = envelope.projective_curve(INV, [2.0])[0]
    assert Z * Z == pytest.approx(4 * X)
    const = FunctionOfA.from_expr("3 + 0*a")
    assert envelope.projective_curve(const, [-1.0, 0.0, 5.0]) == [(0.0, 3.0)] * 3


def test_projective_curve_matches_y1_points():
    a_grid = np.linspace(0.4, 3, 9)
    pts = envelope.envelope_function_constraint(None, INV, a_grid, [1.0]).coords()
    for (x, _, z), (X, Z) in zip(pts, envelope.projective_curve(INV, a_grid)):
        assert (x, z) == pytest.approx((X, Z), abs=1e-15)


@pytest.mark.parametrize("phi, lo, hi, target", [
    ("1/a", 0.05, 20.0, lambda x, y: 2 * math.sqrt(x * y)),
    ("-a^2/2", -10.0, 10.0, lambda x, y: x * x / (2 * y)),
])
def test_explicit_envelope_homogeneous(phi, lo, hi, target):
    h = envelope.explicit_envelope(FunctionOfA.from_expr(phi), lo, hi)
    for x, y in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.7)]:
        assert h(x, y) == pytest.approx(target(x, y), rel=1e-10)
    g = ExplicitGraph(h, ((0.5, 2.0), (0.5, 2.0)))
    assert homogeneity_check(g, 1.0, samples=25, s_values=(0.5, 2.0, 3.0)).passed(1e-9)


def test_explicit_envelope_no_bracket():
    h = envelope.explicit_envelope(INV, 0.5, 1.0)
    with pytest.raises(NoBracket):
        h(100.0, 1.0)


def test_branch_examples():
    up = circle_branch(+1)
    (p,) = envelope.envelope_branch(None, up, [(3.0, 4.0)]).accepted
    assert p.param == pytest.approx(1.6, abs=1e-10)
    assert p.z == pytest.approx(12.0, abs=1e-10)
    assert 144 == pytest.approx(2 * 3 * p.z + 2 * 4 * p.z - 2 * 12)
    at_fold = envelope.envelope_branch(None, up, [(1.0, 0.0)]).accepted
    assert any(q.param == pytest.approx(2.0, abs=1e-9) and q.z == pytest.approx(2.0, abs=1e-9)
               for q in at_fold)


def test_branch_hyperbola():
    (br,) = enumerate_branches(ImplicitRelation.from_expr("a*b - 1", (0.2, 5), (0.1, 6)), 60)
    (p,) = envelope.envelope_branch(None, br, [(1.0, 1.0)]).accepted
    assert p.param == pytest.approx(1.0, abs=1e-9)
    assert p.z == pytest.approx(2.0, abs=1e-12)


def test_branch_records_skipped_points():
    (br,) = enumerate_branches(ImplicitRelation.from_expr("a*b - 1", (0.5, 2), (0.1, 3)), 20)
    s = envelope.envelope_branch(None, br, [(1.0, 1.0), (100.0, 1.0)])
    assert len(s.accepted) == 1
    assert s.diagnostics["skipped"][0]["at"] == (100.0, 1.0)


def test_parametric_cone_examples():
    cone = catalog.get("tilted_cone").constraint
    d0 = envelope.characteristic_direction(cone, 0.0)
    p0 = tuple(v / d0[2] for v in d0)
    assert p0 == pytest.approx((2.0, 1.0, 1.0), abs=1e-8)
    d1 = envelope.characteristic_direction(cone, math.pi / 2)
    assert tuple(v / d1[2] for v in d1) == pytest.approx((1.0, 2.0, 1.0), abs=1e-8)
    s = envelope.envelope_parametric_planes(None, cone, [0.0], [1.0 / d0[2]])
    (pt,) = s.accepted
    x, y, z = pt.p
    assert (x - z) ** 2 + (y - z) ** 2 == pytest.approx(z * z, abs=1e-10)


def test_parametric_hyperbola_reparametrised():
    g = ParametricCurve(lambda t: (t, 1.0 / t), (0.1, 10.0))
    d = envelope.characteristic_direction(g, 2.0)
    scaled = tuple(v * 4.0 / d[1] for v in d)
    assert scaled == pytest.approx((1.0, 4.0, 4.0), abs=1e-8)


def test_parametric_excluded_and_degenerate():
    cone = catalog.get("tilted_cone").constraint
    s = envelope.envelope_parametric_planes(None, cone, [math.pi, 0.0, -math.pi / 2])
    assert len(s.points) == len(envelope.DEFAULT_S_GRID)
    assert len(s.diagnostics["excluded"]) == 2
    flat = ParametricCurve(lambda t: (1.0, 2.0), (-1.0, 1.0))
    s = envelope.envelope_parametric_planes(None, flat, [0.0])
    assert not s.points and len(s.diagnostics["degenerate"]) == 1


def test_inverse_map_examples():
    m = InverseMap(lambda x, y: (3 * x * x / (y * y), -2 * x ** 3 / y ** 3), ((-1, 3), (0.5, 2)))
    s = envelope.envelope_inverse_map(None, m, [(1.0, 1.0), (2.0, 1.0), (0.0, 1.0)])
    assert [p.z for p in s.points] == [1.0, 8.0, 0.0]
    assert all(math.isnan(p.param) for p in s.points)
    assert all(p.accepted for p in s.points)


def test_cross_section():
    pts = [EnvelopePoint((1.0, 4.0, 4.0), 2.0, 0.0, 0.0), EnvelopePoint((0.0, 0.0, 0.0), 1.0, 0.0, 0.0)]
    sec = cross_section_z1(pts)
    assert sec.points == [(0.25, 1.0)]
    assert sec.params == [2.0]
    assert sec.dropped == 1
    assert cross_section_z1([(2.0, 2.0, -2.0)]).points == [(-1.0, -1.0)]
    with pytest.raises(ValueError):
        cross_section_z1(pts, eps=0.0)
