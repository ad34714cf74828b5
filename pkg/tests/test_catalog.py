import json
import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.polynomial import Polynomial as P

from clairaut import analysis, catalog, verify
from clairaut.errors import UnknownEntry


@pytest.fixture(scope="module")
def reports():
    return {r.name: r for r in catalog.run_all()}


def test_list_has_all_entries():
    names = catalog.list_entries()
    assert len(names) == 11 and names == sorted(names)
    assert "tilted_cone" in names and "neg_quadratic" in names


def test_every_entry_passes(reports):
    bad = {n: [c.name for c in r.failed()] for n, r in reports.items() if not r.passed}
    assert bad == {}


def test_unknown_entry():
    with pytest.raises(UnknownEntry):
        catalog.get("no_such_entry")


def test_reports_serialize(reports):
    for r in reports.values():
        d = json.loads(json.dumps(r.to_dict()))
        assert d["name"] == r.name and d["passed"] is True
        assert d["n_points"] == len(r.points)


def test_hyperbola_slice_point(reports):
    r = reports["hyperbola_envelope"]
    pts = [p for p in r.points if p.accepted]
    # on the z = 1 slice every point satisfies 4 X Y = 1
    for p in pts:
        x, y, z = p.p
        assert abs(4 * (x / z) * (y / z) - 1) <= 1e-8
    assert any("(0.5, 0.5)" in c.name and c.passed for c in r.checks)


def _piece_poly(k):
    c = (1, 1, 3, 3)[k]
    w = (1.0, 0.5, 0.5, 1.0)[k]
    base = (P([-c, 1]) ** 2 - 1) ** 2
    return w * base + (1 - w)


def test_spline_oracle_piece_integrals():
    want = [Fraction(8, 15), Fraction(23, 30), Fraction(23, 30), Fraction(8, 15)]
    phi = catalog.SplinePhi()
    for k in range(4):
        # exact rational antiderivative of the piece
        coef = [Fraction(c).limit_denominator(1000) for c in _piece_poly(k).coef]
        prim = lambda t: sum(c * Fraction(t) ** (i + 1) / (i + 1) for i, c in enumerate(coef))
        assert prim(k + 1) - prim(k) == want[k]
        assert phi.piece_integrals[k] == pytest.approx(float(want[k]), abs=1e-9)
    assert sum(want) == Fraction(13, 5)


def test_spline_matches_polynomials():
    for a in np.linspace(0, 4, 41):
        k = min(int(a), 3)
        assert catalog.spline_phi_prime(a) == pytest.approx(_piece_poly(k)(a), abs=1e-13)


def test_spline_knots_agree():
    for knot, want in ((1, 1.0), (2, 0.5), (3, 1.0)):
        assert catalog.spline_piece(knot - 1, knot) == want
        assert catalog.spline_piece(knot, knot) == want


def test_spline_phi_origin_and_total():
    phi = catalog.SplinePhi()
    assert phi(0.0) == 0.0
    assert phi(4.0) == pytest.approx(2.6, abs=1e-9)
    assert phi(2.0) == pytest.approx(8 / 15 + 23 / 30, abs=1e-9)


def test_bimodal_spline_report(reports):
    r = reports["bimodal_spline"]
    assert r.data["witness"] is not None
    integral = next(c for c in r.checks if c.name.startswith("integral"))
    assert integral.value <= 1e-6


def test_chojnacki_report(reports):
    r = reports["chojnacki_cusp"]
    rec = next(c for c in r.checks if c.name.startswith("|m1"))
    assert rec.value <= 1e-10
    assert next(c for c in r.checks if c.name == "cusp at t = 0").passed


def test_tilted_cone_erratum_pinned():
    entry = catalog.get("tilted_cone")
    level = entry.expected["implicit"]
    a, b = entry.params["printed"].g(0.0)
    assert (a, b) == pytest.approx((-0.5, 0.0))
    assert not verify.tangency_check(level, a, b, (2.0, 1.0, 1.0))
    a, b = entry.constraint.g(0.0)
    assert verify.tangency_check(level, a, b, (2.0, 1.0, 1.0))
    assert "erratum" in entry.notes.lower()


def test_power_alpha_custom():
    r = catalog.run("power_alpha", alphas=(0.25,))
    assert r.passed


def test_euler_generator_custom_h():
    r = catalog.run("euler_generator", H="2 + t")
    assert r.passed


def test_invertibility_witness_pairs(reports):
    # invertible phi' gives no witness; the non-invertible spline does
    assert analysis.invertibility_check(lambda a: -1 / a ** 2, (0.5, 4))
    assert any(c.name == "no multivalued witness" and c.passed for c in reports["sqrt_xy"].checks)
    assert not analysis.invertibility_check(catalog.spline_phi_prime, (0, 4))
    assert reports["bimodal_spline"].data["witness"] is not None


def test_write_artifacts(tmp_path, reports):
    csv_path, json_path = catalog.write_artifacts(reports["sqrt_xy"], tmp_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "x,y,z,param,f_resid,stat_resid"
    assert len(lines) == 1 + len(reports["sqrt_xy"].points)
    assert json.loads(json_path.read_text())["name"] == "sqrt_xy"
