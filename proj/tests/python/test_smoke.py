import cmath
import json
import pathlib

import pytest

import greens

FIXTURES = pathlib.Path(__file__).resolve().parents[2] / "fixtures"


def test_free_halfline():
    z = 2 + 1j
    k = greens.sqrt_upper(z)
    x, xp = 0.3, 0.8
    expect = (cmath.exp(1j * k * abs(x - xp)) - cmath.exp(1j * k * (x + xp))) / (2j * k)
    got = greens.green_direct(greens.Potential1D.zero(), greens.DomainSpec.half_line(), z, x, xp)
    assert abs(got - expect) < 1e-10 * abs(expect)
    assert abs(greens.free_halfline_green(z, x, xp) - expect) < 1e-14


def test_profile_matches_direct():
    u = greens.Potential1D.harmonic(4.0, 0.5)
    box = greens.DomainSpec.interval(1.0)
    z = -1 + 3j
    p = greens.solve_profile(u, box, z)
    for x, xp in [(0.2, 0.7), (0.9, 0.4)]:
        g = greens.green_direct(u, box, z, x, xp)
        assert abs(p.green(x, xp) - g) < 1e-7 * abs(g)


def test_gradient_coefficients():
    c = greens.gradient_coefficients()
    assert (c["lead"], c["laplacian"], c["grad_sq"], c["bilaplacian"]) == ("1/2", "-1/16", "-5/64", "1/64")
    assert c["complete"]


def test_sphere_prediction():
    p = greens.boundary_prediction(greens.ImplicitSurface.sphere(2.0), [0.0, 0.0, 2.0], 2 + 1j)
    assert p["c1"] == -1.0
    assert p["d2"] == -0.5


def test_scenario_round_trip(tmp_path):
    s = greens.load_scenario(str(FIXTURES / "13-geometry-predictions.yaml"))
    r = greens.run_scenario(s)
    assert r.passed
    t = r.tables[0]
    assert greens.ResultTable.from_csv(t.to_csv()) == t
    assert greens.ResultTable.from_json(t.to_json()) == t
    assert json.loads(t.to_json())["metadata"]["scenario_hash"] == s.hash()
    cols = greens.table_columns(t)
    assert isinstance(cols["xi0"][0], complex)
    r.write(str(tmp_path), "json")
    assert (tmp_path / "summary.json").exists()


def test_errors():
    with pytest.raises(greens.ConfigError):
        greens.parse_scenario("name: x\n")
    with pytest.raises(greens.NumericalError, match="NearEigenvalue"):
        greens.green_direct(greens.Potential1D.zero(), greens.DomainSpec.interval(cmath.pi), 1.0, 0.3, 0.5)
