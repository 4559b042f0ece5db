import json

import numpy as np
import pytest

from potkernels.errors import GeometryError, OnBoundaryError
from potkernels.geometry import (
    Circle,
    Domain,
    TrigCurve,
    build_grid,
    contains,
    curve_eval,
    load_domain,
    save_domain,
    spectral_derivative,
)
from potkernels.reference import fixture

TWO_PI = 2 * np.pi


def unit_disc():
    return Domain([Circle(0, 1, 1)])


def annulus(r=0.5):
    return Domain([Circle(0, r, -1), Circle(0, 1, 1)])


class TestCurveEval:
    def test_unit_circle_start(self):
        z, dz, _ = curve_eval(Circle(0, 1, 1), 0.0)
        assert z == pytest.approx(1)
        assert dz == pytest.approx(TWO_PI * 1j)

    def test_unit_circle_quarter(self):
        z, dz, _ = curve_eval(Circle(0, 1, 1), 0.25)
        assert z == pytest.approx(1j)
        assert dz == pytest.approx(-TWO_PI)

    def test_clockwise_half_radius(self):
        z, dz, _ = curve_eval(Circle(0, 0.5, -1), 0.0)
        assert z == pytest.approx(0.5)
        assert dz == pytest.approx(-np.pi * 1j)

    def test_trig_second_derivative(self):
        c = TrigCurve([(1, 1.0), (-2, 0.15)])
        t = np.linspace(0, 1, 7)
        h = 1e-5
        _, dz, d2z = c.evaluate(t)
        fd = (c.evaluate(t + h)[1] - c.evaluate(t - h)[1]) / (2 * h)
        assert np.allclose(d2z, fd, rtol=1e-7)

    def test_bad_circle(self):
        with pytest.raises(GeometryError):
            Circle(0, -1)
        with pytest.raises(GeometryError):
            Circle(0, 1, 2)


class TestBuildGrid:
    def test_disc_four_nodes(self):
        g = build_grid(unit_disc(), 4)
        assert np.allclose(g.z, [1, 1j, -1, -1j])
        assert np.allclose(g.w, TWO_PI / 4)

    def test_unit_circle_tangent(self):
        g = build_grid(unit_disc(), 32)
        assert np.allclose(g.T, 1j * g.z)

    def test_inner_clockwise_tangent(self):
        g = build_grid(annulus(), 32)
        s = g.curve_slice(0)
        assert np.allclose(g.T[s], -1j * g.z[s] / 0.5)
        assert np.allclose(g.T[s], -1j * np.exp(-TWO_PI * 1j * g.t[s]))

    def test_unit_tangent_and_circumference(self):
        g = build_grid(Domain([Circle(0.2, 0.3, 1)]), 64)
        assert np.allclose(np.abs(g.T), 1, atol=1e-15)
        assert g.w.sum() == pytest.approx(TWO_PI * 0.3, abs=1e-13)

    @pytest.mark.parametrize("m", [-5, -1, 1, 3, 15])
    def test_quadrature_exactness(self, m):
        g = build_grid(unit_disc(), 32)
        assert abs(np.sum(g.w * g.z ** m)) < 1e-13

    def test_quadrature_constant(self):
        g = build_grid(unit_disc(), 32)
        assert np.sum(g.w) == pytest.approx(TWO_PI, abs=1e-13)

    @pytest.mark.parametrize("N", [3, 5, 0])
    def test_bad_sizes(self, N):
        with pytest.raises(GeometryError):
            build_grid(unit_disc(), N)

    def test_read_only(self):
        g = build_grid(unit_disc(), 8)
        with pytest.raises(ValueError):
            g.z[0] = 0

    def test_node_index(self):
        g = build_grid(annulus(), 16)
        assert g.node_index(g.z[20]) == 20
        assert g.node_index(0.75) is None


class TestSpectralDerivative:
    def test_sine(self):
        g = build_grid(unit_disc(), 16)
        t = g.t
        d = spectral_derivative(np.sin(TWO_PI * t), g)
        assert np.max(np.abs(d - TWO_PI * np.cos(TWO_PI * t))) < 1e-12

    def test_constant(self):
        g = build_grid(annulus(), 16)
        assert np.max(np.abs(spectral_derivative(np.full(g.size, 3.0), g))) < 1e-14

    def test_exponential(self):
        g = build_grid(unit_disc(), 16)
        e = np.exp(TWO_PI * 1j * g.t)
        assert np.allclose(spectral_derivative(e, g), TWO_PI * 1j * e, atol=1e-12)

    def test_matches_curve_derivative(self):
        g = build_grid(fixture("trig2").domain, 32)
        assert np.allclose(spectral_derivative(g.z, g), g.dz, atol=1e-11)

    def test_batched(self):
        g = build_grid(annulus(), 16)
        F = np.array([g.z, g.z ** 2])
        d = spectral_derivative(F, g)
        assert np.allclose(d[0], spectral_derivative(g.z, g))
        assert np.allclose(d[1], 2 * g.z * g.dz, atol=1e-11)

    def test_synthesis_identity(self):
        # band-limited synthesis: derivative of sum c_k e^{2 pi i k t} is exact
        g = build_grid(unit_disc(), 32)
        rng = np.random.default_rng(3)
        k = np.arange(-10, 11)
        c = rng.normal(size=k.size) + 1j * rng.normal(size=k.size)
        E = np.exp(TWO_PI * 1j * np.outer(g.t, k))
        exact = E @ (TWO_PI * 1j * k * c)
        assert np.max(np.abs(spectral_derivative(E @ c, g) - exact)) < 1e-12 * np.max(np.abs(exact))


class TestContains:
    def test_annulus_examples(self):
        dom = annulus()
        assert contains(dom, 0.7)
        assert not contains(dom, 0.2)
        assert not contains(dom, 2.0)

    def test_on_boundary(self):
        with pytest.raises(OnBoundaryError):
            annulus().contains(1.0)

    def test_vectorized(self):
        assert list(annulus().contains(np.array([0.7, 0.1, 0.8j]))) == [True, False, True]

    def test_orientation_sums(self):
        # (1/2 pi i) sum over all curves of integral dz / (z - p)
        dom = fixture("3conn").domain
        g = build_grid(dom, 128)
        def total(p):
            return np.sum(g.zeta_weights / (g.z - p)) / (2j * np.pi)
        assert total(0.0) == pytest.approx(1, abs=1e-12)
        assert total(-0.45) == pytest.approx(0, abs=1e-12)
        assert total(3.0) == pytest.approx(0, abs=1e-12)

    def test_boundary_distance(self):
        d = fixture("trig2").domain.boundary_distance(np.array([0.1]))
        assert d[0] == pytest.approx(0.3, abs=1e-12)


class TestValidation:
    def test_intersecting_circles(self):
        with pytest.raises(GeometryError, match="curves intersect"):
            Domain([Circle(0, 1, 1), Circle(0.9, 0.3, -1)], outer=0)

    def test_nested_holes(self):
        with pytest.raises(GeometryError, match="nested"):
            Domain([Circle(0, 0.5, -1), Circle(0, 0.2, -1), Circle(0, 1, 1)])

    def test_hole_outside(self):
        with pytest.raises(GeometryError, match="curves intersect"):
            Domain([Circle(3, 0.5, -1), Circle(0, 1, 1)])

    def test_outer_clockwise(self):
        with pytest.raises(GeometryError, match="counterclockwise") as exc:
            Domain([Circle(0, 1, -1)])
        assert exc.value.curve == 0

    def test_inner_counterclockwise(self):
        with pytest.raises(GeometryError, match="clockwise") as exc:
            Domain([Circle(0, 1, 1), Circle(0, 0.3, 1)], outer=0)
        assert exc.value.curve == 1

    def test_figure_eight(self):
        eight = TrigCurve([(1, -0.5j), (-1, 0.5j), (2, 0.25), (-2, -0.25)])
        with pytest.raises(GeometryError, match="not simple"):
            Domain([eight])

    def test_constant_curve(self):
        with pytest.raises(GeometryError):
            TrigCurve([(0, 1.0)])

    @pytest.mark.parametrize("f", ["disc", "offset-disc", "annulus-0.5", "3conn", "trig2"])
    def test_fixtures_valid(self, f):
        fx = fixture(f)
        build_grid(fx.domain, fx.N)


class TestSpec:
    def test_roundtrip(self, tmp_path):
        dom = fixture("trig2").domain
        p = tmp_path / "d.json"
        save_domain(dom, p)
        again = load_domain(p)
        assert again.to_spec() == dom.to_spec()

    def test_outer_reordered(self):
        spec = {"curves": [{"type": "circle", "center": [0, 0], "radius": 1, "orientation": 1},
                           {"type": "circle", "center": [0, 0], "radius": 0.5, "orientation": -1}],
                "outer": 0}
        dom = Domain.from_spec(spec)
        assert dom.curves[-1].radius == 1
        assert dom.source_index == (1, 0)

    def test_malformed(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(GeometryError):
            load_domain(p)
        with pytest.raises(GeometryError, match="curve 0"):
            Domain.from_spec({"curves": [{"type": "square"}]})
        with pytest.raises(GeometryError):
            Domain.from_spec({"curves": [{"type": "circle", "center": [0]}]})

    def test_shipped_json(self):
        from potkernels.reference import fixture_spec_path, fixtures
        for f in fixtures():
            spec = json.loads(fixture_spec_path(f.name).read_text())
            assert Domain.from_spec(spec).to_spec() == f.domain.to_spec()
