import numpy as np
import pytest
from scipy.optimize import brentq

from potkernels.errors import NumericalError, OutsideDomainError
from potkernels.geometry import Circle, Domain, build_grid
from potkernels.integral_eq import KerzmanSteinOperator, cauchy_eval, cauchy_rhs
from potkernels.reference import annulus_szego, disc_garabedian, disc_szego, fixture
from potkernels.szego import (
    Tolerances,
    ahlfors_eval,
    argument_principle,
    assemble,
    candidate_base_points,
    garabedian_boundary,
    garabedian_eval,
    newton_identities,
    polynomial_roots,
    power_sums,
    szego_eval,
)

from conftest import interior_sample

ALL = ["disc", "offset-disc", "annulus-0.5", "3conn", "trig2"]


class TestGarabedianBoundary:
    def test_disc_origin(self, disc0):
        g = disc0.grid
        assert np.allclose(garabedian_boundary(disc0.szego.S[0], g), 1 / (2 * np.pi * g.z))

    @pytest.mark.parametrize("name", ALL)
    def test_residue(self, bundles, name):
        d = bundles[name].szego
        total = np.sum(d.L[0] * d.grid.zeta_weights)
        assert total == pytest.approx(1j, abs=1e-10)

    def test_modulus(self, annulus):
        d = annulus.szego
        assert np.allclose(np.abs(d.L[0]), np.abs(d.S[0]), rtol=1e-14)


class TestAhlfors:
    def test_disc_origin_identity(self, disc0):
        d = disc0.szego
        assert np.max(np.abs(d.f - d.grid.z)) < 1e-13
        assert ahlfors_eval(d, 0.4 + 0.1j)[0] == pytest.approx(0.4 + 0.1j, abs=1e-13)

    def test_disc_mobius(self, disc):
        d = disc.szego
        z = d.grid.z
        assert np.max(np.abs(d.f - (z - 0.3) / (1 - 0.3 * z))) < 1e-9

    @pytest.mark.parametrize("name", ALL)
    def test_derivative_at_base(self, bundles, name):
        d = bundles[name].szego
        fp = d.ahlfors_derivative(d.a)[0]
        assert abs(fp - 2 * np.pi * d.S_aa) < 1e-6 * abs(2 * np.pi * d.S_aa)

    @pytest.mark.parametrize("name", ALL)
    def test_unimodular(self, bundles, name):
        assert np.max(np.abs(np.abs(bundles[name].szego.f) - 1)) < 1e-8

    @pytest.mark.parametrize("name", ALL)
    def test_winding(self, bundles, name):
        d = bundles[name].szego
        total = 0.0
        for j in range(d.n):
            v = d.f[d.grid.curve_slice(j)]
            ph = np.unwrap(np.angle(np.append(v, v[0])))
            total += (ph[-1] - ph[0]) / (2 * np.pi)
        assert round(total) == d.n

    def test_maps_into_disc(self, three):
        z = interior_sample(three.domain, 50, seed=4, clearance=0.1)
        assert np.all(np.abs(three.szego.ahlfors(z)) < 1)


class TestPowerSums:
    def test_disc_empty(self, disc):
        d = disc.szego
        ps = power_sums(d.S[0], d.grid, 1)
        assert len(ps.p) == 0 and len(ps.e) == 0

    def test_newton_by_hand(self):
        assert np.allclose(newton_identities([3, 5]), [3, 2])

    def test_annulus_root(self, annulus):
        d = annulus.szego
        root = brentq(lambda x: annulus_szego(0.5, x, 0.7).real, -0.99, -0.51, xtol=1e-15)
        ps = power_sums(d.S[0], d.grid, 2)
        assert abs(ps.p[0] - root) < 1e-6
        assert d.zeros[0] == pytest.approx(-0.5 / 0.7, abs=1e-12)

    def test_three_connected(self, three):
        d = three.szego
        ps = power_sums(d.S[0], d.grid, 3)
        assert np.allclose(ps.p, [np.sum(d.zeros), np.sum(d.zeros ** 2)], atol=1e-10)

    def test_argument_principle(self, bundles):
        for name, b in bundles.items():
            d = b.szego
            assert argument_principle(d.S[0], d.grid).real == pytest.approx(d.n - 1, abs=1e-8)


class TestPolynomialRoots:
    def test_quadratic(self):
        assert np.allclose(polynomial_roots([3, 2]), [1, 2])

    def test_linear(self):
        assert np.allclose(polynomial_roots([-0.5]), [-0.5])

    def test_imaginary(self):
        assert np.allclose(np.sort_complex(polynomial_roots([0, 1])), [-1j, 1j])

    def test_empty(self):
        assert len(polynomial_roots([])) == 0


class TestAssemble:
    def test_disc(self, disc):
        d = disc.szego
        assert len(d.zeros) == 0
        assert d.c0 == pytest.approx(2 * np.pi * 0.91, rel=1e-12)

    def test_annulus(self, annulus):
        d = annulus.szego
        assert len(d.zeros) == 1
        assert abs(cauchy_eval(d.S[0], d.grid, d.zeros[0])) < 1e-8

    def test_three_connected(self, three):
        d = three.szego
        assert len(d.zeros) == 2
        assert abs(d.zeros[0] - d.zeros[1]) > 1e-3
        assert np.max(np.abs(d.C @ d.gram - np.eye(2))) < 1e-10
        assert d.diagnostics["inverse_residual"] < 1e-10

    def test_c0(self, bundles):
        for b in bundles.values():
            d = b.szego
            assert d.c0 == pytest.approx(1 / d.S_aa.real)
            assert abs(d.S_aa.imag) < 1e-12 * abs(d.S_aa)

    def test_gram_by_reproducing_quadrature(self, three):
        # S(a_j, a_k) = integral of S(z, a_k) conj(S(z, a_j)) ds
        d = three.szego
        g = d.grid
        quad = np.conj(d.S[1:]) @ (d.S[1:] * g.w).T
        assert np.max(np.abs(quad - d.gram)) < 1e-10

    def test_zeros_simple(self, bundles):
        for b in bundles.values():
            d = b.szego
            if d.n > 1:
                assert np.all(np.abs(cauchy_eval(d.S[0], d.grid, d.zeros, order=1)) > 1e-8)

    def test_auto_candidates_inside(self):
        for name in ALL:
            dom = fixture(name).domain
            c = candidate_base_points(dom)
            assert len(c) == 8
            assert np.all(dom.contains(np.array(c)))

    def test_explicit_outside_rejected(self):
        with pytest.raises(OutsideDomainError):
            assemble(fixture("annulus-0.5").domain, 64, 0.2)

    def test_degenerate_base_point_reports(self):
        # an impossible zero tolerance fails verification; an explicit a is not retried
        dom = fixture("annulus-0.5").domain
        with pytest.raises(NumericalError):
            assemble(dom, 64, 0.75, Tolerances(zero=1e-300))

    def test_tolerances_configurable(self):
        t = Tolerances(zero=1e-6, retries=2)
        assert t.zero == 1e-6 and t.separation == 1e-6 and t.simple == 1e-8

    def test_diagnostics(self, three):
        diag = three.szego.diagnostics
        for key in ("kerzman_stein_condition", "kerzman_stein_residual", "gram_condition", "power_sums"):
            assert key in diag
        assert diag["kerzman_stein_residual"] < 1e-12


class TestSzegoEval:
    def test_disc_example(self, disc):
        z, w = 0.2 + 0.1j, -0.4
        assert szego_eval(disc.szego, z, w) == pytest.approx(disc_szego(z, w), abs=1e-9)

    def test_collapse_at_base(self, annulus):
        d = annulus.szego
        g = d.grid
        z = np.array([0.8, 0.6j, -0.7 + 0.1j])
        direct = cauchy_eval(d.S[0], g, z)
        assert np.max(np.abs(d.szego(z, np.full(3, d.a)) - direct)) < 1e-14

    def test_annulus_series(self, annulus):
        assert szego_eval(annulus.szego, 0.8, 0.6j) == pytest.approx(annulus_szego(0.5, 0.8, 0.6j), abs=1e-6)

    def test_boundary_nodes(self, annulus):
        d = annulus.szego
        g = d.grid
        # w on the boundary: S(z, w) is the stored sample structure
        assert np.isfinite(d.szego(0.7, g.z[3]))

    def test_outside(self, annulus):
        with pytest.raises(OutsideDomainError):
            szego_eval(annulus.szego, 0.1, 0.7)

    @pytest.mark.parametrize("name", ALL)
    def test_hermitian_and_positive(self, bundles, name):
        b = bundles[name]
        dom = b.domain
        z = interior_sample(dom, 30, seed=1, clearance=0.05 * dom.diameter)
        w = interior_sample(dom, 30, seed=2, clearance=0.05 * dom.diameter)
        S = b.szego.szego(z, w)
        assert np.max(np.abs(S - np.conj(b.szego.szego(w, z))) / np.maximum(1, np.abs(S))) < 1e-9
        diag = b.szego.szego(z, z)
        assert np.all(diag.real > 0)
        assert np.all(np.abs(diag.imag) < 1e-10 * np.abs(diag))

    @pytest.mark.parametrize("name", ALL)
    def test_reproducing(self, bundles, name):
        d = bundles[name].szego
        g = d.grid
        for k in range(3):
            assert np.sum(np.conj(d.S[0]) * g.z ** k * g.w) == pytest.approx(d.a ** k, abs=1e-8)

    @pytest.mark.parametrize("name", ["annulus-0.5", "3conn", "trig2"])
    def test_independent_solve(self, bundles, name):
        d = bundles[name].szego
        op = KerzmanSteinOperator(d.grid)
        dom = d.domain
        w0 = interior_sample(dom, 1, seed=9, clearance=0.1 * dom.diameter)[0]
        z = interior_sample(dom, 10, seed=10, clearance=0.1 * dom.diameter)
        ref = cauchy_eval(op.solve(cauchy_rhs(d.grid, w0)), d.grid, z)
        assert np.max(np.abs(d.szego(z, np.full(10, w0)) - ref) / np.abs(ref)) < 1e-7


class TestGarabedianEval:
    def test_disc(self, disc):
        z = np.array([0.2 + 0.1j, -0.5j, 0.7])
        w = np.array([-0.4, 0.3 + 0.3j, 0.1j])
        assert np.max(np.abs(garabedian_eval(disc.szego, z, w) - disc_garabedian(z, w))) < 1e-8

    @pytest.mark.parametrize("name", ALL)
    def test_antisymmetric(self, bundles, name):
        b = bundles[name]
        dom = b.domain
        z = interior_sample(dom, 30, seed=3, clearance=0.05 * dom.diameter)
        w = interior_sample(dom, 30, seed=4, clearance=0.05 * dom.diameter)
        assert np.max(np.abs(b.szego.garabedian(z, w) + b.szego.garabedian(w, z))) < 1e-9

    @pytest.mark.parametrize("name", ["disc", "annulus-0.5", "3conn"])
    def test_residue_small_circle(self, bundles, name):
        d = bundles[name].szego
        w = {"disc": 0.1 + 0.2j, "annulus-0.5": 0.75j, "3conn": 0.1 + 0.5j}[name]
        rho, M = 0.05, 64
        th = 2 * np.pi * np.arange(M) / M
        zeta = w + rho * np.exp(1j * th)
        dzeta = 1j * rho * np.exp(1j * th) * 2 * np.pi / M
        val = np.sum(d.garabedian(zeta, np.full(M, w)) * dzeta) / (2j * np.pi)
        assert val == pytest.approx(1 / (2 * np.pi), abs=1e-10)

    def test_pole(self, annulus):
        with pytest.raises(NumericalError):
            annulus.szego.garabedian(0.7, 0.7)

    def test_base_point_pole_column(self, three):
        # L(z, a) through the general formula equals the stored basis function
        d = three.szego
        z = np.array([0.1 - 0.3j, -0.2 + 0.7j])
        direct = d.garabedian_basis(z)[0]
        assert np.max(np.abs(d.garabedian(z, np.full(2, d.a)) - direct)) < 1e-10


class TestOtherDomains:
    def test_ellipse_like_assembles(self):
        from potkernels.geometry import TrigCurve
        dom = Domain([Circle(0.2, 0.2, -1), TrigCurve([(1, 1.2), (-1, 0.3)])])
        d = assemble(dom, 128)
        assert len(d.zeros) == 1
        assert np.max(np.abs(np.abs(d.f) - 1)) < 1e-8

    def test_coarse_grid(self):
        d = assemble(fixture("annulus-0.5").domain, 32)
        assert len(d.zeros) == 1
