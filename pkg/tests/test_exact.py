"""Closed-form radial solutions against independent numerical oracles."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from onelaplace.core import DomainError, build_radial_mesh
from onelaplace.exact import (MILD, SINGULAR, TRIVIAL, UNBOUNDED, UnsupportedExponentError,
                              build_exact, exact_du, exact_residual, exact_u, exact_z, sample_u,
                              threshold_radius)


def profile_by_quadrature(N, lam, q, r, b):
    """u(r) = int_r^b (lam s^-q - (N-1)/s) ds, the solution of the core ODE vanishing at b."""
    val, _ = quad(lambda s: lam * s ** (-q) - (N - 1) / s, r, b, epsabs=1e-13, epsrel=1e-13)
    return val


def threshold_by_root(N, lam, q):
    """Radius where the core ODE's slope vanishes (q > 1) or the plateau field reaches -1 (q < 1)."""
    if q > 1:
        g = lambda r: (N - 1) / r - lam * r ** (-q)
    else:
        g = lambda r: lam / (N - q) * r ** (1 - q) - 1.0
    return brentq(g, 1e-8, 1e8, xtol=1e-15, rtol=1e-14)


def plateau_field_by_ode(N, lam, q, rho, r_end):
    """Integrate (r^(N-1) z)' = -lam r^(N-1-q) from z(rho) = -1."""
    sol = solve_ivp(lambda r, y: [-lam * r ** (N - 1 - q)], (rho, r_end), [-rho ** (N - 1)],
                    rtol=1e-12, atol=1e-14)
    return sol.y[0, -1] / r_end ** (N - 1)


class TestThreshold:
    """Threshold radius."""

    def test_singular_example(self):
        assert threshold_radius(3, 2.0, 2.0) == pytest.approx(1.0, rel=1e-15)

    def test_mild_example(self):
        assert threshold_radius(2, 2.0, 0.5) == pytest.approx(0.5625, rel=1e-15)

    @pytest.mark.parametrize("N,lam,q", [(3, 2.0, 2.0), (2, 2.0, 0.5), (4, 0.7, 2.5), (2, 5.0, 0.2)])
    def test_matches_root(self, N, lam, q):
        assert threshold_radius(N, lam, q) == pytest.approx(threshold_by_root(N, lam, q), rel=1e-10)

    def test_q_one_unsupported(self):
        with pytest.raises(UnsupportedExponentError):
            threshold_radius(3, 1.0, 1.0)

    @pytest.mark.parametrize("lam,q", [(0.0, 2.0), (-1.0, 0.5), (1.0, 0.0)])
    def test_rejects_invalid(self, lam, q):
        with pytest.raises(DomainError):
            threshold_radius(2, lam, q)

    @given(st.floats(1.05, 2.9), st.floats(0.1, 10), st.floats(0.1, 10))
    def test_singular_increasing_in_lambda(self, q, l1, l2):
        assume(l1 < l2 * (1 - 1e-9))
        assert threshold_radius(3, l1, q) < threshold_radius(3, l2, q)

    @given(st.floats(0.05, 0.95), st.floats(0.1, 10), st.floats(0.1, 10))
    def test_mild_decreasing_in_lambda(self, q, l1, l2):
        assume(l1 < l2 * (1 - 1e-9))
        assert threshold_radius(2, l1, q) > threshold_radius(2, l2, q)


class TestBuild:
    def test_singular(self):
        sol = build_exact(3, 3.0, 2.0, 2.0)
        assert sol.case == SINGULAR
        assert sol.threshold == pytest.approx(1.0) and sol.plateau == 0.0

    def test_mild_plateau(self):
        sol = build_exact(2, 1.0, 2.0, 0.5)
        assert sol.case == MILD
        assert sol.threshold == pytest.approx(0.5625)
        assert sol.plateau == pytest.approx(math.log(0.5625) + 4 * (1 - 0.75), rel=1e-14)
        assert sol.plateau == pytest.approx(profile_by_quadrature(2, 2.0, 0.5, 0.5625, 1.0), rel=1e-10)

    def test_trivial(self):
        sol = build_exact(2, 0.5, 2.0, 0.5)
        assert sol.case == TRIVIAL
        assert exact_u(sol, 0.25) == 0.0 and exact_u(sol, 0.0) == 0.0


class TestExactU:
    """Profile values."""

    def test_singular_planar(self):
        sol = build_exact(2, 2.0, 1.0, 2.0)
        assert exact_u(sol, 0.5) == pytest.approx(1 - math.log(2), rel=1e-14)
        assert exact_u(sol, 0.5) == pytest.approx(profile_by_quadrature(2, 1.0, 2.0, 0.5, 1.0), rel=1e-10)

    def test_singular_space(self):
        sol = build_exact(3, 3.0, 2.0, 2.0)
        assert exact_u(sol, 0.5) == pytest.approx(2 * math.log(0.5) + 2, rel=1e-14)
        assert exact_u(sol, 0.5) == pytest.approx(profile_by_quadrature(3, 2.0, 2.0, 0.5, 1.0), rel=1e-10)

    def test_zero_at_threshold_and_boundary(self):
        sol = build_exact(3, 3.0, 2.0, 2.0)
        assert exact_u(sol, 1.0) == 0.0
        assert exact_u(sol, 3.0) == 0.0

    def test_unbounded_at_origin(self):
        sol = build_exact(3, 3.0, 2.0, 2.0)
        assert exact_u(sol, 0.0) is UNBOUNDED
        vals, unb = sample_u(sol, np.array([0.0, 0.5]))
        assert unb.tolist() == [True, False] and np.isnan(vals[0])

    def test_mild_bounded_at_origin(self):
        sol = build_exact(2, 1.0, 2.0, 0.5)
        assert exact_u(sol, 0.0) == sol.plateau

    def test_outside_domain(self):
        sol = build_exact(3, 3.0, 2.0, 2.0)
        with pytest.raises(DomainError):
            exact_u(sol, 3.5)
        with pytest.raises(DomainError):
            exact_u(sol, -0.1)

    def test_rho_beyond_radius_uses_boundary(self):
        """With the threshold outside the ball the profile vanishes at R."""
        sol = build_exact(3, 0.5, 2.0, 2.0)
        assert not sol.has_plateau
        assert exact_u(sol, 0.5) == 0.0
        assert exact_u(sol, 0.2) == pytest.approx(profile_by_quadrature(3, 2.0, 2.0, 0.2, 0.5), rel=1e-10)

    @pytest.mark.parametrize("N,R,lam,q", [(3, 3.0, 2.0, 2.0), (2, 1.0, 2.0, 0.5), (4, 2.0, 1.3, 2.5),
                                           (2, 2.0, 3.0, 0.3)])
    def test_matches_quadrature(self, N, R, lam, q):
        sol = build_exact(N, R, lam, q)
        b = sol.core_radius if sol.case == SINGULAR else R
        for r in np.linspace(0.05, R, 13):
            if sol.case == SINGULAR and r >= b:
                expected = 0.0
            elif sol.case == MILD and r <= sol.threshold:
                expected = profile_by_quadrature(N, lam, q, sol.threshold, R)
            else:
                expected = profile_by_quadrature(N, lam, q, r, b)
            assert exact_u(sol, r) == pytest.approx(expected, rel=1e-9, abs=1e-12)


class TestExactZ:
    """Calibration field."""

    def test_annulus_value(self):
        sol = build_exact(3, 3.0, 2.0, 2.0)
        assert exact_z(sol, 2.0) == pytest.approx(-0.75, rel=1e-14)
        assert exact_z(sol, 2.0) == pytest.approx(plateau_field_by_ode(3, 2.0, 2.0, 1.0, 2.0), rel=1e-9)

    def test_threshold_values(self):
        assert exact_z(build_exact(3, 3.0, 2.0, 2.0), 1.0) == pytest.approx(-1.0, rel=1e-14)
        assert exact_z(build_exact(2, 1.0, 2.0, 0.5), 0.5625) == pytest.approx(-1.0, rel=1e-14)

    def test_core_saturated(self):
        sol = build_exact(3, 3.0, 2.0, 2.0)
        assert np.all(exact_z(sol, np.array([0.01, 0.5, 0.99])) == -1.0)

    def test_origin_rejected(self):
        with pytest.raises(DomainError):
            exact_z(build_exact(2, 1.0, 2.0, 0.5), 0.0)

    @pytest.mark.parametrize("N,lam,q", [(3, 2.0, 2.0), (4, 1.3, 2.5), (3, 0.8, 1.4)])
    def test_annulus_matches_ode(self, N, lam, q):
        rho = threshold_radius(N, lam, q)
        sol = build_exact(N, 4 * rho, lam, q)
        for r in rho * np.array([1.3, 2.0, 3.7]):
            assert exact_z(sol, r) == pytest.approx(plateau_field_by_ode(N, lam, q, rho, r), rel=1e-8)

    def test_mild_plateau_divergence(self):
        """Inside the plateau the field carries the whole datum: -div z = lam r^-q."""
        sol = build_exact(2, 1.0, 2.0, 0.5)
        r = np.linspace(0.05, 0.5, 7)
        h = 1e-5
        flux = lambda s: s * exact_z(sol, s)
        div = (flux(r + h) - flux(r - h)) / (2 * h) / r
        assert np.allclose(-div, 2.0 * r ** -0.5, rtol=1e-7)


class TestResidual:
    def test_singular(self):
        res = exact_residual(build_exact(3, 3.0, 2.0, 2.0), build_radial_mesh(3, 3.0, 64, 2.0))
        assert res.core <= 1e-10 and res.plateau <= 1e-10

    def test_mild(self):
        res = exact_residual(build_exact(2, 1.0, 2.0, 0.5), build_radial_mesh(2, 1.0, 64, 2.0))
        assert res.core <= 1e-10 and res.plateau <= 1e-10

    def test_trivial_empty(self):
        assert exact_residual(build_exact(2, 0.5, 2.0, 0.5), build_radial_mesh(2, 0.5, 64)) is None


nonsingular_q = st.one_of(st.floats(0.05, 0.95), st.floats(1.05, 2.9))


class TestProperties:
    """Structural properties over random parameters."""

    @given(nonsingular_q, st.floats(0.1, 10), st.floats(0.5, 5))
    @settings(max_examples=80, deadline=None)
    def test_field_bounded_and_saturated_where_decreasing(self, q, lam, R):
        sol = build_exact(3, R, lam, q)
        r = np.linspace(R / 200, R, 200)
        if sol.case == SINGULAR and sol.C is None:
            r = r[r < sol.core_radius]
        z = exact_z(sol, r)
        assert np.all(np.abs(z) <= 1 + 1e-12)
        strict = exact_du(sol, r) < -1e-9
        assert np.allclose(np.abs(z[strict]), 1.0, atol=1e-12)
        # strictly below 1 away from the saturated set
        slack = (~strict) & (np.abs(r - sol.threshold) > 1e-3 * R)
        assert np.all(np.abs(z[slack]) < 1)

    @given(nonsingular_q, st.floats(0.1, 10), st.floats(0.5, 5))
    @settings(max_examples=80, deadline=None)
    def test_profile_shape(self, q, lam, R):
        sol = build_exact(3, R, lam, q)
        r = np.linspace(R / 500, R, 500)
        u, _ = sample_u(sol, r)
        assert np.all(u >= 0)
        assert np.all(np.diff(u) <= 1e-12 * max(1.0, u.max()))
        assert exact_u(sol, R) == 0.0
        if sol.case == MILD:
            assert np.all(u <= sol.plateau)

    @given(st.one_of(st.floats(0.05, 0.95), st.floats(1.05, 2.9)), st.floats(0.1, 10),
           st.floats(1.2, 5))
    @settings(max_examples=60, deadline=None)
    def test_continuity_at_threshold(self, q, lam, stretch):
        R = threshold_radius(3, lam, q) * stretch
        sol = build_exact(3, R, lam, q)
        t = sol.threshold
        d = 1e-9 * t
        assert abs(exact_u(sol, t - d) - exact_u(sol, t + d)) < 1e-6 * max(1.0, sol.plateau)
        assert exact_z(sol, t - d) == pytest.approx(-1.0, abs=1e-6)
        assert exact_z(sol, t + d) == pytest.approx(-1.0, abs=1e-6)

    @given(nonsingular_q, st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.5, 5))
    @settings(max_examples=80, deadline=None)
    def test_comparison_in_lambda(self, q, l1, l2, R):
        l1, l2 = min(l1, l2), max(l1, l2)
        r = np.linspace(R / 300, R, 300)
        u1, _ = sample_u(build_exact(3, R, l1, q), r)
        u2, _ = sample_u(build_exact(3, R, l2, q), r)
        assert np.all(u1 <= u2 + 1e-12 * max(1.0, np.abs(u2).max()))
