"""Regularized solver: linear steps, residuals, continuation and the singular benchmark."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onelaplace.core import (ConfigurationError, Constant, PowerLaw, ScalarField, Tabulated,
                             build_disk_grid, build_radial_mesh, evaluate_datum)
from onelaplace.exact import build_exact, exact_z, sample_u
from onelaplace.pairing import theta_density
from onelaplace.solver import (SolverConfig, extract_vector_field, nonlinear_residual,
                               picard_step, solve)


@pytest.fixture(scope="module")
def benchmark():
    mesh = build_radial_mesh(3, 3.0, 4096, 2.0)
    return mesh, solve(mesh, PowerLaw(2.0, 2.0))


class TestPicardStep:
    """One lagged-diffusivity step."""

    def test_zero_datum_from_zero(self):
        """From u = 0 the step solves -lap u = -eps^2, i.e. u = eps^2 (r^2 - R^2) / (2N)."""
        mesh = build_radial_mesh(2, 1.0, 64, 2.0)
        eps = 1e-2
        zero = ScalarField(mesh, np.zeros(mesh.size))
        u1 = picard_step(zero, zero, eps).values
        r = np.asarray(mesh.nodes)
        assert np.max(np.abs(u1 - eps**2 * (r**2 - 1) / 4)) <= 1e-12
        assert np.max(np.abs(u1)) <= eps**2 / 4 * (1 + 1e-12)

    def test_constant_datum_nonnegative(self):
        mesh = build_radial_mesh(2, 1.0, 64)
        eps = 1e-2
        for c in (0.5, 1.0):
            u1 = picard_step(ScalarField(mesh, np.zeros(65)), ScalarField(mesh, np.full(65, c)), eps)
            assert np.all(u1.values >= 0)

    @given(st.integers(0, 2**31), st.floats(1e-5, 1e-1))
    @settings(max_examples=30, deadline=None)
    def test_boundary_value_zero(self, seed, eps):
        rng = np.random.default_rng(seed)
        mesh = build_radial_mesh(3, 2.0, 32, 2.0)
        u = ScalarField(mesh, rng.normal(size=mesh.size))
        f = ScalarField(mesh, rng.uniform(0, 3, mesh.size))
        assert picard_step(u, f, eps).values[-1] == 0.0

    def test_grid_boundary_zero(self):
        grid = build_disk_grid(1.0, 24)
        rng = np.random.default_rng(2)
        u = ScalarField(grid, np.where(grid.mask, rng.uniform(0, 1, grid.shape), 0.0))
        f = ScalarField(grid, np.where(grid.mask, 1.0, 0.0))
        u1 = picard_step(u, f, 1e-2).values
        assert np.all(u1[~grid.mask] == 0.0)

    def test_fixed_point_has_zero_residual(self):
        """A converged solution is reproduced by the lagged step."""
        mesh = build_radial_mesh(2, 1.0, 256, 2.0)
        rep = solve(mesh, Constant(1.5), SolverConfig(eps_min=1e-3))
        f = ScalarField(mesh, np.full(mesh.size, 1.5))
        u1 = picard_step(rep.u, f, rep.eps)
        assert np.max(np.abs(u1.values - rep.u.values)) <= 1e-8

    def test_rejects_nonpositive_eps(self):
        mesh = build_radial_mesh(2, 1.0, 16)
        z = ScalarField(mesh, np.zeros(17))
        with pytest.raises(ValueError):
            picard_step(z, z, 0.0)


class TestResidual:
    def test_consistent_datum(self):
        mesh = build_radial_mesh(3, 1.0, 64)
        eps = 1e-3
        zero = ScalarField(mesh, np.zeros(mesh.size))
        assert nonlinear_residual(zero, ScalarField(mesh, np.full(mesh.size, eps)), eps) == 0.0

    def test_zero_datum_scale(self):
        """Residual equals eps times the root measure of the interior dual cells."""
        mesh = build_radial_mesh(2, 1.0, 64)
        eps = 1e-2
        zero = ScalarField(mesh, np.zeros(mesh.size))
        res = nonlinear_residual(zero, zero, eps)
        assert res == pytest.approx(eps * math.sqrt(mesh.shell_volumes[:-1].sum()), rel=1e-12)
        assert abs(res - eps * math.sqrt(math.pi)) <= 0.02 * eps * math.sqrt(math.pi)

    def test_converged_solution_below_tolerance(self):
        mesh = build_radial_mesh(3, 3.0, 512, 2.0)
        cfg = SolverConfig()
        rep = solve(mesh, PowerLaw(2.0, 2.0), cfg)
        assert rep.converged
        f = evaluate_datum(PowerLaw(2.0, 2.0), mesh)
        assert nonlinear_residual(rep.u, f, rep.eps) <= cfg.tau_res


class TestVectorField:
    def test_zero(self):
        mesh = build_radial_mesh(2, 1.0, 16)
        z = extract_vector_field(ScalarField(mesh, np.zeros(17)), 1e-3)
        assert np.all(z.values == 0)

    def test_gradient_equal_to_eps(self):
        mesh = build_radial_mesh(2, 1.0, 16, 1.0)
        eps = 1e-3
        u = np.zeros(17)
        u[3] = eps * (mesh.nodes[4] - mesh.nodes[3])
        z = extract_vector_field(ScalarField(mesh, u), eps).values
        assert z[3] == pytest.approx(-1 / math.sqrt(2), rel=1e-12)
        assert z[2] == pytest.approx(1 / math.sqrt(2), rel=1e-12)

    @given(st.integers(0, 2**31), st.floats(1e-6, 1.0))
    @settings(max_examples=40, deadline=None)
    def test_strictly_below_one(self, seed, eps):
        rng = np.random.default_rng(seed)
        mesh = build_radial_mesh(3, 1.0, 64, 2.0)
        u = ScalarField(mesh, rng.normal(size=mesh.size) * 10 ** rng.uniform(-3, 1))
        assert extract_vector_field(u, eps).sup_norm < 1

    def test_grid_strictly_below_one(self):
        grid = build_disk_grid(1.0, 24)
        rng = np.random.default_rng(1)
        u = ScalarField(grid, np.where(grid.mask, rng.normal(size=grid.shape), 0.0))
        zx, zy = extract_vector_field(u, 1e-4).values
        assert max(np.abs(zx).max(), np.abs(zy).max()) < 1


class TestConfig:
    @pytest.mark.parametrize("kwargs", [dict(eps_start=0.0), dict(eps_min=-1.0),
                                        dict(eps_start=1e-3, eps_min=1e-2), dict(shrink=1.0),
                                        dict(tau_res=0.0), dict(max_iter=0), dict(method="newton")])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            SolverConfig(**kwargs)

    def test_default_schedule(self):
        levels = SolverConfig().schedule(3.0)
        assert levels[0] == pytest.approx(3e-2) and levels[-1] == pytest.approx(3e-6)
        assert all(b == pytest.approx(a / 4) or b == levels[-1] for a, b in zip(levels, levels[1:]))


class TestSolve:
    """Continuation solves."""

    def test_zero_datum(self):
        mesh = build_radial_mesh(2, 1.0, 64, 2.0)
        rep = solve(mesh, Constant(0.0))
        assert rep.converged
        assert max(rep.iterations) <= 2
        # the regularized solution is O(eps_min^2), not identically zero
        assert np.max(np.abs(rep.u.values)) <= rep.eps**2
        assert rep.u.values[-1] == 0.0

    def test_trivial_mild_datum(self):
        mesh = build_radial_mesh(2, 0.5, 1024, 2.0)
        cfg = SolverConfig()
        rep = solve(mesh, PowerLaw(2.0, 0.5), cfg)
        assert rep.converged
        assert np.max(np.abs(rep.u.values)) <= 10 * cfg.tau_res

    def test_nonconvergence_reported(self):
        mesh = build_radial_mesh(3, 3.0, 256, 2.0)
        rep = solve(mesh, PowerLaw(2.0, 2.0), SolverConfig(max_iter=1))
        assert rep.converged is False
        assert rep.u.values[-1] == 0.0

    def test_picard_method(self):
        mesh = build_radial_mesh(2, 1.0, 128, 2.0)
        cfg = SolverConfig(method="picard", eps_min=1e-3, max_iter=500)
        hyb = solve(mesh, Constant(1.0), SolverConfig(eps_min=1e-3))
        pic = solve(mesh, Constant(1.0), cfg)
        assert pic.converged
        assert np.max(np.abs(pic.u.values - hyb.u.values)) <= 1e-5

    def test_deterministic(self):
        mesh = build_radial_mesh(3, 1.0, 128, 2.0)
        a = solve(mesh, PowerLaw(1.0, 1.5))
        b = solve(mesh, PowerLaw(1.0, 1.5))
        assert np.array_equal(a.u.values, b.u.values)

    def test_negative_datum_rejected(self):
        mesh = build_radial_mesh(2, 1.0, 16)
        with pytest.raises(Exception):
            solve(mesh, Tabulated(np.r_[np.ones(16), -1.0]))

    def test_benchmark_error(self, benchmark):
        mesh, rep = benchmark
        sol = build_exact(3, 3.0, 2.0, 2.0)
        r = np.asarray(mesh.nodes)
        sel = r >= 0.03
        ue, _ = sample_u(sol, r[sel])
        assert rep.converged
        assert np.max(np.abs(rep.u.values[sel] - ue)) <= 1e-2

    def test_benchmark_field(self, benchmark):
        mesh, rep = benchmark
        z = np.asarray(rep.z.values)
        k = np.searchsorted(mesh.midpoints, 2.0)
        assert abs(z[k] - exact_z(build_exact(3, 3.0, 2.0, 2.0), 2.0)) <= 0.02
        assert rep.z.sup_norm < 1

    def test_theta_saturation(self, benchmark):
        """Where the slope dominates eps the field is calibrated against Du."""
        mesh, rep = benchmark
        u = np.asarray(rep.u.values)
        g = np.abs(np.diff(u) / np.diff(mesh.nodes))
        steep = g > 100 * rep.eps
        assert steep.sum() > 100
        theta, active = theta_density(np.asarray(rep.z.values), u)
        full = np.full(mesh.n, np.nan)
        full[active] = theta
        assert np.all(full[steep] >= 1 - 1e-3)

    def test_benchmark_nonnegative(self, benchmark):
        _, rep = benchmark
        assert not rep.undershoot_flag and rep.u.values.min() >= -1e-5


class TestGrid:
    """Masked 2D disk solves."""

    def test_error_decreases(self):
        sol = build_exact(2, 1.0, 0.5, 1.5)
        errors = []
        for n in (32, 64):
            grid = build_disk_grid(1.0, n)
            rep = solve(grid, PowerLaw(0.5, 1.5))
            assert rep.converged
            X, Y = grid.centers
            r = np.hypot(X, Y)
            sel = grid.mask & (r > 0.1)
            ue, _ = sample_u(sol, np.minimum(r[sel], 1.0))
            errors.append(np.max(np.abs(rep.u.values[sel] - ue)))
            assert np.all(rep.u.values[~grid.mask] == 0)
            assert rep.z.sup_norm < 1
        assert errors[1] < errors[0]

    def test_trivial(self):
        grid = build_disk_grid(1.0, 32)
        cfg = SolverConfig()
        rep = solve(grid, PowerLaw(1.5, 0.5), cfg)
        assert np.max(np.abs(rep.u.values)) <= 10 * cfg.tau_res
