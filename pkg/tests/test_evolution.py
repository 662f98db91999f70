import math

import numpy as np
import pytest

from nlkg.evolution import (BlowUpError, CauchyData, CflError,
                            SimulationConfig, gaussian_data,
                            leapfrog_acceleration, leapfrog_reference,
                            leapfrog_step, make_initial_v, reconstruct_u,
                            simulate, solution_J, xt_norm, apply_P_on_solution)
from nlkg.nonlinearity import CubicTensor, builtin_tensor, eval_F
from nlkg.spectral import (NormSpec, SpectralGrid, VectorField, apply_J,
                           bessel_multiplier, fft_forward, fft_inverse,
                           free_evolve, norm)

ZERO1 = CubicTensor.from_entries(1, {})


def small_config(grid, tensor, eps=0.1, T=10.0, dt=0.05, stride=20, amps=None,
                 g_amps=None):
    n = tensor.n_components
    amps = amps if amps is not None else [1.0 - 0.4 * j for j in range(n)]
    g_amps = g_amps if g_amps is not None else [0.4 - 0.15 * j for j in range(n)]
    data = gaussian_data(grid, amps, g_amps, eps=eps)
    return SimulationConfig(grid, tensor, data, dt=dt, final_time=T,
                            snapshot_stride=stride)


class TestInitialData:
    def test_g_zero_gives_real_half_f(self, medium_grid):
        data = gaussian_data(medium_grid, [1.0], None, eps=0.1)
        v0 = make_initial_v(data)
        assert np.max(np.abs(v0.components.imag)) < 1e-14
        assert np.max(np.abs(2 * v0.components.real - data.f)) < 1e-13

    def test_f_zero_gives_imaginary(self, medium_grid):
        data = gaussian_data(medium_grid, [0.0], [1.0], eps=0.1)
        v0 = make_initial_v(data)
        assert np.max(np.abs(v0.components.real)) < 1e-14

    def test_round_trip(self, medium_grid):
        data = gaussian_data(medium_grid, [1.0, 0.6], [0.4, 0.25], eps=0.1)
        v0 = make_initial_v(data)
        f_back = 2.0 * v0.components.real
        im = VectorField(medium_grid, v0.components.imag.astype(complex))
        g_back = 2.0 * bessel_multiplier(im, 1.0).components.real
        assert np.max(np.abs(f_back - data.f)) < 1e-12
        assert np.max(np.abs(g_back - data.g)) < 1e-12

    def test_eps_rescaling_exact(self, medium_grid):
        a = gaussian_data(medium_grid, [1.0], [0.3], eps=0.2)
        b = gaussian_data(medium_grid, [1.0], [0.3], eps=0.1)
        assert a.size_norm() == pytest.approx(0.2, rel=1e-12)
        assert np.max(np.abs(a.f - 2 * b.f)) < 1e-14

    def test_config_horizon_guard(self, small_grid):
        data = gaussian_data(small_grid, [1.0], None, eps=0.1)
        with pytest.raises(ValueError):
            SimulationConfig(small_grid, ZERO1, data, final_time=1e4)


class TestSimulate:
    def test_linear_limit_matches_free_flow(self, medium_grid):
        cfg = small_config(medium_grid, ZERO1, T=50.0)
        traj = simulate(cfg)
        v0 = make_initial_v(cfg.data)
        expect = free_evolve(v0, 50.0)
        err = np.max(np.abs(traj.v(50.0).components - expect.components))
        assert err < 1e-10

    def test_linear_norm_constancy(self, medium_grid):
        cfg = small_config(medium_grid, ZERO1, T=20.0)
        traj = simulate(cfg)
        vals = [norm(traj.v(t), NormSpec(2, 0, 2)) for t in traj.times]
        assert max(vals) - min(vals) <= 1e-10 * max(vals)

    def test_self_convergence_order(self):
        grid = SpectralGrid(80.0, 2048)
        tensor = builtin_tensor("complex_cubic")
        sols = {}
        for dt in (0.2, 0.1, 0.05):
            cfg = small_config(grid, tensor, eps=0.3, T=5.0, dt=dt,
                               stride=int(round(5.0 / dt)))
            sols[dt] = simulate(cfg).v_hat(5.0)
        e1 = np.max(np.abs(sols[0.2] - sols[0.1]))
        e2 = np.max(np.abs(sols[0.1] - sols[0.05]))
        assert math.log2(e1 / e2) >= 3.8

    def test_blow_up_detected(self):
        grid = SpectralGrid(40.0, 512)
        tensor = builtin_tensor("scalar_cubic").scaled(-1)  # focusing sign
        data = gaussian_data(grid, [4.0], None)
        cfg = SimulationConfig(grid, tensor, data, dt=0.05, final_time=20.0,
                               snapshot_stride=10)
        with pytest.raises(BlowUpError):
            simulate(cfg)

    def test_cubic_response_richardson(self):
        # v_eps - free = eps^3 I + O(eps^5): the combination
        # (v_{2e} - free_{2e}) - 8 (v_e - free_e) shrinks like eps^5
        grid = SpectralGrid(80.0, 2048)
        tensor = builtin_tensor("complex_cubic")

        def residual(eps):
            cfg = small_config(grid, tensor, eps=eps, T=5.0, dt=0.01, stride=500)
            traj = simulate(cfg)
            free = free_evolve(make_initial_v(cfg.data), 5.0)
            gap = traj.v(5.0).components - free.components
            return gap / eps ** 3

        base = residual(0.02)
        d1 = np.max(np.abs(residual(0.04) - base))
        d2 = np.max(np.abs(residual(0.02) - residual(0.01)))
        # both differences are O(eps^2) relative to the cubic response;
        # halving eps shrinks the gap by about 4
        assert d1 / d2 == pytest.approx(4.0, rel=0.35)


class TestLeapfrog:
    def test_plane_wave_dispersion(self):
        grid = SpectralGrid(8 * np.pi, 256)
        k_mode = grid.xi_sorted[128 + 16]
        om = math.sqrt(1 + k_mode ** 2)
        data = CauchyData(grid, np.cos(grid.x * k_mode)[None, :],
                          (om * np.sin(grid.x * k_mode))[None, :])
        cfg = SimulationConfig(grid, ZERO1, data, dt=0.5, final_time=3.0,
                               snapshot_stride=1, enforce_locality=False)
        errs = []
        for dt in (0.02, 0.01):
            traj = leapfrog_reference(cfg, dt=dt)
            expect = np.cos(grid.x * k_mode - om * 3.0)
            errs.append(np.max(np.abs(traj.u(3.0).components[0].real - expect)))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)

    def test_zero_data(self, medium_grid):
        data = CauchyData(medium_grid, np.zeros((1, 1024)), np.zeros((1, 1024)))
        cfg = SimulationConfig(medium_grid, builtin_tensor("scalar_cubic"), data,
                               dt=0.05, final_time=5.0, snapshot_stride=10)
        traj = leapfrog_reference(cfg, dt=0.01)
        assert np.max(np.abs(traj.spectra)) == 0.0

    def test_cfl_guard(self, medium_grid):
        cfg = small_config(medium_grid, ZERO1, T=5.0)
        with pytest.raises(CflError):
            leapfrog_reference(cfg, dt=medium_grid.dx)

    def test_time_reversibility_linear(self, medium_grid):
        cfg = small_config(medium_grid, ZERO1, eps=0.2, T=10.0)
        dt = 0.01
        traj = leapfrog_reference(cfg, dt=dt)
        u_T, u_Tp = traj.aux["final_pair"]
        w_prev, w_cur = u_Tp.copy(), u_T.copy()
        for _ in range(traj.aux["n_steps"]):
            w_prev, w_cur = w_cur, leapfrog_step(medium_grid, ZERO1, w_prev,
                                                 w_cur, dt)
        # after the backward march w_cur sits one initialisation step before 0
        init = cfg.data.f + dt * cfg.data.g + 0.5 * dt * dt * leapfrog_acceleration(
            medium_grid, ZERO1, cfg.data.f)
        assert np.max(np.abs(w_prev - init)) < 1e-9
        assert np.max(np.abs(w_cur - cfg.data.f)) < 1e-9

    def test_cross_integrator_agreement(self):
        grid = SpectralGrid(80.0, 1024)
        tensor = builtin_tensor("complex_cubic")
        cfg = small_config(grid, tensor, T=10.0)
        ua = simulate(cfg).u(10.0).components.real
        dev = []
        for dt in (0.005, 0.0025):
            ub = leapfrog_reference(cfg, dt=dt).u(10.0).components.real
            dev.append(np.max(np.abs(ua - ub)))
        assert dev[0] <= 1e-5
        assert dev[0] / dev[1] == pytest.approx(4.0, rel=0.25)  # order two


class TestReconstruction:
    def test_real_v(self, small_grid):
        v = VectorField.from_profiles(small_grid, [lambda x: np.exp(-x ** 2)])
        assert np.max(np.abs(reconstruct_u(v).components - 2 * v.components)) < 1e-15

    def test_imaginary_v(self, small_grid):
        v = VectorField.from_profiles(small_grid, [lambda x: 1j * np.exp(-x ** 2)])
        assert np.max(np.abs(reconstruct_u(v).components)) < 1e-15

    def test_pde_residual(self):
        # finite-difference second time derivative of the reconstructed u
        # satisfies the second-order equation
        grid = SpectralGrid(80.0, 2048)
        tensor = builtin_tensor("complex_cubic")
        cfg = small_config(grid, tensor, T=6.0, dt=0.02, stride=1)
        traj = simulate(cfg)
        i = len(traj.times) // 2
        ts = traj.times
        dt = ts[1] - ts[0]
        u_m = traj.u(ts[i - 1]).components.real
        u_0 = traj.u(ts[i]).components.real
        u_p = traj.u(ts[i + 1]).components.real
        utt = (u_p - 2 * u_0 + u_m) / dt ** 2
        uhat = fft_forward(grid, u_0.astype(complex))
        uxx = fft_inverse(grid, -(grid.xi ** 2) * uhat).real
        f_val = eval_F(tensor, VectorField(grid, u_0.astype(complex))).components.real
        resid = utt - uxx + u_0 - f_val
        l2 = math.sqrt(grid.dx * np.sum(resid ** 2))
        assert l2 <= 1e-4


class TestSolutionOperators:
    def test_P_zero_solution(self, medium_grid):
        data = CauchyData(medium_grid, np.zeros((1, 1024)), np.zeros((1, 1024)))
        cfg = SimulationConfig(medium_grid, ZERO1, data, dt=0.05, final_time=2.0,
                               snapshot_stride=10)
        traj = simulate(cfg)
        assert np.max(np.abs(apply_P_on_solution(traj, 2.0).components)) == 0.0

    def test_J_identity_against_direct(self, medium_grid):
        tensor = builtin_tensor("complex_cubic")
        cfg = small_config(medium_grid, tensor, T=10.0)
        traj = simulate(cfg)
        t = 10.0
        via_p = solution_J(traj, t)
        direct = apply_J(traj.v(t), t)
        diff = np.max(np.abs(via_p.components - direct.components))
        assert diff <= 1e-8 * max(np.max(np.abs(direct.components)), 1e-300)

    def test_free_flow_reduction(self, medium_grid):
        # with a zero tensor, J = i P - <iD>^-1 d/dx on solutions
        cfg = small_config(medium_grid, ZERO1, T=5.0)
        traj = simulate(cfg)
        via_p = solution_J(traj, 5.0)
        direct = apply_J(traj.v(5.0), 5.0)
        assert np.max(np.abs(via_p.components - direct.components)) < 1e-10


class TestXtNorm:
    def test_zero_trajectory(self, medium_grid):
        data = CauchyData(medium_grid, np.zeros((1, 1024)), np.zeros((1, 1024)))
        cfg = SimulationConfig(medium_grid, ZERO1, data, dt=0.05, final_time=2.0,
                               snapshot_stride=10)
        assert xt_norm(simulate(cfg)).total == 0.0

    def test_free_trajectory_finite_terms(self, medium_grid):
        cfg = small_config(medium_grid, ZERO1, T=20.0)
        result = xt_norm(simulate(cfg))
        assert set(result.terms) == {"h4", "j_h2", "j_h3", "sup_h1inf"}
        assert all(0 < v < np.inf for v in result.terms.values())
        # the sup-weighted term peaks at a moderate time, not at the ends
        series = result.per_time["sup_h1inf"]
        assert 0 < int(np.argmax(series)) < len(series) - 1

    def test_bootstrap_smallness(self, medium_grid):
        tensor = builtin_tensor("complex_cubic")
        cfg = small_config(medium_grid, tensor, eps=0.1, T=30.0)
        result = xt_norm(simulate(cfg))
        assert result.total <= math.sqrt(0.1)

    def test_snapshot_density_guard(self, medium_grid):
        cfg = small_config(medium_grid, ZERO1, T=10.0, stride=100)  # 5 apart
        traj = simulate(cfg)
        with pytest.raises(ValueError):
            xt_norm(traj)
