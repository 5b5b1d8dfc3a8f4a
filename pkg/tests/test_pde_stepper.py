import numpy as np
import pytest

from chemotaxis_lab import (
    CflViolationError,
    FieldState,
    Grid1D,
    PreconditionError,
    StepperConfig,
    assemble,
    chemotaxis_flux,
    coexistence_state,
    initial_state,
    nonlocal_integrals,
    reaction_terms,
    run_simulation,
    solve_w,
    step,
)
from helpers import coexistence_params, mk_params


class TestStepperConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(dt=0.0, t_end=1.0),
            dict(dt=-0.1, t_end=1.0),
            dict(dt=0.1, t_end=-1.0),
            dict(dt=0.1, t_end=1.0, cfl_safety=0.0),
            dict(dt=0.1, t_end=1.0, cfl_safety=1.5),
            dict(dt=0.1, t_end=1.0, record_every=0),
            dict(dt=0.1, t_end=1.0, record_every=2.5),
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises((ValueError, TypeError)):
            StepperConfig(**kwargs)

    def test_zero_horizon_is_allowed(self):
        assert StepperConfig(dt=0.1, t_end=0.0).t_end == 0.0


class TestLocalTerms:
    def test_flux_boundary_faces_are_zero(self):
        grid = Grid1D(length=1.0, n_cells=4)
        flux = chemotaxis_flux(np.ones(4), np.array([0.0, 1.0, 1.0, 0.0]), 2.0, grid)
        assert flux.shape == (5,)
        assert flux[0] == 0.0 and flux[-1] == 0.0

    def test_flux_donor_cell_values(self):
        grid = Grid1D(length=1.0, n_cells=4)
        u = np.array([1.0, 2.0, 3.0, 4.0])
        w = np.array([0.0, 1.0, 1.0, 0.0])
        flux = chemotaxis_flux(u, w, 2.0, grid)
        np.testing.assert_array_equal(flux, [0.0, 8.0, 0.0, -32.0, 0.0])

    def test_nonlocal_integrals(self):
        grid = Grid1D(length=2.0, n_cells=8)
        p = mk_params(omega_measure=2.0)
        state = initial_state(np.full(8, 1.5), np.full(8, 0.25), p, grid)
        assert nonlocal_integrals(state, grid) == (pytest.approx(3.0), pytest.approx(0.5))

    def test_reaction_terms_hand_value(self):
        grid = Grid1D(length=1.0, n_cells=4)
        p = mk_params(a0=1.0, a1=2.0, a2=0.5, a3=0.25, b0=2.0, b1=0.1, b2=1.0, b4=0.5)
        state = initial_state(np.full(4, 0.5), np.full(4, 1.0), p, grid)
        terms = reaction_terms(state, p, grid)
        ru = 0.5 * (1.0 - 2.0 * 0.5 - 0.5 * 1.0 - 0.25 * 0.5)
        rv = 1.0 * (2.0 - 0.1 * 0.5 - 1.0 * 1.0 - 0.5 * 1.0)
        np.testing.assert_allclose(terms.ru, ru, rtol=1e-14)
        np.testing.assert_allclose(terms.rv, rv, rtol=1e-14)


class TestConservationAndReduction:
    def test_pure_transport_conserves_mass(self):
        grid = Grid1D(length=1.0, n_cells=48)
        p = mk_params(
            chi1=0.4, chi2=0.3, a0=0.0, b0=0.0, a1=0.0, b2=0.0, d1=0.01, d2=0.02
        )
        x = grid.cell_centers()
        u0 = 1.0 + 0.5 * np.cos(np.pi * x)
        v0 = 1.0 + 0.5 * np.sin(np.pi * x / 2.0)
        s0 = initial_state(u0, v0, p, grid)
        m_u0, m_v0 = grid.integrate(u0), grid.integrate(v0)
        rec = run_simulation(s0, p, grid, StepperConfig(dt=5e-3, t_end=2.0))
        assert rec.guard_tripped is None
        assert rec.mass_u[-1] == pytest.approx(m_u0, rel=1e-10)
        assert rec.mass_v[-1] == pytest.approx(m_v0, rel=1e-10)

    def test_constant_equilibrium_is_a_fixed_point(self):
        p = coexistence_params(0.1)
        grid = Grid1D(length=1.0, n_cells=32)
        eq = coexistence_state(p)
        s0 = initial_state(np.full(32, eq.u_star), np.full(32, eq.v_star), p, grid)
        rec = run_simulation(s0, p, grid, StepperConfig(dt=1e-2, t_end=10.0))
        fs = rec.final_state
        assert np.max(np.abs(fs.u - eq.u_star)) <= 1e-12
        assert np.max(np.abs(fs.v - eq.v_star)) <= 1e-12
        assert np.max(np.abs(fs.w - eq.w_star)) <= 1e-12

    def test_homogeneous_run_matches_scalar_euler(self):
        p = mk_params(
            a0=1.0, a1=2.0, a2=0.5, b0=0.8, b1=0.3, b2=1.5,
            a3=0.1, b4=0.2, chi1=0.3, chi2=0.2,
        )
        grid = Grid1D(length=1.0, n_cells=32)
        s0 = initial_state(np.full(32, 0.7), np.full(32, 0.3), p, grid)
        rec = run_simulation(s0, p, grid, StepperConfig(dt=1e-3, t_end=0.2))
        u, v = 0.7, 0.3
        for _ in range(200):
            iu, iv = u * 1.0, v * 1.0
            ru = u * (1.0 - 2.0 * u - 0.5 * v - 0.1 * iu)
            rv = v * (0.8 - 0.3 * u - 1.5 * v - 0.2 * iv)
            u, v = u + 1e-3 * ru, v + 1e-3 * rv
        fs = rec.final_state
        assert np.max(np.abs(fs.u - u)) <= 1e-12
        assert np.max(np.abs(fs.v - v)) <= 1e-12
        assert fs.u.max() - fs.u.min() <= 1e-13


class TestStabilityGuards:
    def test_first_step_cfl_raises(self):
        p = coexistence_params(0.1)
        grid = Grid1D(length=1.0, n_cells=16)
        s0 = initial_state(np.full(16, 0.5), np.full(16, 0.5), p, grid)
        with pytest.raises(CflViolationError) as exc_info:
            step(s0, p, grid, StepperConfig(dt=10.0, t_end=10.0))
        err = exc_info.value
        assert err.binding == "reaction"
        assert 0.0 < err.suggested_dt < 10.0
        assert "largest admissible" in str(err)

    def test_mid_run_cfl_becomes_guard_flag(self):
        grid = Grid1D(length=1.0, n_cells=64)
        p = mk_params(chi1=5.0, chi2=0.0, a0=2.0, a1=0.0, b0=0.0, b2=1.0)
        x = grid.cell_centers()
        s0 = initial_state(1.0 + 0.01 * np.cos(np.pi * x), np.zeros(64), p, grid)
        rec = run_simulation(s0, p, grid, StepperConfig(dt=0.05, t_end=10.0, record_every=5))
        assert rec.guard_tripped == "cfl_violation"
        assert rec.t[-1] < 10.0
        assert rec.n_samples >= 2
        assert any("advection" in note for note in rec.notes)

    def test_blowup_guard_keeps_partial_trace(self):
        grid = Grid1D(length=1.0, n_cells=16)
        p = mk_params(a0=5.0, a1=0.0, b0=0.0)
        s0 = initial_state(np.full(16, 0.5), np.zeros(16), p, grid)
        rec = run_simulation(
            s0, p, grid, StepperConfig(dt=0.01, t_end=3.0), blowup_guard=1e3
        )
        assert rec.guard_tripped == "blow_up"
        assert 0.0 < rec.t[-1] < 3.0
        assert rec.u_max[-1] >= 1e3
        assert rec.final_state.t == rec.t[-1]

    def test_positivity_clip_restores_nonnegativity(self):
        n = 8
        grid = Grid1D(length=1.0, n_cells=n)
        p = mk_params(
            chi1=1.0, chi2=0.0, d1=1e-6, d2=1e-6, k=0.0, l=1.0,
            a0=0.0, b0=0.0, a1=0.0, b2=0.0,
        )
        u0 = np.full(n, 0.2)
        u0[1] = 1.0
        v0 = np.ones(n)
        v0[1] = 0.0
        w0 = solve_w(assemble(p, grid), u0, v0, p)
        speed = np.abs(np.diff(w0)).max() / grid.dx
        dt = 0.89 * grid.dx / speed
        s0 = initial_state(u0, v0, p, grid)
        plain = run_simulation(s0, p, grid, StepperConfig(dt=dt, t_end=dt))
        assert plain.final_state.u.min() < -1e-3
        assert plain.clipped_mass == 0.0
        clipped = run_simulation(
            s0, p, grid, StepperConfig(dt=dt, t_end=dt, positivity_clip=True)
        )
        assert clipped.final_state.u.min() >= 0.0
        assert clipped.clipped_mass > 0.0
        mass_gain = grid.integrate(clipped.final_state.u) - grid.integrate(
            plain.final_state.u
        )
        assert mass_gain == pytest.approx(clipped.clipped_mass, rel=1e-10)


class TestRunSimulation:
    def test_zero_horizon_records_single_sample(self):
        p = coexistence_params(0.1)
        grid = Grid1D(length=1.0, n_cells=8)
        s0 = initial_state(np.full(8, 0.5), np.full(8, 0.5), p, grid)
        rec = run_simulation(s0, p, grid, StepperConfig(dt=0.1, t_end=0.0))
        assert rec.t == [0.0]
        assert rec.final_state.t == 0.0
        assert rec.stopped_early is False

    def test_domain_size_mismatch(self):
        p = coexistence_params(0.1)
        grid = Grid1D(length=2.0, n_cells=8)
        s0 = FieldState(t=0.0, u=np.full(8, 0.5), v=np.full(8, 0.5), w=np.full(8, 1.0))
        with pytest.raises(PreconditionError, match="omega_measure"):
            run_simulation(s0, p, grid, StepperConfig(dt=0.1, t_end=1.0))

    def test_record_stride_keeps_initial_and_final(self):
        p = coexistence_params(0.1)
        grid = Grid1D(length=1.0, n_cells=8)
        s0 = initial_state(np.full(8, 0.4), np.full(8, 0.4), p, grid)
        rec = run_simulation(s0, p, grid, StepperConfig(dt=0.1, t_end=1.0, record_every=7))
        assert rec.t == pytest.approx([0.0, 0.7, 1.0])

    def test_steady_detection_stops_early(self):
        p = coexistence_params(0.1)
        grid = Grid1D(length=1.0, n_cells=16)
        eq = coexistence_state(p)
        s0 = initial_state(np.full(16, eq.u_star), np.full(16, eq.v_star), p, grid)
        rec = run_simulation(
            s0, p, grid,
            StepperConfig(dt=0.1, t_end=100.0),
            steady_tol=1e-8, steady_window=0.5,
        )
        assert rec.stopped_early is True
        assert rec.t[-1] == pytest.approx(0.5)

    def test_final_state_signal_is_consistent(self):
        p = coexistence_params(0.1)
        grid = Grid1D(length=1.0, n_cells=32)
        x = grid.cell_centers()
        s0 = initial_state(0.5 + 0.1 * np.cos(np.pi * x), np.full(32, 0.5), p, grid)
        rec = run_simulation(s0, p, grid, StepperConfig(dt=1e-2, t_end=1.0))
        fs = rec.final_state
        expected_w = solve_w(assemble(p, grid), fs.u, fs.v, p)
        assert np.array_equal(fs.w, expected_w)

    def test_short_run_stays_nonnegative(self):
        p = coexistence_params(0.1)
        grid = Grid1D(length=1.0, n_cells=64)
        x = grid.cell_centers()
        s0 = initial_state(
            0.5 + 0.45 * np.cos(np.pi * x), 0.5 - 0.45 * np.cos(np.pi * x), p, grid
        )
        rec = run_simulation(s0, p, grid, StepperConfig(dt=2e-3, t_end=5.0))
        assert rec.guard_tripped is None
        assert min(rec.u_min) >= -1e-10
        assert min(rec.v_min) >= -1e-10

    def test_references_produce_distance_series(self):
        p = coexistence_params(0.1)
        grid = Grid1D(length=1.0, n_cells=16)
        eq = coexistence_state(p)
        s0 = initial_state(np.full(16, 0.5), np.full(16, 0.5), p, grid)
        rec = run_simulation(
            s0, p, grid, StepperConfig(dt=1e-2, t_end=2.0),
            references=(("coexistence", eq),),
        )
        series = rec.dist["coexistence"]
        assert len(series) == rec.n_samples
        assert series[-1][0] < series[0][0]
