"""Time integration: conservation, free-flow exactness, drift envelopes,
adjointness, convergence order and the difference system."""

import numpy as np
import pytest

from msmlab.evolution import (
    BlowUpError,
    DriftProblem,
    MsmState,
    TrajectoryRecord,
    difference_rhs,
    evolve_drift,
    evolve_msm,
    msm_rhs,
)
from msmlab.gauge import scalar_potential_diagonal_form, vector_potential
from msmlab.randfields import random_field, random_pair, random_real_field, sample_rng
from msmlab.spectral import (
    ComplexField,
    l2_inner,
    laplacian,
    lp_norm,
    pointwise_product,
)


def random_state(grid, seed, amplitude=0.5):
    u1, u2 = random_pair(grid, sample_rng(seed, 0), amplitude, 1.0)
    return MsmState(u1, u2)


class TestMsmRhs:
    def test_zero_state(self, unit_grid):
        zero = ComplexField.zeros(unit_grid)
        r1, r2 = msm_rhs(MsmState(zero, zero))
        assert lp_norm(r1, np.inf) == 0.0
        assert lp_norm(r2, np.inf) == 0.0

    def test_single_component_reduction(self, unit_grid):
        # u2 = 0 removes the vector potential and the cubic coupling
        rng = sample_rng(3, 0)
        u1 = random_field(unit_grid, rng, 0.5, 1.0)
        zero = ComplexField.zeros(unit_grid)
        state = MsmState(u1, zero)
        r1, r2 = msm_rhs(state)
        a1, a2 = vector_potential(state.pair(), state.pair())
        assert lp_norm(a1, np.inf) < 1e-14 and lp_norm(a2, np.inf) < 1e-14
        a0 = scalar_potential_diagonal_form(state.pair())
        manual = 1j * laplacian(u1) - 1j * pointwise_product(a0, u1)
        assert np.abs((r1 - manual).samples).max() < 1e-12 * lp_norm(manual, np.inf)
        assert lp_norm(r2, np.inf) < 1e-14

    def test_instantaneous_mass_balance(self, unit_grid):
        for seed in range(5):
            state = random_state(unit_grid, seed)
            r1, r2 = msm_rhs(state)
            flux = 2.0 * (
                l2_inner(r1, state.u1).real + l2_inner(r2, state.u2).real
            )
            assert abs(flux) / state.mass() < 1e-10


class TestEvolveMsm:
    def test_zero_data(self, unit_grid):
        zero = ComplexField.zeros(unit_grid)
        rec = evolve_msm(MsmState(zero, zero), 1e-2, 20, sample_stride=5)
        assert max(rec.column("L2")) == 0.0

    def test_single_mode_against_closed_form(self, unit_grid):
        # u1 = eps e^{i x1}, u2 = 0 evolves as a pure phase set by the
        # constant scalar potential: eps e^{i(x1 - (1 + 2 eps^2) t)}
        x1, _ = unit_grid.mesh()
        eps, t_final = 0.1, 0.5
        state = MsmState(
            ComplexField(unit_grid, eps * np.exp(1j * x1)), ComplexField.zeros(unit_grid)
        )
        rec = evolve_msm(state, 1e-3, 500, sample_stride=100)
        exact = eps * np.exp(1j * (x1 - (1.0 + 2.0 * eps ** 2) * t_final))
        assert np.abs(rec.final_fields[0].samples - exact).max() < 1e-11

    def test_deviation_from_free_flow_scales_cubically(self, unit_grid):
        x1, _ = unit_grid.mesh()
        t_final = 0.2
        devs = []
        for eps in (0.1, 0.05):
            state = MsmState(
                ComplexField(unit_grid, eps * np.exp(1j * x1)),
                ComplexField.zeros(unit_grid),
            )
            rec = evolve_msm(state, 2e-3, 100, sample_stride=100)
            free = eps * np.exp(1j * (x1 - t_final))
            devs.append(np.abs(rec.final_fields[0].samples - free).max())
        order = np.log2(devs[0] / devs[1])
        assert order > 2.7  # eps^3 scaling

    def test_mass_conservation_along_trajectory(self, lab_grid):
        state = random_state(lab_grid, 1, amplitude=0.1)
        rec = evolve_msm(state, 2e-3, 100, sample_stride=20)
        mass = rec.column("L2") ** 2
        assert np.abs(mass - mass[0]).max() / mass[0] < 1e-9

    def test_self_convergence_order(self, unit_grid):
        state = random_state(unit_grid, 2, amplitude=1.0)
        t_final = 0.4
        ref = evolve_msm(state, t_final / 800, 800, sample_stride=800)
        errors = []
        for n_steps in (100, 200):
            rec = evolve_msm(state, t_final / n_steps, n_steps, sample_stride=n_steps)
            err = max(
                np.abs(rec.final_fields[j].samples - ref.final_fields[j].samples).max()
                for j in range(2)
            )
            errors.append(err)
        assert np.log2(errors[0] / errors[1]) >= 3.5

    def test_blowup_guard(self, unit_grid):
        huge = ComplexField.constant(unit_grid, 3e8)
        with pytest.raises(BlowUpError) as info:
            evolve_msm(MsmState(huge, huge), 1e-3, 10)
        record = info.value.record
        assert record.blown_up
        assert len(record.times) >= 1

    def test_snapshot_stride(self, unit_grid):
        state = random_state(unit_grid, 3, amplitude=0.1)
        rec = evolve_msm(state, 1e-2, 10, sample_stride=2, snapshot_stride=2)
        assert len(rec.snapshots) == len(rec.times)


class TestEvolveDrift:
    def test_free_flow_exact(self, unit_grid):
        # no drift, no forcing: the integrating factor reproduces the free
        # propagator to roundoff for any step size
        zero = ComplexField.zeros(unit_grid)
        u0 = random_field(unit_grid, sample_rng(4, 0), 1.0, 1.0)
        rec = evolve_drift(DriftProblem(zero, zero), u0, 0.25, 4, sample_stride=4)
        expected = ComplexField.from_spectrum(
            unit_grid, np.exp(-1j * 1.0 * unit_grid.xi_sq) * u0.spectrum
        )
        assert np.abs(rec.final_fields[0].samples - expected.samples).max() < 1e-12
        for name in rec.norms:
            vals = rec.column(name)
            assert np.abs(vals - vals[0]).max() < 1e-10 * vals[0]

    def test_constant_drift_preserves_l2(self, unit_grid):
        v = ComplexField.constant(unit_grid, 0.8)
        u0 = random_field(unit_grid, sample_rng(5, 0), 1.0, 1.0)
        rec = evolve_drift(DriftProblem(v, v, "advective"), u0, 1e-3, 200, sample_stride=50)
        vals = rec.column("H0")
        assert np.abs(vals - vals[0]).max() / vals[0] < 1e-9

    def test_growth_envelopes(self, unit_grid):
        rng = sample_rng(6, 0)
        v1 = random_real_field(unit_grid, rng, 0.5, 1.0)
        v2 = random_real_field(unit_grid, rng, 0.5, 1.0)
        u0 = random_field(unit_grid, rng, 1.0, 1.0)
        for form, s_values in (("advective", (0.0, 1.0)), ("divergence", (-1.0, 0.0))):
            problem = DriftProblem(v1, v2, form)
            grad = problem.gradient_sup()
            rec = evolve_drift(problem, u0, 2e-3, 150, sample_stride=25)
            for s in s_values:
                initial = rec.column(f"H{s:g}")[0]
                for t, val in zip(rec.times, rec.column(f"H{s:g}")):
                    assert val <= np.exp(4.0 * grad * t) * initial * (1 + 1e-12)

    def test_forced_envelope(self, unit_grid):
        rng = sample_rng(7, 0)
        v1 = random_real_field(unit_grid, rng, 0.4, 1.0)
        v2 = random_real_field(unit_grid, rng, 0.4, 1.0)
        forcing = random_field(unit_grid, rng, 0.5, 1.0)
        u0 = random_field(unit_grid, rng, 1.0, 1.0)
        problem = DriftProblem(v1, v2, "advective", forcing)
        grad = problem.gradient_sup()
        rec = evolve_drift(problem, u0, 2e-3, 100, sample_stride=25)
        from msmlab.spectral import sobolev_norm

        f_norm = sobolev_norm(forcing, 0.0)
        initial = rec.column("H0")[0]
        for t, val in zip(rec.times, rec.column("H0")):
            assert val <= np.exp(4.0 * grad * t) * (initial + t * f_norm) * (1 + 1e-12)

    def test_adjointness(self, unit_grid):
        rng = sample_rng(8, 0)
        v1 = random_real_field(unit_grid, rng, 0.5, 1.0)
        v2 = random_real_field(unit_grid, rng, 0.5, 1.0)
        f = random_field(unit_grid, rng, 1.0, 1.0)
        g = random_field(unit_grid, rng, 1.0, 1.0)
        n_steps = 200
        fwd = evolve_drift(
            DriftProblem(v1, v2, "divergence"), f, 1e-3, n_steps, sample_stride=n_steps
        )
        bwd = evolve_drift(
            DriftProblem(v1, v2, "advective"), g, -1e-3, n_steps, sample_stride=n_steps
        )
        lhs = l2_inner(fwd.final_fields[0], g)
        rhs = l2_inner(f, bwd.final_fields[0])
        assert abs(lhs - rhs) / abs(lhs) < 1e-9

    def test_self_convergence_order(self, unit_grid):
        rng = sample_rng(9, 0)
        v1 = random_real_field(unit_grid, rng, 0.6, 1.0)
        v2 = random_real_field(unit_grid, rng, 0.6, 1.0)
        u0 = random_field(unit_grid, rng, 1.0, 1.0)
        problem = DriftProblem(v1, v2, "advective")
        t_final = 0.4
        ref = evolve_drift(problem, u0, t_final / 800, 800, sample_stride=800)
        errors = []
        for n_steps in (100, 200):
            rec = evolve_drift(problem, u0, t_final / n_steps, n_steps, sample_stride=n_steps)
            errors.append(
                np.abs(rec.final_fields[0].samples - ref.final_fields[0].samples).max()
            )
        assert np.log2(errors[0] / errors[1]) >= 3.5

    def test_rejects_complex_drift(self, unit_grid):
        v = ComplexField.constant(unit_grid, 1.0 + 0.1j)
        with pytest.raises(ValueError):
            DriftProblem(v, v)

    def test_rejects_unknown_form(self, unit_grid):
        v = ComplexField.constant(unit_grid, 1.0)
        with pytest.raises(ValueError):
            DriftProblem(v, v, "upwind")


class TestDifferenceSystem:
    def test_equal_states_give_zero(self, unit_grid):
        state = random_state(unit_grid, 10)
        dw1, dw2 = difference_rhs(state, state)
        assert lp_norm(dw1, np.inf) < 1e-12
        assert lp_norm(dw2, np.inf) < 1e-12

    def test_reduces_to_full_rhs_at_zero(self, unit_grid):
        state = random_state(unit_grid, 11)
        zero = MsmState(ComplexField.zeros(unit_grid), ComplexField.zeros(unit_grid))
        dw = difference_rhs(state, zero)
        rhs = msm_rhs(state)
        for j in range(2):
            err = lp_norm(dw[j] - rhs[j], np.inf) / lp_norm(rhs[j], np.inf)
            assert err < 1e-12

    def test_consistency_with_rhs_difference(self, unit_grid):
        for seed in range(3):
            u = random_state(unit_grid, 20 + seed)
            v = random_state(unit_grid, 30 + seed)
            ru, rv = msm_rhs(u), msm_rhs(v)
            dw = difference_rhs(u, v)
            for j in range(2):
                exact = ru[j] - rv[j]
                err = lp_norm(dw[j] - exact, np.inf) / lp_norm(exact, np.inf)
                assert err < 1e-9

    def test_squared_potential_polarisation(self, unit_grid):
        u = random_state(unit_grid, 40).pair()
        v = random_state(unit_grid, 41).pair()
        w = (u[0] - v[0], u[1] - v[1])
        uv = (u[0] + v[0], u[1] + v[1])
        au = vector_potential(u, u)
        av = vector_potential(v, v)
        amix = vector_potential(uv, w)
        lhs = (
            pointwise_product(au[0], au[0])
            + pointwise_product(au[1], au[1])
            - pointwise_product(av[0], av[0])
            - pointwise_product(av[1], av[1])
        )
        rhs = pointwise_product(au[0] + av[0], amix[0]) + pointwise_product(
            au[1] + av[1], amix[1]
        )
        err = lp_norm(lhs - rhs, np.inf) / lp_norm(lhs, np.inf)
        assert err < 1e-10


class TestTrajectoryRecord:
    def test_monotone_times(self):
        rec = TrajectoryRecord()
        rec.append(0.0, {"L2": 1.0})
        rec.append(0.1, {"L2": 1.0})
        with pytest.raises(ValueError):
            rec.append(0.05, {"L2": 1.0})

    def test_csv_roundtrip(self, unit_grid, tmp_path):
        state = random_state(unit_grid, 50, amplitude=0.1)
        rec = evolve_msm(state, 1e-2, 10, sample_stride=5)
        path = tmp_path / "traj.csv"
        rec.to_csv(path, ["L2", "Hs", "Hminushalf", "Besov_half_q2"])
        rows = path.read_text().strip().splitlines()
        assert rows[0] == "t,L2,Hs,Hminushalf,Besov_half_q2"
        assert len(rows) == len(rec.times) + 1
        first = rows[1].split(",")
        assert float(first[1]) == rec.norms["L2"][0]
