"""Gauge potentials: Riesz transforms, the Coulomb and curvature identities,
bilinearity and the empirical bound surveys."""

import numpy as np
import pytest

from msmlab.gauge import (
    curvature_residual,
    divergence_residual,
    gauge_bound_sides,
    gauge_potential,
    riesz,
    scalar_potential,
    scalar_potential_diagonal_form,
    survey_gauge_bounds,
    vector_potential,
    vector_potential_map_form,
)
from msmlab.randfields import random_field, random_pair
from msmlab.spectral import ComplexField, lp_norm


def swirl_pair(grid):
    """The closed-form example pair: u1 = 1, u2 = i sin(x2)."""
    _, x2 = grid.mesh()
    return ComplexField.constant(grid, 1.0), ComplexField(grid, 1j * np.sin(x2))


class TestRiesz:
    def test_single_mode(self, unit_grid):
        x1, _ = unit_grid.mesh()
        f = ComplexField(unit_grid, np.exp(1j * x1))
        out = riesz(f, 1)
        assert np.abs(out.samples - 1j * f.samples).max() < 1e-13

    def test_transverse_direction_vanishes(self, unit_grid):
        x1, _ = unit_grid.mesh()
        f = ComplexField(unit_grid, np.cos(2 * x1) + 0.5 * np.sin(x1))
        assert lp_norm(riesz(f, 2), np.inf) < 1e-14

    def test_squares_sum_to_projection(self, unit_grid):
        rng = np.random.default_rng(0)
        f = random_field(unit_grid, rng, 1.0, 0.5)
        total = riesz(riesz(f, 1), 1) + riesz(riesz(f, 2), 2)
        expected = -(f - ComplexField.constant(unit_grid, f.mean()))
        assert np.abs((total - expected).samples).max() < 1e-12 * lp_norm(f, np.inf)

    def test_component_validation(self, unit_grid):
        with pytest.raises(ValueError):
            riesz(ComplexField.zeros(unit_grid), 3)


class TestVectorPotential:
    def test_zero_pair(self, unit_grid):
        zero = ComplexField.zeros(unit_grid)
        a1, a2 = vector_potential((zero, zero), (zero, zero))
        assert lp_norm(a1, np.inf) == 0.0
        assert lp_norm(a2, np.inf) == 0.0

    def test_swirl_closed_form(self, unit_grid):
        # density Im(conj(u1) u2) = sin(x2):  a1 = 4 cos(x2), a2 = 0
        _, x2 = unit_grid.mesh()
        u = swirl_pair(unit_grid)
        a1, a2 = vector_potential(u, u)
        assert np.abs(a1.samples - 4.0 * np.cos(x2)).max() < 1e-12
        assert lp_norm(a2, np.inf) < 1e-13

    def test_vanishes_without_second_component(self, unit_grid):
        rng = np.random.default_rng(1)
        u = (random_field(unit_grid, rng, 1.0, 0.5), ComplexField.zeros(unit_grid))
        a1, a2 = vector_potential(u, u)
        assert lp_norm(a1, np.inf) < 1e-14
        assert lp_norm(a2, np.inf) < 1e-14

    def test_reality(self, unit_grid):
        rng = np.random.default_rng(2)
        u = random_pair(unit_grid, rng, 1.0, 0.5)
        pot = gauge_potential(u)
        for a in (pot.a1, pot.a2, pot.a0):
            scale = np.abs(a.samples).max()
            assert np.abs(a.samples.imag).max() < 1e-12 * scale

    def test_polarisation_bilinearity(self, unit_grid):
        rng = np.random.default_rng(3)
        u = random_pair(unit_grid, rng, 1.0, 0.5)
        v = random_pair(unit_grid, rng, 1.0, 0.5)
        uv = (u[0] + v[0], u[1] + v[1])
        for j in range(2):
            lhs = vector_potential(uv, uv)[j]
            rhs = (
                vector_potential(u, u)[j]
                + 2.0 * vector_potential(u, v)[j]
                + vector_potential(v, v)[j]
            )
            assert np.abs((lhs - rhs).samples).max() < 1e-11 * max(
                lp_norm(lhs, np.inf), 1e-30
            )

    def test_symmetry(self, unit_grid):
        rng = np.random.default_rng(4)
        u = random_pair(unit_grid, rng, 1.0, 0.5)
        v = random_pair(unit_grid, rng, 1.0, 0.5)
        for j in range(2):
            a_uv = vector_potential(u, v)[j]
            a_vu = vector_potential(v, u)[j]
            assert np.abs((a_uv - a_vu).samples).max() < 1e-13

    def test_map_form_is_mirror(self, unit_grid):
        rng = np.random.default_rng(5)
        u = random_pair(unit_grid, rng, 1.0, 0.5)
        pair_route = vector_potential(u, u)
        map_route = vector_potential_map_form(u)
        for j in range(2):
            assert np.abs((pair_route[j] + map_route[j]).samples).max() < 1e-13


class TestIdentities:
    def test_divergence_zero_pair(self, unit_grid):
        zero = ComplexField.zeros(unit_grid)
        pot = gauge_potential((zero, zero))
        assert divergence_residual(pot) == 0.0

    def test_divergence_random(self, unit_grid):
        rng = np.random.default_rng(6)
        for _ in range(10):
            u = random_pair(unit_grid, rng, 1.0, 0.5)
            assert divergence_residual(gauge_potential(u)) < 1e-11

    def test_curvature_zero(self, unit_grid):
        zero = ComplexField.zeros(unit_grid)
        u = (zero, zero)
        assert curvature_residual(u, gauge_potential(u)) == 0.0

    def test_curvature_swirl_closed_form(self, unit_grid):
        _, x2 = unit_grid.mesh()
        u = swirl_pair(unit_grid)
        pot = gauge_potential(u)
        # both sides in closed form: d1 a2 - d2 a1 = 4 sin(x2) = -4 Im(u1 conj u2)
        curl = 4.0 * np.sin(x2)
        density = np.imag(u[0].samples * np.conj(u[1].samples))
        assert np.abs(curl + 4.0 * density).max() < 1e-12
        assert curvature_residual(u, pot) < 1e-12

    def test_curvature_random(self, unit_grid):
        rng = np.random.default_rng(7)
        for _ in range(10):
            u = random_pair(unit_grid, rng, 1.0, 0.5)
            assert curvature_residual(u, gauge_potential(u)) < 1e-8

    def test_grid_mismatch(self, unit_grid, lab_grid):
        zero = ComplexField.zeros(unit_grid)
        pot = gauge_potential((zero, zero))
        other = ComplexField.zeros(lab_grid)
        with pytest.raises(ValueError):
            curvature_residual((other, other), pot)


class TestScalarPotential:
    def test_zero(self, unit_grid):
        zero = ComplexField.zeros(unit_grid)
        assert lp_norm(scalar_potential((zero, zero), (zero, zero)), np.inf) == 0.0

    def test_constant_first_component(self, unit_grid):
        u = (ComplexField.constant(unit_grid, 1.0), ComplexField.zeros(unit_grid))
        out = scalar_potential(u, u)
        assert np.abs(out.samples - 2.0).max() < 1e-13

    def test_formula_equivalence(self, unit_grid):
        rng = np.random.default_rng(8)
        for _ in range(10):
            u = random_pair(unit_grid, rng, 1.0, 0.5)
            bilinear = scalar_potential(u, u)
            diagonal = scalar_potential_diagonal_form(u)
            assert np.abs((bilinear - diagonal).samples).max() < 1e-11

    def test_mean_equals_local_term(self, unit_grid):
        rng = np.random.default_rng(9)
        u = random_pair(unit_grid, rng, 1.0, 0.5)
        a0 = scalar_potential(u, u)
        local_mean = 2.0 * float(
            np.mean(np.abs(u[0].samples) ** 2 + np.abs(u[1].samples) ** 2)
        )
        assert a0.mean().real == pytest.approx(local_mean, rel=1e-10)


class TestSurveys:
    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            survey_gauge_bounds([], 6.0)

    def test_zero_sample_gives_zero_ratios(self, unit_grid):
        zero = ComplexField.zeros(unit_grid)
        pair = (zero, zero)
        ratios = survey_gauge_bounds([(pair, pair, zero)], 6.0)
        for vals in ratios.values():
            assert vals[0] == 0.0

    def test_ensemble_ratios_finite(self, unit_grid):
        rng = np.random.default_rng(10)
        samples = []
        for _ in range(10):
            samples.append(
                (
                    random_pair(unit_grid, rng, 1.0, 0.5),
                    random_pair(unit_grid, rng, 1.0, 0.5),
                    random_field(unit_grid, rng, 1.0, 0.5),
                )
            )
        ratios = survey_gauge_bounds(samples, 6.0)
        assert set(ratios) == {
            "potential_gradient_sup",
            "potential_besov",
            "potential_transport",
        }
        for vals in ratios.values():
            assert np.isfinite(vals).all() and (vals >= 0).all()

    def test_swirl_sides_closed_form(self, unit_grid):
        # grad A = (0, -4 sin x2) for a1 = 4 cos x2: sup 4
        u = swirl_pair(unit_grid)
        sides = gauge_bound_sides(u, u, ComplexField.constant(unit_grid, 1.0), 6.0)
        lhs, rhs = sides["potential_gradient_sup"]
        assert lhs == pytest.approx(4.0, rel=1e-12)
        assert rhs > 0
