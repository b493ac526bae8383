"""Stereographic maps, the covariant frame, the gauge phase and derived fields.

A sphere-valued map is represented by its stereographic coordinate ``z``,
a bounded complex field (maps through the pole are out of scope).  The
pipeline below produces the frame ``b_j = d_j z / (1 + |z|^2)``, the
harmonic gauge phase ``psi`` solving

    Laplace(psi) = 2 sum_j d_j Im(conj(b_j) z),

the gauged fields ``u_j = exp(i psi) b_j`` and the geometric route to the
vector potential ``a_j = -d_j psi + 2 Im(conj(b_j) z)``, which is
divergence-free by construction of ``psi``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gauge import FieldPair, GaugePotential, scalar_potential_diagonal_form
from .spectral import (
    ComplexField,
    derivative,
    inverse_laplacian,
    lp_norm,
    pointwise_product,
)


@dataclass(frozen=True)
class GaugeFrame:
    """Frame, phase and gauged fields derived from one map."""

    b1: ComplexField
    b2: ComplexField
    psi: ComplexField
    u1: ComplexField
    u2: ComplexField


def stereographic(z_value) -> np.ndarray:
    """Unit 3-vector of a stereographic coordinate.

    Accepts a scalar or an array; the component axis comes last.
    """
    z = np.asarray(z_value, dtype=np.complex128)
    denom = 1.0 + np.abs(z) ** 2
    vec = np.stack(
        [2.0 * z.real / denom, 2.0 * z.imag / denom, (1.0 - np.abs(z) ** 2) / denom],
        axis=-1,
    )
    return vec


def covariant_frame(z: ComplexField) -> FieldPair:
    """Frame fields: spectral derivative then exact pointwise division."""
    denom = 1.0 + np.abs(z.samples) ** 2
    b1 = ComplexField(z.grid, derivative(z, 1).samples / denom)
    b2 = ComplexField(z.grid, derivative(z, 2).samples / denom)
    return b1, b2


def _phase_densities(z: ComplexField) -> FieldPair:
    """The two real densities Im(conj(b_j) z), dealiased."""
    b1, b2 = covariant_frame(z)
    d1 = pointwise_product(b1.conj(), z).imag_part()
    d2 = pointwise_product(b2.conj(), z).imag_part()
    return d1, d2


def phase_source(z: ComplexField) -> ComplexField:
    """Right-hand side of the gauge-phase Poisson equation."""
    d1, d2 = _phase_densities(z)
    return 2.0 * (derivative(d1, 1) + derivative(d2, 2))


def solve_psi(z: ComplexField) -> ComplexField:
    """Gauge phase: mean-zero solution of the Poisson equation above."""
    return inverse_laplacian(phase_source(z))


def derive_u(z: ComplexField) -> tuple[FieldPair, GaugePotential]:
    """Gauged fields and the geometric-route potential of a map.

    The vector components come straight from the phase and the frame
    densities, with the density means removed: the constant part of a
    periodic divergence-free field is pure convention (the torus carries
    harmonic one-forms the plane's decay condition excludes) and the
    zero-mode convention fixes it to zero.  For maps with a nonvanishing
    momentum functional Im(conj(b_j) z) this leaves a constant-field
    defect in the compatibility residual, which is reported rather than
    hidden; the bundled map generator draws centred maps for which the
    means vanish.  The scalar component has no fixed-time geometric
    expression and is filled in from the derived fields through the
    diagonal closed form.
    """
    frame = gauge_frame(z)
    u = (frame.u1, frame.u2)
    d1, d2 = _phase_densities(z)
    d1 = d1 - ComplexField.constant(z.grid, d1.mean())
    d2 = d2 - ComplexField.constant(z.grid, d2.mean())
    a1 = -derivative(frame.psi, 1) + 2.0 * d1
    a2 = -derivative(frame.psi, 2) + 2.0 * d2
    a0 = scalar_potential_diagonal_form(u)
    return u, GaugePotential(a1, a2, a0, source_pair=(u, u))


def gauge_frame(z: ComplexField) -> GaugeFrame:
    b1, b2 = covariant_frame(z)
    psi = solve_psi(z)
    phase = np.exp(1j * psi.samples.real)
    u1 = ComplexField(z.grid, phase * b1.samples)
    u2 = ComplexField(z.grid, phase * b2.samples)
    return GaugeFrame(b1, b2, psi, u1, u2)


def u0_from_u(u: FieldPair, pot: GaugePotential) -> ComplexField:
    """Time component: i [ (d1 + i a1) u1 + (d2 + i a2) u2 ]."""
    cov1 = derivative(u[0], 1) + 1j * pointwise_product(pot.a1, u[0])
    cov2 = derivative(u[1], 2) + 1j * pointwise_product(pot.a2, u[1])
    return 1j * (cov1 + cov2)


def compatibility_residual(u: FieldPair, pot: GaugePotential) -> float:
    """Sup-norm defect of the covariant symmetry (d1 + i a1) u2 = (d2 + i a2) u1,
    relative to the size of the gradient of u."""
    lhs = derivative(u[1], 1) + 1j * pointwise_product(pot.a1, u[1])
    rhs = derivative(u[0], 2) + 1j * pointwise_product(pot.a2, u[0])
    scale = max(
        lp_norm(derivative(u[0], 1), np.inf),
        lp_norm(derivative(u[0], 2), np.inf),
        lp_norm(derivative(u[1], 1), np.inf),
        lp_norm(derivative(u[1], 2), np.inf),
        1e-300,
    )
    return lp_norm(lhs - rhs, np.inf) / scale


def frame_curvature_residual(u: FieldPair, pot: GaugePotential) -> float:
    """Sup-norm defect of the chart-oriented curvature identity

        d1 a2 - d2 a1 = -4 (Im(conj(u1) u2) - mean)

    for a potential built from map-derived fields.  Same normalisation as
    the pair-operator check; the density is conjugated because the chart
    fixes the opposite orientation."""
    curl = derivative(pot.a2, 1) - derivative(pot.a1, 2)
    density = pointwise_product(u[0].conj(), u[1]).imag_part()
    density = density - ComplexField.constant(u[0].grid, density.mean())
    defect = lp_norm(curl + 4.0 * density, np.inf)
    return defect / (1.0 + lp_norm(density, np.inf))


def energy(z: ComplexField) -> float:
    """Map energy: half the mean of |grad z|^2 / (1 + |z|^2)^2.

    Equals half the squared L^2 norm of the frame (and of the gauged
    fields, since the phase is unimodular)."""
    b1, b2 = covariant_frame(z)
    dens = np.abs(b1.samples) ** 2 + np.abs(b2.samples) ** 2
    return float(0.5 * dens.mean())
