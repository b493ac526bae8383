"""Gauge potentials from quadratic field densities.

The vector potential ``(a1, a2)`` is the divergence-free field whose curl
matches the commutator density of the pair, obtained by convolving the
bilinear density ``Im(u1 conj(v2) + v1 conj(u2))`` with the Biot-Savart
kernels; on the torus the convolutions are realised exactly as Fourier
multipliers (for reference, the plane kernels are ``(1/2pi) x2/|x|^2`` and
``-(1/2pi) x1/|x|^2``, so e.g. the first one evaluates to ``1/(2pi)`` at
``(0, 1)``).  The scalar potential ``a0`` combines iterated Riesz
transforms of ``Re(u_j conj(v_k))`` densities with a local quadratic term.

Multipliers with a ``|xi|`` denominator vanish on the zero mode (the
periodic analogue of decay at infinity) and on the self-paired Nyquist
rows, where no odd symbol can preserve realness.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dyadic import besov_norm
from .spectral import (
    ComplexField,
    Grid,
    derivative,
    lp_norm,
    pointwise_product,
    sobolev_norm,
)

FieldPair = tuple[ComplexField, ComplexField]


@dataclass(frozen=True)
class GaugePotential:
    """The triple (a1, a2, a0) of real fields attached to a source pair.

    a1 and a2 are mean-zero and divergence-free by construction; a0 keeps
    the mean of its local quadratic term.  Imaginary parts are numerical
    dust and stay below 1e-12 of the field size for resolved sources.
    """

    a1: ComplexField
    a2: ComplexField
    a0: ComplexField
    source_pair: tuple[FieldPair, FieldPair] | None = None


@lru_cache(maxsize=None)
def _riesz_symbols(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Symbols i xi_j / |xi|, zeroed on the zero mode and the Nyquist rows."""
    inv_abs = np.zeros((grid.n, grid.n))
    inv_abs.flat[1:] = 1.0 / grid.xi_abs.flat[1:]
    keep = ~grid.nyquist_mask
    r1 = 1j * grid.xi1 * inv_abs * keep
    r2 = 1j * grid.xi2 * inv_abs * keep
    r1.setflags(write=False)
    r2.setflags(write=False)
    return r1, r2


@lru_cache(maxsize=None)
def _kernel_symbols(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Fourier realisation of twice the Biot-Savart kernels:
    -2i xi2 / |xi|^2 and +2i xi1 / |xi|^2, zeroed like the Riesz symbols."""
    inv_sq = np.zeros((grid.n, grid.n))
    inv_sq.flat[1:] = 1.0 / grid.xi_sq.flat[1:]
    keep = ~grid.nyquist_mask
    g1 = -2j * grid.xi2 * inv_sq * keep
    g2 = 2j * grid.xi1 * inv_sq * keep
    g1.setflags(write=False)
    g2.setflags(write=False)
    return g1, g2


def riesz(f: ComplexField, j: int) -> ComplexField:
    """Riesz transform: the Fourier multiplier i xi_j / |xi|."""
    if j not in (1, 2):
        raise ValueError("component index must be 1 or 2")
    sym = _riesz_symbols(f.grid)[j - 1]
    return ComplexField.from_spectrum(f.grid, sym * f.spectrum)


def _cross_density(u: FieldPair, v: FieldPair) -> ComplexField:
    """Im(u1 conj(v2) + v1 conj(u2)), dealiased; symmetric in u, v."""
    d = pointwise_product(u[0], v[1].conj()) + pointwise_product(v[0], u[1].conj())
    return d.imag_part()


def vector_potential(u: FieldPair, v: FieldPair) -> tuple[ComplexField, ComplexField]:
    """Divergence-free vector potential of the pair of pairs (u, v)."""
    grid = u[0].grid
    density = _cross_density(u, v)
    g1, g2 = _kernel_symbols(grid)
    a1 = ComplexField.from_spectrum(grid, g1 * density.spectrum)
    a2 = ComplexField.from_spectrum(grid, g2 * density.spectrum)
    return a1, a2


def scalar_potential(u: FieldPair, v: FieldPair) -> ComplexField:
    """Scalar potential: 2 sum_jk R_j R_k Re(u_j conj(v_k) + v_j conj(u_k))
    plus the local term 2 Re(u1 conj(v1) + u2 conj(v2))."""
    grid = u[0].grid
    r1, r2 = _riesz_symbols(grid)
    syms = {(1, 1): (r1 * r1).real, (1, 2): (r1 * r2).real, (2, 2): (r2 * r2).real}
    out = np.zeros((grid.n, grid.n), dtype=np.complex128)
    local = ComplexField.zeros(grid)
    for j, k in ((1, 1), (1, 2), (2, 1), (2, 2)):
        dens = (
            pointwise_product(u[j - 1], v[k - 1].conj())
            + pointwise_product(v[j - 1], u[k - 1].conj())
        ).real_part()
        sym = syms[(j, k) if j <= k else (k, j)]
        out += 2.0 * sym * dens.spectrum
        if j == k:
            local = local + dens
    return ComplexField.from_spectrum(grid, out) + local


def vector_potential_map_form(u: FieldPair) -> tuple[ComplexField, ComplexField]:
    """Diagonal closed form adapted to map-derived pairs: the kernels applied
    to 4 Im(conj(u1) u2).

    This is the mirror image of ``vector_potential(u, u)``: the pair
    operator's orientation is fixed by the curvature identity (curl =
    -4 Im(u1 conj(u2))), while fields derived from a stereographic chart
    satisfy the intrinsic opposite orientation, so their potential is
    rebuilt with the conjugated density."""
    grid = u[0].grid
    density = pointwise_product(u[0].conj(), u[1]).imag_part()
    g1, g2 = _kernel_symbols(grid)
    a1 = ComplexField.from_spectrum(grid, 2.0 * g1 * density.spectrum)
    a2 = ComplexField.from_spectrum(grid, 2.0 * g2 * density.spectrum)
    return a1, a2


def scalar_potential_diagonal_form(u: FieldPair) -> ComplexField:
    """Diagonal-case closed form: 4 sum_jk R_j R_k Re(u_j conj(u_k)) + 2 |u|^2."""
    grid = u[0].grid
    r1, r2 = _riesz_symbols(grid)
    d11 = pointwise_product(u[0], u[0].conj()).real_part()
    d22 = pointwise_product(u[1], u[1].conj()).real_part()
    d12 = pointwise_product(u[0], u[1].conj()).real_part()
    nonlocal_spec = 4.0 * (
        (r1 * r1).real * d11.spectrum
        + (r2 * r2).real * d22.spectrum
        + 2.0 * (r1 * r2).real * d12.spectrum
    )
    return ComplexField.from_spectrum(grid, nonlocal_spec) + 2.0 * (d11 + d22)


def gauge_potential(u: FieldPair, v: FieldPair | None = None) -> GaugePotential:
    """Assemble the full potential triple for a pair (diagonal if v omitted)."""
    if v is None:
        v = u
    a1, a2 = vector_potential(u, v)
    a0 = scalar_potential(u, v)
    return GaugePotential(a1, a2, a0, source_pair=(u, v))


def curvature_residual(u: FieldPair, pot: GaugePotential) -> float:
    """Sup-norm defect of the curvature identity

        d1 a2 - d2 a1 = -4 (Im(u1 conj(u2)) - mean)

    normalised by 1 + the sup of the density; expected < 1e-8 for
    band-limited u with the potential computed from (u, u).  The density
    mean is removed because a periodic curl is mean-free while the
    potential's zero mode is fixed to zero; densities of map-derived
    pairs are mean-free on their own."""
    if u[0].grid != pot.a1.grid:
        raise ValueError("pair and potential live on different grids")
    curl = derivative(pot.a2, 1) - derivative(pot.a1, 2)
    density = pointwise_product(u[0], u[1].conj()).imag_part()
    density = density - ComplexField.constant(u[0].grid, density.mean())
    defect = lp_norm(curl + 4.0 * density, np.inf)
    return defect / (1.0 + lp_norm(density, np.inf))


def divergence_residual(pot: GaugePotential) -> float:
    """Sup-norm of div(a1, a2) relative to the sup of the potential."""
    div = derivative(pot.a1, 1) + derivative(pot.a2, 2)
    scale = max(lp_norm(pot.a1, np.inf), lp_norm(pot.a2, np.inf))
    if scale == 0.0:
        return lp_norm(div, np.inf)
    return lp_norm(div, np.inf) / scale


# -- empirical bound surveys ---------------------------------------------

def _pair_l2(u: FieldPair) -> float:
    return float(np.hypot(lp_norm(u[0], 2), lp_norm(u[1], 2)))


def _pair_sobolev(u: FieldPair, s: float) -> float:
    return float(np.hypot(sobolev_norm(u[0], s), sobolev_norm(u[1], s)))


def _pair_besov(u: FieldPair, s: float, p: float, q: float) -> float:
    return float(np.hypot(besov_norm(u[0], s, p, q), besov_norm(u[1], s, p, q)))


def _grad_sup(a1: ComplexField, a2: ComplexField) -> float:
    """Sup of the Hilbert-Schmidt norm of the Jacobian of (a1, a2)."""
    parts = [derivative(a, ax) for a in (a1, a2) for ax in (1, 2)]
    hs = np.sqrt(sum(np.abs(p.samples) ** 2 for p in parts))
    return float(hs.max())


def gauge_bound_sides(
    f: FieldPair, g: FieldPair, h: ComplexField, q: float
) -> dict[str, tuple[float, float]]:
    """LHS and RHS of the three potential estimates for one sample.

    potential_gradient_sup:  ||grad A[f,g]||_inf  vs
        ||f||_B ||g||_B + ||f||_2 ||g||_2
    potential_besov:  ||A[f,g]||_B  vs the same right side
    potential_transport:  ||A[f,g] . grad h||_{H^-1/2}  vs
        ( ||g||_{H^1/2} ||h||_{H^1/2} + ||g||_B ||h||_B ) ||f||_{H^-1/2}

    with B the Besov space of smoothness 1/2, integrability q and square
    summability.  Ratios are reported, never asserted against a universal
    constant.
    """
    a1, a2 = vector_potential(f, g)
    b_f = _pair_besov(f, 0.5, q, 2)
    b_g = _pair_besov(g, 0.5, q, 2)
    quad_rhs = b_f * b_g + _pair_l2(f) * _pair_l2(g)

    transport = pointwise_product(a1, derivative(h, 1)) + pointwise_product(
        a2, derivative(h, 2)
    )
    transport_lhs = sobolev_norm(transport, -0.5)
    transport_rhs = (
        _pair_sobolev(g, 0.5) * sobolev_norm(h, 0.5)
        + b_g * besov_norm(h, 0.5, q, 2)
    ) * _pair_sobolev(f, -0.5)

    a_besov = float(
        np.hypot(besov_norm(a1, 0.5, q, 2), besov_norm(a2, 0.5, q, 2))
    )
    return {
        "potential_gradient_sup": (_grad_sup(a1, a2), quad_rhs),
        "potential_besov": (a_besov, quad_rhs),
        "potential_transport": (transport_lhs, transport_rhs),
    }


def survey_gauge_bounds(
    samples: list[tuple[FieldPair, FieldPair, ComplexField]], q: float
) -> dict[str, np.ndarray]:
    """Empirical LHS/RHS ratios of the potential estimates over an ensemble.

    Returns one ratio array per inequality id; a ratio is 0 whenever both
    sides vanish.
    """
    if not samples:
        raise ValueError("empty sample set")
    ratios: dict[str, list[float]] = {}
    for f, g, h in samples:
        for name, (lhs, rhs) in gauge_bound_sides(f, g, h, q).items():
            ratios.setdefault(name, []).append(lhs / rhs if rhs > 0.0 else 0.0)
    return {name: np.asarray(vals) for name, vals in ratios.items()}
