"""Seeded random test data: scalar fields, field pairs and smooth maps.

Generators fill a fixed box of low modes with prescribed coefficient
magnitudes and independent uniform phases, so a (seed, parameters) pair
determines the field bit for bit.  The box is capped at a quarter of the
grid so quadratic densities of generated fields are exactly resolved by
the dealiased product; roughness is emulated through the in-band decay
law, not through content near the grid scale.
"""

from __future__ import annotations

import numpy as np

from .spectral import ComplexField, Grid

TWO_PI = 2.0 * np.pi


def _mode_box(grid: Grid, max_mode: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Slot indices and |xi| values for the modes with |m|_inf <= max_mode."""
    if not 0 <= max_mode <= grid.n // 2 - 1:
        raise ValueError("mode cap must stay strictly below the Nyquist row")
    m = np.arange(-max_mode, max_mode + 1)
    slots = m % grid.n
    m1, m2 = np.meshgrid(m, m, indexing="ij")
    xi_abs = np.hypot(m1, m2) * (TWO_PI / grid.length)
    return slots, slots, xi_abs


def default_max_mode(grid: Grid) -> int:
    """Largest mode cap whose quadratic products avoid the Nyquist row."""
    return grid.n // 4 - 1


def random_field(
    grid: Grid,
    rng: np.random.Generator,
    amplitude: float = 1.0,
    decay: float = 1.0,
    max_mode: int | None = None,
) -> ComplexField:
    """Band-limited field with magnitudes amplitude * (1 + |xi|^2)^(-(1+decay)/2)
    and independent uniform phases."""
    if max_mode is None:
        max_mode = default_max_mode(grid)
    rows, cols, xi_abs = _mode_box(grid, max_mode)
    magnitude = amplitude * (1.0 + xi_abs ** 2) ** (-(1.0 + decay) / 2.0)
    phases = rng.uniform(0.0, TWO_PI, size=xi_abs.shape)
    coeffs = np.zeros((grid.n, grid.n), dtype=np.complex128)
    coeffs[np.ix_(rows, cols)] = magnitude * np.exp(1j * phases)
    return ComplexField.from_spectrum(grid, coeffs)


def random_pair(
    grid: Grid,
    rng: np.random.Generator,
    amplitude: float = 1.0,
    decay: float = 1.0,
    max_mode: int | None = None,
) -> tuple[ComplexField, ComplexField]:
    f1 = random_field(grid, rng, amplitude, decay, max_mode)
    f2 = random_field(grid, rng, amplitude, decay, max_mode)
    return f1, f2


def random_real_field(
    grid: Grid,
    rng: np.random.Generator,
    amplitude: float = 1.0,
    decay: float = 1.0,
    max_mode: int | None = None,
) -> ComplexField:
    f = random_field(grid, rng, amplitude, decay, max_mode)
    return ComplexField(grid, f.samples.real)


def random_map(
    grid: Grid,
    rng: np.random.Generator,
    amplitude: float = 0.5,
    width: float = 0.35,
    max_mode: int | None = None,
) -> ComplexField:
    """Smooth centred test map with Gaussian spectral decay
    exp(-(|xi|/width)^2), rescaled so the sup of |z| equals the requested
    amplitude.

    The steep decay keeps the aliasing of pointwise compositions (the
    chart denominator, the gauge phase) far below the identity-check
    tolerances at the default resolution, and refinement studies stay
    meaningful because the same coefficients embed exactly into finer
    grids.  Coefficients are mirrored so z(-x) = z(x): centred maps carry
    no momentum, which removes the torus's constant-field ambiguity from
    the derived potential."""
    if max_mode is None:
        max_mode = default_max_mode(grid)
    rows, cols, xi_abs = _mode_box(grid, max_mode)
    magnitude = np.exp(-((xi_abs / width) ** 2))
    phases = rng.uniform(0.0, TWO_PI, size=xi_abs.shape)
    box = magnitude * np.exp(1j * phases)
    m = np.arange(-max_mode, max_mode + 1)
    m1, m2 = np.meshgrid(m, m, indexing="ij")
    keep = (m1 > 0) | ((m1 == 0) & (m2 >= 0))
    box = np.where(keep, box, box[::-1, ::-1])
    coeffs = np.zeros((grid.n, grid.n), dtype=np.complex128)
    coeffs[np.ix_(rows, cols)] = box
    raw = ComplexField.from_spectrum(grid, coeffs)
    sup = float(np.abs(raw.samples).max())
    if sup == 0.0 or amplitude == 0.0:
        return ComplexField.zeros(grid)
    return raw * (amplitude / sup)


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent deterministic stream for one ensemble member."""
    return np.random.default_rng([seed, index])
