"""Complex scalar fields on a periodic 2-torus with exact spectral calculus.

The grid has ``n`` points per axis (``n`` a power of two) on
``[0, length)^2`` and the measure is normalised to total mass one, so
constants have unit L^p norm for every p.  Spectra are stored in FFT slot
order with the Nyquist slot counted as ``+n/2``, i.e. the wavenumbers per
axis are the integers in the symmetric range ``(-n/2, n/2]`` scaled by
``2*pi/length``.

Derivatives and inverse Laplacians are exact Fourier multipliers.
Quadratic products are dealiased by zero padding to a ``2n`` grid, which
makes them the exact L^2 projection onto the grid modes of the true
product of the two band-limited interpolants; cubic and higher chains are
built from nested quadratic products.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import scipy.fft as _fft

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with ``n`` points per axis over ``[0, length)^2``.

    Axis 0 of a sample array is the x1 direction, axis 1 is x2.  The total
    measure is fixed to one, so grid quadrature is a plain mean.
    """

    n: int
    length: float = 8.0 * TWO_PI
    measure: str = "normalized"

    def __post_init__(self):
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(f"grid size must be a power of two >= 8, got {self.n}")
        if not self.length > 0.0:
            raise ValueError("grid length must be positive")
        if self.measure != "normalized":
            raise ValueError("only the unit-mass measure is supported")

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @cached_property
    def modes(self) -> np.ndarray:
        """Integer mode numbers per axis in FFT slot order, Nyquist as +n/2."""
        m = np.fft.fftfreq(self.n, d=1.0 / self.n)
        m[self.n // 2] = self.n // 2
        m.setflags(write=False)
        return m

    @cached_property
    def xi1(self) -> np.ndarray:
        """Wavenumber xi_1 on the full spectral grid."""
        k = self.modes * (TWO_PI / self.length)
        out = np.ascontiguousarray(np.broadcast_to(k[:, None], (self.n, self.n)))
        out.setflags(write=False)
        return out

    @cached_property
    def xi2(self) -> np.ndarray:
        """Wavenumber xi_2 on the full spectral grid."""
        k = self.modes * (TWO_PI / self.length)
        out = np.ascontiguousarray(np.broadcast_to(k[None, :], (self.n, self.n)))
        out.setflags(write=False)
        return out

    @cached_property
    def xi_sq(self) -> np.ndarray:
        """|xi|^2 on the spectral grid."""
        out = self.xi1 ** 2 + self.xi2 ** 2
        out.setflags(write=False)
        return out

    @cached_property
    def xi_abs(self) -> np.ndarray:
        """|xi| on the spectral grid."""
        out = np.sqrt(self.xi_sq)
        out.setflags(write=False)
        return out

    @cached_property
    def points(self) -> np.ndarray:
        """1D physical coordinates along either axis."""
        out = np.arange(self.n) * self.spacing
        out.setflags(write=False)
        return out

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical coordinate meshes (X1, X2), indexed [i, j] = (x1_i, x2_j)."""
        return np.meshgrid(self.points, self.points, indexing="ij")

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """Boolean mask of the self-paired Nyquist rows/columns."""
        mask = np.zeros((self.n, self.n), dtype=bool)
        mask[self.n // 2, :] = True
        mask[:, self.n // 2] = True
        mask.setflags(write=False)
        return mask


class ComplexField:
    """Complex scalar field with physical samples and a cached spectrum.

    Instances are immutable: the sample array is copied and frozen at
    construction and every operation returns a new field, so fields are
    safe to share across threads.  ``spectrum[k1, k2]`` is the coefficient
    of ``exp(i xi . x)`` in FFT slot order; the two representations agree
    through the normalised transforms below.
    """

    __slots__ = ("grid", "samples", "_spectrum")

    def __init__(self, grid: Grid, samples: np.ndarray):
        samples = np.array(samples, dtype=np.complex128)
        if samples.shape != (grid.n, grid.n):
            raise ValueError(
                f"sample shape {samples.shape} does not match grid ({grid.n}, {grid.n})"
            )
        samples.setflags(write=False)
        self.grid = grid
        self.samples = samples
        self._spectrum: np.ndarray | None = None

    @property
    def spectrum(self) -> np.ndarray:
        """Fourier coefficients, computed on first access and cached."""
        if self._spectrum is None:
            spec = _fft.fft2(self.samples) / self.grid.n ** 2
            spec.setflags(write=False)
            self._spectrum = spec
        return self._spectrum

    @classmethod
    def from_spectrum(cls, grid: Grid, coeffs: np.ndarray) -> "ComplexField":
        coeffs = np.array(coeffs, dtype=np.complex128)
        if coeffs.shape != (grid.n, grid.n):
            raise ValueError(
                f"coefficient shape {coeffs.shape} does not match grid ({grid.n}, {grid.n})"
            )
        samples = _fft.ifft2(coeffs) * grid.n ** 2
        field = cls(grid, samples)
        coeffs.setflags(write=False)
        field._spectrum = coeffs
        return field

    @classmethod
    def zeros(cls, grid: Grid) -> "ComplexField":
        return cls(grid, np.zeros((grid.n, grid.n), dtype=np.complex128))

    @classmethod
    def constant(cls, grid: Grid, value: complex) -> "ComplexField":
        return cls(grid, np.full((grid.n, grid.n), value, dtype=np.complex128))

    def mean(self) -> complex:
        return complex(self.samples.mean())

    def conj(self) -> "ComplexField":
        return ComplexField(self.grid, np.conj(self.samples))

    def real_part(self) -> "ComplexField":
        return ComplexField(self.grid, self.samples.real)

    def imag_part(self) -> "ComplexField":
        return ComplexField(self.grid, self.samples.imag)

    def _check_same_grid(self, other: "ComplexField") -> None:
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other: "ComplexField") -> "ComplexField":
        self._check_same_grid(other)
        return ComplexField(self.grid, self.samples + other.samples)

    def __sub__(self, other: "ComplexField") -> "ComplexField":
        self._check_same_grid(other)
        return ComplexField(self.grid, self.samples - other.samples)

    def __neg__(self) -> "ComplexField":
        return ComplexField(self.grid, -self.samples)

    def __mul__(self, scalar) -> "ComplexField":
        if isinstance(scalar, ComplexField):
            raise TypeError("use pointwise_product for field-field products")
        return ComplexField(self.grid, self.samples * scalar)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"ComplexField(n={self.grid.n}, length={self.grid.length:g})"


@dataclass(frozen=True)
class FourierMultiplier:
    """Spectral multiplier with an explicitly chosen zero-mode value.

    The symbol is stored in FFT slot order; the value supplied as
    ``zero_mode_value`` replaces whatever the symbol expression would give
    at wavenumber (0, 0), which matters for symbols with a ``|xi|``
    denominator.
    """

    grid: Grid
    symbol: np.ndarray
    zero_mode_value: complex = 0.0

    def __post_init__(self):
        sym = np.array(self.symbol, dtype=np.complex128)
        if sym.shape != (self.grid.n, self.grid.n):
            raise ValueError("symbol shape does not match the grid")
        sym[0, 0] = self.zero_mode_value
        sym.setflags(write=False)
        object.__setattr__(self, "symbol", sym)

    def apply(self, f: ComplexField) -> ComplexField:
        if f.grid != self.grid:
            raise ValueError("field and multiplier live on different grids")
        return ComplexField.from_spectrum(self.grid, self.symbol * f.spectrum)


def forward_transform(f: ComplexField) -> np.ndarray:
    """Fourier coefficients of ``f`` indexed by wavenumber (FFT slot order)."""
    return f.spectrum


def inverse_transform(grid: Grid, coeffs: np.ndarray) -> ComplexField:
    """Field whose spectrum is ``coeffs``; inverse of forward_transform."""
    return ComplexField.from_spectrum(grid, coeffs)


def apply_multiplier(f: ComplexField, m: FourierMultiplier) -> ComplexField:
    return m.apply(f)


def derivative(f: ComplexField, axis: int) -> ComplexField:
    """Spectral partial derivative along axis 1 or 2."""
    if axis == 1:
        xi = f.grid.xi1
    elif axis == 2:
        xi = f.grid.xi2
    else:
        raise ValueError("axis must be 1 or 2")
    return ComplexField.from_spectrum(f.grid, 1j * xi * f.spectrum)


def gradient(f: ComplexField) -> tuple[ComplexField, ComplexField]:
    return derivative(f, 1), derivative(f, 2)


def laplacian(f: ComplexField) -> ComplexField:
    return ComplexField.from_spectrum(f.grid, -f.grid.xi_sq * f.spectrum)


def inverse_laplacian(f: ComplexField) -> ComplexField:
    """Solve Laplace(u) = f with the zero mode of u set to zero."""
    grid = f.grid
    sym = np.zeros((grid.n, grid.n))
    sym.flat[1:] = -1.0 / grid.xi_sq.flat[1:]
    return ComplexField.from_spectrum(grid, sym * f.spectrum)


# -- dealiased products -------------------------------------------------

def _quadrant_slices(n: int):
    # The n-grid wavenumbers (-n/2, n/2] occupy four contiguous corner
    # blocks of the 2n spectral grid (slot n/2 holds +n/2 on both grids).
    half = n // 2
    lo_src, hi_src = slice(0, half + 1), slice(half + 1, n)
    lo_dst, hi_dst = slice(0, half + 1), slice(2 * n - (n - half - 1), 2 * n)
    return ((lo_src, lo_dst), (hi_src, hi_dst))


def _pad_spectrum(coeffs: np.ndarray) -> np.ndarray:
    n = coeffs.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    blocks = _quadrant_slices(n)
    for r_src, r_dst in blocks:
        for c_src, c_dst in blocks:
            out[r_dst, c_dst] = coeffs[r_src, c_src]
    return out


def _truncate_spectrum(padded: np.ndarray) -> np.ndarray:
    n = padded.shape[0] // 2
    out = np.empty((n, n), dtype=np.complex128)
    blocks = _quadrant_slices(n)
    for r_src, r_dst in blocks:
        for c_src, c_dst in blocks:
            out[r_src, c_src] = padded[r_dst, c_dst]
    # The self-paired Nyquist row cannot hold a symmetric mode: one-sided
    # content there would make products of real fields complex and leak
    # through the conservation identities, so the projection excludes it.
    out[n // 2, :] = 0.0
    out[:, n // 2] = 0.0
    return out


def _padded_samples(coeffs: np.ndarray) -> np.ndarray:
    """Samples of the interpolant on the doubled grid."""
    n = coeffs.shape[0]
    return _fft.ifft2(_pad_spectrum(coeffs)) * (2 * n) ** 2


def _spectrum_of_padded(samples2n: np.ndarray) -> np.ndarray:
    """n-grid spectrum (projection) of samples living on the doubled grid."""
    n = samples2n.shape[0] // 2
    return _truncate_spectrum(_fft.fft2(samples2n) / (2 * n) ** 2)


def pointwise_product(f: ComplexField, g: ComplexField) -> ComplexField:
    """Dealiased product of two fields.

    The true product of the two band-limited interpolants is evaluated on
    a zero-padded 2n grid and projected back onto the grid modes, so
    quadratic products carry no aliasing error.  The projection band is
    the symmetric open range: the self-paired Nyquist row is dropped,
    which keeps products of real fields real.
    """
    f._check_same_grid(g)
    fp = _padded_samples(f.spectrum)
    gp = _padded_samples(g.spectrum)
    return ComplexField.from_spectrum(f.grid, _spectrum_of_padded(fp * gp))


def refine_field(f: ComplexField, new_n: int) -> ComplexField:
    """The same trigonometric polynomial represented on a finer grid."""
    grid = f.grid
    if new_n < grid.n:
        raise ValueError("refinement target must not be coarser")
    if new_n == grid.n:
        return f
    fine = Grid(new_n, grid.length)
    half = grid.n // 2
    rows = np.concatenate([np.arange(half + 1), np.arange(new_n - half + 1, new_n)])
    coeffs = np.zeros((new_n, new_n), dtype=np.complex128)
    coeffs[np.ix_(rows, rows)] = f.spectrum
    return ComplexField.from_spectrum(fine, coeffs)


# -- norms ---------------------------------------------------------------

@lru_cache(maxsize=256)
def _sobolev_weight(grid: Grid, s: float) -> np.ndarray:
    w = (1.0 + grid.xi_sq) ** s
    w.setflags(write=False)
    return w


def sobolev_norm(f: ComplexField, s: float) -> float:
    """Inhomogeneous H^s norm: ( sum_k (1+|xi|^2)^s |f_hat(k)|^2 )^(1/2)."""
    spec = f.spectrum
    w = _sobolev_weight(f.grid, float(s))
    return float(np.sqrt(np.sum(w * (spec.real ** 2 + spec.imag ** 2))))


def lp_norm(f: ComplexField, p: float) -> float:
    """L^p norm under the unit-mass measure; p = inf is the grid maximum."""
    mag = np.abs(f.samples)
    if np.isinf(p):
        return float(mag.max())
    if p < 1:
        raise ValueError("p must be >= 1")
    if p == 2.0:
        return float(np.sqrt(np.mean(mag ** 2)))
    return float(np.mean(mag ** p) ** (1.0 / p))


def l2_inner(f: ComplexField, g: ComplexField) -> complex:
    """L^2 pairing integral of f * conj(g) under the unit-mass measure."""
    f._check_same_grid(g)
    return complex(np.vdot(g.samples, f.samples) / f.grid.n ** 2)
