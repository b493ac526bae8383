"""Dyadic frequency decomposition, Besov norms and paraproducts.

The radial cutoff equals 1 on [0, 1] and 0 on [5/4, inf), with a C-infinity
monotone transition built from the standard exponential smooth step, so the
dyadic symbols telescope to an exact partition of unity on the grid.  Block
``j >= 1`` is supported in the annulus ``2^(j-1) <= |xi| <= 5*2^j/4``;
block 0 carries everything below.  The block list is truncated at the
smallest ``j_max`` with ``2^j_max`` at or above the largest grid
wavenumber, beyond which all blocks vanish identically on grid fields.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import ceil, log2

import numpy as np

from .spectral import ComplexField, Grid, lp_norm, pointwise_product


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, h(t)/(h(t)+h(1-t)) between."""
    t = np.asarray(t, dtype=float)
    lo = t <= 0.0
    hi = t >= 1.0
    mid = ~(lo | hi)
    out = np.empty_like(t)
    out[lo] = 0.0
    out[hi] = 1.0
    tm = t[mid]
    h0 = np.exp(-1.0 / tm)
    h1 = np.exp(-1.0 / (1.0 - tm))
    out[mid] = h0 / (h0 + h1)
    return out


def smooth_cutoff(r) -> np.ndarray:
    """Radial profile: 1 on [0, 1], 0 on [5/4, inf), smooth monotone between."""
    r = np.asarray(r, dtype=float)
    return _smooth_step((1.25 - r) * 4.0)


@dataclass(frozen=True)
class DyadicPartition:
    """Dyadic partition of unity evaluated on a grid's wavenumbers.

    ``block_symbols[j]`` is the symbol of the j-th frequency projector;
    the symbols sum to one at every grid wavenumber.
    """

    grid: Grid
    j_max: int
    block_symbols: np.ndarray  # shape (j_max + 1, n, n)

    def __post_init__(self):
        self.block_symbols.setflags(write=False)

    def cumulative_symbol(self, j: int) -> np.ndarray:
        return self.block_symbols[: j + 1].sum(axis=0)

    def tilde_symbol(self, j: int) -> np.ndarray:
        lo = max(j - 1, 0)
        hi = min(j + 1, self.j_max)
        return self.block_symbols[lo : hi + 1].sum(axis=0)


@lru_cache(maxsize=None)
def build_partition(grid: Grid) -> DyadicPartition:
    """Construct the dyadic partition adapted to a grid."""
    xi_max = float(grid.xi_abs.max())
    j_max = max(1, ceil(log2(xi_max)))
    r = grid.xi_abs
    cumulative = [smooth_cutoff(r * 2.0 ** (-j)) for j in range(j_max + 1)]
    blocks = [cumulative[0]]
    for j in range(1, j_max + 1):
        blocks.append(cumulative[j] - cumulative[j - 1])
    return DyadicPartition(grid, j_max, np.stack(blocks))


@dataclass(frozen=True)
class BlockDecomposition:
    """A field together with its dyadic pieces; the pieces sum to the field."""

    source: ComplexField
    pieces: tuple[ComplexField, ...]


def block_project(f: ComplexField, j: int, kind: str = "single") -> ComplexField:
    """Frequency projection of ``f``: one block, a cumulative sum, or the
    three-block window centred at ``j``."""
    part = build_partition(f.grid)
    if not 0 <= j <= part.j_max:
        raise IndexError(f"block index {j} outside 0..{part.j_max}")
    if kind == "single":
        sym = part.block_symbols[j]
    elif kind == "cumulative":
        sym = part.cumulative_symbol(j)
    elif kind == "tilde":
        sym = part.tilde_symbol(j)
    else:
        raise ValueError(f"unknown projection kind {kind!r}")
    return ComplexField.from_spectrum(f.grid, sym * f.spectrum)


def decompose(f: ComplexField) -> BlockDecomposition:
    part = build_partition(f.grid)
    pieces = tuple(
        ComplexField.from_spectrum(f.grid, part.block_symbols[j] * f.spectrum)
        for j in range(part.j_max + 1)
    )
    return BlockDecomposition(f, pieces)


def _block_lp_norms(f: ComplexField, p: float) -> np.ndarray:
    part = build_partition(f.grid)
    spec = f.spectrum
    if p == 2.0:
        # Parseval: no inverse transforms needed.
        power = spec.real ** 2 + spec.imag ** 2
        return np.sqrt(
            np.tensordot(part.block_symbols ** 2, power, axes=((1, 2), (0, 1)))
        )
    out = np.empty(part.j_max + 1)
    for j in range(part.j_max + 1):
        piece = ComplexField.from_spectrum(f.grid, part.block_symbols[j] * spec)
        out[j] = lp_norm(piece, p)
    return out


def besov_norm(f: ComplexField, s: float, p: float, q: float) -> float:
    """B^s_{p,q} norm: the l^q sum over blocks of 2^(s j) ||block_j f||_p."""
    if p < 1 or q < 1:
        raise ValueError("integrability indices must be >= 1")
    block_norms = _block_lp_norms(f, p)
    j = np.arange(block_norms.size)
    weighted = 2.0 ** (s * j) * block_norms
    if np.isinf(q):
        return float(weighted.max())
    return float(np.sum(weighted ** q) ** (1.0 / q))


def holder_norm(f: ComplexField, s: float) -> float:
    """Holder norm of non-integer order s in (0, 2), as the B^s_{inf,inf} norm."""
    if not 0.0 < s < 2.0 or s == 1.0:
        raise ValueError(f"order must lie in (0, 2) and not be an integer, got {s}")
    return besov_norm(f, s, np.inf, np.inf)


def paraproduct(f: ComplexField, g: ComplexField, which: str) -> ComplexField:
    """One piece of the product decomposition

        f g = low_high(f, g) + diagonal(f, g) + low_high(g, f).

    ``low_high`` pairs each block of ``f`` (from index 2 up) with the
    strictly lower cumulative part of ``g``; ``diagonal`` pairs each block
    of ``f`` with the three-block window of ``g`` around the same index.
    All products are dealiased.
    """
    f._check_same_grid(g)
    part = build_partition(f.grid)
    total = ComplexField.zeros(f.grid)
    if which == "low_high":
        for k in range(2, part.j_max + 1):
            fk = block_project(f, k, "single")
            gk = block_project(g, k - 2, "cumulative")
            total = total + pointwise_product(fk, gk)
    elif which == "diagonal":
        for k in range(part.j_max + 1):
            fk = block_project(f, k, "single")
            gk = block_project(g, k, "tilde")
            total = total + pointwise_product(fk, gk)
    else:
        raise ValueError(f"unknown paraproduct piece {which!r}")
    return total


def interpolation_check(
    f: ComplexField,
    s0: float,
    s1: float,
    q0: float,
    q1: float,
    theta: float,
) -> tuple[float, float]:
    """Both sides of the convexity inequality

        ||f||_{B^s_{q,2}} <= ||f||_{B^s0_{q0,2}}^(1-theta) ||f||_{B^s1_{q1,2}}^theta

    with s = (1-theta) s0 + theta s1 and 1/q = (1-theta)/q0 + theta/q1.
    This is an exact Holder inequality on the block sequence, so the left
    side can exceed the right only through implementation error.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    if q0 < 1 or q1 < 1:
        raise ValueError("integrability indices must be >= 1")
    s = (1.0 - theta) * s0 + theta * s1
    inv_q = (1.0 - theta) / q0 + theta / q1
    q = np.inf if inv_q == 0.0 else 1.0 / inv_q
    lhs = besov_norm(f, s, q, 2.0)
    rhs = besov_norm(f, s0, q0, 2.0) ** (1.0 - theta) * besov_norm(f, s1, q1, 2.0) ** theta
    return lhs, rhs
