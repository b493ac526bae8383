"""Pseudo-spectral laboratory for a gauged Schrodinger-map system on the
periodic 2-torus: spectral calculus, a dyadic Besov toolkit, gauge
potentials, time integration and empirical estimate surveys."""

from .config import ExperimentConfig, load_config
from .dyadic import (
    BlockDecomposition,
    DyadicPartition,
    besov_norm,
    block_project,
    build_partition,
    decompose,
    holder_norm,
    interpolation_check,
    paraproduct,
    smooth_cutoff,
)
from .evolution import (
    BlowUpError,
    DriftProblem,
    MsmState,
    TrajectoryRecord,
    difference_rhs,
    evolve_drift,
    evolve_msm,
    msm_rhs,
)
from .gauge import (
    GaugePotential,
    curvature_residual,
    divergence_residual,
    gauge_potential,
    riesz,
    scalar_potential,
    scalar_potential_diagonal_form,
    survey_gauge_bounds,
    vector_potential,
)
from .maps import (
    GaugeFrame,
    compatibility_residual,
    covariant_frame,
    derive_u,
    energy,
    gauge_frame,
    solve_psi,
    stereographic,
    u0_from_u,
)
from .randfields import random_field, random_map, random_pair, sample_rng
from .reports import RatioReport, StabilityReport
from .snapshot import read_snapshot, write_snapshot
from .spectral import (
    ComplexField,
    FourierMultiplier,
    Grid,
    apply_multiplier,
    derivative,
    forward_transform,
    gradient,
    inverse_laplacian,
    inverse_transform,
    laplacian,
    lp_norm,
    pointwise_product,
    refine_field,
    sobolev_norm,
)

__version__ = "0.1.0"
