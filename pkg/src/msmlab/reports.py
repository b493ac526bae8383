"""Report containers and serialisation: ratio surveys, stability runs,
norm tables.

Reports never embed timestamps, so identical configuration and seed give
byte-identical output files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RatioReport:
    """Empirical LHS/RHS statistics of one inequality over an ensemble."""

    inequality_id: str
    q: float
    sample_count: int
    max_ratio: float
    mean_ratio: float
    p95_ratio: float
    seed: int
    config_hash: str = ""

    def __post_init__(self):
        for value in (self.max_ratio, self.mean_ratio, self.p95_ratio):
            if not np.isfinite(value) or value < 0.0:
                raise ValueError("ratio statistics must be finite and nonnegative")

    def to_dict(self) -> dict:
        return {
            "inequality_id": self.inequality_id,
            "q": self.q,
            "sample_count": self.sample_count,
            "max_ratio": self.max_ratio,
            "mean_ratio": self.mean_ratio,
            "p95_ratio": self.p95_ratio,
            "seed": self.seed,
            "config_hash": self.config_hash,
        }


def ratio_report(
    inequality_id: str,
    ratios: np.ndarray,
    q: float,
    seed: int,
    config_hash: str = "",
) -> RatioReport:
    ratios = np.asarray(ratios, dtype=float)
    if ratios.size == 0:
        raise ValueError("empty ratio sample")
    return RatioReport(
        inequality_id=inequality_id,
        q=q,
        sample_count=int(ratios.size),
        max_ratio=float(ratios.max()),
        mean_ratio=float(ratios.mean()),
        p95_ratio=float(np.percentile(ratios, 95.0)),
        seed=seed,
        config_hash=config_hash,
    )


@dataclass
class StabilityReport:
    """Difference-norm history of a two-solution run with its Gronwall envelope.

    ``envelope[i] = fitted_c * exp(fitted_c * growth_integral[i]) * w_norms[0]``
    where the growth integral accumulates (1 + ||u||^2 + ||v||^2)^2 in the
    Besov 1/2-norm by the trapezoid rule on the sample grid; the fitted
    constant is the smallest making the envelope dominate the measured
    curve.  The sup of the H^{1/2} norms of both solutions is recorded
    alongside, without entering the fit.
    """

    delta: float
    seed: int
    times: list[float]
    w_norms: list[float]
    growth_integral: list[float]
    fitted_c: float
    envelope: list[float]
    u_l4_besov: float
    v_l4_besov: float
    u_sup_h_half: float
    v_sup_h_half: float
    config_hash: str = ""
    extra: dict = field(default_factory=dict)

    def sup_amplification(self) -> float:
        w0 = self.w_norms[0]
        if w0 == 0.0:
            return 0.0
        return max(self.w_norms) / w0

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "seed": self.seed,
            "times": self.times,
            "w_norms": self.w_norms,
            "growth_integral": self.growth_integral,
            "fitted_c": self.fitted_c,
            "envelope": self.envelope,
            "u_l4_besov": self.u_l4_besov,
            "v_l4_besov": self.v_l4_besov,
            "u_sup_h_half": self.u_sup_h_half,
            "v_sup_h_half": self.v_sup_h_half,
            "sup_amplification": self.sup_amplification(),
            "config_hash": self.config_hash,
            **self.extra,
        }


def write_json(path, payload) -> None:
    def default(obj):
        if isinstance(obj, (RatioReport, StabilityReport)):
            return obj.to_dict()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        raise TypeError(f"cannot serialise {type(obj)!r}")

    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=default)
        fh.write("\n")


def write_norm_table(path, rows) -> None:
    """CSV table of Besov norms: one row per (field_id, s, p, q, value)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["field_id", "s", "p", "q", "value"])
        for field_id, s, p, q, value in rows:
            writer.writerow([field_id, s, p, q, repr(float(value))])
