"""Partisan asymmetry metrics for single-member district elections."""

from ._core import (
    GerryError,
    apply_crack,
    apply_pack,
    clamp_imputed,
    declination,
    delta_n,
    delta_tilde,
    efficiency_gap,
    mean_median,
    metrics,
    mirror_q,
    run_batch,
    seat_share,
    tau_gap,
    tau_gap_limit,
    theorem_check,
    vote_share,
)

__all__ = [
    "GerryError",
    "apply_crack",
    "apply_pack",
    "clamp_imputed",
    "declination",
    "delta_n",
    "delta_tilde",
    "efficiency_gap",
    "mean_median",
    "metrics",
    "mirror_q",
    "run_batch",
    "seat_share",
    "tau_gap",
    "tau_gap_limit",
    "theorem_check",
    "vote_share",
]
