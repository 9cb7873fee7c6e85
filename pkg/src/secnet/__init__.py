"""Secrecy outage analysis for relay beamforming with trust-selected friendly jammers."""

from .analytic import (DgrInputs, SopReport, analytic_sop, dgr_sop, moment_match,
                       moments_jamming, moments_signal, sop_oracle_numeric)
from .config import NetworkConfig, Polar, classify_nodes, load_config, thinned_densities
from .montecarlo import estimate_moments, estimate_sop, simulate
from .specfun import GammaParams

__all__ = [
    "DgrInputs", "GammaParams", "NetworkConfig", "Polar", "SopReport", "analytic_sop",
    "classify_nodes", "dgr_sop", "estimate_moments", "estimate_sop", "load_config",
    "moment_match", "moments_jamming", "moments_signal", "simulate", "sop_oracle_numeric",
    "thinned_densities",
]
