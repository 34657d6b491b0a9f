"""Reduction to the center bundle along single base trajectories."""
from .chart import (BlockedNonlinearity, ManifoldChart, blocked_nonlinearity, check_partial_s_h,
                    graph_transform_h, invariance_defect, omega_modulus)
from .frame import TrajectoryFrame, build_frame, gauge_derivative, roundtrip_error
from .tracking import (ReductionConstants, TrackingReport, asymptotic_phase, lift, pliss_check,
                       select_constants)

__all__ = ["BlockedNonlinearity", "ManifoldChart", "ReductionConstants", "TrackingReport",
           "TrajectoryFrame", "asymptotic_phase", "blocked_nonlinearity", "build_frame",
           "check_partial_s_h", "gauge_derivative", "graph_transform_h", "invariance_defect",
           "lift", "omega_modulus", "pliss_check", "roundtrip_error", "select_constants"]
