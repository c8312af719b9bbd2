"""Simulation and analysis of a rack-pinion-rack device coupled by the lateral Casimir force."""

from .analysis import (ClockMetrics, PhaseKind, PhaseLabel, Tolerances, classify, clock_metrics,
                       count_phase_slips, label_trajectory, mean_velocity)
from .atlas import (PhaseMap, SweepSpec, find_II0_boundary, find_skipping_threshold, sweep,
                    velocity_cut)
from .estimates import (DeviceSpec, clock_frequency, friction_coefficient, inertia_time,
                        moment_of_inertia, preset, skipping_velocity, to_drive_point)
from .integrator import IntegratorConfig, IntegrationError, Trajectory, integrate, \
    integrate_symmetric_oracle
from .model import DrivePoint, PinionState, SymmetricCase, analytic_symmetric, mirror_transform, rhs

__all__ = [
    "ClockMetrics", "DeviceSpec", "DrivePoint", "IntegrationError", "IntegratorConfig",
    "PhaseKind", "PhaseLabel", "PhaseMap", "PinionState", "SweepSpec", "SymmetricCase",
    "Tolerances", "Trajectory", "analytic_symmetric", "classify", "clock_frequency",
    "clock_metrics", "count_phase_slips", "find_II0_boundary", "find_skipping_threshold",
    "friction_coefficient", "inertia_time", "integrate", "integrate_symmetric_oracle",
    "label_trajectory", "mean_velocity", "mirror_transform", "moment_of_inertia", "preset",
    "rhs", "skipping_velocity", "sweep", "to_drive_point", "velocity_cut",
]
