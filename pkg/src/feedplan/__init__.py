"""Offline C2 feedrate scheduling and interpolation on planar PH quintic
spline paths under chord-error, velocity, acceleration and jerk limits."""

from .bernstein import BernsteinPoly, find_roots
from .blocks import CurveBlock, SpecialPoint, build_blocks, find_special_points
from .interpolator import (ReferencePoint, chord_error_series,
                           generate_reference_points)
from .limits import (ALL_MODES, KinematicLimits, SchedulerMode,
                     chord_error, chord_velocity_bound, critical_curvature,
                     jerk_centripetal_root, velocity_bound)
from .phpath import FrameSample, PhQuinticSegment, PhSplinePath
from .scheduler import (FeedrateProfile, ScheduleResult, assemble_profile,
                        compatibility_g, init_block_caps,
                        init_special_point_feedrates, phase_times,
                        repair_feedrates, schedule_path, solve_block_cap)
from .verifier import (AuditReport, AuditRow, KinematicSample, KinematicTrace,
                       audit_bounds, sample_kinematics)

__version__ = "0.1.0"

__all__ = [
    "ALL_MODES", "AuditReport", "AuditRow", "BernsteinPoly", "CurveBlock",
    "FeedrateProfile", "FrameSample", "KinematicLimits", "KinematicSample",
    "KinematicTrace", "PhQuinticSegment", "PhSplinePath", "ReferencePoint",
    "ScheduleResult", "SchedulerMode", "SpecialPoint", "assemble_profile",
    "audit_bounds", "build_blocks", "chord_error", "chord_error_series",
    "chord_velocity_bound", "compatibility_g", "critical_curvature",
    "find_roots", "find_special_points", "generate_reference_points",
    "init_block_caps", "init_special_point_feedrates", "jerk_centripetal_root",
    "phase_times", "repair_feedrates", "sample_kinematics", "schedule_path",
    "solve_block_cap", "velocity_bound",
]
