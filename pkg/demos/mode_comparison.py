"""Schedule one spline under all six planner modes and compare them.

Builds a four-piece C1 spline in code, runs the full pipeline per mode, and
prints cycle time, block structure, and the tightest kinematic margins.
"""

import numpy as np

from feedplan.interpolator import generate_reference_points
from feedplan.limits import ALL_MODES, KinematicLimits
from feedplan.phpath import PhQuinticSegment, PhSplinePath
from feedplan.scheduler import schedule_path
from feedplan.verifier import audit_bounds, sample_kinematics


def build_path():
    # chain preimage quadratics with matched end coefficients (C1 joins)
    runs = [
        ((4.0, 4.2, 3.9), (0.0, 0.9, -0.6)),
        ((3.9, 4.1, 3.6), (-0.6, 0.2, 1.0)),
        ((3.6, 3.2, 3.8), (1.0, 1.6, 0.4)),
        ((3.8, 4.0, 3.7), (0.4, -0.5, 0.1)),
    ]
    segments = []
    start = np.zeros(2)
    for u, v in runs:
        seg = PhQuinticSegment(start, u, v)
        segments.append(seg)
        start = seg.end()
    return PhSplinePath(segments)


def main():
    path = build_path()
    limits = KinematicLimits(v_max=200.0, a_max=3000.0, j_max=60000.0,
                             chord_tol=0.001, sample_dt=0.001)
    print("path: %d segments, %.3f mm" % (len(path.segments),
                                          path.total_length))
    print()
    print("mode  time [s]  blocks  specials  repaired  min margin")
    for mode in ALL_MODES:
        result = schedule_path(path, limits, mode)
        trace = sample_kinematics(path, result.profile, limits)
        report = audit_bounds(trace, limits, mode, result.profile)
        margins = [1.0 - r.observed / r.bound for r in report.rows
                   if r.claimed and np.isfinite(r.bound) and r.bound > 0.0]
        print("%-4s  %8.4f  %6d  %8d  %8s  %9.2e" % (
            mode.name, result.profile.total_time, len(result.blocks),
            len(result.special_points), result.repaired, min(margins)))

    # time-resolved output for the strictest mode
    mode = ALL_MODES[-1]
    result = schedule_path(path, limits, mode)
    points = generate_reference_points(path, result.profile, limits)
    v = np.array([p.feedrate for p in points])
    print()
    print("%s reference run: %d points at %.0f us" % (
        mode.name, len(points), limits.sample_dt * 1e6))
    print("feedrate peak %.2f mm/s, mean %.2f mm/s" % (v.max(), v.mean()))
    print("worst chord deviation %.3e mm (budget %.3e)" % (
        np.nanmax([p.chord_error for p in points]), limits.chord_tol))


if __name__ == "__main__":
    main()
