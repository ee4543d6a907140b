"""Show how a tangent discontinuity forces a full stop.

Two straight segments meeting at 90 degrees cannot be blended at speed, so
the planner splits the path at the corner and schedules a rest there.  The
demo prints the dwell bookkeeping and the feedrate shape near the stop.
"""

import math

import numpy as np

from feedplan.limits import KinematicLimits, SchedulerMode
from feedplan.phpath import PhQuinticSegment, PhSplinePath
from feedplan.scheduler import schedule_path


def main():
    d = math.sqrt(10.0)  # u = const d gives a straight run of length 10 d^2
    first = PhQuinticSegment([0.0, 0.0], [d, d, d], [0.0, 0.0, 0.0])
    second = PhQuinticSegment(first.end(), [d / math.sqrt(2.0)] * 3,
                              [d / math.sqrt(2.0)] * 3)
    path = PhSplinePath([first, second])
    print("junction tangents differ, breakpoints: %s"
          % path.breakpoint_indices)

    limits = KinematicLimits(v_max=150.0, a_max=2000.0, j_max=40000.0,
                             chord_tol=0.001, sample_dt=0.001)
    result = schedule_path(path, limits, SchedulerMode("strict", 1))
    profile = result.profile

    windows = profile.span_windows()
    print("two spans on one clock:")
    for i, (t0, t1) in enumerate(windows):
        print("  span %d: %.4f .. %.4f s" % (i, t0, t1))
    t_corner = profile.dwell_times[0]
    print("stop at t = %.4f s, v = %.2e mm/s" % (
        t_corner, profile.v(t_corner)))

    # the approach decelerates to rest and the exit rebuilds speed, both C2
    for dt in (-0.010, -0.005, 0.0, 0.005, 0.010):
        t = t_corner + dt
        print("  t%+0.3f s: v = %7.3f  vdot = %9.2f  vddot = %11.1f" % (
            dt, profile.v(t), profile.vdot(t), profile.vddot(t)))

    assert profile.v(t_corner) == 0.0
    np.testing.assert_allclose(profile.displacement(profile.total_time),
                               path.total_length, rtol=1e-9)
    print("displacement closes on the path length to 1e-9")


if __name__ == "__main__":
    main()
