"""Independent kinematic audit of a scheduled profile on its path.

Samples the planned motion on a grid finer than the controller tick and
reconstructs the Cartesian acceleration and jerk from the Frenet frame:

    a = vdot t - v^2 kappa n
    j = (vddot - v^3 kappa^2) t - (3 v vdot kappa + v^3 w) n

with n the tangent rotated by -90 degrees.  The path parameter for each
sample is recovered by an independent arc-length inversion (not the tick
reference points), so the audit cross-checks the scheduler and the
interpolator rather than re-reading either.

Strict modes claim their bounds pointwise, so any violation is a failure;
relaxed modes work from block means and violations are reported as
informational.
"""

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class KinematicSample:
    t: float
    segment_index: int
    xi: float
    v: float
    vdot: float
    vddot: float
    a_vec: np.ndarray
    j_vec: np.ndarray
    chord_model: float


class KinematicTrace:
    """Struct-of-arrays sample sequence with KinematicSample views."""

    def __init__(self, arrays, knot_adjacent):
        self.t = arrays["t"]
        self.segment_index = arrays["segment_index"]
        self.xi = arrays["xi"]
        self.v = arrays["v"]
        self.vdot = arrays["vdot"]
        self.vddot = arrays["vddot"]
        self.a_vec = arrays["a_vec"]
        self.j_vec = arrays["j_vec"]
        self.chord_model = arrays["chord_model"]
        self.kappa = arrays["kappa"]
        self.w = arrays["w"]
        self.knot_adjacent = knot_adjacent

    def __len__(self):
        return self.t.size

    def __getitem__(self, i):
        return KinematicSample(float(self.t[i]), int(self.segment_index[i]),
                               float(self.xi[i]), float(self.v[i]),
                               float(self.vdot[i]), float(self.vddot[i]),
                               self.a_vec[i], self.j_vec[i],
                               float(self.chord_model[i]))


def sample_kinematics(path, profile, limits, samples_per_tick=10):
    """Audit-grid samples of the planned motion.

    The grid step is sample_dt / samples_per_tick; the terminal time is
    always included.  Path parameters come from the vectorized arc-length
    inversion at 1e-13 relative tolerance.
    """
    if samples_per_tick < 1:
        raise ValueError("samples_per_tick must be >= 1")
    step = limits.sample_dt / samples_per_tick
    n = int(math.floor(profile.total_time / step))
    times = np.arange(n + 1) * step
    if profile.total_time - times[-1] > 1e-12 * max(profile.total_time, step):
        times = np.append(times, profile.total_time)
    else:
        times[-1] = profile.total_time

    targets = np.minimum(profile.displacement(times), path.total_length)
    segs, xis = path.locate_many(targets)
    frames = path.frames_many(segs, xis)

    v = profile.v(times)
    vdot = profile.vdot(times)
    vddot = profile.vddot(times)
    kappa = frames["kappa"]
    w = frames["w"]
    tangent = frames["tangent"]
    normal = frames["normal"]

    a_vec = vdot[:, None] * tangent - (v * v * kappa)[:, None] * normal
    j_vec = ((vddot - v ** 3 * kappa ** 2)[:, None] * tangent
             - (3.0 * v * vdot * kappa + v ** 3 * w)[:, None] * normal)

    # Osculating-circle chord model of one controller tick at this state.
    k = np.abs(kappa)
    length = v * limits.sample_dt
    chord = np.zeros_like(v)
    curved = k > 0.0
    spanning = curved & (length * k >= 2.0)
    fine = curved & ~spanning
    r = 1.0 / k[fine]
    chord[fine] = r - np.sqrt(r * r - 0.25 * length[fine] ** 2)
    chord[spanning] = np.inf  # chord undefined; certain violation

    knot_adjacent = (xis <= 1e-9) | (xis >= 1.0 - 1e-9)
    arrays = {"t": times, "segment_index": segs, "xi": xis, "v": v,
              "vdot": vdot, "vddot": vddot, "a_vec": a_vec, "j_vec": j_vec,
              "chord_model": chord, "kappa": kappa, "w": w}
    return KinematicTrace(arrays, knot_adjacent)


@dataclass
class AuditRow:
    name: str
    observed: float
    bound: float
    at_time: float
    claimed: bool
    passed: bool

    def to_dict(self):
        return {"name": self.name, "observed": self.observed,
                "bound": self.bound, "at_time": self.at_time,
                "claimed": self.claimed, "passed": self.passed}


@dataclass
class AuditReport:
    mode_name: str
    rows: list = field(default_factory=list)

    @property
    def strict_ok(self):
        return all(r.passed for r in self.rows if r.claimed)

    def row(self, name):
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self):
        return {"mode": self.mode_name,
                "rows": [r.to_dict() for r in self.rows],
                "all_claims_met": self.strict_ok}


def _row(name, values, times, bound, claimed, rel_tol):
    values = np.asarray(values)
    if values.size == 0:
        return AuditRow(name, 0.0, bound, 0.0, claimed, True)
    i = int(np.argmax(values))
    observed = float(values[i])
    passed = observed <= bound * (1.0 + rel_tol)
    return AuditRow(name, observed, bound, float(times[i]), claimed, passed)


def _analytic_phase_extrema(profile):
    """Exact per-piece maxima of |vdot| and |vddot| from the coefficients.

    A ramp piece with rate change dv over duration T has |vdot| max
    15 dv / (8 T) and |vddot| max 10 dv / (sqrt(3) T^2); constant pieces
    contribute zero.
    """
    vd = []
    vdd = []
    times = []
    for p in profile.pieces:
        dv = abs(p.coeffs[-1] - p.coeffs[0])
        times.append(p.t0 + 0.5 * p.duration)
        vd.append(15.0 * dv / (8.0 * p.duration))
        vdd.append(10.0 * dv / (math.sqrt(3.0) * p.duration ** 2))
    return np.asarray(vd), np.asarray(vdd), np.asarray(times)


def audit_bounds(trace, limits, mode, profile=None):
    """Check the sampled motion against the bounds the mode claims.

    Cartesian acceleration and the chord model are claimed by every mode;
    tangential jerk (analytic, from the profile when given) by levels >= 1;
    Cartesian jerk by level 2, evaluated away from knots where w jumps.
    For relaxed strategies the claims are informational; AuditReport keeps
    claimed=True only where a violation must fail the run.
    """
    enforce = mode.strict
    report = AuditReport(mode.name)
    t = trace.t

    report.rows.append(_row("feedrate", trace.v, t, limits.v_max, True, 1e-9))
    report.rows.append(AuditRow("feedrate_nonneg", float(np.min(trace.v)), 0.0,
                                float(t[np.argmin(trace.v)]), True,
                                bool(np.min(trace.v) >= -1e-9 * limits.v_max)))
    for axis, name in ((0, "accel_x"), (1, "accel_y")):
        report.rows.append(_row(name, np.abs(trace.a_vec[:, axis]), t,
                                limits.a_max, enforce, 1e-9))
    report.rows.append(_row("accel_normal",
                            trace.v ** 2 * np.abs(trace.kappa), t,
                            limits.a_cen, False, 1e-9))

    if profile is not None and profile.pieces:
        vd_max, vdd_max, mid = _analytic_phase_extrema(profile)
        report.rows.append(_row("accel_tangential", vd_max, mid,
                                limits.a_tan, True, 1e-12))
        jerk_bound = limits.j_tan1 if mode.level >= 1 else limits.j_max
        report.rows.append(_row("jerk_tangential", vdd_max, mid, jerk_bound,
                                enforce, 1e-12))

    away = ~trace.knot_adjacent
    for axis, name in ((0, "jerk_x"), (1, "jerk_y")):
        report.rows.append(_row(name, np.abs(trace.j_vec[away, axis]),
                                t[away], limits.j_max,
                                enforce and mode.level >= 2, 1e-6))

    chord = trace.chord_model
    finite = np.where(np.isfinite(chord), chord, np.inf)
    report.rows.append(_row("chord_error", finite, t, limits.chord_tol,
                            enforce, 1e-9))
    return report
