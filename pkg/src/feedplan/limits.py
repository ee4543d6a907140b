"""Machine limit sets, scheduler modes, and curvature-dependent feedrate bounds.

The drive limits (v_max, a_max, j_max) are split into tangential and
centripetal budgets by the ratios p_a, p_j, q_j so that satisfying each
component bound separately guarantees the Cartesian bounds:

    a_tan = p_a a_max            a_cen = sqrt(1 - p_a^2) a_max
    j_tan1 = q_j p_j j_max       j_tan2 = (1 - q_j) p_j j_max
    j_cen = sqrt(1 - p_j^2) j_max

All quantities are in mm / s units; curvature in 1/mm.
"""

import math
from dataclasses import dataclass

INV_SQRT2 = 1.0 / math.sqrt(2.0)

#: Sentinel for an inactive bound; never serialized as a number.
UNBOUNDED = math.inf


@dataclass(frozen=True)
class KinematicLimits:
    """Per-axis machine limits plus tolerance and sampling settings."""

    v_max: float
    a_max: float
    j_max: float
    chord_tol: float
    sample_dt: float
    p_a: float = INV_SQRT2
    p_j: float = INV_SQRT2
    q_j: float = 0.5

    def __post_init__(self):
        for name in ("v_max", "a_max", "j_max", "chord_tol", "sample_dt"):
            if not getattr(self, name) > 0.0:
                raise ValueError("%s must be positive" % name)
        for name in ("p_a", "p_j"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError("%s must lie in (0, 1)" % name)
        if not 0.0 < self.q_j < 1.0:
            raise ValueError("q_j must lie in (0, 1)")

    @property
    def a_tan(self):
        return self.p_a * self.a_max

    @property
    def a_cen(self):
        return math.sqrt(1.0 - self.p_a ** 2) * self.a_max

    @property
    def j_tan1(self):
        return self.q_j * self.p_j * self.j_max

    @property
    def j_tan2(self):
        return (1.0 - self.q_j) * self.p_j * self.j_max

    @property
    def j_cen(self):
        return math.sqrt(1.0 - self.p_j ** 2) * self.j_max

    @classmethod
    def from_document(cls, doc):
        """Build from a plain dict as read from a limits JSON document."""
        if not isinstance(doc, dict):
            raise ValueError("limits document must be a JSON object")
        required = ("v_max", "a_max", "j_max", "chord_tol", "sample_dt")
        missing = [k for k in required if k not in doc]
        if missing:
            raise ValueError("limits document missing %s" % ", ".join(missing))
        kwargs = {}
        for key in required + ("p_a", "p_j", "q_j"):
            if key in doc:
                value = doc[key]
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise ValueError("limits field %r must be a number" % key)
                kwargs[key] = float(value)
        unknown = set(doc) - set(required) - {"p_a", "p_j", "q_j"}
        if unknown:
            raise ValueError("unknown limits fields %s" % ", ".join(sorted(unknown)))
        return cls(**kwargs)


@dataclass(frozen=True)
class SchedulerMode:
    """A scheduling strategy (relaxed/strict block statistics) and a level.

    Level 0 enforces chord error and acceleration, level 1 adds tangential
    jerk, level 2 adds centripetal jerk.
    """

    strategy: str
    level: int

    _NAMES = {"relaxed": "R", "strict": "S"}

    def __post_init__(self):
        if self.strategy not in ("relaxed", "strict"):
            raise ValueError("strategy must be 'relaxed' or 'strict'")
        if self.level not in (0, 1, 2):
            raise ValueError("level must be 0, 1 or 2")

    @property
    def name(self):
        return "%s%d" % (self._NAMES[self.strategy], self.level)

    @property
    def strict(self):
        return self.strategy == "strict"

    @classmethod
    def parse(cls, text):
        t = str(text).strip().upper()
        if len(t) == 2 and t[0] in "RS" and t[1] in "012":
            return cls("relaxed" if t[0] == "R" else "strict", int(t[1]))
        raise ValueError("unknown mode %r (expected R0..R2 or S0..S2)" % text)


ALL_MODES = tuple(SchedulerMode(s, l)
                  for s in ("relaxed", "strict") for l in (0, 1, 2))


def chord_velocity_bound(limits, kappa):
    """Largest feedrate keeping the circular-chord error within chord_tol.

    On an arc of curvature kappa the chord of length v*sample_dt deviates by
    1/|k| - sqrt(1/k^2 - L^2/4); inverting at chord_tol gives the bound
    (2/dt) sqrt(2 D/|k| - D^2).  Straight spans (kappa = 0) and arcs whose
    radius does not exceed the tolerance (|k| D >= 1) are unconstrained.
    """
    k = abs(kappa)
    d = limits.chord_tol
    if k == 0.0 or k * d >= 1.0:
        return UNBOUNDED
    return (2.0 / limits.sample_dt) * math.sqrt(2.0 * d / k - d * d)


def jerk_centripetal_root(limits, kappa, w):
    """Feedrate at which centripetal jerk exhausts its budget.

    Solves |w| v^3 + 3 |kappa| a_tan v = j_cen for the unique positive root
    via the depressed-cubic closed form.  With lam = j_cen / (2|w|) and
    c = |kappa| a_tan / |w| the root is cbrt(lam + r) + cbrt(lam - r),
    r = sqrt(lam^2 + c^3); the second cube root is computed as -c/cbrt(lam+r)
    to avoid cancellation.  Degenerate cases: w = 0 reduces to the linear
    equation (root j_cen / (3 |kappa| a_tan)); both zero means no constraint.
    """
    k = abs(kappa)
    wv = abs(w)
    jc = limits.j_cen
    at = limits.a_tan
    if wv == 0.0:
        if k == 0.0:
            return UNBOUNDED
        return jc / (3.0 * k * at)
    lam = jc / (2.0 * wv)
    c = k * at / wv
    r = math.sqrt(lam * lam + c ** 3)
    cb = (lam + r) ** (1.0 / 3.0)
    v = cb - c / cb
    # Two Newton steps pin the residual to roundoff.
    for _ in range(2):
        f = wv * v ** 3 + 3.0 * k * at * v - jc
        fp = 3.0 * wv * v * v + 3.0 * k * at
        v -= f / fp
    return v


def velocity_bound(limits, mode, kappa, w=0.0):
    """Level-dependent feedrate cap at curvature kappa (and w for level 2).

    Level 0 combines the chord bound with the centripetal acceleration
    bound sqrt(a_cen/|k|); level 1 adds the centripetal part of tangential
    jerk cbrt(j_tan2/k^2); level 2 adds the centripetal jerk root.  The
    result is always capped at v_max.
    """
    k = abs(kappa)
    b = chord_velocity_bound(limits, kappa)
    if k > 0.0:
        b = min(b, math.sqrt(limits.a_cen / k))
        if mode.level >= 1:
            b = min(b, (limits.j_tan2 / (k * k)) ** (1.0 / 3.0))
    if mode.level >= 2:
        b = min(b, jerk_centripetal_root(limits, kappa, w))
    return min(b, limits.v_max)


def critical_curvature(limits, mode):
    """Largest curvature at which the full feedrate v_max stays reachable.

    Inverts each velocity bound at v = v_max: the chord term gives
    8 D / (v_max^2 dt^2 + 4 D^2), centripetal acceleration gives
    a_cen / v_max^2, and (levels 1, 2) tangential jerk gives
    sqrt(j_tan2 / v_max^3).  Curvature maxima above this threshold force a
    local slowdown and are treated as special points.
    """
    d = limits.chord_tol
    vm = limits.v_max
    dt = limits.sample_dt
    terms = [8.0 * d / (vm * vm * dt * dt + 4.0 * d * d),
             limits.a_cen / (vm * vm)]
    if mode.level >= 1:
        terms.append(math.sqrt(limits.j_tan2 / vm ** 3))
    return min(terms)


def chord_error(limits, kappa, v):
    """Chord error of one sampling step at feedrate v on curvature kappa."""
    k = abs(kappa)
    if k == 0.0:
        return 0.0
    length = v * limits.sample_dt
    if length * k > 2.0:
        raise ValueError("chord undefined: step spans more than the diameter")
    r = 1.0 / k
    return r - math.sqrt(r * r - 0.25 * length * length)
