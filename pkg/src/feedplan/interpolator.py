"""Reference-point generation by exact arc-length inversion.

At each controller tick t_k = k dt the scheduled displacement F(t_k) is
matched against the path's exact polynomial arc length: Newton iteration

    xi <- xi - (s(xi) - F_local) / sigma(xi)

warm-started from the previous tick, with piece advancement when the
target passes a knot and a bisection fallback if Newton stalls.  Because
both s and F are exact antiderivatives, the residual converges to
roundoff in one or two steps per tick.
"""

import math
from dataclasses import dataclass

import numpy as np

from .limits import chord_error

#: Newton convergence threshold as a fraction of total path length.
RESIDUAL_TOL = 1e-12

#: Iteration cap before falling back to bisection.
MAX_NEWTON = 50


@dataclass
class ReferencePoint:
    """One uniformly-clocked sample of the planned motion."""

    index: int
    t: float
    segment_index: int
    xi: float
    position: np.ndarray
    feedrate: float
    chord_error: float
    chord_flagged: bool
    newton_iterations: int


def _invert_on_piece(seg, local, xi0, tol):
    """Newton for s(xi) = local on one piece; returns (xi, iterations, ok)."""
    xi = min(max(xi0, 0.0), 1.0)
    for it in range(1, MAX_NEWTON + 1):
        resid = seg.arclen.evaluate(xi) - local
        if abs(resid) <= tol:
            return xi, it - 1, True
        xi -= resid / seg.sigma.evaluate(xi)
        if xi < 0.0:
            xi = 0.0
        elif xi > 1.0:
            xi = 1.0
    return xi, MAX_NEWTON, False


def _bisect_on_piece(seg, local, tol):
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        resid = seg.arclen.evaluate(mid) - local
        if abs(resid) <= tol:
            return mid
        if resid > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def generate_reference_points(path, profile, limits):
    """Reference points at every tick plus a terminal sample at exactly T.

    Args:
        path: PhSplinePath the profile was scheduled on.
        profile: FeedrateProfile with total displacement equal to the path
            length (up to roundoff).
        limits: KinematicLimits providing sample_dt and the chord model.

    Returns:
        List of ReferencePoint with xi monotone within each piece.
    """
    dt = limits.sample_dt
    total_t = profile.total_time
    ticks = [k * dt for k in range(int(math.floor(total_t / dt)) + 1)]
    if total_t - ticks[-1] > 1e-12 * max(total_t, dt):
        ticks.append(total_t)
    else:
        ticks[-1] = total_t

    tol = RESIDUAL_TOL * path.total_length
    points = []
    piece = 0
    xi = 0.0
    cum = path.cumulative_lengths
    n_pieces = len(path.segments)
    for k, t in enumerate(ticks):
        target = min(profile.displacement(t), path.total_length)
        # Advance pieces whose full length is already consumed.
        while (piece < n_pieces - 1
               and target > cum[piece] + path.segments[piece].length + tol):
            piece += 1
            xi = 0.0
        seg = path.segments[piece]
        local = min(max(target - cum[piece], 0.0), seg.length)
        xi, iters, converged = _invert_on_piece(seg, local, xi, tol)
        if not converged:
            xi = _bisect_on_piece(seg, local, tol)
        v = profile.v(t)
        kap = seg.kappa(xi)
        flagged = abs(kap) * v * dt > 2.0
        err = math.nan if flagged else chord_error(limits, kap, v)
        points.append(ReferencePoint(k, t, piece, float(xi),
                                     seg.position(xi), float(v), err,
                                     bool(flagged), iters))
    return points


def chord_error_series(points, path, limits):
    """Chord-error value per reference point, recomputed from geometry.

    Flagged samples (tick chord longer than the osculating diameter) come
    back as NaN; they indicate a scheduling violation, not an interpolation
    failure.
    """
    out = np.empty(len(points))
    for i, p in enumerate(points):
        kap = path.segments[p.segment_index].kappa(p.xi)
        if abs(kap) * p.feedrate * limits.sample_dt > 2.0:
            out[i] = math.nan
        else:
            out[i] = chord_error(limits, kap, p.feedrate)
    return out
