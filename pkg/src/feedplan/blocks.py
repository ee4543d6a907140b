"""Decomposition of a path span into curve blocks between special points.

Special points are locations where the feedrate must dip: span endpoints
(motion halts), curvature maxima above the critical curvature (relaxed
strategies), or crossings of |kappa| with the critical curvature (strict
strategies).  Consecutive special points delimit blocks; each block carries
the curvature statistic its strategy uses to cap the feedrate: arc-length
means for relaxed, maxima for strict.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .bernstein import find_roots
from .limits import critical_curvature

log = logging.getLogger(__name__)

#: Special points closer than this along the path are merged (mm).
MERGE_TOL = 1e-10

# Offset used for one-sided slope probes around candidate maxima.
_PROBE = 1e-6


@dataclass
class SpecialPoint:
    """A forced local feedrate minimum on the path."""

    kind: str  # "endpoint" | "critical" | "crossing"
    segment_index: int
    xi: float
    arclength: float
    kappa_here: float


@dataclass
class CurveBlock:
    """One span between consecutive special points plus its schedule state."""

    start: SpecialPoint
    end: SpecialPoint
    length: float
    kappa_stat: float = 0.0
    w_stat: float = 0.0
    v_start: float = 0.0
    v_end: float = 0.0
    v_cap: float = 0.0
    t_acc: float = 0.0
    t_con: float = 0.0
    t_dec: float = 0.0
    splits: list = field(default_factory=list, repr=False)


def _one_sided_abs_kappa(path, piece_range, segment_index, xi):
    """|kappa| at a special point, taking the larger side at a knot."""
    a, b = piece_range
    values = [abs(path.segments[segment_index].kappa(xi))]
    if xi == 0.0 and segment_index > a:
        values.append(abs(path.segments[segment_index - 1].kappa(1.0)))
    if xi == 1.0 and segment_index < b - 1:
        values.append(abs(path.segments[segment_index + 1].kappa(0.0)))
    return max(values)


def _relaxed_candidates(path, piece_range, kappa_cr):
    """Interior local maxima of |kappa| above kappa_cr."""
    a, b = piece_range
    found = []
    for j in range(a, b):
        seg = path.segments[j]
        deriv = seg.curv_deriv_num
        if np.all(deriv.coeffs == 0.0):
            continue  # constant curvature piece has no isolated maxima
        for xi in find_roots(deriv):
            if not _PROBE < xi < 1.0 - _PROBE:
                continue  # knot neighborhood handled below
            if abs(seg.kappa(xi)) <= kappa_cr:
                continue
            lo = abs(seg.kappa(xi - _PROBE))
            hi = abs(seg.kappa(xi + _PROBE))
            if abs(seg.kappa(xi)) >= max(lo, hi):
                found.append((j, float(xi)))
    # Interior knots: one-sided values can make the junction a local max of
    # |kappa| even though it is not a stationary point of either piece.
    for j in range(a, b - 1):
        left, right = path.segments[j], path.segments[j + 1]
        peak = max(abs(left.kappa(1.0)), abs(right.kappa(0.0)))
        if (peak > kappa_cr
                and peak >= abs(left.kappa(1.0 - _PROBE))
                and peak >= abs(right.kappa(_PROBE))):
            found.append((j + 1, 0.0))
    return found


def _strict_candidates(path, piece_range, kappa_cr):
    """Sign changes of |kappa| - kappa_cr, including jumps at knots."""
    a, b = piece_range
    found = []
    for j in range(a, b):
        seg = path.segments[j]
        sig3 = seg.sigma * seg.sigma * seg.sigma
        candidates = []
        for shifted in (seg.curv_num - kappa_cr * sig3,
                        seg.curv_num + kappa_cr * sig3):
            if np.all(shifted.coeffs == 0.0):
                continue
            candidates.extend(float(x) for x in find_roots(shifted))
        candidates = sorted(x for x in candidates if _PROBE < x < 1.0 - _PROBE)
        # Keep only candidates across which |kappa| - kappa_cr changes sign.
        def excess(xi):
            return abs(seg.kappa(xi)) - kappa_cr
        edges = [0.0] + candidates + [1.0]
        for i, xi in enumerate(candidates):
            before = excess(0.5 * (edges[i] + xi))
            after = excess(0.5 * (xi + edges[i + 2]))
            if before == 0.0 or after == 0.0 or (before < 0.0) != (after < 0.0):
                found.append((j, xi))
    for j in range(a, b - 1):
        left = abs(path.segments[j].kappa(1.0)) - kappa_cr
        right = abs(path.segments[j + 1].kappa(0.0)) - kappa_cr
        if left == 0.0 or right == 0.0 or (left < 0.0) != (right < 0.0):
            found.append((j + 1, 0.0))
    return found


def find_special_points(path, piece_range, limits, mode):
    """Special points of one breakpoint-delimited span, in path order.

    Args:
        path: PhSplinePath.
        piece_range: (first, last+1) piece indices of the span.
        limits: KinematicLimits.
        mode: SchedulerMode; the strategy selects the detector.

    Returns:
        List of SpecialPoint starting and ending with the span endpoints.
        Interior points closer than MERGE_TOL in arc length to each other,
        or to an endpoint, are merged away.
    """
    a, b = piece_range
    if not (0 <= a < b <= len(path.segments)):
        raise ValueError("bad piece range")
    kappa_cr = critical_curvature(limits, mode)

    kind = "critical" if mode.strategy == "relaxed" else "crossing"
    interior = (_relaxed_candidates(path, piece_range, kappa_cr)
                if mode.strategy == "relaxed"
                else _strict_candidates(path, piece_range, kappa_cr))

    points = [SpecialPoint("endpoint", a, 0.0, path.arc_length(a, 0.0),
                           _one_sided_abs_kappa(path, piece_range, a, 0.0))]
    for j, xi in sorted(interior, key=lambda c: (c[0], c[1])):
        points.append(SpecialPoint(
            kind, j, xi, path.arc_length(j, xi),
            _one_sided_abs_kappa(path, piece_range, j, xi)))
    points.append(SpecialPoint(
        "endpoint", b - 1, 1.0, path.arc_length(b - 1, 1.0),
        _one_sided_abs_kappa(path, piece_range, b - 1, 1.0)))

    merged = [points[0]]
    for p in points[1:-1]:
        if (p.arclength - merged[-1].arclength > MERGE_TOL
                and points[-1].arclength - p.arclength > MERGE_TOL):
            merged.append(p)
    merged.append(points[-1])
    return merged


# -- block statistics ------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def _gl(f, a, b):
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _GL_NODES
    return half * float(np.dot(_GL_WEIGHTS, f(x)))


def _adaptive_gl(f, a, b, tol, depth=0):
    whole = _gl(f, a, b)
    m = 0.5 * (a + b)
    halves = _gl(f, a, m) + _gl(f, m, b)
    if abs(halves - whole) <= tol or depth >= 30:
        return halves
    return (_adaptive_gl(f, a, m, 0.5 * tol, depth + 1)
            + _adaptive_gl(f, m, b, 0.5 * tol, depth + 1))


def _integrate_split(f, a, b, kinks, tol):
    """Adaptive Gauss-Legendre with forced splits at integrand kinks."""
    edges = [a] + [x for x in sorted(kinks) if a + 1e-12 < x < b - 1e-12] + [b]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += _adaptive_gl(f, lo, hi, tol * (hi - lo) / (b - a))
    return total


def _piece_portions(block):
    """(piece index, xi_lo, xi_hi) covering the block."""
    j0, x0 = block.start.segment_index, block.start.xi
    j1, x1 = block.end.segment_index, block.end.xi
    if j0 == j1:
        return [(j0, x0, x1)]
    portions = [(j0, x0, 1.0)]
    portions.extend((j, 0.0, 1.0) for j in range(j0 + 1, j1))
    portions.append((j1, 0.0, x1))
    return [(j, lo, hi) for j, lo, hi in portions if hi > lo]


def _mean_stats(path, block, tol=1e-10):
    """Arc-length means of |kappa| and |w| over the block.

    mean|kappa| = (1/S) int |kappa| sigma dxi, split where kappa changes
    sign; mean|w| = (1/S) int |kappa'| dxi, split at stationary points of
    kappa, so each sub-integrand is smooth.
    """
    acc_k = 0.0
    acc_w = 0.0
    for j, lo, hi in _piece_portions(block):
        seg = path.segments[j]
        k_kinks = ([] if np.all(seg.curv_num.coeffs == 0.0)
                   else list(find_roots(seg.curv_num)))
        w_kinks = ([] if np.all(seg.curv_deriv_num.coeffs == 0.0)
                   else list(find_roots(seg.curv_deriv_num)))

        def abs_k_sigma(x, seg=seg):
            return np.abs(seg.curv_num.evaluate(x)) / seg.sigma.evaluate(x) ** 2

        def abs_k_prime(x, seg=seg):
            return (np.abs(seg.curv_deriv_num.evaluate(x))
                    / seg.sigma.evaluate(x) ** 4)

        acc_k += _integrate_split(abs_k_sigma, lo, hi, k_kinks, tol)
        acc_w += _integrate_split(abs_k_prime, lo, hi, w_kinks, tol)
    return acc_k / block.length, acc_w / block.length


def _golden_max(f, a, b, tol=1e-10):
    """Golden-section maximization of a unimodal bracket."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return max(fc, fd)


def _max_on_portion(f, lo, hi, grid_density):
    n = max(int(round(grid_density * (hi - lo))), 32)
    xs = np.linspace(lo, hi, n + 1)
    ys = f(xs)
    best = float(np.max(ys))
    # Strict on both sides: plateaus (a straight span ties everywhere) are
    # already resolved by the grid value and need no refinement.
    interior = np.flatnonzero((ys[1:-1] > ys[:-2]) & (ys[1:-1] > ys[2:])) + 1
    for i in interior:
        best = max(best, _golden_max(lambda x: float(f(np.asarray(x))),
                                     xs[max(i - 1, 0)], xs[min(i + 1, n)]))
    return best


def _max_stats(path, block, grid_density):
    """Maxima of |kappa| and |w| over the block (grid + golden refinement)."""
    max_k = 0.0
    max_w = 0.0
    for j, lo, hi in _piece_portions(block):
        seg = path.segments[j]

        def abs_kappa(x, seg=seg):
            return np.abs(seg.curv_num.evaluate(x)) / seg.sigma.evaluate(x) ** 3

        def abs_w(x, seg=seg):
            return (np.abs(seg.curv_deriv_num.evaluate(x))
                    / seg.sigma.evaluate(x) ** 5)

        max_k = max(max_k, _max_on_portion(abs_kappa, lo, hi, grid_density))
        max_w = max(max_w, _max_on_portion(abs_w, lo, hi, grid_density))
    return max_k, max_w


def build_blocks(path, special_points, mode, grid_density=1024):
    """Blocks between consecutive special points, with strategy statistics.

    Zero-length blocks (merged special points) are dropped with a warning.
    Block lengths telescope: their sum equals the span length exactly up to
    rounding in the arc-length evaluations.
    """
    blocks = []
    for p, q in zip(special_points[:-1], special_points[1:]):
        length = q.arclength - p.arclength
        if length <= MERGE_TOL:
            log.warning("dropping zero-length block at arclength %.6f mm",
                        p.arclength)
            continue
        blocks.append(CurveBlock(start=p, end=q, length=length))
    for block in blocks:
        if mode.strategy == "relaxed":
            block.kappa_stat, block.w_stat = _mean_stats(path, block)
        else:
            block.kappa_stat, block.w_stat = _max_stats(path, block,
                                                        grid_density)
    return blocks
