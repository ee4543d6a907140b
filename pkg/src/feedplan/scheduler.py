"""Feedrate scheduling: C2 quintic trapezoids over curve blocks.

Each block gets a three-phase profile: a quintic ramp from the entry
feedrate to the block cap, a constant stretch, and a quintic ramp down to
the exit feedrate.  Ramps use the Bernstein coefficient pattern
(V, V, V, Vc, Vc, Vc), whose first and second derivatives vanish at both
ends, so chaining phases is automatically C2 with exact zero acceleration
at every phase join.  The ramp duration

    T = max( 15 dv / (8 a_tan), sqrt(10 dv / (sqrt(3) J)) )

is the smallest T for which the ramp respects |vdot| <= a_tan and
|vddot| <= J: the shape function b_2^4 peaks at 3/8 and its slope at
2/sqrt(3), giving |vdot|max = 15 dv / (8 T) and |vddot|max =
10 dv / (sqrt(3) T^2).  J is j_tan1 for levels 1 and 2; level 0 claims no
tangential jerk split and uses the full j_max.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .blocks import build_blocks, find_special_points
from .limits import critical_curvature, velocity_bound

#: Relative slack when testing block compatibility.
_SLACK = 1e-12


def _eff_jerk(limits, mode):
    return limits.j_tan1 if mode.level >= 1 else limits.j_max


def phase_times(limits, mode, v_from, v_to):
    """Minimal duration of a C2 quintic ramp from v_from up to v_to."""
    if v_to < v_from - 1e-9 * limits.v_max:
        raise ValueError("ramp must not decrease")
    dv = max(v_to - v_from, 0.0)
    if dv == 0.0:
        return 0.0
    j = _eff_jerk(limits, mode)
    return max(15.0 * dv / (8.0 * limits.a_tan),
               math.sqrt(10.0 * dv / (math.sqrt(3.0) * j)))


def _ramp_dist(limits, mode, v_lo, v_hi):
    """Displacement of one ramp between two feedrates (array-capable)."""
    dv = np.maximum(np.asarray(v_hi) - np.asarray(v_lo), 0.0)
    j = _eff_jerk(limits, mode)
    t = np.maximum(15.0 * dv / (8.0 * limits.a_tan),
                   np.sqrt(10.0 * dv / (math.sqrt(3.0) * j)))
    return 0.5 * t * (np.asarray(v_lo) + np.asarray(v_hi))


def compatibility_g(limits, mode, v_start, v_end, x):
    """Distance consumed by the two ramps of a block run at cap x.

    g(x) = T_acc(x) (v_start + x) + T_dec(x) (v_end + x); the block cap x
    is compatible with the block length S iff g(x) <= 2 S.  g is zero at
    x = v_start = v_end and strictly increasing in x above both endpoints.
    """
    return 2.0 * (_ramp_dist(limits, mode, v_start, x)
                  + _ramp_dist(limits, mode, v_end, x))


def _block_feasible(limits, mode, v_a, v_b, length):
    """Endpoint pair feasibility: the direct ramp fits inside the block."""
    lo = np.minimum(v_a, v_b)
    hi = np.maximum(v_a, v_b)
    return _ramp_dist(limits, mode, lo, hi) <= length * (1.0 + _SLACK)


def init_block_caps(blocks, limits, mode):
    """Set each block's feedrate cap from its curvature statistics."""
    for b in blocks:
        b.v_cap = velocity_bound(limits, mode, b.kappa_stat, b.w_stat)
    return blocks


def init_special_point_feedrates(blocks, limits, mode):
    """Entry/exit feedrates at the special points between blocks.

    Span endpoints get zero.  Interior points get the pointwise curvature
    bound (levels 0/1 terms only; the centripetal-jerk term needs a block
    statistic for w and enters through the caps) for relaxed strategies,
    and the smaller neighbouring cap for strict ones.  Every point is then
    clamped to its neighbouring caps so that v_start, v_end <= v_cap holds
    for each block.
    """
    point_mode = type(mode)(mode.strategy, min(mode.level, 1))
    for left, right in zip(blocks[:-1], blocks[1:]):
        if mode.strategy == "relaxed":
            v = velocity_bound(limits, point_mode, left.end.kappa_here, 0.0)
        else:
            v = min(left.v_cap, right.v_cap)
        v = min(v, left.v_cap, right.v_cap)
        left.v_end = v
        right.v_start = v
    blocks[0].v_start = 0.0
    blocks[-1].v_end = 0.0
    return blocks


def _largest_ok(ok, cap, tol):
    """Largest x in [0, cap] with ok(x), or None.

    The ramp distance between two speeds is not monotone in the lower one
    (the jerk-limited branch peaks when the lower speed is a third of the
    upper), so a plain bisection can miss the boundary.  A coarse scan
    brackets the topmost feasible stretch; bisection sharpens its edge.
    """
    if ok(cap):
        return cap
    grid = np.linspace(0.0, cap, 4097)
    mask = ok(grid)
    if not mask.any():
        return None
    j = int(np.max(np.flatnonzero(mask)))
    lo = grid[j]
    hi = grid[j + 1] if j + 1 < grid.size else cap
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def repair_feedrates(blocks, limits, mode):
    """Lower special-point feedrates until every block is compatible.

    Minimizes the total squared reduction from the initial values, subject
    to each block being able to ramp directly between its endpoint
    feedrates within its length.  Two deterministic starts are swept with
    projected coordinate descent (each interior feedrate raised to the
    largest feasible value not exceeding its initial bound): the uniform
    minimum of the initial values when that is feasible, and a
    forward-backward reachability pass, which is always feasible.  The
    fixed point with the smaller objective wins.  Each sweep stops when no
    feedrate moves more than 1e-12 v_max, or after 200 sweeps.

    Returns:
        (blocks, repaired) where repaired tells whether anything moved.
    """
    m = len(blocks)
    lengths = [b.length for b in blocks]
    v = np.zeros(m + 1)
    v[0] = blocks[0].v_start
    v[m] = blocks[-1].v_end
    v_hat = v.copy()
    for i in range(1, m):
        v[i] = blocks[i].v_start
        v_hat[i] = blocks[i].v_start

    def pair_ok(a, x, s):
        return _block_feasible(limits, mode, a, x, s)

    def all_feasible(vv):
        return all(pair_ok(vv[i - 1], vv[i], lengths[i - 1])
                   for i in range(1, m + 1))

    if all_feasible(v):
        return blocks, False
    if m < 2:
        raise RuntimeError("single incompatible block with zero endpoints")

    tol = 1e-12 * limits.v_max

    def sweep(vv):
        for _ in range(200):
            moved = 0.0
            for i in range(1, m):

                def ok(x):
                    return (pair_ok(vv[i - 1], x, lengths[i - 1])
                            & pair_ok(x, vv[i + 1], lengths[i]))

                new = _largest_ok(ok, v_hat[i], tol)
                # The scan can miss a sliver at the joint boundary; the
                # current value is feasible, so never descend.
                if new is None or new < vv[i]:
                    new = vv[i]
                moved = max(moved, abs(new - vv[i]))
                vv[i] = new
            if moved <= tol:
                break
        return vv

    candidates = []
    uniform = v.copy()
    uniform[1:m] = np.min(v_hat[1:m])
    if all_feasible(uniform):
        candidates.append(sweep(uniform))

    # Forward-backward reachability start: raise each point as far as the
    # preceding block allows, then sweep back so every pair fits.  An
    # unsatisfiable forward step defers to the backward pass.
    w = v.copy()
    for i in range(1, m):
        got = _largest_ok(lambda x: pair_ok(w[i - 1], x, lengths[i - 1]),
                          v_hat[i], tol)
        w[i] = v_hat[i] if got is None else got
    for i in range(m - 1, 0, -1):
        got = _largest_ok(lambda x: pair_ok(x, w[i + 1], lengths[i]),
                          w[i], tol)
        if got is not None:
            w[i] = got
    candidates.append(sweep(w))

    def objective(vv):
        return float(np.sum((vv[1:m] - v_hat[1:m]) ** 2))

    feasible_fixed = [c for c in candidates if all_feasible(c)]
    if not feasible_fixed:
        raise RuntimeError("feedrate repair failed to converge")
    v = min(feasible_fixed, key=objective)
    for i, b in enumerate(blocks):
        b.v_start = v[i]
        b.v_end = v[i + 1]
    return blocks, True


def solve_block_cap(block, limits, mode):
    """Final cap and phase durations for one block.

    Uses the initial cap when compatible, otherwise the unique root of
    g(x) = 2 S in [max(v_start, v_end), cap] by bisection (tolerance
    1e-12 v_max), in which case the constant phase vanishes.
    """
    s = block.length
    lo = max(block.v_start, block.v_end)

    def g(x):
        return compatibility_g(limits, mode, block.v_start, block.v_end, x)

    if g(lo) > 2.0 * s * (1.0 + 1e-9):
        raise RuntimeError("incompatible block endpoints; repair missing")
    cap = max(block.v_cap, lo)
    if g(cap) <= 2.0 * s:
        vc = cap
    else:
        hi = cap
        tol = 1e-12 * limits.v_max
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if g(mid) <= 2.0 * s:
                lo = mid
            else:
                hi = mid
        vc = lo
    if vc <= 0.0:
        raise RuntimeError("vanishing block cap on a positive-length block")
    block.v_cap = vc
    block.t_acc = phase_times(limits, mode, block.v_start, vc)
    block.t_dec = phase_times(limits, mode, block.v_end, vc)
    block.t_con = max((s - 0.5 * g(vc)) / vc, 0.0)
    return block


# -- assembled profile -----------------------------------------------------

@dataclass
class ProfilePiece:
    kind: str  # "acc" | "con" | "dec"
    t0: float
    duration: float
    coeffs: np.ndarray  # degree-5 Bernstein coefficients of v(tau)
    f0: float
    span_index: int
    block_index: int


class FeedrateProfile:
    """Piecewise-quintic feedrate profile on a single global clock.

    Motion halts at breakpoints; the halt is recorded as a zero-duration
    dwell marker between spans rather than a time restart.
    """

    def __init__(self):
        self.pieces = []
        self.dwell_times = []
        self._span_bounds = []

    def append_phase(self, kind, duration, v_a, v_b, span_index, block_index):
        if duration <= 0.0:
            return
        c = np.array([v_a, v_a, v_a, v_b, v_b, v_b]) if kind != "con" else \
            np.full(6, float(v_a))
        self.pieces.append(ProfilePiece(kind, 0.0, duration, c, 0.0,
                                        span_index, block_index))

    def finalize(self):
        t = 0.0
        f = 0.0
        piece_of_span = {}
        for p in self.pieces:
            p.t0 = t
            p.f0 = f
            t += p.duration
            f += p.duration * float(np.mean(p.coeffs))
            piece_of_span.setdefault(p.span_index, [p.t0, t])
            piece_of_span[p.span_index][1] = t
        self.total_time = t
        self.total_displacement = f
        self._span_bounds = [tuple(piece_of_span[k])
                             for k in sorted(piece_of_span)]
        # Zero-duration dwell markers at the halts between spans.
        self.dwell_times = [end for _, end in self._span_bounds[:-1]]
        self._t0 = np.array([p.t0 for p in self.pieces])
        self._dur = np.array([p.duration for p in self.pieces])
        self._f0 = np.array([p.f0 for p in self.pieces])
        self._coeffs = np.stack([p.coeffs for p in self.pieces])
        return self

    # -- evaluation --------------------------------------------------------

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-9) or np.any(t > self.total_time * (1.0 + 1e-12) + 1e-9):
            raise ValueError("time outside [0, total_time]")
        idx = np.searchsorted(self._t0, t, side="right") - 1
        idx = np.clip(idx, 0, len(self.pieces) - 1)
        tau = (t - self._t0[idx]) / self._dur[idx]
        return idx, np.clip(tau, 0.0, 1.0)

    def _decasteljau(self, coeffs, tau):
        beta = coeffs.copy()
        tt = tau[..., None]
        for _ in range(beta.shape[-1] - 1):
            beta = (1.0 - tt) * beta[..., :-1] + tt * beta[..., 1:]
        return beta[..., 0]

    def _eval(self, t, order):
        scalar = np.ndim(t) == 0
        idx, tau = self._locate(np.atleast_1d(np.asarray(t, dtype=float)))
        c = self._coeffs[idx]
        dur = self._dur[idx]
        if order == 0:
            out = self._decasteljau(c, tau)
        elif order == 1:
            out = self._decasteljau(5.0 * np.diff(c, axis=-1), tau) / dur
        elif order == 2:
            out = self._decasteljau(20.0 * np.diff(c, n=2, axis=-1), tau) / dur ** 2
        else:
            raise ValueError("order must be 0, 1 or 2")
        return float(out[0]) if scalar else out

    def v(self, t):
        return self._eval(t, 0)

    def vdot(self, t):
        return self._eval(t, 1)

    def vddot(self, t):
        return self._eval(t, 2)

    def displacement(self, t):
        scalar = np.ndim(t) == 0
        idx, tau = self._locate(np.atleast_1d(np.asarray(t, dtype=float)))
        c = self._coeffs[idx]
        anti = np.concatenate([np.zeros(c.shape[:-1] + (1,)),
                               np.cumsum(c / 6.0, axis=-1)], axis=-1)
        out = self._f0[idx] + self._dur[idx] * self._decasteljau(anti, tau)
        return float(out[0]) if scalar else out

    # -- structure ---------------------------------------------------------

    def joins(self):
        """Times of internal piece boundaries with flanking piece indices."""
        return [(self.pieces[i].t0 + self.pieces[i].duration, i, i + 1)
                for i in range(len(self.pieces) - 1)]

    def span_windows(self):
        """Per-span (t_start, t_end) on the global clock."""
        return list(self._span_bounds)


def assemble_profile(blocks_by_span, limits, mode):
    """Chain solved blocks into one global profile with dwell markers."""
    prof = FeedrateProfile()
    block_counter = 0
    for span_index, blocks in enumerate(blocks_by_span):
        for b in blocks:
            prof.append_phase("acc", b.t_acc, b.v_start, b.v_cap,
                              span_index, block_counter)
            prof.append_phase("con", b.t_con, b.v_cap, b.v_cap,
                              span_index, block_counter)
            prof.append_phase("dec", b.t_dec, b.v_cap, b.v_end,
                              span_index, block_counter)
            block_counter += 1
    return prof.finalize()


# -- orchestration ---------------------------------------------------------

@dataclass
class ScheduleResult:
    mode: object
    kappa_cr: float
    spans: list
    special_points: list
    blocks_by_span: list
    profile: FeedrateProfile
    repaired: bool = False

    @property
    def blocks(self):
        return [b for blocks in self.blocks_by_span for b in blocks]


def schedule_path(path, limits, mode, grid_density=1024):
    """Full scheduling pipeline for one mode.

    Per breakpoint-delimited span: detect special points, build blocks and
    statistics, initialize caps and special-point feedrates, repair for
    compatibility, solve each block's cap and phase times, then chain
    everything into a global C2 profile.
    """
    kappa_cr = critical_curvature(limits, mode)
    spans = path.spans()
    all_points = []
    blocks_by_span = []
    repaired_any = False
    for span in spans:
        points = find_special_points(path, span, limits, mode)
        blocks = build_blocks(path, points, mode, grid_density)
        init_block_caps(blocks, limits, mode)
        init_special_point_feedrates(blocks, limits, mode)
        blocks, repaired = repair_feedrates(blocks, limits, mode)
        for b in blocks:
            solve_block_cap(b, limits, mode)
        all_points.extend(points)
        blocks_by_span.append(blocks)
        repaired_any = repaired_any or repaired
    profile = assemble_profile(blocks_by_span, limits, mode)
    return ScheduleResult(mode, kappa_cr, spans, all_points, blocks_by_span,
                          profile, repaired_any)
