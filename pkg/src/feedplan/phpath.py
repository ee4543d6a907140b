"""Planar Pythagorean-hodograph quintic spline paths.

Each spline piece is defined by two quadratic preimage polynomials u, v.
The hodograph components x' = u^2 - v^2 and y' = 2 u v then satisfy
x'^2 + y'^2 = (u^2 + v^2)^2 identically, so the parametric speed
sigma = u^2 + v^2 is itself a polynomial and arc length integrates in
closed form.  Everything downstream (curvature, its arc-length derivative,
block statistics, the interpolator) leans on that exactness.

Derived polynomials per piece, with N the curvature numerator:

    sigma = u^2 + v^2                      (degree 4)
    s(xi) = antiderivative of sigma        (degree 5, exact arc length)
    N = x' y'' - y' x''                    (degree 7), kappa = N / sigma^3
    A = N' sigma - 3 N sigma'              (degree 10)
    kappa' = A / sigma^4,   w = dkappa/ds = A / sigma^5
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .bernstein import BernsteinPoly, find_roots

#: Junction gap above which a path document is rejected as discontinuous (mm).
POSITION_TOL = 1e-9

#: Default tangent-direction jump that marks a corner breakpoint (rad).
DEFAULT_ANGLE_TOL = 1e-6


@dataclass
class FrameSample:
    """Pointwise geometry of one path location (one-sided at knots)."""

    segment_index: int
    xi: float
    position: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    sigma: float
    kappa: float
    w: float


class PhQuinticSegment:
    """One PH quintic piece built from quadratic preimage polynomials."""

    def __init__(self, start, u_coeffs, v_coeffs):
        self.start = np.asarray(start, dtype=float)
        if self.start.shape != (2,):
            raise ValueError("segment start must be a 2-vector")
        self.u = BernsteinPoly(u_coeffs)
        self.v = BernsteinPoly(v_coeffs)
        if self.u.degree != 2 or self.v.degree != 2:
            raise ValueError("preimage polynomials must be quadratic")

        u, v = self.u, self.v
        self.dx = u * u - v * v
        self.dy = 2.0 * (u * v)
        self.sigma = u * u + v * v
        self._check_regular()

        self.arclen = self.sigma.antiderivative()
        self.length = self.arclen.coeffs[-1]
        self.x_rel = self.dx.antiderivative()
        self.y_rel = self.dy.antiderivative()
        self.ddx = self.dx.derivative()
        self.ddy = self.dy.derivative()
        # Curvature numerator and the numerator of its xi-derivative.
        self.curv_num = self.dx * self.ddy - self.dy * self.ddx
        sig_d = self.sigma.derivative()
        self.curv_deriv_num = (self.curv_num.derivative() * self.sigma
                               - 3.0 * (self.curv_num * sig_d))

    def _check_regular(self):
        c = self.sigma.coeffs
        if np.all(c == 0.0):
            raise ValueError("irregular segment: vanishing hodograph")
        if self.sigma.evaluate(0.5) <= 0.0 or find_roots(self.sigma).size:
            raise ValueError("irregular segment: parametric speed vanishes")

    # -- vectorized pointwise geometry -------------------------------------

    def position(self, xi):
        x = self.start[0] + self.x_rel.evaluate(xi)
        y = self.start[1] + self.y_rel.evaluate(xi)
        return np.stack(np.broadcast_arrays(x, y), axis=-1)

    def end(self):
        return self.position(1.0)

    def tangent(self, xi):
        s = self.sigma.evaluate(xi)
        return np.stack(np.broadcast_arrays(self.dx.evaluate(xi) / s,
                                            self.dy.evaluate(xi) / s), axis=-1)

    def kappa(self, xi):
        return self.curv_num.evaluate(xi) / self.sigma.evaluate(xi) ** 3

    def w(self, xi):
        # dkappa/ds; jumps at knots are expected (preimages are only C1).
        return self.curv_deriv_num.evaluate(xi) / self.sigma.evaluate(xi) ** 5

    def frame(self, segment_index, xi):
        sig = self.sigma.evaluate(xi)
        tan = np.array([self.dx.evaluate(xi) / sig, self.dy.evaluate(xi) / sig])
        # Normal is the tangent rotated by -90 degrees (t cross z).
        nor = np.array([tan[1], -tan[0]])
        return FrameSample(segment_index, float(xi), self.position(xi), tan,
                           nor, float(sig), float(self.kappa(xi)),
                           float(self.w(xi)))


class PhSplinePath:
    """A chain of PH quintic pieces with breakpoint bookkeeping.

    Breakpoints split the chain into spans that the scheduler treats
    independently, with the feedrate forced to zero at both ends: the path
    endpoints, any junction whose tangent direction jumps by more than
    angle_tol, and any junction listed explicitly as a corner.
    """

    def __init__(self, segments, corners=(), angle_tol=DEFAULT_ANGLE_TOL):
        if not segments:
            raise ValueError("path needs at least one segment")
        self.segments = list(segments)
        n = len(self.segments)

        for i in range(n - 1):
            gap = self.segments[i].end() - self.segments[i + 1].start
            if math.hypot(gap[0], gap[1]) > POSITION_TOL:
                raise ValueError(
                    "discontinuous path: junction %d gap %.3e mm"
                    % (i + 1, math.hypot(gap[0], gap[1])))

        self.cumulative_lengths = np.concatenate(
            ([0.0], np.cumsum([s.length for s in self.segments])))
        self.total_length = float(self.cumulative_lengths[-1])

        corners = set(int(c) for c in corners)
        if any(c < 1 or c > n - 1 for c in corners):
            raise ValueError("corner indices must name interior junctions")
        breakpoints = {0, n} | corners
        for i in range(n - 1):
            t0 = self.segments[i].tangent(1.0)
            t1 = self.segments[i + 1].tangent(0.0)
            dot = float(np.clip(np.dot(t0, t1), -1.0, 1.0))
            if math.acos(dot) > angle_tol:
                breakpoints.add(i + 1)
        self.breakpoint_indices = sorted(breakpoints)
        self.angle_tol = angle_tol

    # -- construction ------------------------------------------------------

    @classmethod
    def from_document(cls, doc):
        """Build a path from a parsed JSON document.

        Expected shape: {"segments": [{"start": [x, y], "u": [u0, u1, u2],
        "v": [v0, v1, v2]}, ...], "corners": [...], "angle_tol_rad": ...}.
        The PH identity x'^2 + y'^2 = sigma^2 is re-checked on the built
        coefficients as a guard against a corrupted document.
        """
        if not isinstance(doc, dict) or "segments" not in doc:
            raise ValueError("path document must contain a 'segments' array")
        raw = doc["segments"]
        if not isinstance(raw, list) or not raw:
            raise ValueError("'segments' must be a non-empty array")
        segments = []
        for i, entry in enumerate(raw):
            if not isinstance(entry, dict):
                raise ValueError("segment %d is not an object" % i)
            try:
                start = [float(x) for x in entry["start"]]
                u = [float(x) for x in entry["u"]]
                v = [float(x) for x in entry["v"]]
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError("segment %d is malformed: %s" % (i, exc))
            if len(start) != 2 or len(u) != 3 or len(v) != 3:
                raise ValueError("segment %d has wrong-sized fields" % i)
            seg = PhQuinticSegment(start, u, v)
            hod_sq = seg.dx * seg.dx + seg.dy * seg.dy
            sig_sq = seg.sigma * seg.sigma
            scale = float(np.max(np.abs(sig_sq.coeffs)))
            if np.max(np.abs(hod_sq.coeffs - sig_sq.coeffs)) > 1e-12 * scale:
                raise ValueError("segment %d violates the PH identity" % i)
            segments.append(seg)
        corners = doc.get("corners", [])
        if not isinstance(corners, list):
            raise ValueError("'corners' must be an array of junction indices")
        angle_tol = float(doc.get("angle_tol_rad", DEFAULT_ANGLE_TOL))
        unknown = set(doc) - {"segments", "corners", "angle_tol_rad"}
        if unknown:
            raise ValueError("unknown path fields %s" % ", ".join(sorted(unknown)))
        return cls(segments, corners, angle_tol)

    @classmethod
    def from_file(cls, filename):
        with open(filename, "r", encoding="utf-8") as fh:
            return cls.from_document(json.load(fh))

    # -- arc length and lookup ---------------------------------------------

    def arc_length(self, segment_index, xi):
        """Cumulative arc length from the path start to (segment, xi)."""
        if not 0 <= segment_index < len(self.segments):
            raise IndexError("segment index out of range")
        return float(self.cumulative_lengths[segment_index]
                     + self.segments[segment_index].arclen.evaluate(xi))

    def locate_by_arclength(self, ell, tol_factor=1e-12):
        """Invert arc length to (segment_index, xi).

        Newton iteration on the piece's quintic arc length with bisection
        safeguards; converges to |s(xi) - ell_local| <= tol_factor * total
        path length.
        """
        if not 0.0 <= ell <= self.total_length * (1.0 + 1e-12):
            raise ValueError("arc length outside [0, total_length]")
        ell = min(ell, self.total_length)
        k = int(np.searchsorted(self.cumulative_lengths, ell, side="right") - 1)
        k = min(max(k, 0), len(self.segments) - 1)
        seg = self.segments[k]
        local = ell - self.cumulative_lengths[k]
        tol = tol_factor * self.total_length
        xi = min(max(local / seg.length, 0.0), 1.0)
        lo, hi = 0.0, 1.0
        for _ in range(100):
            resid = seg.arclen.evaluate(xi) - local
            if abs(resid) <= tol:
                break
            if resid > 0.0:
                hi = xi
            else:
                lo = xi
            step = xi - resid / seg.sigma.evaluate(xi)
            xi = step if lo < step < hi else 0.5 * (lo + hi)
        return k, float(xi)

    def locate_many(self, ells, tol_factor=1e-13):
        """Vectorized arc-length inversion for monotone sample batches."""
        ells = np.clip(np.asarray(ells, dtype=float), 0.0, self.total_length)
        ks = np.searchsorted(self.cumulative_lengths, ells, side="right") - 1
        ks = np.clip(ks, 0, len(self.segments) - 1)
        xis = np.empty_like(ells)
        tol = tol_factor * self.total_length
        for k in np.unique(ks):
            seg = self.segments[k]
            sel = ks == k
            local = ells[sel] - self.cumulative_lengths[k]
            xi = np.clip(local / seg.length, 0.0, 1.0)
            for _ in range(60):
                resid = seg.arclen.evaluate(xi) - local
                if np.max(np.abs(resid)) <= tol:
                    break
                xi = np.clip(xi - resid / seg.sigma.evaluate(xi), 0.0, 1.0)
            else:
                for j in np.flatnonzero(np.abs(seg.arclen.evaluate(xi) - local)
                                        > tol):
                    _, xi[j] = self.locate_by_arclength(
                        self.cumulative_lengths[k] + local[j], tol_factor)
            xis[sel] = xi
        return ks, xis

    # -- frames ------------------------------------------------------------

    def frame_at(self, segment_index, xi):
        """One-sided frame: (k, 1.0) and (k+1, 0.0) answer for their own side."""
        if not 0 <= segment_index < len(self.segments):
            raise IndexError("segment index out of range")
        return self.segments[segment_index].frame(segment_index, xi)

    def frames_many(self, segment_indices, xis):
        """Batched frames; returns dict of arrays keyed by field."""
        ks = np.asarray(segment_indices)
        xis = np.asarray(xis, dtype=float)
        out = {"position": np.empty(xis.shape + (2,)),
               "tangent": np.empty(xis.shape + (2,)),
               "normal": np.empty(xis.shape + (2,)),
               "sigma": np.empty_like(xis),
               "kappa": np.empty_like(xis),
               "w": np.empty_like(xis)}
        for k in np.unique(ks):
            seg = self.segments[k]
            sel = ks == k
            xi = xis[sel]
            sig = seg.sigma.evaluate(xi)
            tx = seg.dx.evaluate(xi) / sig
            ty = seg.dy.evaluate(xi) / sig
            out["position"][sel] = seg.position(xi)
            out["tangent"][sel] = np.stack([tx, ty], axis=-1)
            out["normal"][sel] = np.stack([ty, -tx], axis=-1)
            out["sigma"][sel] = sig
            out["kappa"][sel] = seg.curv_num.evaluate(xi) / sig ** 3
            out["w"][sel] = seg.curv_deriv_num.evaluate(xi) / sig ** 5
        return out

    # -- structure ---------------------------------------------------------

    def spans(self):
        """Breakpoint-delimited piece ranges [(first, last+1), ...]."""
        b = self.breakpoint_indices
        return [(b[i], b[i + 1]) for i in range(len(b) - 1)]
