"""Bernstein-basis polynomials on [0, 1] with exact coefficient arithmetic.

Curve geometry, arc length and feedrate profiles downstream are all built
from products, derivatives and antiderivatives of low-degree polynomials.
Keeping every polynomial in the Bernstein basis gives numerically stable
evaluation (de Casteljau), exact closed-form calculus on the coefficients,
and the convex-hull property used for root isolation.
"""

import math

import numpy as np

# Products of the curve machinery top out at degree 20 (w numerator over
# sigma^5); anything past this cap indicates a usage bug, not a real need.
MAX_DEGREE = 24


class BernsteinPoly:
    """A polynomial of fixed degree in the Bernstein basis on [0, 1]."""

    __slots__ = ("coeffs", "degree")

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-D sequence")
        if c.size - 1 > MAX_DEGREE:
            raise ValueError(
                "degree %d exceeds cap %d" % (c.size - 1, MAX_DEGREE))
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        self.coeffs = c.copy()
        self.degree = c.size - 1

    def __repr__(self):
        return "BernsteinPoly(%s)" % np.array2string(self.coeffs, precision=6)

    def evaluate(self, tau):
        """Evaluate by de Casteljau recursion.

        Args:
            tau: scalar or ndarray of parameters in [0, 1].

        Returns:
            float for scalar input, ndarray otherwise.
        """
        t = np.asarray(tau, dtype=float)
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise ValueError("parameter outside [0, 1]")
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        beta = np.broadcast_to(self.coeffs, t.shape + (self.degree + 1,))
        beta = np.array(beta)
        tt = t[..., None]
        for _ in range(self.degree):
            beta = (1.0 - tt) * beta[..., :-1] + tt * beta[..., 1:]
        out = beta[..., 0]
        return float(out[0]) if scalar else out

    __call__ = evaluate

    def derivative(self):
        """Derivative, degree n-1 (degree-0 input gives the zero polynomial)."""
        n = self.degree
        if n == 0:
            return BernsteinPoly([0.0])
        return BernsteinPoly(n * np.diff(self.coeffs))

    def antiderivative(self):
        """Antiderivative Q with Q(0) = 0, degree n+1.

        The integral over [0, 1] equals the coefficient mean, so the last
        coefficient of Q is exactly that mean.
        """
        n = self.degree
        q = np.empty(n + 2)
        q[0] = 0.0
        np.cumsum(self.coeffs / (n + 1.0), out=q[1:])
        return BernsteinPoly(q)

    def elevated(self, to_degree):
        """Degree-elevated copy of the same polynomial."""
        if to_degree < self.degree:
            raise ValueError("cannot lower degree")
        c = self.coeffs
        for n in range(self.degree, to_degree):
            k = np.arange(n + 2) / (n + 1.0)
            c = np.concatenate(([c[0]], k[1:-1] * c[:-1] + (1.0 - k[1:-1]) * c[1:],
                                [c[-1]]))
        return BernsteinPoly(c)

    def __add__(self, other):
        if np.isscalar(other):
            return BernsteinPoly(self.coeffs + float(other))
        n = max(self.degree, other.degree)
        return BernsteinPoly(self.elevated(n).coeffs + other.elevated(n).coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (other * -1.0 if isinstance(other, BernsteinPoly)
                       else -other)

    def __mul__(self, other):
        if np.isscalar(other):
            return BernsteinPoly(self.coeffs * float(other))
        m, n = self.degree, other.degree
        a, b = self.coeffs, other.coeffs
        # Exact product: c_k = sum C(m,i) C(n,j) a_i b_j / C(m+n,k), i+j=k.
        c = np.zeros(m + n + 1)
        cm = [math.comb(m, i) for i in range(m + 1)]
        cn = [math.comb(n, j) for j in range(n + 1)]
        for i in range(m + 1):
            c[i:i + n + 1] += (cm[i] * a[i]) * (np.asarray(cn, dtype=float) * b)
        c /= [math.comb(m + n, k) for k in range(m + n + 1)]
        return BernsteinPoly(c)

    __rmul__ = __mul__


def _split(coeffs, t):
    """De Casteljau subdivision of a coefficient array at local parameter t."""
    n1 = coeffs.size
    left = np.empty(n1)
    right = np.empty(n1)
    beta = coeffs.copy()
    left[0] = beta[0]
    right[n1 - 1] = beta[n1 - 1]
    for k in range(1, n1):
        beta = (1.0 - t) * beta[:-1] + t * beta[1:]
        left[k] = beta[0]
        right[n1 - 1 - k] = beta[-1]
    return left, right


def _sign_changes(coeffs):
    s = np.sign(coeffs[coeffs != 0.0])
    if s.size < 2:
        return 0
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _bisect_root(poly, a, b, tol):
    """Plain bisection on the original polynomial; [a, b] must bracket."""
    fa = poly.evaluate(a)
    if fa == 0.0:
        return a
    fb = poly.evaluate(b)
    if fb == 0.0:
        return b
    for _ in range(200):
        if b - a <= tol:
            break
        m = 0.5 * (a + b)
        fm = poly.evaluate(m)
        if fm == 0.0:
            return m
        if (fa < 0.0) == (fm < 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return 0.5 * (a + b)


def find_roots(poly, lo=0.0, hi=1.0, tol=1e-12):
    """All real roots of poly inside [lo, hi], each reported once.

    Recursive subdivision discards subintervals whose coefficient hull
    excludes zero (convex-hull property).  A subinterval whose coefficient
    sequence changes sign exactly once holds exactly one simple root
    (variation diminishing) and is polished by bisection on the original
    polynomial; touching roots are pinned down by subdividing to width tol.

    Args:
        poly: BernsteinPoly.
        lo, hi: sub-range of [0, 1] to search.
        tol: absolute tolerance on the root location.

    Returns:
        Sorted ndarray of roots.
    """
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError("bad search interval")
    if np.all(poly.coeffs == 0.0):
        raise ValueError("degenerate root set: polynomial is identically zero")

    coeffs = poly.coeffs
    if lo > 0.0:
        coeffs = _split(coeffs, lo)[1]
    if hi < 1.0:
        coeffs = _split(coeffs, (hi - lo) / (1.0 - lo))[0]

    # Repeated subdivision leaves coefficient noise of the original scale;
    # near a touching root the true values sink below it, so a strict hull
    # test would discard the interval.  Anything within eta of zero is
    # treated as possibly zero, and a graze is accepted once the interval
    # is narrower than its conditioning warrants.
    eta = 1e-14 * float(np.max(np.abs(poly.coeffs)))
    graze_tol = max(tol, 1e-8)

    roots = []
    stack = [(lo, hi, coeffs)]
    steps = 0
    while stack:
        steps += 1
        if steps > 100000:
            raise ValueError("root isolation failed to converge")
        a, b, c = stack.pop()
        if np.all(c > eta) or np.all(c < -eta):
            continue
        if b - a <= graze_tol:
            roots.append(0.5 * (a + b))
            continue
        if _sign_changes(c) == 1:
            fa = poly.evaluate(a)
            fb = poly.evaluate(b)
            if fa == 0.0:
                roots.append(a)
            if fb == 0.0:
                roots.append(b)
            if fa != 0.0 and fb != 0.0 and (fa < 0.0) != (fb < 0.0):
                roots.append(_bisect_root(poly, a, b, tol))
                continue
            # A zero or rounded endpoint hides the crossing; subdivide.
        cl, cr = _split(c, 0.5)
        m = 0.5 * (a + b)
        stack.append((m, b, cr))
        stack.append((a, m, cl))

    if not roots:
        return np.empty(0)
    roots = np.sort(np.asarray(roots))
    # Touching roots leave a cluster of accepted subintervals; merge any
    # run closer than the graze resolution and keep the member with the
    # smallest residual (an exact endpoint zero beats its neighbours).
    gap = max(1e-9, 4.0 * graze_tol)
    merged = []
    cluster = [roots[0]]
    for r in roots[1:]:
        if r - cluster[-1] > gap:
            merged.append(cluster)
            cluster = [r]
        else:
            cluster.append(r)
    merged.append(cluster)
    out = []
    for cluster in merged:
        vals = np.abs(poly.evaluate(np.asarray(cluster)))
        out.append(cluster[int(np.argmin(vals))])
    return np.asarray(out)
