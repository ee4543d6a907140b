"""Geometry tests: exact arc length, curvature chain, lookup, documents.

Oracles: scipy quad of the explicit-basis hodograph for arc length, and
finite differences of the tangent angle for curvature.  Neither reuses the
closed-form polynomials under test.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from feedplan.phpath import PhQuinticSegment, PhSplinePath

from conftest import make_corner, make_kink, make_line, make_wave


def _basis_eval(coeffs, t):
    n = len(coeffs) - 1
    t = np.asarray(t, dtype=float)
    acc = 0.0
    for i, c in enumerate(coeffs):
        acc = acc + c * math.comb(n, i) * t**i * (1.0 - t) ** (n - i)
    return acc


def _quad_poly_eval(c, t):
    # quadratic Bernstein and its derivative from raw coefficients
    val = _basis_eval(c, t)
    der = _basis_eval([2.0 * (c[1] - c[0]), 2.0 * (c[2] - c[1])], t)
    return val, der


# -- arc length ------------------------------------------------------------


def test_arclength_matches_quadrature(twist_segment):
    seg = twist_segment
    uc = seg.u.coeffs
    vc = seg.v.coeffs

    def speed(t):
        u = _basis_eval(uc, t)
        v = _basis_eval(vc, t)
        dx = u * u - v * v
        dy = 2.0 * u * v
        return math.hypot(dx, dy)

    for xi in [0.2, 0.5, 0.77, 1.0]:
        ref, err = quad(speed, 0.0, xi, epsabs=1e-13, epsrel=1e-13)
        got = seg.arclen.evaluate(xi)
        assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref))


def test_arclength_quadrature_all_fixture_segments(fixture_paths):
    for path in fixture_paths.values():
        for seg in path.segments:
            uc, vc = seg.u.coeffs, seg.v.coeffs

            def speed(t):
                u = _basis_eval(uc, t)
                v = _basis_eval(vc, t)
                return math.hypot(u * u - v * v, 2.0 * u * v)

            ref, _ = quad(speed, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
            assert abs(seg.length - ref) <= 1e-10 * ref


def test_cumulative_lengths_telescope(wave_path):
    lens = [s.length for s in wave_path.segments]
    assert np.allclose(np.diff(wave_path.cumulative_lengths), lens, rtol=1e-15)
    assert wave_path.total_length == wave_path.cumulative_lengths[-1]
    assert wave_path.arc_length(1, 1.0) == pytest.approx(
        wave_path.cumulative_lengths[2], rel=1e-15)


# -- curvature chain -------------------------------------------------------


def test_kappa_matches_tangent_angle_fd(twist_segment):
    # kappa = dtheta/ds with theta the tangent angle; five-point stencil.
    seg = twist_segment
    h = 1e-5
    for xi in np.linspace(0.05, 0.95, 19):
        grid = xi + h * np.array([-2.0, -1.0, 1.0, 2.0])
        th = np.unwrap(np.arctan2(seg.dy.evaluate(grid), seg.dx.evaluate(grid)))
        dtheta = (th[0] - 8.0 * th[1] + 8.0 * th[2] - th[3]) / (12.0 * h)
        ref = dtheta / seg.sigma.evaluate(xi)
        assert seg.kappa(xi) == pytest.approx(ref, rel=1e-7, abs=1e-9)


def test_w_matches_fd_of_kappa(twist_segment):
    # w = dkappa/ds checks the degree-10 numerator against direct FD.
    seg = twist_segment
    h = 1e-5
    for xi in np.linspace(0.05, 0.95, 19):
        grid = xi + h * np.array([-2.0, -1.0, 1.0, 2.0])
        k = seg.kappa(grid)
        dk = (k[0] - 8.0 * k[1] + 8.0 * k[2] - k[3]) / (12.0 * h)
        ref = dk / seg.sigma.evaluate(xi)
        assert seg.w(xi) == pytest.approx(ref, rel=1e-5, abs=1e-8)


def test_curvature_numerator_identity(twist_segment, wave_path):
    # N = x'y'' - y'x'' collapses to 2 (u v' - u' v) sigma for PH curves.
    segs = [twist_segment] + list(wave_path.segments)
    xi = np.linspace(0.0, 1.0, 41)
    for seg in segs:
        uc, vc = seg.u.coeffs, seg.v.coeffs
        u, du = _quad_poly_eval(uc, xi)
        v, dv = _quad_poly_eval(vc, xi)
        ref = 2.0 * (u * dv - du * v) * (u * u + v * v)
        got = seg.curv_num.evaluate(xi)
        assert np.allclose(got, ref, rtol=1e-12, atol=1e-12)


def test_straight_segment_has_zero_kappa(line_path):
    seg = line_path.segments[0]
    xi = np.linspace(0.0, 1.0, 11)
    assert np.all(seg.kappa(xi) == 0.0)
    assert np.all(seg.w(xi) == 0.0)


# -- frames ----------------------------------------------------------------


def test_frame_orthonormal(twist_segment):
    for xi in [0.0, 0.3, 0.71, 1.0]:
        f = twist_segment.frame(0, xi)
        assert np.dot(f.tangent, f.tangent) == pytest.approx(1.0, abs=1e-14)
        assert np.dot(f.tangent, f.normal) == pytest.approx(0.0, abs=1e-14)
        # normal is the tangent rotated by -90 degrees
        assert f.normal[0] == pytest.approx(f.tangent[1], abs=1e-15)
        assert f.normal[1] == pytest.approx(-f.tangent[0], abs=1e-15)


def test_frames_many_matches_scalar(wave_path):
    rng = np.random.default_rng(3)
    ks = rng.integers(0, len(wave_path.segments), size=40)
    xis = rng.uniform(0.0, 1.0, size=40)
    batch = wave_path.frames_many(ks, xis)
    for j in range(40):
        f = wave_path.frame_at(int(ks[j]), xis[j])
        assert np.allclose(batch["position"][j], f.position, atol=1e-14)
        assert np.allclose(batch["tangent"][j], f.tangent, atol=1e-14)
        assert batch["kappa"][j] == pytest.approx(f.kappa, abs=1e-14)
        assert batch["w"][j] == pytest.approx(f.w, abs=1e-12)


def test_frame_index_out_of_range(line_path):
    with pytest.raises(IndexError):
        line_path.frame_at(1, 0.5)


# -- arc length inversion --------------------------------------------------


def test_locate_roundtrip(wave_path):
    rng = np.random.default_rng(11)
    ells = rng.uniform(0.0, wave_path.total_length, size=1000)
    for ell in ells:
        k, xi = wave_path.locate_by_arclength(ell)
        back = wave_path.arc_length(k, xi)
        assert abs(back - ell) <= 1e-11 * wave_path.total_length


def test_locate_endpoints(wave_path):
    k, xi = wave_path.locate_by_arclength(0.0)
    assert (k, xi) == (0, 0.0)
    k, xi = wave_path.locate_by_arclength(wave_path.total_length)
    assert k == len(wave_path.segments) - 1
    assert xi == pytest.approx(1.0, abs=1e-12)


def test_locate_rejects_out_of_range(line_path):
    with pytest.raises(ValueError):
        line_path.locate_by_arclength(-1.0)
    with pytest.raises(ValueError):
        line_path.locate_by_arclength(line_path.total_length * 1.001)


def test_locate_many_matches_scalar(kink_path):
    rng = np.random.default_rng(17)
    ells = np.sort(rng.uniform(0.0, kink_path.total_length, size=200))
    ks, xis = kink_path.locate_many(ells)
    for j in range(ells.size):
        k, xi = kink_path.locate_by_arclength(ells[j])
        assert ks[j] == k
        assert xis[j] == pytest.approx(xi, abs=1e-10)


# -- structure and validation ----------------------------------------------


def test_collinear_junction_is_not_a_breakpoint():
    a = PhQuinticSegment([0.0, 0.0], [2.0, 2.0, 2.0], [1.0, 1.0, 1.0])
    b = PhQuinticSegment(a.end(), [2.0, 2.0, 2.0], [1.0, 1.0, 1.0])
    path = PhSplinePath([a, b])
    assert path.breakpoint_indices == [0, 2]
    assert path.spans() == [(0, 2)]


def test_corner_junction_detected(corner_path):
    assert corner_path.breakpoint_indices == [0, 1, 2]
    assert corner_path.spans() == [(0, 1), (1, 2)]


def test_declared_corner_splits_smooth_junction():
    smooth = make_wave()
    assert smooth.breakpoint_indices == [0, len(smooth.segments)]
    forced = PhSplinePath(smooth.segments, corners=(2,))
    assert forced.breakpoint_indices == [0, 2, len(smooth.segments)]


def test_corner_index_validation(corner_path):
    segs = corner_path.segments
    with pytest.raises(ValueError):
        PhSplinePath(segs, corners=(0,))
    with pytest.raises(ValueError):
        PhSplinePath(segs, corners=(2,))


def test_discontinuous_path_rejected():
    a = PhQuinticSegment([0.0, 0.0], [2.0, 2.0, 2.0], [0.0, 0.0, 0.0])
    b = PhQuinticSegment([100.0, 0.0], [2.0, 2.0, 2.0], [0.0, 0.0, 0.0])
    with pytest.raises(ValueError, match="discontinuous"):
        PhSplinePath([a, b])


def test_irregular_segment_rejected():
    with pytest.raises(ValueError, match="irregular"):
        PhQuinticSegment([0.0, 0.0], [1.0, 0.0, -1.0], [1.0, 0.0, -1.0])
    with pytest.raises(ValueError, match="irregular"):
        PhQuinticSegment([0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])


def test_empty_path_rejected():
    with pytest.raises(ValueError):
        PhSplinePath([])


# -- documents -------------------------------------------------------------


def _doc_from_path(path):
    return {
        "segments": [
            {"start": list(map(float, s.start)),
             "u": list(map(float, s.u.coeffs)),
             "v": list(map(float, s.v.coeffs))}
            for s in path.segments
        ],
    }


def test_document_roundtrip(wave_path):
    doc = _doc_from_path(wave_path)
    rebuilt = PhSplinePath.from_document(doc)
    assert rebuilt.total_length == pytest.approx(wave_path.total_length,
                                                rel=1e-15)
    assert rebuilt.breakpoint_indices == wave_path.breakpoint_indices
    xi = np.linspace(0.0, 1.0, 7)
    for s0, s1 in zip(wave_path.segments, rebuilt.segments):
        assert np.allclose(s0.position(xi), s1.position(xi), atol=1e-15)


def test_document_with_corners_and_angle_tol():
    doc = _doc_from_path(make_wave())
    doc["corners"] = [1]
    doc["angle_tol_rad"] = 1e-3
    path = PhSplinePath.from_document(doc)
    assert 1 in path.breakpoint_indices
    assert path.angle_tol == 1e-3


def test_document_rejects_unknown_field(line_path):
    doc = _doc_from_path(line_path)
    doc["units"] = "mm"
    with pytest.raises(ValueError, match="unknown path fields"):
        PhSplinePath.from_document(doc)


def test_document_rejects_malformed(line_path):
    with pytest.raises(ValueError):
        PhSplinePath.from_document({"segments": []})
    with pytest.raises(ValueError):
        PhSplinePath.from_document({"segments": "nope"})
    with pytest.raises(ValueError):
        PhSplinePath.from_document({})
    with pytest.raises(ValueError):
        PhSplinePath.from_document(
            {"segments": [{"start": [0, 0], "u": [1, 1], "v": [0, 0, 0]}]})
    with pytest.raises(ValueError):
        PhSplinePath.from_document(
            {"segments": [{"start": [0, 0], "u": [1, "x", 1],
                           "v": [0, 0, 0]}]})
