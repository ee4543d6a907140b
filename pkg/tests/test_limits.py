"""Limit-set arithmetic, modes, and the curvature-dependent feedrate caps."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from feedplan.limits import (ALL_MODES, UNBOUNDED, KinematicLimits,
                             SchedulerMode, chord_error, chord_velocity_bound,
                             critical_curvature, jerk_centripetal_root,
                             velocity_bound)

R0 = SchedulerMode("relaxed", 0)
R1 = SchedulerMode("relaxed", 1)
R2 = SchedulerMode("relaxed", 2)


# -- limit sets ------------------------------------------------------------


def test_split_budgets_recover_cartesian_limits(starfish_limits):
    lim = starfish_limits
    assert math.hypot(lim.a_tan, lim.a_cen) == pytest.approx(lim.a_max,
                                                             rel=1e-15)
    assert lim.j_tan1 + lim.j_tan2 == pytest.approx(lim.p_j * lim.j_max,
                                                    rel=1e-15)
    assert math.hypot(lim.j_tan1 + lim.j_tan2, lim.j_cen) == pytest.approx(
        lim.j_max, rel=1e-15)


def test_default_split_ratios(hat_limits):
    s = 1.0 / math.sqrt(2.0)
    assert hat_limits.p_a == s
    assert hat_limits.p_j == s
    assert hat_limits.q_j == 0.5
    assert hat_limits.a_tan == pytest.approx(hat_limits.a_max * s, rel=1e-15)
    assert hat_limits.j_tan1 == pytest.approx(hat_limits.j_tan2, rel=1e-15)


def test_limits_validation():
    with pytest.raises(ValueError, match="v_max"):
        KinematicLimits(0.0, 1.0, 1.0, 1e-3, 1e-3)
    with pytest.raises(ValueError, match="chord_tol"):
        KinematicLimits(1.0, 1.0, 1.0, -1e-3, 1e-3)
    with pytest.raises(ValueError, match="p_a"):
        KinematicLimits(1.0, 1.0, 1.0, 1e-3, 1e-3, p_a=1.0)
    with pytest.raises(ValueError, match="q_j"):
        KinematicLimits(1.0, 1.0, 1.0, 1e-3, 1e-3, q_j=0.0)


def test_limits_document_roundtrip():
    doc = {"v_max": 200.0, "a_max": 3000.0, "j_max": 60000.0,
           "chord_tol": 1e-3, "sample_dt": 1e-3, "q_j": 0.4}
    lim = KinematicLimits.from_document(doc)
    assert lim.v_max == 200.0
    assert lim.q_j == 0.4
    assert lim.p_a == 1.0 / math.sqrt(2.0)


def test_limits_document_validation():
    base = {"v_max": 1.0, "a_max": 1.0, "j_max": 1.0,
            "chord_tol": 1e-3, "sample_dt": 1e-3}
    with pytest.raises(ValueError, match="missing"):
        KinematicLimits.from_document({k: v for k, v in base.items()
                                       if k != "j_max"})
    with pytest.raises(ValueError, match="unknown"):
        KinematicLimits.from_document(dict(base, units="mm"))
    with pytest.raises(ValueError, match="must be a number"):
        KinematicLimits.from_document(dict(base, v_max="fast"))
    with pytest.raises(ValueError, match="must be a number"):
        KinematicLimits.from_document(dict(base, v_max=True))
    with pytest.raises(ValueError):
        KinematicLimits.from_document(["not", "a", "dict"])


# -- modes -----------------------------------------------------------------


def test_mode_parse_roundtrip():
    for mode in ALL_MODES:
        assert SchedulerMode.parse(mode.name) == mode
    assert SchedulerMode.parse("s1").name == "S1"
    assert SchedulerMode.parse("R2").strict is False
    assert SchedulerMode.parse("S0").strict is True


def test_mode_validation():
    with pytest.raises(ValueError):
        SchedulerMode.parse("X1")
    with pytest.raises(ValueError):
        SchedulerMode.parse("R3")
    with pytest.raises(ValueError):
        SchedulerMode("relaxed", 5)
    with pytest.raises(ValueError):
        SchedulerMode("loose", 1)


# -- chord bound -----------------------------------------------------------


def test_chord_bound_inverts_chord_error(starfish_limits):
    lim = starfish_limits
    for k in [1e-3, 1e-2, 0.42, 7.0, 900.0]:
        v = chord_velocity_bound(lim, k)
        assert v < UNBOUNDED
        assert chord_error(lim, k, v) == pytest.approx(lim.chord_tol,
                                                       rel=1e-10)
        assert chord_velocity_bound(lim, -k) == v


def test_chord_bound_sentinels(starfish_limits):
    lim = starfish_limits
    assert chord_velocity_bound(lim, 0.0) == UNBOUNDED
    # radius at or below the tolerance: no feedrate violates it
    assert chord_velocity_bound(lim, 1.0 / lim.chord_tol) == UNBOUNDED
    assert chord_velocity_bound(lim, 2.0 / lim.chord_tol) == UNBOUNDED


def test_chord_error_degenerate(starfish_limits):
    lim = starfish_limits
    assert chord_error(lim, 0.0, 123.0) == 0.0
    with pytest.raises(ValueError, match="chord undefined"):
        chord_error(lim, 30.0, 100.0)


# -- centripetal jerk root -------------------------------------------------


def test_jerk_root_residual_random(starfish_limits):
    lim = starfish_limits
    rng = np.random.default_rng(23)
    for _ in range(200):
        k = 10.0 ** rng.uniform(-4.0, 1.0)
        w = 10.0 ** rng.uniform(-4.0, 2.0)
        v = jerk_centripetal_root(lim, k, w)
        resid = w * v ** 3 + 3.0 * k * lim.a_tan * v - lim.j_cen
        assert abs(resid) <= 1e-9 * lim.j_cen


def test_jerk_root_matches_brentq(hat_limits):
    lim = hat_limits
    for k, w in [(1e-3, 1e-2), (0.5, 0.5), (2.0, 40.0), (1e-4, 1e-4)]:
        f = lambda v: w * v ** 3 + 3.0 * k * lim.a_tan * v - lim.j_cen
        ref = brentq(f, 0.0, 1e9, xtol=1e-13, rtol=1e-14)
        assert jerk_centripetal_root(lim, k, w) == pytest.approx(ref,
                                                                 rel=1e-11)


def test_jerk_root_degenerate(starfish_limits):
    lim = starfish_limits
    assert jerk_centripetal_root(lim, 0.0, 0.0) == UNBOUNDED
    # w = 0 leaves the linear term only
    k = 0.7
    assert jerk_centripetal_root(lim, k, 0.0) == pytest.approx(
        lim.j_cen / (3.0 * k * lim.a_tan), rel=1e-15)
    # k = 0 leaves the cubic term only
    w = 3.1
    assert jerk_centripetal_root(lim, 0.0, w) == pytest.approx(
        (lim.j_cen / w) ** (1.0 / 3.0), rel=1e-12)


def test_jerk_root_monotone(starfish_limits):
    lim = starfish_limits
    roots_w = [jerk_centripetal_root(lim, 0.1, w)
               for w in [1e-3, 1e-2, 1e-1, 1.0, 10.0]]
    assert all(a > b for a, b in zip(roots_w, roots_w[1:]))
    roots_k = [jerk_centripetal_root(lim, k, 0.5)
               for k in [1e-3, 1e-2, 1e-1, 1.0]]
    assert all(a > b for a, b in zip(roots_k, roots_k[1:]))


# -- combined velocity bound -----------------------------------------------


def test_velocity_bound_straight_is_vmax(starfish_limits):
    for mode in ALL_MODES:
        assert velocity_bound(starfish_limits, mode, 0.0, 0.0) == \
            starfish_limits.v_max


def test_velocity_bound_level_monotone(starfish_limits):
    lim = starfish_limits
    for k in [1e-3, 0.05, 0.3, 2.0]:
        b0 = velocity_bound(lim, R0, k)
        b1 = velocity_bound(lim, R1, k)
        b2 = velocity_bound(lim, R2, k, w=0.4)
        assert lim.v_max >= b0 >= b1 >= b2 > 0.0


def test_velocity_bound_matches_component_minimum(starfish_limits):
    lim = starfish_limits
    k, w = 0.08, 0.9
    expect0 = min(chord_velocity_bound(lim, k), math.sqrt(lim.a_cen / k),
                  lim.v_max)
    assert velocity_bound(lim, R0, k) == pytest.approx(expect0, rel=1e-15)
    expect2 = min(expect0, (lim.j_tan2 / k ** 2) ** (1.0 / 3.0),
                  jerk_centripetal_root(lim, k, w))
    assert velocity_bound(lim, R2, k, w) == pytest.approx(expect2, rel=1e-15)


# -- critical curvature ----------------------------------------------------


def test_critical_curvature_starfish_anchor(starfish_limits):
    # chord term 0.19998, centripetal acceleration term 5.3033e-2
    assert critical_curvature(starfish_limits, R0) == pytest.approx(
        5.3033e-2, rel=1e-4)
    assert critical_curvature(starfish_limits, R1) == pytest.approx(
        5.1494e-2, rel=1e-4)


def test_critical_curvature_hand_formula(hat_limits):
    lim = hat_limits
    d, vm, dt = lim.chord_tol, lim.v_max, lim.sample_dt
    terms0 = [8.0 * d / (vm * vm * dt * dt + 4.0 * d * d),
              lim.a_cen / (vm * vm)]
    assert critical_curvature(lim, R0) == pytest.approx(min(terms0),
                                                        rel=1e-15)
    terms1 = terms0 + [math.sqrt(lim.j_tan2 / vm ** 3)]
    assert critical_curvature(lim, R1) == pytest.approx(min(terms1),
                                                        rel=1e-15)
    assert critical_curvature(lim, R2) == critical_curvature(lim, R1)


def test_critical_curvature_separates_vmax(starfish_limits):
    # Just below the threshold the full feedrate survives; just above it
    # the bound drops.  Levels 0 and 1 are exact inverses; at level 2 the
    # w-dependent root can bite earlier, so only the upper side is sharp.
    lim = starfish_limits
    for mode in (R0, R1):
        kc = critical_curvature(lim, mode)
        assert velocity_bound(lim, mode, kc * (1.0 - 1e-6)) == lim.v_max
        assert velocity_bound(lim, mode, kc * (1.0 + 1e-6)) < lim.v_max
    kc2 = critical_curvature(lim, R2)
    assert velocity_bound(lim, R2, kc2 * (1.0 + 1e-6), w=0.0) < lim.v_max
