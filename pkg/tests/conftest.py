"""Shared geometry fixtures and kinematic parameter sets.

Paths are built from quadratic preimage coefficients.  Chaining the
preimage (next piece starts from the previous piece's trailing
coefficients, with the middle one mirrored) keeps the hodograph C1 and
therefore the curvature continuous across knots; breaking the chain keeps
only tangent continuity and lets curvature jump.
"""

import numpy as np
import pytest

from feedplan import (ALL_MODES, KinematicLimits, PhQuinticSegment,
                      PhSplinePath, schedule_path)


def chain_segments(start, first_u, first_v, tails):
    """C1-preimage chain; each tail supplies the free trailing (u2, v2)."""
    segs = [PhQuinticSegment(start, first_u, first_v)]
    u, v = list(first_u), list(first_v)
    for (u2, v2) in tails:
        nu = [u[2], 2.0 * u[2] - u[1], u2]
        nv = [v[2], 2.0 * v[2] - v[1], v2]
        segs.append(PhQuinticSegment(segs[-1].end(), nu, nv))
        u, v = nu, nv
    return segs


def make_line():
    # sigma = 100 everywhere, length 100
    return PhSplinePath([PhQuinticSegment([0.0, 0.0],
                                          [10.0, 10.0, 10.0],
                                          [0.0, 0.0, 0.0])])


def make_corner():
    # two straight pieces meeting at a right angle: G0-only junction
    c = 10.0
    d = c / np.sqrt(2.0)
    return PhSplinePath([
        PhQuinticSegment([0.0, 0.0], [c, c, c], [0.0, 0.0, 0.0]),
        PhQuinticSegment([100.0, 0.0], [d, d, d], [d, d, d]),
    ])


def make_wave():
    # 4 curved pieces, curvature continuous, |kappa| up to ~0.33 1/mm
    segs = chain_segments([0.0, 0.0], [4.0, 4.2, 3.9], [0.0, 0.9, -0.6],
                          [(4.1, 0.7), (3.8, -0.8), (4.0, 0.3)])
    return PhSplinePath(segs)


def make_kink():
    # tangent-continuous junction with a curvature jump (-0.16 -> +0.23)
    s1 = PhQuinticSegment([0.0, 0.0], [3.0, 3.3, 3.1], [0.2, 0.8, -0.4])
    s2 = PhQuinticSegment(s1.end(), [3.1, 2.2, 3.4], [-0.4, 1.5, 0.2])
    return PhSplinePath([s1, s2])


def make_twist():
    # short piece with strong curvature variation: |w| up to ~1.1 1/mm^2
    sc = 0.6
    return PhQuinticSegment([0.0, 0.0],
                            [2.2 * sc, 2.0 * sc, 2.4 * sc],
                            [0.1 * sc, 0.7 * sc, -0.3 * sc])


STARFISH = dict(v_max=200.0, a_max=3000.0, j_max=60000.0,
                chord_tol=0.001, sample_dt=0.001)
HAT = dict(v_max=250.0, a_max=800.0, j_max=26400.0,
           chord_tol=0.001, sample_dt=0.002)
BUTTERFLY = dict(v_max=100.0, a_max=1000.0, j_max=50000.0,
                 chord_tol=0.0002, sample_dt=0.0005)


@pytest.fixture(scope="session")
def starfish_limits():
    return KinematicLimits(**STARFISH)


@pytest.fixture(scope="session")
def hat_limits():
    return KinematicLimits(**HAT)


@pytest.fixture(scope="session")
def butterfly_limits():
    return KinematicLimits(**BUTTERFLY)


@pytest.fixture(scope="session")
def line_path():
    return make_line()


@pytest.fixture(scope="session")
def corner_path():
    return make_corner()


@pytest.fixture(scope="session")
def wave_path():
    return make_wave()


@pytest.fixture(scope="session")
def kink_path():
    return make_kink()


@pytest.fixture(scope="session")
def twist_segment():
    return make_twist()


@pytest.fixture(scope="session")
def fixture_paths(line_path, corner_path, wave_path, kink_path):
    return {"line": line_path, "corner": corner_path,
            "wave": wave_path, "kink": kink_path}


@pytest.fixture(scope="session")
def schedules(fixture_paths, starfish_limits):
    """Schedule every fixture under every mode once; reused suite-wide."""
    out = {}
    for name, path in fixture_paths.items():
        for mode in ALL_MODES:
            out[name, mode.name] = schedule_path(path, starfish_limits, mode)
    return out
