"""Random radial test profiles on the unit ball."""
import numpy as np

from bgls.radial import Constant, RadialProfile, hermite_bridge, make_u_delta


def step_profile(rng):
    """Constant, smooth monotone bridge, constant: positive and bounded.

    Returns the profile with ``(r1, c1, c2)``: ``f = c1`` on ``[0, r1]`` and
    ``f = c2`` on ``[r2, 1]``, monotone in between.
    """
    r1 = rng.uniform(0.1, 0.6)
    r2 = rng.uniform(r1 + 0.05, 0.95)
    c1, c2 = rng.uniform(0.05, 5.0, 2)
    segs = (Constant(0.0, r1, c1), hermite_bridge(r1, r2, c1, 0.0, c2, 0.0), Constant(r2, 1.0, c2))
    return RadialProfile(segs, label="step"), (r1, c1, c2)


def wiggle_profile(rng):
    """Bridges with random end slopes; may change sign."""
    knots = np.sort(rng.uniform(0.05, 0.95, 2))
    r = [0.0, float(knots[0]), float(knots[1]), 1.0]
    vals = rng.uniform(-3.0, 3.0, 4)
    slopes = rng.uniform(-8.0, 8.0, 4)
    segs = tuple(
        hermite_bridge(r[i], r[i + 1], vals[i], slopes[i], vals[i + 1], slopes[i + 1]) for i in range(3)
    )
    return RadialProfile(segs, label="wiggle")


def singular_profile(rng, d):
    delta = rng.uniform(1.2, 4.0)
    return make_u_delta(delta, d).scaled(rng.uniform(0.1, 10.0)).shifted(rng.uniform(-1.0, 1.0))


def random_profile(rng, d=2):
    kind = rng.integers(3)
    if kind == 0:
        return step_profile(rng)[0]
    if kind == 1:
        return wiggle_profile(rng)
    return singular_profile(rng, d)
