"""Reference examples with known closed forms, shared by ``selftest`` and the tests."""

from __future__ import annotations

import math

OSSERMAN_F1 = "0.5*(exp(x)-3*exp(-x))*cos(y/2)"
OSSERMAN_F2 = "-0.5*(exp(x)-3*exp(-x))*sin(y/2)"

Z_SQUARED = ("x^2-y^2", "2*x*y")
CONJ_Z_SQUARED = ("x^2-y^2", "-2*x*y")
IDENTITY = ("x", "y")
NON_MINIMAL = ("x^2", "y^2")

# (h, a, b, offset): h(w) = e^w with a = 0, b = 2 reproduces the Osserman graph
# exactly once the first component is shifted by -1.
OSSERMAN_SEED = ("exp(w)", 0.0, 2.0, (-1.0, 0.0))

# seeds with |a| <= 2, b in [0.5, 3] and h zero-free on [-2, 2]^2
WEIERSTRASS_SEEDS = (
    ("exp(w)", 0.0, 2.0),
    ("exp(w)+2", 1.0, 0.5),
    ("w^2+5", -1.5, 1.5),
    ("exp(w)", -1.2, 0.8),
    ("exp(w)+2", -0.7, 1.0),
)


def osserman_jacobian(x: float) -> float:
    """Closed-form Jacobian of the Osserman graph, depending on x only."""
    return -(math.exp(2 * x) - 9 * math.exp(-2 * x)) / 8
