"""Experiment constants used by the CLI defaults and the acceptance suite."""

from fractions import Fraction

# epsilon-net harness: net size = ceil(C * d * (1/eps) * ln(1/eps)).
# d must exceed the degree-1 density of the circle/half-plane triple; the
# prefix trace counts of that triple grow roughly quadratically, so d = 3.
EPSNET_DENSITY_BOUND = 3
# Smallest C in {1, 3/2, 2} giving >= 95% success on the 40-circle
# instances with seeds 0..4 and 200 trials each (calibrated, not derived).
EPSNET_C_CONST = Fraction(3, 2)
EPSNET_EPS = Fraction(1, 4)
EPSNET_CIRCLES = 40
EPSNET_TRIALS = 200

HELLY_K = 2
HELLY_ALPHA = Fraction(1, 2)

DEFAULT_SEED_ENV = "VCDLAB_SEED"
