import math

RESCALE_AT = 1e200
RESCALE_BY = 1e-200
# below this the two-term power series is exact to double precision and
# the backward recurrence would overflow
SMALL_X = 1e-6

REGIME_ORIGINAL = 0
REGIME_DEEP = 1
REGIME_CARRIER = 2

POLICY_DISCARD = 0
POLICY_RANDOM_BIT = 1


def miller_start(nmax, xmax):
    """Even starting order for the backward recurrence."""
    top = max(nmax, int(math.ceil(xmax)))
    start = top + 20 + int(math.sqrt(160.0 * (top + 1)))
    return start + (start & 1)
