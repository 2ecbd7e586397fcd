"""Independent high-precision oracles used to freeze expected test values.

The Bessel oracle is the ascending series summed in mpmath arbitrary
precision -- deliberately a different code path from the package, which
sums the same series in float64 below |x| = 10 and switches to the
Hankel expansion above.
"""

import mpmath as mp

mp.mp.dps = 30


def j1_series(x) -> mp.mpf:
    """Ascending series sum_k (-1)^k (x/2)^(2k+1) / (k! (k+1)!)."""
    x = mp.mpf(x)
    half = x / 2
    term = half
    total = term
    k = 0
    while abs(term) > mp.mpf(10) ** (-(mp.mp.dps + 5)) * (1 + abs(total)):
        k += 1
        term = term * (-(half * half)) / (k * (k + 1))
        total += term
        if k > 1000:  # pragma: no cover - series always converges long before
            raise RuntimeError("series did not converge")
    return total


def airy_series(x) -> mp.mpf:
    x = mp.mpf(x)
    if x == 0:
        return mp.mpf(1)
    t = 2 * j1_series(x) / x
    return t * t


def bisect(fn, lo, hi, iterations: int = 200) -> mp.mpf:
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    flo = fn(lo)
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if (fn(mid) > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


# Frozen values recomputed from the oracles above (see test_special for
# the recomputation checks):
J1_FIRST_ROOT = 3.8317059702075125       # bisect(j1_series, 3, 4.5)
J1_AT_ONE = 0.4400505857449335           # j1_series(1)
AIRY_HALF_MAX_X = 1.6163399483107033     # bisect(airy_series - 1/2, 1, 2.5)
