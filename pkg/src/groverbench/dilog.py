"""Real dilogarithm (Spence's function) on (-inf, 1].

Evaluation scheme: direct power series for |x| <= 1/2, Landen's identity to
move (-1, -1/2) into series range, Euler reflection for (1/2, 1), and the
inversion identity for x < -1.  The maximum-finding bound needs Li2 at large
negative integers, where only the inversion identity is numerically safe.
"""

from __future__ import annotations

import math

_PI2_6 = math.pi * math.pi / 6.0


def li2(x: float) -> float:
    """Dilogarithm Li2(x) = sum_{k>=1} x^k / k^2 for real x <= 1."""
    if math.isnan(x) or x > 1.0:
        raise ValueError(f"li2 is real only for x <= 1, got {x}")
    if x == 1.0:
        return _PI2_6
    if x == 0.0:
        return 0.0
    if x < -1.0:
        # Li2(-y) = -pi^2/6 - ln(y)^2/2 - Li2(-1/y) for y > 1
        lx = math.log(-x)
        return -_PI2_6 - 0.5 * lx * lx - li2(1.0 / x)
    if x < -0.5:
        # Landen: Li2(x) = -ln(1-x)^2/2 - Li2(x/(x-1)); x/(x-1) in (1/3, 1/2]
        u = math.log1p(-x)
        return -0.5 * u * u - li2(x / (x - 1.0))
    if x > 0.5:
        # Euler reflection: Li2(x) + Li2(1-x) = pi^2/6 - ln(x) ln(1-x)
        return _PI2_6 - math.log(x) * math.log1p(-x) - li2(1.0 - x)
    return _series(x)


def _series(z: float) -> float:
    # |z| <= 1/2: terms shrink by at least half, ~55 terms to double precision
    total = 0.0
    power = z
    k = 1
    while True:
        term = power / (k * k)
        total += term
        if abs(term) < 1e-17 * max(1.0, abs(total)):
            return total
        power *= z
        k += 1
        if k > 500:  # unreachable for |z| <= 0.5
            raise ArithmeticError("dilogarithm series failed to converge")
