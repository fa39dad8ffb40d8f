"""Small shared helpers."""

from __future__ import annotations

import math


def floor_frac(frac: float, n: int) -> int:
    """Floor of ``frac * n`` with a guard against binary float error.

    Decimal fractions such as 0.6 are not exactly representable, so the
    product can land one ulp below the mathematically exact integer
    (e.g. 0.7 * 10**7).  The 1e-9 nudge absorbs that without ever
    crossing a genuine fractional boundary for realistic sizes.
    """
    return int(math.floor(frac * n + 1e-9))
