"""Independent oracle: rational plane curve counts via Kontsevich's formula.

N(d) = number of rational degree-d curves through 3d-1 general points in the
plane, computed from the classical recursion

    N(d) = sum over d1+d2=d, d1,d2>=1 of
           N(d1) N(d2) [ d1^2 d2^2 C(3d-4, 3d1-2) - d1^3 d2 C(3d-4, 3d1-1) ]

with N(1) = 1.  Written directly from the closed-form recursion; shares no
code with the package engine.
"""

from functools import lru_cache
from math import comb


@lru_cache(maxsize=None)
def rational_plane_curves(d: int) -> int:
    if d < 1:
        raise ValueError("degree must be >= 1")
    if d == 1:
        return 1
    total = 0
    for d1 in range(1, d):
        d2 = d - d1
        total += (
            rational_plane_curves(d1)
            * rational_plane_curves(d2)
            * (
                d1 * d1 * d2 * d2 * comb(3 * d - 4, 3 * d1 - 2)
                - d1 ** 3 * d2 * comb(3 * d - 4, 3 * d1 - 1)
            )
        )
    return total


if __name__ == "__main__":
    for d in range(1, 7):
        print(d, rational_plane_curves(d))
