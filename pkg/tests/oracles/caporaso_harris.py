"""Independent oracle: plane curve counts relative to a line.

Severi-degree style recursion for curves of degree d and genus g in the
plane with prescribed contacts along a fixed line L: ``alpha`` counts
contacts at specified points of L (alpha[k-1] contacts of order k) and
``beta`` counts contacts at unspecified points.  The curves pass through
n = 2d + g - 1 + |beta| additional general points.

``severi(d, g, alpha, beta)`` counts reduced, possibly reducible curves
with no component contained in L, where g is the "arithmetic-style" genus
sum(component genera) - (#components - 1).  ``irreducible(d, g, alpha,
beta)`` removes the reducible contributions by inclusion-exclusion,
splitting off the component through the first point.

Written directly from the degeneration recursion (specialize one point
onto L; either it lands on a free contact, or the limit contains L and
leaves a residual curve of degree d-1).  Shares no code with the package.
"""

from functools import lru_cache
from math import comb, prod


def _norm(t):
    t = list(t)
    while t and t[-1] == 0:
        t.pop()
    return tuple(t)


def _weight(t):
    """Total contact order sum(k * t[k-1])."""
    return sum((i + 1) * c for i, c in enumerate(t))


def npoints(d, g, beta):
    return 2 * d + g - 1 + sum(beta)


@lru_cache(maxsize=None)
def severi(d, g, alpha, beta):
    alpha, beta = _norm(alpha), _norm(beta)
    if d <= 0 or g < 1 - d:
        return 0
    if _weight(alpha) + _weight(beta) != d:
        return 0
    if d == 1:
        return 1 if g == 0 else 0
    total = 0
    # Case 1: the specialized point lands on a free contact of order k,
    # turning it into a fixed contact with multiplicity k.
    for k in range(len(beta)):
        if beta[k] > 0:
            a2 = list(alpha) + [0] * (k + 1 - len(alpha))
            a2[k] += 1
            b2 = list(beta)
            b2[k] -= 1
            total += (k + 1) * severi(d, g, tuple(a2), tuple(b2))
    # Case 2: the limit contains L; the residual has degree d-1 with fixed
    # contacts alpha' <= alpha and free contacts beta' >= beta.  The extra
    # free contacts ext = beta' - beta are nodes smoothed in the limit;
    # nb = |ext| of them, so the residual genus is g' = g - nb + 1
    # (nb = 0 corresponds to a whole component degenerating onto L).
    def alphas(i, rem):
        if i == len(alpha):
            yield ()
            return
        for c in range(0, min(alpha[i], rem // (i + 1)) + 1):
            for rest in alphas(i + 1, rem - c * (i + 1)):
                yield (c,) + rest

    for ap in alphas(0, d - 1):
        rem = d - 1 - _weight(ap) - _weight(beta)
        if rem < 0:
            continue

        def extras(k, r):
            if r == 0:
                yield ()
                return
            if k > r:
                return
            for c in range(0, r // k + 1):
                for rest in extras(k + 1, r - c * k):
                    yield (c,) + rest

        for ext in extras(1, rem):
            bp = [
                (beta[i] if i < len(beta) else 0)
                + (ext[i] if i < len(ext) else 0)
                for i in range(max(len(beta), len(ext)))
            ]
            nb = sum(ext)
            gp = g - nb + 1
            coef_a = prod(
                comb(alpha[i], ap[i] if i < len(ap) else 0)
                for i in range(len(alpha))
            )
            coef_b = prod(
                comb(bp[i], beta[i] if i < len(beta) else 0)
                for i in range(len(bp))
            )
            mults = prod(
                (i + 1) ** (ext[i] if i < len(ext) else 0)
                for i in range(len(ext))
            )
            total += coef_a * coef_b * mults * severi(d - 1, gp, tuple(ap), tuple(bp))
    return total


def _sub_tangency(limit):
    """All tuples t <= limit componentwise."""
    if not limit:
        yield ()
        return
    for rest in _sub_tangency(limit[:-1]):
        for c in range(limit[-1] + 1):
            yield rest + (c,)


@lru_cache(maxsize=None)
def irreducible(d, g, alpha, beta):
    alpha, beta = _norm(alpha), _norm(beta)
    if d <= 0 or g < 0:
        return 0
    if _weight(alpha) + _weight(beta) != d:
        return 0
    total = severi(d, g, alpha, beta)
    n = npoints(d, g, beta)
    # Remove reducible configurations by splitting off the irreducible
    # component through the first point.
    for d1 in range(1, d):
        for a1 in _sub_tangency(alpha):
            for b1 in _sub_tangency(beta):
                if _weight(a1) + _weight(b1) != d1:
                    continue
                for g1 in range(0, (d1 - 1) * (d1 - 2) // 2 + 1):
                    v1 = irreducible(d1, g1, a1, b1)
                    if v1 == 0:
                        continue
                    n1 = npoints(d1, g1, b1)
                    if n1 < 1 or n1 > n:
                        continue
                    a2 = _norm(tuple(
                        alpha[i] - (a1[i] if i < len(a1) else 0)
                        for i in range(len(alpha))
                    ))
                    b2 = _norm(tuple(
                        beta[i] - (b1[i] if i < len(b1) else 0)
                        for i in range(len(beta))
                    ))
                    g2 = g - g1 + 1
                    v2 = severi(d - d1, g2, a2, b2)
                    if v2 == 0:
                        continue
                    if npoints(d - d1, g2, b2) != n - n1:
                        continue
                    coef_a = prod(
                        comb(alpha[i], a1[i] if i < len(a1) else 0)
                        for i in range(len(alpha))
                    )
                    total -= comb(n - 1, n1 - 1) * coef_a * v1 * v2
    return total


if __name__ == "__main__":
    print("d=4 g=0 reducible-allowed (675):", severi(4, 0, (), (4,)))
    print("d=3 g=0 irreducible (12):", irreducible(3, 0, (), (3,)))
    print("d=4 g=0 irreducible (620):", irreducible(4, 0, (), (4,)))
    print("d=5 g=0 irreducible (87304):", irreducible(5, 0, (), (5,)))
    print("d=3 g=1 irreducible (1):", irreducible(3, 1, (), (3,)))
    print("d=4 g=1 irreducible (225):", irreducible(4, 1, (), (4,)))
    print("d=5 g=1 irreducible (87192):", irreducible(5, 1, (), (5,)))
    print("tangent conics (2):", irreducible(2, 0, (), (0, 1)))
