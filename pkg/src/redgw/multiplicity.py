"""Numerical multiplicities of boundary divisors.

A codimension-1 stratum whose splitting node slopes are (m_1, ..., m_r)
enters the recursion with weight prod(m_i).  That weight factors as

    splitting_degree(m) * vanishing_order(m)
        = (prod m_i / lcm(m_i)) * lcm(m_i) = prod m_i,

where the splitting degree is the degree of the gluing map from the fibre
product of the pieces onto the stratum, and the vanishing order is the order
with which the recursion's line-bundle section vanishes along the stratum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Rat
from math import gcd, lcm, prod
from typing import Sequence

from .keys import ValidationError

__all__ = [
    "MultiplicityData",
    "splitting_degree",
    "vanishing_order",
    "contribution_factor",
    "dagger_vanishing_order",
    "primitive_generator",
]


def _check(m: Sequence[int]) -> tuple[int, ...]:
    slopes = tuple(int(x) for x in m)
    if not slopes:
        raise ValidationError("slope vector must be nonempty")
    if any(x < 1 for x in slopes):
        raise ValidationError(f"slope vector {slopes} has a nonpositive entry")
    return slopes


def splitting_degree(m: Sequence[int]) -> Rat:
    """prod(m_i) / lcm(m_i); always a positive integer value."""
    slopes = _check(m)
    value = Rat(prod(slopes), lcm(*slopes))
    assert value.denominator == 1 and value > 0, (
        f"splitting degree {value} of {slopes} is not a positive integer"
    )
    return value


def vanishing_order(m: Sequence[int]) -> int:
    """lcm(m_1, ..., m_r)."""
    return lcm(*_check(m))


def contribution_factor(m: Sequence[int]) -> int:
    """prod(m_i) = splitting_degree(m) * vanishing_order(m)."""
    return prod(_check(m))


@dataclass(frozen=True)
class MultiplicityData:
    slopes: tuple[int, ...]
    splittingDegree: Rat
    vanishingOrder: int
    contributionFactor: int

    @staticmethod
    def of(m: Sequence[int]) -> "MultiplicityData":
        slopes = _check(m)
        return MultiplicityData(
            slopes=slopes,
            splittingDegree=splitting_degree(slopes),
            vanishingOrder=vanishing_order(slopes),
            contributionFactor=contribution_factor(slopes),
        )


def primitive_generator(vector: Sequence[Rat]) -> tuple[int, ...]:
    """Unique primitive integral generator of the ray spanned by ``vector``.

    Clears denominators and divides by the gcd; the first nonzero entry of
    the input must be positive (rays point into the cone).
    """
    vec = [Rat(x) for x in vector]
    if all(x == 0 for x in vec):
        raise ValidationError("zero vector does not span a ray")
    denom = lcm(*(x.denominator for x in vec))
    ints = [int(x * denom) for x in vec]
    g = gcd(*ints)
    ints = [x // g for x in ints]
    first = next(x for x in ints if x != 0)
    if first < 0:
        raise ValidationError("ray generator must have positive leading entry")
    return tuple(ints)


def dagger_vanishing_order(ray) -> int:
    """Lattice index of the recursion's piecewise-linear function on a ray.

    The ray carries edge-length coordinates; the function phi evaluates, on
    the primitive integral generator w, to the total slope-weighted length of
    the path from the recursion marking's vertex down to level zero.  For a
    ray that is also expressible through splitting slopes (m_1, ..., m_r) the
    generator is w = (L/m_1, ..., L/m_r) with L = lcm(m_i) and phi(w) = L.

    Returns 0 when the marking vertex stays at level 0 (phi vanishes on the
    ray, which therefore does not belong to the recursion divisor).
    """
    from .tropical import BoundaryDivisor  # local import to avoid a cycle

    if not isinstance(ray, BoundaryDivisor):
        raise ValidationError("dagger_vanishing_order expects a BoundaryDivisor")
    phi = ray.phi_on_generator()
    if phi is None:
        raise ValidationError(
            "piecewise-linear function is not linear on this ray (malformed alignment)"
        )
    if phi < 0:
        raise ValidationError(f"negative lattice index {phi}")
    return int(phi)
