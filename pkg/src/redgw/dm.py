"""Tautological integrals on Deligne-Mumford moduli of curves.

Genus 0 and genus 1 psi-monomial integrals (with at most one Hodge class
lambda_1 in genus 1) are evaluated by string/dilaton reduction from the two
genus-1 seed constants

    int_{Mbar_{1,1}} psi = int_{Mbar_{1,1}} lambda_1 = 1/24.

The module also evaluates the genus-one degree-0 rubber base case: integrals
against the main component of the genus-one double-ramification cycle.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction as Rat
from itertools import combinations
from typing import Sequence

from .keys import ValidationError

__all__ = ["DMKey", "dm_integral", "dr1_base"]


@dataclass(frozen=True)
class DMKey:
    genus: int
    n: int
    psiExps: tuple[int, ...]
    lambdaExp: int = 0

    def __post_init__(self):
        object.__setattr__(self, "psiExps", tuple(int(k) for k in self.psiExps))
        if self.genus not in (0, 1):
            raise ValidationError(f"genus {self.genus} must be 0 or 1")
        if self.lambdaExp not in (0, 1):
            raise ValidationError("lambdaExp must be 0 or 1")
        if self.genus == 0 and self.lambdaExp != 0:
            raise ValidationError("genus 0 carries no Hodge class")
        if len(self.psiExps) != self.n:
            raise ValidationError(
                f"psi exponent count {len(self.psiExps)} != n = {self.n}"
            )
        if any(k < 0 for k in self.psiExps):
            raise ValidationError("psi exponents must be nonnegative")

    def dim(self) -> int:
        return self.n - 3 if self.genus == 0 else self.n

    def normalized(self) -> "DMKey":
        return DMKey(
            genus=self.genus,
            n=self.n,
            psiExps=tuple(sorted(self.psiExps)),
            lambdaExp=self.lambdaExp,
        )


_memo: dict[DMKey, Rat] = {}
_memo_lock = threading.Lock()

_SEED = Rat(1, 24)


def dm_integral(key: DMKey) -> Rat:
    """Exact value of int prod psi_i^{k_i} * lambda_1^{lambdaExp}.

    Returns 0 when the total codimension misses the dimension of the space.
    Genus 0 requires n >= 3.
    """
    if key.genus == 0 and key.n < 3:
        raise ValidationError(f"Mbar_0,{key.n} does not exist (n < 3)")
    key = key.normalized()
    if sum(key.psiExps) + key.lambdaExp != key.dim():
        return Rat(0)
    with _memo_lock:
        cached = _memo.get(key)
    if cached is not None:
        return cached
    value = _evaluate(key)
    with _memo_lock:
        _memo.setdefault(key, value)
    return value


def _evaluate(key: DMKey) -> Rat:
    g, n, ks, lam = key.genus, key.n, key.psiExps, key.lambdaExp
    if g == 0:
        if n == 3:
            return Rat(1)
    else:
        if n == 1:
            # seeds: psi and lambda_1 each integrate to 1/24 on Mbar_{1,1}
            return _SEED
    # Every dimension-correct key here has a marking with psi exponent 0
    # (string equation) or 1 (dilaton equation): in genus 0 all-exponents>=1
    # forces sum >= n > n-3; in genus 1 all-exponents>=2 forces sum > n.
    if 0 in ks:
        i = ks.index(0)
        rest = ks[:i] + ks[i + 1:]
        total = Rat(0)
        for j in range(len(rest)):
            if rest[j] == 0:
                continue
            lowered = rest[:j] + (rest[j] - 1,) + rest[j + 1:]
            total += dm_integral(DMKey(g, n - 1, lowered, lam))
        return total
    i = ks.index(1)
    rest = ks[:i] + ks[i + 1:]
    factor = 2 * g - 2 + (n - 1)
    return factor * dm_integral(DMKey(g, n - 1, rest, lam))


# ---------------------------------------------------------------------------
# Degree-0 rubber base case: main-component genus-1 double ramification
# ---------------------------------------------------------------------------

def dr1_base(a: Sequence[int], psi_exps: Sequence[int]) -> Rat:
    """Integral of prod psi_i^{k_i} against the MAIN component of the
    genus-one double-ramification cycle on Mbar_{1,n}.

    ``a`` is the signed ramification vector (sum zero); ``psi_exps`` the
    collapsed psi exponents, one per marking.  The cycle is expressed as

        sum_i (a_i^2/2) psi_i  -  sum_{|J|>=2} (a_J^2/2) delta_{0,J}
            -  c_irr * lambda_1        with c_irr = 1,

    where delta_{0,J} is the separating divisor with markings J on the
    rational component and a_J = sum_{i in J} a_i.  The coefficient c_irr
    (the correction removing the boundary irreducible component of the
    ordinary double-ramification cycle) is not printed in any source we
    reproduce; it is pinned by two independent cross-checks frozen in the
    test suite: degree-1 covers (a = (1,-1), value 0) and the 2-torsion
    count for a = (2,-2) (value 3/24).
    """
    a = tuple(int(x) for x in a)
    ks = tuple(int(k) for k in psi_exps)
    if sum(a) != 0:
        raise ValidationError(f"ramification vector {a} does not sum to zero")
    if len(a) != len(ks):
        raise ValidationError("ramification vector and psi exponents differ in length")
    n = len(a)
    if n == 0 or all(x == 0 for x in a):
        return Rat(0)
    if sum(ks) != n - 1:
        return Rat(0)
    total = Rat(0)
    for i in range(n):
        if a[i] == 0:
            continue
        bumped = ks[:i] + (ks[i] + 1,) + ks[i + 1:]
        total += Rat(a[i] ** 2, 2) * dm_integral(DMKey(1, n, bumped))
    for r in range(2, n + 1):
        for J in combinations(range(n), r):
            aJ = sum(a[i] for i in J)
            if aJ == 0:
                continue
            g0 = dm_integral(DMKey(0, r + 1, tuple(ks[i] for i in J) + (0,)))
            g1 = dm_integral(
                DMKey(1, n - r + 1, tuple(ks[i] for i in range(n) if i not in J) + (0,))
            )
            total -= Rat(aJ ** 2, 2) * g0 * g1
    total -= dm_integral(DMKey(1, n, ks, lambdaExp=1))
    return total
