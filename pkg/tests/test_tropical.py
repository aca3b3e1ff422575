"""Boundary-stratum enumeration against an independent brute-force oracle."""

from itertools import combinations_with_replacement

import pytest

from redgw.keys import TangencyVector, ValidationError
from redgw.multiplicity import dagger_vanishing_order
from redgw.tropical import (
    classify_divisor,
    enumerate_boundary_divisors,
)

from .oracles import strata_bruteforce as oracle


def _alphas(d, max_marks):
    """Tangency vectors for degree d with at most max_marks markings:
    contact markings first (orders descending), then interior markings."""
    out = []
    for n in range(1, max_marks + 1):
        for orders in combinations_with_replacement(range(d + 1), n):
            if sum(orders) > d:
                continue
            entries = tuple(sorted(orders, reverse=True))
            out.append(TangencyVector(entries=entries, degree=d))
    return out


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("genus", [0, 1])
def test_matches_bruteforce_enumeration(d, genus):
    for alpha in _alphas(d, 3):
        got = {
            oracle.package_divisor_signature(div)
            for div in enumerate_boundary_divisors(
                d, alpha, genus=genus, prune=False)
        }
        want = oracle.enumerate_divisors(
            d, alpha.entries, genus=genus, prune=False)
        assert got == want, (d, genus, alpha.entries)


def test_prune_drops_exactly_flagged_rays():
    alpha = TangencyVector(entries=(2, 1, 0), degree=3)
    unpruned = enumerate_boundary_divisors(3, alpha, prune=False)
    pruned = enumerate_boundary_divisors(3, alpha, prune=True)
    assert {d.signature() for d in pruned} == {
        d.signature() for d in unpruned if d.pruned is None
    }
    assert len(pruned) < len(unpruned)


def test_kinds_partition_and_filter():
    alpha = TangencyVector(entries=(1, 0, 0), degree=2)
    divisors = enumerate_boundary_divisors(2, alpha, prune=False)
    kinds = {d.kind for d in divisors}
    assert kinds <= {"I", "II", "III", "Dagger"}
    for kind in kinds:
        only = enumerate_boundary_divisors(
            2, alpha, kindFilter={kind}, prune=False)
        assert all(d.kind == kind for d in only)
        assert {d.signature() for d in only} == {
            d.signature() for d in divisors if d.kind == kind}


def test_classification_agrees_with_oracle_kind():
    alpha = TangencyVector(entries=(2, 1, 0), degree=3)
    for div in enumerate_boundary_divisors(3, alpha, prune=False):
        sig = oracle.package_divisor_signature(div)
        assert classify_divisor(div.ctype) == sig[0] == div.kind


def test_dagger_lattice_index_matches_lcm_of_slopes():
    # on rays that carry splitting slopes, the lattice index of the
    # piecewise-linear function equals lcm of the slopes
    from math import lcm

    for d in (2, 3):
        alpha = TangencyVector(entries=(0,) * 2, degree=d)
        for div in enumerate_boundary_divisors(d, alpha, prune=False):
            order = dagger_vanishing_order(div)
            if div.kind in ("I", "II", "III") and div.slopes:
                assert order == lcm(*div.slopes), div.signature()
            assert order >= 0


def test_enumeration_rejects_degree_zero():
    with pytest.raises(ValidationError):
        enumerate_boundary_divisors(
            0, TangencyVector(entries=(0,), degree=0))
