"""Core value types: rationals, tangency vectors, insertions, keys."""

import pytest
from hypothesis import given, strategies as st

from redgw.keys import (
    Insertion,
    InvariantKey,
    Rat,
    TangencyVector,
    ValidationError,
    insertion_codim,
    normalize_key,
    parse_insertion,
    rat_from_str,
    rat_to_str,
    virtual_dimension,
)

rationals = st.fractions(
    min_value=-10**6, max_value=10**6, max_denominator=10**4
)


@given(rationals)
def test_rational_round_trip(r):
    assert rat_from_str(rat_to_str(r)) == r


def test_rational_rendering_is_canonical():
    assert rat_to_str(Rat(4, 2)) == "2/1"
    assert rat_to_str(Rat(-3, 6)) == "-1/2"
    assert rat_from_str("6/4") == Rat(3, 2)


@pytest.mark.parametrize("bad", ["3/0", "1.5", "x", "1/", "/2", "1//2"])
def test_rational_parse_errors(bad):
    with pytest.raises(ValidationError):
        rat_from_str(bad)


def test_tangency_vector_relative_validation():
    tv = TangencyVector(entries=(2, 1, 0), degree=3)
    tv.validate_relative()
    with pytest.raises(ValidationError):
        TangencyVector(entries=(2, 2), degree=3).validate_relative()
    with pytest.raises(ValidationError):
        TangencyVector(entries=(-1, 4), degree=3).validate_relative()


def test_tangency_vector_rubber_is_signed():
    TangencyVector(entries=(3, -1, -2), degree=0).validate_rubber()
    with pytest.raises(ValidationError):
        TangencyVector(entries=(3, -1), degree=1).validate_rubber()


def test_fictitious_markings_must_have_order_one():
    with pytest.raises(ValidationError):
        TangencyVector(entries=(2, 1), fictitious={0}, degree=3)
    tv = TangencyVector(entries=(2, 1), fictitious={1}, degree=3)
    assert tv.true_tangency() == 2


def test_insertion_grammar():
    ins = parse_insertion("H^2*psi^1", 0)
    assert (ins.classExp, ins.psiExp, ins.forgetSet) == (2, 1, frozenset())
    ins = parse_insertion("H^0*psi^3!{1,2}", 0)
    assert ins.forgetSet == frozenset({1, 2})
    for bad in ["H^2", "psi^1", "H^2 psi^1", "H^-1*psi^0", "H^2*psi^0!{a}"]:
        with pytest.raises(ValidationError):
            parse_insertion(bad, 0)


def _point_key(theory, m, genus, d, npts, alpha=()):
    tv = None
    if theory in ("Relative", "Rubber"):
        entries = tuple(alpha) + (0,) * npts
        tv = TangencyVector(entries=entries, degree=d)
    ins = tuple(
        Insertion(markIndex=len(alpha) + i, classExp=2) for i in range(npts)
    ) + tuple(Insertion(markIndex=i) for i in range(len(alpha)))
    return InvariantKey(theory=theory, m=m, genus=genus, degree=d,
                        tangency=tv, insertions=ins)


def test_serialization_round_trip():
    key = _point_key("Relative", 2, 1, 3, 6, alpha=(2, 1))
    key.validate()
    again = InvariantKey.deserialize(key.serialize())
    assert again.serialize() == key.serialize()
    assert normalize_key(again) == normalize_key(key)


def test_normalization_idempotent_and_label_invariant():
    key = _point_key("Relative", 2, 1, 3, 6, alpha=(2, 1))
    norm = normalize_key(key)
    assert normalize_key(norm) == norm
    # permute marking labels: same normal form
    perm = [3, 0, 1, 2, 7, 6, 5, 4]
    permuted = InvariantKey(
        theory=key.theory, m=key.m, genus=key.genus, degree=key.degree,
        tangency=TangencyVector(
            entries=tuple(key.tangency.entries[perm.index(i)]
                          for i in range(8)),
            degree=key.degree,
        ),
        insertions=tuple(
            Insertion(markIndex=perm[ins.markIndex], classExp=ins.classExp,
                      psiExp=ins.psiExp)
            for ins in key.insertions
        ),
    )
    assert normalize_key(permuted).serialize() == norm.serialize()


def test_virtual_dimension_values():
    # plane cubics, reduced genus 1: 9 point insertions of codimension 2
    key = _point_key("AbsoluteAmbient", 2, 1, 3, 9)
    assert virtual_dimension(key) == 18 == insertion_codim(key.insertions)
    # genus-0 conics in the plane: 3d - 1 points
    key0 = _point_key("AbsoluteAmbient", 2, 0, 2, 5)
    assert virtual_dimension(key0) == 10 == insertion_codim(key0.insertions)


def test_validation_rejects_bad_keys():
    with pytest.raises(ValidationError):
        InvariantKey("Nope", 2, 1, 1, None, ()).validate()
    with pytest.raises(ValidationError):
        InvariantKey("AbsoluteAmbient", 2, 2, 1, None, ()).validate()
    # class exponent above the divisor dimension on a contact marking
    key = InvariantKey(
        "Relative", 2, 1, 2,
        TangencyVector(entries=(2,), degree=2),
        (Insertion(markIndex=0, classExp=2),),
    )
    with pytest.raises(ValidationError):
        key.validate()
