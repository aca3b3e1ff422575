"""Key evaluation front end: dispatch, named steps, recursion traces."""

from collections import Counter
from fractions import Fraction

import pytest

from redgw.engine import (
    RULES,
    RecursionTrace,
    base_d0,
    compute,
    dimension_matched,
    step2_absolute_Y,
    step3_relative,
    step4_rubber,
    trace,
    type_dagger_contribution,
)
from redgw.genus1 import UnsupportedKeyError, relative_g1
from redgw.keys import (
    Insertion,
    InvariantKey,
    TangencyVector,
    ValidationError,
)
from redgw.store import CacheStore
from redgw.tropical import enumerate_boundary_divisors


def _abs_key(m, genus, d, ins):
    return InvariantKey(
        theory="AbsoluteAmbient", m=m, genus=genus, degree=d, tangency=None,
        insertions=tuple(
            Insertion(markIndex=i, classExp=a, psiExp=k)
            for i, (a, k) in enumerate(ins)
        ),
    )


def _rel_key(m, genus, d, marks):
    return InvariantKey(
        theory="Relative", m=m, genus=genus, degree=d,
        tangency=TangencyVector(
            entries=tuple(al for al, _, _ in marks), degree=d),
        insertions=tuple(
            Insertion(markIndex=i, classExp=a, psiExp=k)
            for i, (al, a, k) in enumerate(marks)
        ),
    )


def _rub_key(m, d, marks):
    return InvariantKey(
        theory="Rubber", m=m, genus=1, degree=d,
        tangency=TangencyVector(
            entries=tuple(al for al, _, _ in marks), degree=d),
        insertions=tuple(
            Insertion(markIndex=i, classExp=a, psiExp=k)
            for i, (al, a, k) in enumerate(marks)
        ),
    )


CUBICS = _abs_key(2, 1, 3, ((2, 0),) * 9)
RATIONAL_CUBICS = _abs_key(2, 0, 3, ((2, 0),) * 8)


def test_compute_dispatches_all_theories():
    assert compute(CUBICS) == 1
    assert compute(RATIONAL_CUBICS) == 12
    tangent_conics = _rel_key(2, 0, 2, ((2, 0, 0),) + ((0, 2, 0),) * 4)
    assert compute(tangent_conics) == 2
    full_contact = _rel_key(2, 1, 3, ((3, 1, 0),) + ((0, 2, 0),) * 6)
    assert compute(full_contact) == 1


def test_compute_memoizes_through_store():
    store = CacheStore(m=2)
    assert compute(CUBICS, store) == 1
    assert store.get(CUBICS) == 1
    # second call served from the store
    assert compute(CUBICS, store) == 1
    assert len(store) == 1


def test_dimension_mismatch_is_zero():
    key = _abs_key(2, 1, 3, ((2, 0),) * 8)
    assert not dimension_matched(key)
    assert compute(key) == 0


def test_named_steps_validate_their_loop_indices():
    key = _abs_key(3, 1, 1, ((3, 0), (3, 1)))
    assert step2_absolute_Y(1, 2, InvariantKey(
        "AbsoluteDivisor", key.m, 1, 1, None, key.insertions)) == 0
    with pytest.raises(ValidationError):
        step2_absolute_Y(2, 2, InvariantKey(
            "AbsoluteDivisor", key.m, 1, 1, None, key.insertions))
    rel = _rel_key(2, 1, 3, ((3, 1, 0),) + ((0, 2, 0),) * 6)
    assert step3_relative(3, 7, 3, rel) == 1
    with pytest.raises(ValidationError):
        step3_relative(3, 7, 0, rel)
    with pytest.raises(ValidationError):
        base_d0(CUBICS)
    rub = _rub_key(2, 1, ((1, 0, 0), (0, 1, 1)))
    assert step4_rubber(1, 2, 2, rub) == compute(rub)
    with pytest.raises(ValidationError):
        step4_rubber(1, 2, 3, rub)


def _assert_trace_invariants(node):
    seen = 0
    for t in node.walk():
        seen += 1
        assert t.rule in RULES
        if t.children:
            assert t.value == sum(
                c.coefficient * c.replay() for c in t.children), t.key
    return seen


def test_trace_of_fixture_key_is_a_leaf():
    t = trace(CUBICS)
    assert t.rule == "BaseD0" and t.value == 1 and not t.children


def test_trace_replays_to_the_invariant():
    # one divisor insertion on the cubic point count reduces by the divisor
    # relation: value 3 * 1
    key = _abs_key(2, 1, 3, ((1, 0), (1, 0)) + ((2, 0),) * 9)
    t = trace(key)
    assert t.value == 9 and t.replay() == 9
    assert _assert_trace_invariants(t) > 1
    rules = Counter(n.rule for n in t.walk())
    assert rules["Step2b"] >= 1  # divisor-relation children
    assert set(rules) <= set(RULES)


def test_trace_of_tangency_key_uses_correction_rules():
    key = _rel_key(2, 1, 3, ((3, 1, 0),) + ((0, 2, 0),) * 6)
    t = trace(key)
    assert t.replay() == t.value == relative_g1(
        2, 3, ((3, 1, 0),) + ((0, 2, 0),) * 6)
    rules = Counter(n.rule for n in t.walk())
    assert rules["Step3"] >= 2
    assert {"TypeI", "TypeII", "TypeIII"} & set(rules)
    _assert_trace_invariants(t)


def test_trace_depth_limit_truncates():
    key = _rel_key(2, 1, 3, ((3, 1, 0),) + ((0, 2, 0),) * 6)
    shallow = trace(key, depth=1)
    assert shallow.replay() == shallow.value
    assert max(len(list(n.walk())) for n in [shallow]) < len(
        list(trace(key).walk()))


def test_trace_of_mismatched_key_is_vanishing_leaf():
    t = trace(_abs_key(2, 1, 3, ((2, 0),) * 8))
    assert t.rule == "ProjectionVanish" and t.value == 0 and not t.children


def test_trace_rubber_reduction():
    # full-contact marking with trivial insertion: the fundamental reduction
    # lands on the cubic point count of the base P^2, weighted by alpha^2
    key = _rub_key(3, 3, ((3, 0, 0),) + ((0, 2, 0),) * 9)
    t = trace(key)
    assert t.replay() == t.value == compute(key) == 9
    assert len(t.children) == 1
    child = t.children[0]
    assert child.rule in ("Step4a", "BaseD0")
    assert child.coefficient == 9 and child.value == 1


def test_render_is_readable():
    text = trace(CUBICS, depth=1).render()
    assert "[Step2a]" in text or "[BaseD0]" in text
    assert "coefficient=" in text and "value=" in text and "key=" in text


def _dagger_rays(d, alpha, prune):
    tv = TangencyVector(entries=alpha, degree=d)
    return enumerate_boundary_divisors(
        d, tv, kindFilter={"Dagger"}, genus=1, prune=prune)


def test_dagger_contribution_pruned_rays_vanish():
    rays = [r for r in _dagger_rays(3, (2, 1, 0), prune=False) if r.pruned]
    assert rays, "expected pruned rays in this configuration"
    for ray in rays:
        assert type_dagger_contribution(
            ray, ((1, 0), (0, 0), (2, 0)), m=2) == 0


def test_dagger_contribution_star_rays_evaluate():
    rays = [r for r in _dagger_rays(2, (1, 1), prune=True)]
    values = [
        type_dagger_contribution(r, ((1, 0), (0, 0)), m=2) for r in rays
    ]
    assert all(isinstance(v, Fraction) for v in values)


def test_dagger_contribution_rejects_other_kinds():
    tv = TangencyVector(entries=(1, 1), degree=2)
    ray = enumerate_boundary_divisors(2, tv, kindFilter={"I"})[0]
    with pytest.raises(ValidationError):
        type_dagger_contribution(ray, ((0, 0), (0, 0)), m=2)
