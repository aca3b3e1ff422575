"""Front end over the genus-0 and genus-1 engines: evaluate invariant keys,
wire them through a persistent cache, and produce recursion traces.

A :class:`RecursionTrace` is an audit trail of one evaluation: a tree whose
nodes carry an invariant key, the rule that produced the node, the node's
weight in its parent's sum, and the node's value.  Every internal node
satisfies ``value == sum(child.coefficient * child.value)``, so a trace can
be replayed bottom-up and compared against the stored invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as Rat
from itertools import product
from math import factorial
from typing import Optional, Sequence

from .genus0 import absolute_g0, relative_g0, rubber_g0
from .genus1 import (
    UnsupportedKeyError,
    _abs1_reductions,
    _correction_terms,
    _eval_factor,
    _rel1,
    _rubber_reduction_mark,
    _rubber1,
    absolute_g1,
    absolute_g1_Y,
    relative_g1,
    rubber_g1,
)
from .keys import (
    Insertion,
    InvariantKey,
    TangencyVector,
    ValidationError,
    insertion_codim,
    normalize_key,
    virtual_dimension,
)
from .multiplicity import contribution_factor
from .store import CacheStore
from .tropical import BoundaryDivisor

__all__ = [
    "RULES",
    "RecursionTrace",
    "base_d0",
    "compute",
    "dimension_matched",
    "step1_forgetful_relative",
    "step2_absolute_Y",
    "step3_relative",
    "step4_rubber",
    "trace",
    "type_dagger_contribution",
]

RULES = (
    "Step1", "Step2a", "Step2b", "Step3", "Step4a", "Step4b",
    "BaseD0", "TypeI", "TypeII", "TypeIII", "TypeDagger", "ProjectionVanish",
)


# ---------------------------------------------------------------------------
# Key dispatch
# ---------------------------------------------------------------------------

def _insertion_pairs(key: InvariantKey) -> list[tuple[int, int]]:
    by_index = {ins.markIndex: ins for ins in key.insertions}
    pairs = []
    for i in range(key.n):
        ins = by_index.get(i, Insertion(markIndex=i))
        if ins.forgetSet:
            raise UnsupportedKeyError(
                "pulled-back psi classes with explicit forget sets are not "
                "part of the supported insertion algebra (collapsed psi only)"
            )
        pairs.append((ins.classExp, ins.psiExp))
    return pairs


def _relative_marks(key: InvariantKey) -> list[tuple[int, int, int]]:
    """True markings of a fully-marked relative key: fictitious markings must
    carry trivial insertions and are dropped (the engine's ``F!`` convention
    re-adds them implicitly)."""
    pairs = _insertion_pairs(key)
    fict = key.tangency.fictitious
    marks = []
    for i, (a, k) in enumerate(pairs):
        alpha = key.tangency.entries[i]
        if i in fict:
            if a != 0 or k != 0:
                raise UnsupportedKeyError(
                    f"fictitious marking {i} carries a nontrivial insertion"
                )
            continue
        marks.append((alpha, a, k))
    return marks


def dimension_matched(key: InvariantKey) -> bool:
    return insertion_codim(key.insertions) == virtual_dimension(key)


def _dispatch(key: InvariantKey) -> Rat:
    """Evaluate a validated, normalized key."""
    m, d, g = key.m, key.degree, key.genus
    if key.theory == "AbsoluteAmbient":
        pairs = _insertion_pairs(key)
        return absolute_g0(m, d, pairs) if g == 0 else absolute_g1(m, d, pairs)
    if key.theory == "AbsoluteDivisor":
        pairs = _insertion_pairs(key)
        if g == 0:
            return absolute_g0(m - 1, d, pairs)
        return absolute_g1_Y(m, d, pairs)
    if key.theory == "Relative":
        marks = _relative_marks(key)
        return relative_g0(m, d, marks) if g == 0 else relative_g1(m, d, marks)
    if key.theory == "Rubber":
        pairs = _insertion_pairs(key)
        orders = key.tangency.entries
        if g == 0:
            return rubber_g0(m, d, orders, pairs)
        marks = [(orders[i], a, k) for i, (a, k) in enumerate(pairs)]
        return rubber_g1(m, d, marks)
    raise ValidationError(f"unknown theory {key.theory!r}")


def compute(key: InvariantKey, store: Optional[CacheStore] = None) -> Rat:
    """Exact value of an invariant key, optionally memoized in ``store``
    (single-flight; a value conflicting with a pinned fixture raises)."""
    norm = normalize_key(key)
    if store is not None:
        return store.get_or_compute(norm, _dispatch)
    return _dispatch(norm)


# ---------------------------------------------------------------------------
# Named recursion steps
# ---------------------------------------------------------------------------

def base_d0(key: InvariantKey) -> Rat:
    """Base case: degree-0 keys route to obstruction-bundle integrals over
    Deligne-Mumford space (absolute/relative) or to the genus-one
    double-ramification base integral (rubber)."""
    if key.degree != 0:
        raise ValidationError(f"base_d0 requires degree 0, got {key.degree}")
    return compute(key)


def step1_forgetful_relative(d: int, n: int, t: int, key: InvariantKey) -> Rat:
    """Relative key with at least one fictitious marking (all of whose
    insertions are pulled back along forgetting it)."""
    if key.theory != "Relative":
        raise ValidationError("step 1 applies to relative keys")
    if not key.tangency.fictitious:
        raise ValidationError("step 1 requires a fictitious marking")
    _check_loop(key, d, n, t=t)
    return compute(key)


def step2_absolute_Y(d: int, n: int, key: InvariantKey) -> Rat:
    """Absolute key of the divisor H; degree 1 vanishes outright (the reduced
    space is empty), so only d = 0 and d >= 2 reach the recursion."""
    if key.theory != "AbsoluteDivisor":
        raise ValidationError("step 2 applies to absolute divisor keys")
    _check_loop(key, d, n)
    if key.genus == 1 and d == 1:
        return Rat(0)
    return compute(key)


def step3_relative(d: int, n: int, t: int, key: InvariantKey) -> Rat:
    """Relative key with positive true tangency, reduced by lowering the
    maximal contact order."""
    if key.theory != "Relative":
        raise ValidationError("step 3 applies to relative keys")
    if t < 1:
        raise ValidationError("step 3 requires positive true tangency")
    _check_loop(key, d, n, t=t)
    return compute(key)


def step4_rubber(d: int, n: int, m: int, key: InvariantKey) -> Rat:
    """Rubber key: either the fundamental pushforward reduction (a contact
    marking with trivial insertion forgets to the absolute theory of H with
    degree ``alpha_k**2``) or the expansion of the image class."""
    if key.theory != "Rubber":
        raise ValidationError("step 4 applies to rubber keys")
    _check_loop(key, d, n, m=m)
    return compute(key)


def _check_loop(key: InvariantKey, d: int, n: int,
                t: Optional[int] = None, m: Optional[int] = None) -> None:
    if key.degree != d or key.n != n:
        raise ValidationError(
            f"loop indices (d={d}, n={n}) disagree with key "
            f"(d={key.degree}, n={key.n})"
        )
    if t is not None and key.tangency is not None:
        if key.tangency.true_tangency() != t:
            raise ValidationError(
                f"loop index t={t} disagrees with key tangency "
                f"{key.tangency.true_tangency()}"
            )
    if m is not None and key.m != m:
        raise ValidationError(f"loop index m={m} disagrees with key m={key.m}")


def type_dagger_contribution(
    divisor: BoundaryDivisor,
    insertions: Sequence[tuple[int, int]],
    m: int = 2,
) -> Rat:
    """Numerical contribution of one contracted-core boundary ray.

    Supported shape: the star configuration surviving the projection-formula
    pruning, i.e. a single (stable) genus-one vertex over the expanded target
    carrying base degree 0, attached to level-0 vertices by single edges.
    The value is the contribution factor ``prod(m_j)`` times the fibre
    integral of the genus-one double-ramification base class, glued to the
    genus-zero relative factors of the level-0 vertices by splitting the
    diagonal of H.  Pruned rays contribute 0.
    """
    if divisor.kind != "Dagger":
        raise ValidationError(
            f"type_dagger_contribution expects a dagger ray, got {divisor.kind}"
        )
    if divisor.pruned:
        return Rat(0)
    ct = divisor.ctype
    level1 = [i for i, v in enumerate(ct.vertices) if v.level >= 1]
    cores = [i for i in level1 if ct.vertices[i].genus == 1]
    if len(level1) != 1 or len(cores) != 1:
        raise UnsupportedKeyError(
            "only star-shaped contracted-core rays are supported"
        )
    core = cores[0]
    if len(insertions) != len(ct.legs):
        raise ValidationError(
            f"{len(insertions)} insertions for {len(ct.legs)} markings"
        )
    core_marks = [
        (slope, insertions[i][0], insertions[i][1])
        for i, (v, slope) in enumerate(ct.legs) if v == core
    ]
    externals = []  # (degree, edge slope, leg marks)
    for j, v in enumerate(ct.vertices):
        if j == core:
            continue
        slopes = [e.slope for e in ct.edges if core in (e.v, e.w)
                  and j in (e.v, e.w)]
        if len(slopes) != 1:
            raise UnsupportedKeyError(
                "only star-shaped contracted-core rays are supported"
            )
        legs = [
            (slope, insertions[i][0], insertions[i][1])
            for i, (w, slope) in enumerate(ct.legs) if w == j
        ]
        externals.append((ct.vertices[j].degree, slopes[0], legs))
    total = Rat(0)
    r = len(externals)
    for evec in product(range(m), repeat=r):
        rmarks = list(core_marks) + [
            (-mj, m - 1 - evec[j], 0)
            for j, (_, mj, _) in enumerate(externals)
        ]
        term = rubber_g1(m, 0, rmarks)
        for j, (dj, mj, legs) in enumerate(externals):
            if term == 0:
                break
            term *= relative_g0(m, dj, legs + [(mj, evec[j], 0)])
        total += term
    return contribution_factor(divisor.slopes or (1,)) * total


# ---------------------------------------------------------------------------
# Recursion traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RecursionTrace:
    """One node of the audit tree: ``coefficient`` is this node's weight in
    its parent's sum; leaves carry their own value."""

    key: str
    rule: str
    coefficient: Rat
    value: Rat
    children: tuple["RecursionTrace", ...] = field(default_factory=tuple)

    def replay(self) -> Rat:
        if not self.children:
            return self.value
        return sum(
            (c.coefficient * c.replay() for c in self.children), Rat(0)
        )

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def render(self, indent: int = 0) -> str:
        from .keys import rat_to_str
        line = (
            "  " * indent
            + f"[{self.rule}] coefficient={rat_to_str(self.coefficient)} "
            f"value={rat_to_str(self.value)} key={self.key}"
        )
        return "\n".join(
            [line] + [c.render(indent + 1) for c in self.children]
        )


def _abs_key_str(m: int, d: int, ins) -> str:
    return InvariantKey(
        theory="AbsoluteAmbient", m=m, genus=1, degree=d,
        tangency=None,
        insertions=tuple(
            Insertion(markIndex=i, classExp=a, psiExp=k)
            for i, (a, k) in enumerate(ins)
        ),
    ).serialize()


def _abs0_key_str(m: int, d: int, ins) -> str:
    return InvariantKey(
        theory="AbsoluteAmbient", m=m, genus=0, degree=d,
        tangency=None,
        insertions=tuple(
            Insertion(markIndex=i, classExp=a, psiExp=k)
            for i, (a, k) in enumerate(ins)
        ),
    ).serialize()


def _rel_key_str(m: int, d: int, marks) -> str:
    t = sum(al for al, _, _ in marks)
    fict = d - t
    entries = tuple(al for al, _, _ in marks) + (1,) * fict
    return InvariantKey(
        theory="Relative", m=m, genus=1, degree=d,
        tangency=TangencyVector(
            entries=entries,
            fictitious=frozenset(range(len(marks), len(marks) + fict)),
            degree=d,
        ),
        insertions=tuple(
            Insertion(markIndex=i, classExp=a, psiExp=k)
            for i, (_, a, k) in enumerate(marks)
        ) + tuple(
            Insertion(markIndex=len(marks) + j) for j in range(fict)
        ),
    ).serialize()


def _rub_key_str(m: int, b0: int, marks) -> str:
    return InvariantKey(
        theory="Rubber", m=m, genus=1, degree=b0,
        tangency=TangencyVector(
            entries=tuple(al for al, _, _ in marks), degree=b0
        ),
        insertions=tuple(
            Insertion(markIndex=i, classExp=a, psiExp=k)
            for i, (_, a, k) in enumerate(marks)
        ),
    ).serialize()


def _rel0_key_str(m: int, d: int, marks) -> str:
    t = sum(al for al, _, _ in marks)
    fict = d - t
    entries = tuple(al for al, _, _ in marks) + (1,) * fict
    return InvariantKey(
        theory="Relative", m=m, genus=0, degree=d,
        tangency=TangencyVector(
            entries=entries,
            fictitious=frozenset(range(len(marks), len(marks) + fict)),
            degree=d,
        ),
        insertions=tuple(
            Insertion(markIndex=i, classExp=a, psiExp=k)
            for i, (_, a, k) in enumerate(marks)
        ) + tuple(
            Insertion(markIndex=len(marks) + j) for j in range(fict)
        ),
    ).serialize()


def _g0_factor_key_str(factor: tuple) -> str:
    tag = factor[0]
    if tag == "absolute-g0":
        return _abs0_key_str(factor[1], factor[2], factor[3])
    if tag == "relative-g0":
        return _rel0_key_str(factor[1], factor[2], factor[3])
    raise AssertionError(f"unexpected genus-zero factor {tag!r}")


def _trace_absolute(m, d, ins, coefficient, rule, depth) -> RecursionTrace:
    ins = tuple(sorted(ins))
    value = absolute_g1(m, d, ins)
    key = _abs_key_str(m, d, ins)
    n = len(ins)
    if sum(a + k for a, k in ins) != (m + 1) * d + n or any(a > m for a, _ in ins):
        return RecursionTrace(key, "ProjectionVanish", coefficient, Rat(0))
    if d == 0:
        return RecursionTrace(key, "BaseD0", coefficient, value)
    if d == 1:
        return RecursionTrace(key, "ProjectionVanish", coefficient, Rat(0))
    if depth == 0:
        return RecursionTrace(key, rule, coefficient, value)
    for red_rule, terms in _abs1_reductions(m, d, ins):
        child_rule = "Step2b" if red_rule == "divisor" else "Step2a"
        children = tuple(
            _trace_absolute(m, d, sub, coef, child_rule, depth - 1)
            for coef, sub in terms
        )
        return RecursionTrace(key, rule, coefficient, value, children)
    # irreducible fixture: a leaf
    return RecursionTrace(key, "BaseD0", coefficient, value)


def _trace_rubber(m, b0, marks, coefficient, rule, depth) -> RecursionTrace:
    marks = tuple(sorted(marks))
    value = _rubber1(m, b0, marks)
    key = _rub_key_str(m, b0, marks)
    if b0 == 0:
        return RecursionTrace(key, "BaseD0", coefficient, value)
    if depth == 0:
        return RecursionTrace(key, rule, coefficient, value)
    i = _rubber_reduction_mark(marks)
    if i is not None:
        al = marks[i][0]
        rest = tuple((a, k) for j, (_, a, k) in enumerate(marks) if j != i)
        child = _trace_absolute(
            m - 1, b0, rest, Rat(al * al), "Step4a", depth - 1
        )
        return RecursionTrace(key, rule, coefficient, value, (child,))
    mY = m - 1
    orders = tuple(al for al, _, _ in marks)
    ins = tuple((a, k) for _, a, k in marks)
    n = len(marks)
    children = []
    for j in range(n):
        if orders[j] == 0:
            continue
        bumped = ins[:j] + ((ins[j][0], ins[j][1] + 1),) + ins[j + 1:]
        children.append(_trace_absolute(
            mY, b0, bumped, Rat(orders[j] ** 2, 2), "Step4a", depth - 1
        ))
    for maskJ in range(1 << n):
        J = [j for j in range(n) if maskJ >> j & 1]
        if len(J) < 2:
            continue
        aJ = sum(orders[j] for j in J)
        if aJ == 0:
            continue
        ins_J = tuple(ins[j] for j in J)
        ins_rest = tuple(ins[j] for j in range(n) if not maskJ >> j & 1)
        for d1 in range(b0 + 1):
            for e in range(mY + 1):
                left = absolute_g0(mY, d1, ins_J + ((e, 0),))
                if left == 0:
                    continue
                children.append(_trace_absolute(
                    mY, b0 - d1, ((mY - e, 0),) + ins_rest,
                    -Rat(aJ * aJ, 2) * left, "Step4b", depth - 1,
                ))
    for e in range(mY + 1):
        loop_ins = ins + ((e, 0), (mY - e, 0))
        g0 = absolute_g0(mY, b0, loop_ins)
        if g0 == 0:
            continue
        children.append(RecursionTrace(
            _abs0_key_str(mY, b0, loop_ins), "Step4b", -Rat(1, 24), g0
        ))
    return RecursionTrace(key, rule, coefficient, value, tuple(children))


def _trace_relative(m, d, marks, coefficient, rule, depth) -> RecursionTrace:
    marks = tuple(sorted(marks))
    t = sum(al for al, _, _ in marks)
    fict = d - t
    value = factorial(fict) * _rel1(m, d, marks)
    key = _rel_key_str(m, d, marks)
    if depth == 0:
        return RecursionTrace(key, rule, coefficient, value)
    if t == 0:
        ins = tuple((a, k) for _, a, k in marks)
        child = _trace_absolute(
            m, d, ins, Rat(factorial(fict)), "BaseD0", depth - 1
        )
        return RecursionTrace(key, rule, coefficient, value, (child,))
    p = max(range(len(marks)), key=lambda i: (marks[i][0], i))
    a, e1, k1 = marks[p]
    children = []
    # left-hand side of the tangency-lowering relation: the child keys have
    # one more fictitious marking, so their F! normalization absorbs a
    # factor (fict + 1) relative to this node's.
    if a >= 2:
        children.append(_trace_relative(
            m, d, marks[:p] + ((a - 1, e1, k1 + 1),) + marks[p + 1:],
            Rat(a - 1, fict + 1), "Step3", depth - 1,
        ))
    children.append(_trace_relative(
        m, d, marks[:p] + ((a - 1, e1 + 1, k1),) + marks[p + 1:],
        Rat(1, fict + 1), "Step3", depth - 1,
    ))
    lowered = marks[:p] + ((a - 1, e1, k1),) + marks[p + 1:]
    for term_rule, coef, factors in _correction_terms(m, d, lowered, p):
        genus1 = [f for f in factors if f[0] in ("relative-g1", "rubber-g1")]
        rest = [f for f in factors if f[0] not in ("relative-g1", "rubber-g1")]
        if not genus1:
            # a purely genus-zero configuration (the loop carries the genus):
            # fold all but one factor into the coefficient and leave a leaf
            lead, rest = rest[0], rest[1:]
        weight = -Rat(factorial(fict)) * coef
        for f in rest:
            if weight == 0:
                break
            weight *= _eval_factor(f)
        if weight == 0:
            continue
        if not genus1:
            lead_value = _eval_factor(lead)
            if lead_value == 0:
                continue
            if lead[0] == "relative-g0":
                # the factor is a bare tangency value; display the
                # fully-marked key and rebalance by its F! normalization
                f0 = factorial(lead[2] - sum(al for al, _, _ in lead[3]))
                lead_value *= f0
                weight /= f0
            children.append(RecursionTrace(
                _g0_factor_key_str(lead), term_rule, weight, lead_value
            ))
            continue
        [(tag, fm, fd, fmarks)] = genus1
        if tag == "relative-g1":
            f_fict = fd - sum(al for al, _, _ in fmarks)
            children.append(_trace_relative(
                fm, fd, fmarks, weight / factorial(f_fict),
                term_rule, depth - 1,
            ))
        else:
            children.append(_trace_rubber(
                fm, fd, fmarks, weight, term_rule, depth - 1
            ))
    return RecursionTrace(key, rule, coefficient, value, tuple(children))


def trace(key: InvariantKey, depth: Optional[int] = None) -> RecursionTrace:
    """Recursion trace for a genus-one key (genus-0 keys yield a single
    leaf).  ``depth`` bounds the expansion; ``None`` expands fully."""
    norm = normalize_key(key)
    if depth is None:
        depth = -1  # never reaches 0
    m, d = norm.m, norm.degree
    if norm.genus == 0:
        return RecursionTrace(norm.serialize(), "BaseD0", Rat(1), compute(norm))
    if not dimension_matched(norm):
        return RecursionTrace(
            norm.serialize(), "ProjectionVanish", Rat(1), Rat(0)
        )
    if norm.theory == "AbsoluteAmbient":
        return _trace_absolute(m, d, _insertion_pairs(norm), Rat(1),
                               "Step2a", depth)
    if norm.theory == "AbsoluteDivisor":
        return _trace_absolute(m - 1, d, _insertion_pairs(norm), Rat(1),
                               "Step2a", depth)
    if norm.theory == "Relative":
        marks = _relative_marks(norm)
        rule = "Step1" if norm.tangency.fictitious else "Step3"
        return _trace_relative(m, d, tuple(marks), Rat(1), rule, depth)
    if norm.theory == "Rubber":
        pairs = _insertion_pairs(norm)
        marks = tuple(
            (norm.tangency.entries[i], a, k)
            for i, (a, k) in enumerate(pairs)
        )
        return _trace_rubber(m, d, marks, Rat(1), "Step4a", depth)
    raise ValidationError(f"unknown theory {norm.theory!r}")
