"""Genus-zero Gromov-Witten engines for projective space and a hyperplane pair.

Three exact theories, all values returned as ``Fraction``:

* **Absolute descendants of P^m.**  Insertions are pairs ``(a, k)`` standing
  for ``psi^k ev^*(H^a)``.  Evaluation uses the string, dilaton and divisor
  equations, the genus-zero topological recursion relation to remove psi
  classes, and the first reconstruction theorem (an associativity/WDVV
  relation) for primary classes.  Degree zero reduces to integrals over
  Deligne-Mumford space.

* **Relative invariants of (P^m, H).**  Markings are triples
  ``(alpha, a, k)``: contact order ``alpha >= 0`` with the hyperplane, class
  exponent ``a`` and psi exponent ``k``.  Only *true* markings are listed;
  the remaining ``F = d - sum(alpha)`` contact points are carried by implicit
  *fictitious* markings (contact order 1, trivial insertion), so the public
  value is ``F!`` times the bare tangency invariant.  Bare keys are reduced
  by a tangency-lowering relation at a pivot marking of maximal contact
  order ``a``: the key equals ``(a-1)`` times the psi-bumped key plus the
  class-bumped key minus boundary corrections.  Each correction is a star:
  one rational piece mapping into the hyperplane that carries the pivot,
  some other markings and a base degree ``b0``, attached at ``r >= 1`` nodes
  of contact orders ``m_j >= 1`` to external relative pieces, balanced by
  ``sum(m_j) = (contact on the internal piece) - b0`` and weighted by the
  contribution factor ``prod(m_j)``.

* **Rubber invariants of P(O + O(1)) -> H.**  The genus-zero rubber theory
  coincides with the absolute theory of the base H = P^{m-1}; fibre contact
  orders enter only through balancing checks.

Normalization: a relative key with zero true tangency equals ``d!`` times
the corresponding absolute invariant (the forgetful map remembering only the
interior markings has degree ``d!``, one for each labelling of the ``d``
transverse intersection points with the hyperplane).
"""

from __future__ import annotations

import threading
from fractions import Fraction as Rat
from itertools import product
from math import comb, factorial
from typing import Iterator, Sequence

from .dm import DMKey, dm_integral
from .keys import ValidationError

__all__ = ["absolute_g0", "relative_g0", "rubber_g0"]


# ---------------------------------------------------------------------------
# Absolute descendants of P^m
# ---------------------------------------------------------------------------

_abs_memo: dict[tuple, Rat] = {}
_rel_memo: dict[tuple, Rat] = {}
_memo_lock = threading.RLock()
_IN_PROGRESS = object()


def absolute_g0(m: int, d: int, insertions: Sequence[tuple[int, int]]) -> Rat:
    """Genus-zero descendant invariant of P^m.

    ``insertions`` is a sequence of pairs ``(a, k)`` meaning
    ``psi^k ev^*(H^a)``.  Returns 0 when the total codimension misses the
    virtual dimension ``(m+1)d + m - 3 + n`` or when some class exponent
    exceeds ``m``.
    """
    if m < 1:
        raise ValidationError(f"ambient dimension m = {m} must be >= 1")
    if d < 0:
        raise ValidationError(f"degree d = {d} must be >= 0")
    ins = tuple(sorted((int(a), int(k)) for a, k in insertions))
    if any(a < 0 or k < 0 for a, k in ins):
        raise ValidationError(f"negative exponent in insertions {ins}")
    if any(a > m for a, _ in ins):
        return Rat(0)
    n = len(ins)
    vdim = (m + 1) * d + m - 3 + n
    if sum(a + k for a, k in ins) != vdim:
        return Rat(0)
    if d == 0:
        if n < 3:
            return Rat(0)
        if sum(a for a, _ in ins) != m:
            return Rat(0)
        return dm_integral(DMKey(0, n, tuple(k for _, k in ins)))
    key = (m, d, ins)
    with _memo_lock:
        cached = _abs_memo.get(key)
        if cached is _IN_PROGRESS:
            raise RuntimeError(f"recursion cycle at absolute key {key}")
        if cached is not None:
            return cached
        _abs_memo[key] = _IN_PROGRESS
    try:
        value = _abs_eval(m, d, ins)
    except BaseException:
        with _memo_lock:
            _abs_memo.pop(key, None)
        raise
    with _memo_lock:
        _abs_memo[key] = value
    return value


def _abs_eval(m: int, d: int, ins: tuple[tuple[int, int], ...]) -> Rat:
    n = len(ins)
    # string equation: a fundamental-class insertion without psi
    for i, (a, k) in enumerate(ins):
        if a == 0 and k == 0:
            rest = ins[:i] + ins[i + 1:]
            total = Rat(0)
            for j, (aj, kj) in enumerate(rest):
                if kj >= 1:
                    lowered = rest[:j] + ((aj, kj - 1),) + rest[j + 1:]
                    total += absolute_g0(m, d, lowered)
            return total
    # dilaton equation
    for i, (a, k) in enumerate(ins):
        if a == 0 and k == 1:
            rest = ins[:i] + ins[i + 1:]
            return (n - 3) * absolute_g0(m, d, rest)
    # divisor equation (with descendant corrections)
    for i, (a, k) in enumerate(ins):
        if a == 1 and k == 0:
            rest = ins[:i] + ins[i + 1:]
            total = d * absolute_g0(m, d, rest)
            for j, (aj, kj) in enumerate(rest):
                if kj >= 1:
                    bumped = rest[:j] + ((aj + 1, kj - 1),) + rest[j + 1:]
                    total += absolute_g0(m, d, bumped)
            return total
    if any(k >= 1 for _, k in ins):
        if n >= 3:
            return _trr(m, d, ins)
        return _pad_descendant(m, d, ins)
    # primary classes with a >= 2 throughout
    if n >= 3:
        return _wdvv(m, d, ins)
    if n == 2:
        # dimension forces a = b = m and d = 1: the line through two points
        return Rat(1)
    # n = 0 is only dimension-correct for m = 1: the parametrized P^1;
    # n = 1 is never dimension-correct for d >= 1
    return Rat(1) if n == 0 and d == 1 and (m + 1) * d + m - 3 == 0 else Rat(0)


def _index_subsets(indices: Sequence[int]) -> Iterator[tuple[int, ...]]:
    k = len(indices)
    for mask in range(1 << k):
        yield tuple(indices[i] for i in range(k) if mask >> i & 1)


def _trr(m: int, d: int, ins: tuple[tuple[int, int], ...]) -> Rat:
    """Genus-zero topological recursion relation at the marking of largest
    psi exponent, splitting off two reference markings."""
    p = max(range(len(ins)), key=lambda i: (ins[i][1], ins[i][0], i))
    a1, k1 = ins[p]
    others = [i for i in range(len(ins)) if i != p]
    q, r = others[-2], others[-1]  # ins is sorted; take the two largest
    X = [i for i in others if i not in (q, r)]
    total = Rat(0)
    for S in _index_subsets(X):
        Sc = tuple(i for i in X if i not in S)
        left_base = ((a1, k1 - 1),) + tuple(ins[i] for i in S)
        right_base = (ins[q], ins[r]) + tuple(ins[i] for i in Sc)
        for d1 in range(d + 1):
            d2 = d - d1
            for e in range(m + 1):
                left = absolute_g0(m, d1, left_base + ((e, 0),))
                if left == 0:
                    continue
                right = absolute_g0(m, d2, ((m - e, 0),) + right_base)
                total += left * right
    return total


def _pad_descendant(m: int, d: int, ins: tuple[tuple[int, int], ...]) -> Rat:
    """Inverse divisor equation for descendant keys with fewer than three
    markings: solve <H, ins> = d <ins> + corrections for <ins>, evaluating
    the padded invariant by the recursion relation directly (never by
    re-stripping the divisor we just added)."""
    padded = tuple(sorted(ins + ((1, 0),)))
    if len(padded) >= 3:
        top = _trr(m, d, padded)
    else:
        top = _pad_descendant(m, d, padded)
    corr = Rat(0)
    for j, (aj, kj) in enumerate(ins):
        if kj >= 1:
            bumped = ins[:j] + ((aj + 1, kj - 1),) + ins[j + 1:]
            corr += absolute_g0(m, d, bumped)
    return (top - corr) / d


def _wdvv(m: int, d: int, ins: tuple[tuple[int, int], ...]) -> Rat:
    """First reconstruction: split the primary class of minimal exponent
    >= 2 as H * H^(a-1) and apply the associativity relation with the two
    largest remaining classes as reference insertions.  The target invariant
    appears exactly once (degree zero, empty distribution) and every other
    term is of strictly smaller degree, or has fewer markings, or increases
    the sum of squared exponents (bounded above), so the recursion
    terminates."""
    pivots = [i for i, (a, _) in enumerate(ins) if a >= 2]
    if not pivots:
        # impossible for a dimension-correct primary key of positive degree
        raise RuntimeError(f"no pivot class in primary key {(m, d, ins)}")
    p = pivots[0]
    a = ins[p][0]
    others = [i for i in range(len(ins)) if i != p]
    others.sort(key=lambda i: ins[i][0])
    g3, g4 = others[-1], others[-2]
    c3, c4 = ins[g3][0], ins[g4][0]
    X = [i for i in others if i not in (g3, g4)]
    total = Rat(0)
    for S in _index_subsets(X):
        Sc = tuple(i for i in X if i not in S)
        S_cls = tuple((ins[i][0], 0) for i in S)
        Sc_cls = tuple((ins[i][0], 0) for i in Sc)
        for d1 in range(d + 1):
            d2 = d - d1
            for e in range(m + 1):
                # right-hand side of the associativity relation: + terms
                lf = absolute_g0(m, d1, ((1, 0), (c3, 0)) + S_cls + ((e, 0),))
                if lf != 0:
                    rf = absolute_g0(
                        m, d2, ((m - e, 0), (a - 1, 0), (c4, 0)) + Sc_cls
                    )
                    total += lf * rf
                # left-hand side: - terms, except the copy of the target
                if d1 == 0 and not S and e == m - a:
                    continue
                lf = absolute_g0(m, d1, ((1, 0), (a - 1, 0)) + S_cls + ((e, 0),))
                if lf != 0:
                    rf = absolute_g0(
                        m, d2, ((m - e, 0), (c3, 0), (c4, 0)) + Sc_cls
                    )
                    total -= lf * rf
    return total


# ---------------------------------------------------------------------------
# Rubber invariants of P(O + O(1)) -> H
# ---------------------------------------------------------------------------

def rubber_g0(
    m: int,
    baseDegree: int,
    orders: Sequence[int],
    insertions: Sequence[tuple[int, int]],
) -> Rat:
    """Genus-zero rubber invariant of the projective bundle over H = P^{m-1}.

    ``orders`` are the signed fibre contact orders (positive at the infinity
    divisor, negative at the zero divisor); they must balance against the
    base degree.  The invariant equals the absolute genus-zero invariant of
    the base with the same insertions.
    """
    if m < 2:
        raise ValidationError(f"rubber geometry needs m >= 2, got {m}")
    if baseDegree < 0:
        raise ValidationError(f"base degree {baseDegree} must be >= 0")
    orders = tuple(int(x) for x in orders)
    if sum(orders) != baseDegree:
        raise ValidationError(
            f"fibre orders {orders} do not balance base degree {baseDegree}"
        )
    if len(orders) != len(insertions):
        raise ValidationError("orders and insertions differ in length")
    return absolute_g0(m - 1, baseDegree, insertions)




# ---------------------------------------------------------------------------
# Relative invariants of (P^m, H)
# ---------------------------------------------------------------------------

def relative_g0(
    m: int, d: int, markings: Sequence[tuple[int, int, int]]
) -> Rat:
    """Genus-zero relative invariant of (P^m, H), fully-marked convention.

    ``markings`` lists the true markings as triples ``(alpha, a, k)``:
    contact order, class exponent, psi exponent.  The ``F = d - sum(alpha)``
    remaining contact points are carried by implicit fictitious markings
    (contact order 1, trivial insertion); forgetting them one at a time has
    degrees ``F, F-1, ..., 1``, so the fully-marked value equals ``F!`` times
    the invariant of the bare tangency key.  Classes on contact markings live
    on the hyperplane, so ``a >= m`` there gives 0; interior markings admit
    ``a <= m``.
    """
    if m < 2:
        raise ValidationError(f"relative geometry needs m >= 2, got {m}")
    if d < 0:
        raise ValidationError(f"degree d = {d} must be >= 0")
    marks = tuple(sorted((int(al), int(e), int(k)) for al, e, k in markings))
    if any(al < 0 or e < 0 or k < 0 for al, e, k in marks):
        raise ValidationError(f"negative entry in markings {marks}")
    t = sum(al for al, _, _ in marks)
    if t > d:
        raise ValidationError(f"true tangency {t} exceeds degree {d}")
    if any(al >= 1 and e > m - 1 for al, e, _ in marks):
        return Rat(0)
    if any(e > m for _, e, _ in marks):
        return Rat(0)
    fict = d - t
    n_tot = len(marks) + fict
    vdim = (m + 1) * d + m - 3 + n_tot - d
    if sum(e + k for _, e, k in marks) != vdim:
        return Rat(0)
    if d == 0:
        return absolute_g0(m, 0, tuple((e, k) for _, e, k in marks))
    return factorial(fict) * _tangency(m, d, marks)


def _tangency(
    m: int, d: int, marks: tuple[tuple[int, int, int], ...]
) -> Rat:
    """Bare tangency invariant: markings as listed, no fictitious completion.

    Contact orders satisfy ``sum(alpha) <= d``; a key with all orders zero is
    the absolute descendant invariant.  Keys are reduced by a tangency-
    lowering relation at a pivot marking x of maximal contact order a:

        [key] = (a-1) [pivot psi bumped] + [pivot class bumped] - D,

    where D collects the boundary configurations in which x lies on a piece
    mapping into the hyperplane (evaluated through ``_correction_terms``).
    """
    t = sum(al for al, _, _ in marks)
    if t == 0:
        return absolute_g0(m, d, tuple((e, k) for _, e, k in marks))
    key = (m, d, marks)
    with _memo_lock:
        cached = _rel_memo.get(key)
        if cached is _IN_PROGRESS:
            raise RuntimeError(f"recursion cycle at tangency key {key}")
        if cached is not None:
            return cached
        _rel_memo[key] = _IN_PROGRESS
    try:
        # pivot: true marking of maximal contact order (marks is sorted, so
        # the last maximal entry is deterministic and relabelling-invariant)
        p = max(range(len(marks)), key=lambda i: (marks[i][0], i))
        a, e1, k1 = marks[p]
        value = Rat(0)
        if a >= 2:
            value += (a - 1) * _tangency(
                m, d, marks[:p] + ((a - 1, e1, k1 + 1),) + marks[p + 1:]
            )
        value += _tangency(
            m, d, marks[:p] + ((a - 1, e1 + 1, k1),) + marks[p + 1:]
        )
        value -= _correction_terms(
            m, d, marks[:p] + ((a - 1, e1, k1),) + marks[p + 1:], p
        )
    except BaseException:
        with _memo_lock:
            _rel_memo.pop(key, None)
        raise
    with _memo_lock:
        _rel_memo[key] = value
    return value


def _compositions(total: int, r: int, mins: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Ordered compositions of ``total`` into ``r`` parts, part j >= mins[j]."""
    if r == 0:
        if total == 0:
            yield ()
        return
    rest_min = sum(mins[1:])
    for first in range(mins[0], total - rest_min + 1):
        for rest in _compositions(total - first, r - 1, mins[1:]):
            yield (first,) + rest


def _piece_multisets(
    types: Sequence[tuple[tuple[int, int, int], int]],
    counts: tuple[int, ...],
    d_left: int,
    m_left: int,
    min_sig: tuple,
) -> Iterator[tuple[list, int]]:
    """Nondecreasing multisets of boundary pieces.

    Each piece is ``(cnt_vec, dj, mj)``: how many markings of each type it
    carries, its degree ``dj >= 1`` and its node contact order ``mj >= 1``.
    Pieces are emitted in nondecreasing signature order so each multiset
    appears once; the integer is the product of binomial factors counting
    distributions of identical markings (symmetry of equal signatures is
    divided out by the caller).  All remaining markings, degree and node
    order must be used up.
    """
    if d_left == 0:
        if m_left == 0 and all(c == 0 for c in counts):
            yield [], 1
        return
    if m_left == 0:
        return
    for cnt_vec in product(*(range(c + 1) for c in counts)):
        al_grp = sum(types[i][0][0] * cnt_vec[i] for i in range(len(types)))
        for dj in range(1, d_left + 1):
            for mj in range(1, min(m_left, dj - al_grp) + 1):
                sig = (cnt_vec, dj, mj)
                if sig < min_sig:
                    continue
                ways = 1
                for i, c in enumerate(cnt_vec):
                    ways *= comb(counts[i], c)
                if ways == 0:
                    continue
                new_counts = tuple(
                    counts[i] - cnt_vec[i] for i in range(len(counts))
                )
                for rest, w in _piece_multisets(
                    types, new_counts, d_left - dj, m_left - mj, sig
                ):
                    yield [sig] + rest, ways * w


def _correction_terms(m, d, vmarks, p) -> Rat:
    """Boundary corrections of the tangency-lowering relation.

    ``vmarks`` are the markings of the lowered key (pivot at index ``p``).
    Each configuration has one *internal* rational piece mapping into the
    hyperplane that carries the pivot, a subset of the other markings and a
    base degree ``b0 >= 0``; it meets ``r >= 1`` *external* relative pieces
    at nodes of contact orders ``m_1, ..., m_r >= 1`` balancing
    ``sum(m_j) = b0 + (contact orders on the internal piece)``.  The term is
    weighted by the contribution factor ``prod(m_j)`` and evaluated by
    splitting the diagonal of H across each node; the internal piece is a
    genus-zero invariant of H = P^{m-1} and each external piece a tangency
    invariant of lower rank.  Unordered identical external pieces are
    counted once.
    """
    pivot = vmarks[p]
    others = sorted(vmarks[i] for i in range(len(vmarks)) if i != p)
    types: list[tuple[tuple[int, int, int], int]] = []
    for mk in others:
        if types and types[-1][0] == mk:
            types[-1] = (mk, types[-1][1] + 1)
        else:
            types.append((mk, 1))
    total = Rat(0)
    for int_take in product(*(range(c + 1) for _, c in types)):
        choose_int = 1
        for (mk, c), take in zip(types, int_take):
            choose_int *= comb(c, take)
        internal = [pivot] + [
            mk for (mk, _), take in zip(types, int_take) for _ in range(take)
        ]
        alpha_int = sum(mk[0] for mk in internal)
        rest_counts = tuple(c - take for (_, c), take in zip(types, int_take))
        for b0 in range(0, d):
            S = alpha_int - b0
            d_ext = d - b0
            if S < 1 or d_ext < S:
                continue
            for pieces, ways in _piece_multisets(
                types, rest_counts, d_ext, S, ()
            ):
                r = len(pieces)
                if b0 == 0 and len(internal) + r < 3:
                    continue
                sym = 1
                run = 1
                for j in range(1, r + 1):
                    if j < r and pieces[j] == pieces[j - 1]:
                        run += 1
                    else:
                        sym *= factorial(run)
                        run = 1
                coef = Rat(choose_int * ways, sym)
                for _, _, mj in pieces:
                    coef *= mj
                for evec in product(range(m), repeat=r):
                    ins_int = tuple((e, k) for _, e, k in internal) + tuple(
                        (m - 1 - evec[j], 0) for j in range(r)
                    )
                    f = coef * absolute_g0(m - 1, b0, ins_int)
                    if f == 0:
                        continue
                    for j, (cnt_vec, dj, mj) in enumerate(pieces):
                        grp = tuple(
                            mk
                            for (mk, _), c in zip(types, cnt_vec)
                            for _ in range(c)
                        )
                        f *= _tangency(
                            m, dj,
                            tuple(sorted(grp + ((mj, evec[j], 0),))),
                        )
                        if f == 0:
                            break
                    total += f
    return total
