"""Core value types: exact rationals, tangency vectors, insertions,
combinatorial types of tropical maps, and invariant keys.

All types are immutable; instances may be shared freely between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction as Rat
from math import prod
from typing import Iterable, Optional

__all__ = [
    "Rat",
    "ValidationError",
    "TangencyVector",
    "Insertion",
    "Vertex",
    "Edge",
    "CombinatorialType",
    "InvariantKey",
    "THEORIES",
    "rat_to_str",
    "rat_from_str",
    "normalize_key",
    "true_tangency",
    "virtual_dimension",
    "insertion_codim",
]


class ValidationError(ValueError):
    """Raised when a value violates one of its structural invariants."""


# ---------------------------------------------------------------------------
# Rationals
# ---------------------------------------------------------------------------

def rat_to_str(r: Rat) -> str:
    """Canonical "p/q" rendering (lowest terms, q > 0); integers keep "/1"."""
    return f"{r.numerator}/{r.denominator}"


_RAT_RE = re.compile(r"^(-?\d+)/(\d+)$")


def rat_from_str(s: str) -> Rat:
    m = _RAT_RE.match(s.strip())
    if not m:
        raise ValidationError(f"malformed rational {s!r} (expected p/q)")
    num, den = int(m.group(1)), int(m.group(2))
    if den == 0:
        raise ValidationError(f"zero denominator in rational {s!r}")
    return Rat(num, den)


# ---------------------------------------------------------------------------
# Tangency vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TangencyVector:
    """Contact orders with the divisor, one entry per marking.

    ``entries[i]`` is the contact order of marking ``i`` (0-based).  Relative
    entries are nonnegative and sum to ``degree``; rubber entries are signed,
    negative meaning contact with the infinity divisor.  ``fictitious`` lists
    markings whose insertions are pulled back along forgetting them; each such
    marking must have contact order exactly 1.
    """

    entries: tuple[int, ...]
    fictitious: frozenset[int] = field(default_factory=frozenset)
    degree: int = 0

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(a) for a in self.entries))
        object.__setattr__(self, "fictitious", frozenset(self.fictitious))
        for i in self.fictitious:
            if not (0 <= i < len(self.entries)):
                raise ValidationError(f"fictitious index {i} out of range")
            if self.entries[i] != 1:
                raise ValidationError(
                    f"fictitious marking {i} has contact order "
                    f"{self.entries[i]} != 1"
                )

    @property
    def n(self) -> int:
        return len(self.entries)

    def true_tangency(self) -> int:
        return sum(a for i, a in enumerate(self.entries) if i not in self.fictitious)

    def validate_relative(self) -> None:
        if any(a < 0 for a in self.entries):
            raise ValidationError(f"negative contact order in relative vector {self.entries}")
        if sum(self.entries) != self.degree:
            raise ValidationError(
                f"relative contact orders {self.entries} sum to "
                f"{sum(self.entries)}, expected degree {self.degree}"
            )
        t = self.true_tangency()
        if not (0 <= t <= self.degree):
            raise ValidationError(f"true tangency {t} outside [0, {self.degree}]")

    def validate_rubber(self) -> None:
        # Signed entries: positive at the zero divisor, negative at infinity.
        # The excess of positive over negative contact equals the base degree.
        pos = sum(a for a in self.entries if a > 0)
        neg = sum(-a for a in self.entries if a < 0)
        if pos - neg != self.degree:
            raise ValidationError(
                f"rubber contact orders {self.entries}: positive total {pos} "
                f"minus negative total {neg} must equal base degree {self.degree}"
            )


def true_tangency(tv: TangencyVector) -> int:
    return tv.true_tangency()


# ---------------------------------------------------------------------------
# Insertions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Insertion:
    """One marking's integrand factor: ev*(H^a) . (fgt_S* psi)^k."""

    markIndex: int
    classExp: int = 0
    psiExp: int = 0
    forgetSet: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "forgetSet", frozenset(self.forgetSet))
        if self.classExp < 0 or self.psiExp < 0:
            raise ValidationError("class and psi exponents must be nonnegative")
        if self.markIndex in self.forgetSet:
            raise ValidationError(
                f"marking {self.markIndex} cannot appear in its own forget set"
            )

    def codim(self) -> int:
        return self.classExp + self.psiExp


def insertion_codim(insertions: Iterable[Insertion]) -> int:
    return sum(ins.codim() for ins in insertions)


# ---------------------------------------------------------------------------
# Combinatorial types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Vertex:
    genus: int
    degree: int
    level: int
    markings: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "markings", tuple(sorted(self.markings)))
        if self.genus not in (0, 1):
            raise ValidationError(f"vertex genus {self.genus} not in {{0,1}}")
        if self.degree < 0 or self.level < 0:
            raise ValidationError("vertex degree and level must be nonnegative")


@dataclass(frozen=True)
class Edge:
    v: int
    w: int
    slope: int

    def __post_init__(self):
        if self.slope < 0:
            raise ValidationError("edge slopes must be nonnegative")


@dataclass(frozen=True)
class CombinatorialType:
    """Decorated dual graph of a tropical map to a subdivided half-line.

    Level 0 is the ambient target; levels 1..s are expanded components.  For a
    level-0 vertex ``degree`` is the full map degree; for higher levels it is
    the base degree of the projection to the divisor.  ``legs[i]`` gives the
    vertex carrying marking ``i`` and that marking's tangency slope.
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    legs: tuple[tuple[int, int], ...]
    targetLevels: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "legs", tuple((int(v), int(m)) for v, m in self.legs))

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def total_degree(self) -> int:
        return sum(v.degree for v in self.vertices)

    def betti(self) -> int:
        return len(self.edges) - len(self.vertices) + self._num_components()

    def total_genus(self) -> int:
        return self.betti() + sum(v.genus for v in self.vertices)

    def _num_components(self) -> int:
        n = len(self.vertices)
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            a, b = find(e.v), find(e.w)
            if a != b:
                parent[a] = b
        return len({find(i) for i in range(n)})

    def flags(self, vi: int):
        """All flags at vertex ``vi`` as (slope, direction) pairs.

        direction is +1 toward infinity (higher level or a marking leg),
        -1 toward zero (lower level), 0 within the level.
        """
        out = []
        lvl = self.vertices[vi].level
        for e in self.edges:
            for a, b in ((e.v, e.w), (e.w, e.v)):
                if a == vi:
                    other = self.vertices[b].level
                    if other > lvl:
                        out.append((e.slope, +1))
                    elif other < lvl:
                        out.append((e.slope, -1))
                    else:
                        out.append((e.slope, 0))
        for mark, (v, slope) in enumerate(self.legs):
            if v == vi:
                out.append((slope, +1))
        return out

    def validate(self, genus: int, d: int) -> None:
        n = len(self.vertices)
        if n == 0:
            raise ValidationError("combinatorial type has no vertices")
        for e in self.edges:
            if not (0 <= e.v < n and 0 <= e.w < n) or e.v == e.w:
                raise ValidationError(f"edge {e} has invalid endpoints")
        for mark, (v, _) in enumerate(self.legs):
            if not (0 <= v < n):
                raise ValidationError(f"leg {mark} attached to invalid vertex {v}")
        if self._num_components() != 1:
            raise ValidationError("combinatorial type is disconnected")
        if self.total_genus() != genus:
            raise ValidationError(
                f"total genus {self.total_genus()} != expected {genus}"
            )
        if self.total_degree() != d:
            raise ValidationError(
                f"total degree {self.total_degree()} != expected {d}"
            )
        if genus == 1 and self.betti() == 0:
            if sum(1 for v in self.vertices if v.genus == 1) != 1:
                raise ValidationError("genus-one type needs a unique genus-one vertex")
        for v in self.vertices:
            if v.level > self.targetLevels:
                raise ValidationError(
                    f"vertex level {v.level} exceeds target levels {self.targetLevels}"
                )
        # Balancing and slope/level compatibility.
        for e in self.edges:
            la, lb = self.vertices[e.v].level, self.vertices[e.w].level
            if la == lb and e.slope != 0:
                raise ValidationError(f"within-level edge {e} must have slope 0")
            if la != lb and e.slope < 1:
                raise ValidationError(f"cross-level edge {e} must have slope >= 1")
        for vi, v in enumerate(self.vertices):
            fl = self.flags(vi)
            if v.level == 0:
                total = sum(s for s, direction in fl if direction == +1)
                if total != v.degree:
                    raise ValidationError(
                        f"level-0 vertex {vi}: outgoing slopes sum to {total}, "
                        f"expected degree {v.degree}"
                    )
            else:
                up = sum(s for s, direction in fl if direction == +1)
                down = sum(s for s, direction in fl if direction == -1)
                if up - down != v.degree:
                    raise ValidationError(
                        f"level-{v.level} vertex {vi}: slope excess {up - down} "
                        f"!= base degree {v.degree}"
                    )


# ---------------------------------------------------------------------------
# Invariant keys
# ---------------------------------------------------------------------------

THEORIES = ("AbsoluteAmbient", "AbsoluteDivisor", "Relative", "Rubber")


@dataclass(frozen=True)
class InvariantKey:
    """Normalized signature of one invariant.

    ``theory`` is one of ``THEORIES``; ``m`` is the ambient projective
    dimension (targets: P^m for AbsoluteAmbient/Relative, the hyperplane
    H = P^(m-1) for AbsoluteDivisor, and P(O + O(1)) over H for Rubber);
    ``genus`` is 0 or 1 (genus 1 always means the reduced theory).  There is
    exactly one Insertion per marking; for tangency-carrying theories the
    tangency vector has the same length.
    """

    theory: str
    m: int
    genus: int
    degree: int
    tangency: Optional[TangencyVector]
    insertions: tuple[Insertion, ...]

    def __post_init__(self):
        object.__setattr__(self, "insertions", tuple(self.insertions))

    @property
    def n(self) -> int:
        return len(self.insertions)

    def validate(self) -> None:
        if self.theory not in THEORIES:
            raise ValidationError(f"unknown theory {self.theory!r}")
        if self.m < 1:
            raise ValidationError(f"ambient dimension m={self.m} must be >= 1")
        if self.genus not in (0, 1):
            raise ValidationError(f"genus {self.genus} must be 0 or 1")
        if self.degree < 0:
            raise ValidationError("degree must be nonnegative")
        class_cap = self.m if self.theory == "AbsoluteAmbient" else self.m - 1
        if self.theory in ("Relative", "Rubber"):
            if self.tangency is None:
                raise ValidationError(f"{self.theory} key requires a tangency vector")
            if self.tangency.n != self.n:
                raise ValidationError(
                    f"tangency length {self.tangency.n} != marking count {self.n}"
                )
            if self.tangency.degree != self.degree:
                raise ValidationError(
                    f"tangency degree {self.tangency.degree} != key degree {self.degree}"
                )
            if self.theory == "Relative":
                self.tangency.validate_relative()
            else:
                self.tangency.validate_rubber()
        elif self.tangency is not None and any(self.tangency.entries):
            raise ValidationError(f"{self.theory} key cannot carry tangency")
        seen = set()
        for ins in self.insertions:
            if ins.markIndex in seen:
                raise ValidationError(f"duplicate insertion for marking {ins.markIndex}")
            seen.add(ins.markIndex)
            if not (0 <= ins.markIndex < self.n):
                raise ValidationError(f"marking index {ins.markIndex} out of range")
            for j in ins.forgetSet:
                if not (0 <= j < self.n):
                    raise ValidationError(f"forget-set index {j} out of range")
            if self.theory == "Relative" and self.tangency is not None:
                alpha = self.tangency.entries[ins.markIndex]
                cap = class_cap if alpha >= 1 else self.m
            else:
                cap = class_cap
            if ins.classExp > cap:
                raise ValidationError(
                    f"class exponent {ins.classExp} exceeds {cap} for marking "
                    f"{ins.markIndex} in theory {self.theory}"
                )

    # -- canonicalization --------------------------------------------------

    def _marking_sort_key(self, i: int):
        alpha = self.tangency.entries[i] if self.tangency is not None else 0
        fict = 1 if (self.tangency is not None and i in self.tangency.fictitious) else 0
        ins = self._insertion_of(i)
        return (alpha, fict, ins.classExp, ins.psiExp, len(ins.forgetSet))

    def _insertion_of(self, i: int) -> Insertion:
        for ins in self.insertions:
            if ins.markIndex == i:
                return ins
        return Insertion(markIndex=i)

    def normalized(self) -> "InvariantKey":
        self.validate()
        n = self.n
        order = sorted(range(n), key=self._marking_sort_key)
        relabel = {old: new for new, old in enumerate(order)}
        # Relabel forget sets, then break remaining ties deterministically by
        # the relabeled forget sets themselves.
        order = sorted(
            range(n),
            key=lambda i: self._marking_sort_key(i)
            + (tuple(sorted(relabel[j] for j in self._insertion_of(i).forgetSet)),),
        )
        relabel = {old: new for new, old in enumerate(order)}
        new_ins = tuple(
            Insertion(
                markIndex=relabel[old],
                classExp=self._insertion_of(old).classExp,
                psiExp=self._insertion_of(old).psiExp,
                forgetSet=frozenset(relabel[j] for j in self._insertion_of(old).forgetSet),
            )
            for old in order
        )
        tv = None
        if self.tangency is not None:
            tv = TangencyVector(
                entries=tuple(self.tangency.entries[old] for old in order),
                fictitious=frozenset(relabel[i] for i in self.tangency.fictitious),
                degree=self.tangency.degree,
            )
        return InvariantKey(
            theory=self.theory,
            m=self.m,
            genus=self.genus,
            degree=self.degree,
            tangency=tv,
            insertions=new_ins,
        )

    # -- serialization -----------------------------------------------------

    def serialize(self) -> str:
        """One-line field=value encoding, stable under normalization."""
        parts = [
            f"theory={self.theory}",
            f"m={self.m}",
            f"genus={self.genus}",
            f"degree={self.degree}",
        ]
        if self.tangency is not None:
            parts.append("alpha=" + ",".join(str(a) for a in self.tangency.entries))
            parts.append(
                "fict=" + ",".join(str(i) for i in sorted(self.tangency.fictitious))
            )
        ins_txt = []
        for i in range(self.n):
            ins = self._insertion_of(i)
            s = f"H^{ins.classExp}*psi^{ins.psiExp}"
            if ins.forgetSet:
                s += "!{" + ",".join(str(j) for j in sorted(ins.forgetSet)) + "}"
            ins_txt.append(s)
        parts.append("insertions=" + ";".join(ins_txt))
        return " ".join(parts)

    @staticmethod
    def deserialize(line: str) -> "InvariantKey":
        fields = {}
        for tok in line.strip().split(" "):
            if "=" not in tok:
                raise ValidationError(f"malformed key field {tok!r}")
            k, v = tok.split("=", 1)
            fields[k] = v
        try:
            theory = fields["theory"]
            m = int(fields["m"])
            genus = int(fields["genus"])
            degree = int(fields["degree"])
        except (KeyError, ValueError) as exc:
            raise ValidationError(f"malformed key line {line!r}: {exc}") from exc
        tv = None
        if "alpha" in fields:
            entries = tuple(
                int(a) for a in fields["alpha"].split(",") if a != ""
            )
            fict = frozenset(
                int(i) for i in fields.get("fict", "").split(",") if i != ""
            )
            tv = TangencyVector(entries=entries, fictitious=fict, degree=degree)
        insertions = []
        raw = fields.get("insertions", "")
        if raw:
            for idx, tok in enumerate(raw.split(";")):
                insertions.append(parse_insertion(tok, idx))
        key = InvariantKey(
            theory=theory, m=m, genus=genus, degree=degree,
            tangency=tv, insertions=tuple(insertions),
        )
        key.validate()
        return key


_INS_RE = re.compile(
    r"^H\^(\d+)\*psi\^(\d+)(?:!\{([\d,]*)\})?$"
)


def parse_insertion(token: str, mark_index: int) -> Insertion:
    """Parse one marking's insertion in the grammar ``H^a*psi^k!{i,j}``."""
    m = _INS_RE.match(token.strip())
    if not m:
        raise ValidationError(
            f"malformed insertion {token!r} (expected H^a*psi^k or H^a*psi^k!{{i,j}})"
        )
    a, k = int(m.group(1)), int(m.group(2))
    forget = frozenset(
        int(j) for j in (m.group(3) or "").split(",") if j != ""
    )
    return Insertion(markIndex=mark_index, classExp=a, psiExp=k, forgetSet=forget)


def normalize_key(key: InvariantKey) -> InvariantKey:
    """Canonical representative of a key: idempotent, permutation-invariant."""
    return key.normalized()


# ---------------------------------------------------------------------------
# Dimension bookkeeping
# ---------------------------------------------------------------------------

def virtual_dimension(key: InvariantKey) -> int:
    """Virtual dimension of the moduli space an invariant key integrates over.

    Genus-one spaces are the reduced (main-component) ones throughout.
    """
    m, d, g, n = key.m, key.degree, key.genus, key.n
    if key.theory == "AbsoluteAmbient":
        return (m + 1) * d + (m - 3) * (1 - g) + n
    if key.theory == "AbsoluteDivisor":
        # target H = P^(m-1)
        return m * d + (m - 4) * (1 - g) + n
    if key.theory == "Relative":
        return (m + 1) * d + (m - 3) * (1 - g) + n - d
    if key.theory == "Rubber":
        # base degree d into H = P^(m-1).  The pushforward identity for
        # forgetting a contact marking matches the rubber theory with n
        # markings to the absolute theory of the base with n - g markings
        # (the rubber target's scaling action eats one dimension in genus 1).
        return m * d + (m - 4) * (1 - g) + n - g
    raise ValidationError(f"unknown theory {key.theory!r}")
