"""Cofinite-certified evaluation over rule-generated sequences of finite structures.

A nonprincipal ultrafilter is never constructed; instead, verdicts are issued
exactly on the fragment every nonprincipal ultrafilter must agree on: truth
sets certified cofinite (or co-cofinite) by analyzing the tail rules. The
three-valued outcome keeps an honest Undecided for everything else.

Factor sequences are an explicit prefix plus a total tail rule; elements of
the would-be product are coordinate rules. Chain-generated sequences embed
into each other by inclusion, which powers most certificates: existential
sentences persist upward along embeddings, and quantifier-free facts about
floor-affine coordinates are eventually periodic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil
from typing import Callable, Iterable, Mapping, Sequence

from . import trees
from .arrows import arrow_check
from .formulas import (And, ColorEq, Eq, Exists, ExistsCopy, Formula, Not, Or,
                       Rel, free_variables, qf_eval, uses_color_atoms)
from .structures import (FinStructure, Signature, are_isomorphic, chain,
                         embeds, enumerate_copies, structure_from_code)


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class FrechetVerdict:
    """Outcome of evaluating a property along a sequence.

    tag "holds": true at every index >= threshold, certified to stay true;
    tag "fails": false likewise; tag "undecided": only the checked bitmap is
    known. The bitmap always records per-index truth up to the horizon.
    """

    tag: str  # "holds" | "fails" | "undecided"
    threshold: int | None
    bitmap: tuple[bool, ...]

    def __post_init__(self):
        if self.tag not in ("holds", "fails", "undecided"):
            raise ValueError(f"bad tag {self.tag!r}")
        if self.tag != "undecided":
            if self.threshold is None or not (0 <= self.threshold <= len(self.bitmap)):
                raise ValueError("threshold must lie within the checked horizon")

    @property
    def decided(self) -> bool:
        return self.tag != "undecided"

    @property
    def holds(self) -> bool:
        return self.tag == "holds"

    def negate(self) -> "FrechetVerdict":
        flipped = tuple(not b for b in self.bitmap)
        if self.tag == "holds":
            return FrechetVerdict("fails", self.threshold, flipped)
        if self.tag == "fails":
            return FrechetVerdict("holds", self.threshold, flipped)
        return FrechetVerdict("undecided", None, flipped)


def _holds_from(bitmap: Sequence[bool]) -> int:
    """First index from which the bitmap is all true."""
    idx = len(bitmap)
    for t in range(len(bitmap) - 1, -1, -1):
        if not bitmap[t]:
            break
        idx = t
    return idx


def _verdict(tag: str, bitmap: Sequence[bool]) -> FrechetVerdict:
    bm = tuple(bitmap)
    if tag == "holds":
        return FrechetVerdict("holds", _holds_from(bm), bm)
    if tag == "fails":
        return FrechetVerdict("fails", _holds_from([not b for b in bm]), bm)
    return FrechetVerdict("undecided", None, bm)


# ---------------------------------------------------------------------------
# Coordinate rules (elements of the product)


@dataclass(frozen=True)
class _FloorAffine:
    """t -> floor((p*t + q) / r), before clamping into the factor."""

    p: Fraction
    q: Fraction

    def at(self, t: int) -> int:
        return (self.p * t + self.q).__floor__()


@dataclass(frozen=True)
class UltraElement:
    """A coordinate rule a[t], total on every factor.

    kinds: "const" (index i, clamped to the factor), "min", "max",
    "scaled" (floor(p*t/q), clamped), "custom" (explicit callable).
    Explicit prefix values override the rule at small t.
    """

    kind: str
    const: int = 0
    num: int = 0
    den: int = 1
    prefix: tuple[int, ...] = ()
    fn: Callable[[int, int], int] | None = field(default=None, compare=False)

    @classmethod
    def const_index(cls, i: int, prefix: Sequence[int] = ()) -> "UltraElement":
        if i < 0:
            raise ValueError("index must be >= 0")
        return cls("const", const=i, prefix=tuple(prefix))

    @classmethod
    def minimum(cls) -> "UltraElement":
        return cls("min")

    @classmethod
    def maximum(cls) -> "UltraElement":
        return cls("max")

    @classmethod
    def scaled(cls, num: int, den: int, prefix: Sequence[int] = ()) -> "UltraElement":
        if den <= 0 or num < 0:
            raise ValueError("scaled rule needs num >= 0, den > 0")
        return cls("scaled", num=num, den=den, prefix=tuple(prefix))

    @classmethod
    def custom(cls, fn: Callable[[int, int], int]) -> "UltraElement":
        return cls("custom", fn=fn)

    def value_at(self, t: int, size: int) -> int:
        if t < len(self.prefix):
            v = self.prefix[t]
        elif self.kind == "const":
            v = min(self.const, size - 1)
        elif self.kind == "min":
            v = 0
        elif self.kind == "max":
            v = size - 1
        elif self.kind == "scaled":
            v = min(self.num * t // self.den, size - 1)
        elif self.kind == "custom":
            v = self.fn(t, size)
        else:
            raise ValueError(f"unknown element kind {self.kind!r}")
        if not (0 <= v < size):
            raise IndexError(f"coordinate {v} outside universe of size {size} at t={t}")
        return v

    def _symbolic(self, growth: "_FloorAffine") -> tuple[_FloorAffine, int] | None:
        """Eventual floor-affine form and the index it is valid from.

        `growth` is the factor-size function; clamping against it is folded
        in when it resolves to one side eventually.
        """
        base = len(self.prefix)
        if self.kind == "min":
            return _FloorAffine(Fraction(0), Fraction(0)), base
        if self.kind == "max":
            return _FloorAffine(growth.p, growth.q - 1), base
        if self.kind == "const":
            # Unclamped once sizes pass the index.
            if growth.p > 0:
                start = max(base, _first_t_at_least(growth, self.const + 1))
                return _FloorAffine(Fraction(0), Fraction(self.const)), start
            if growth.p == 0 and growth.q.__floor__() > self.const:
                return _FloorAffine(Fraction(0), Fraction(self.const)), base
            return _FloorAffine(growth.p, growth.q - 1), base  # pinned at max
        if self.kind == "scaled":
            slope = Fraction(self.num, self.den)
            if slope < growth.p:
                # floor(slope t) <= size-1 once (growth.p - slope) t >= 1 - growth.q
                start = max(base, _first_t_at_least(
                    _FloorAffine(growth.p - slope, growth.q), 1))
                return _FloorAffine(slope, Fraction(0)), start
            if slope > growth.p:
                start = max(base, _first_t_at_least(
                    _FloorAffine(slope - growth.p, 1 - growth.q), 0) + 1)
                return _FloorAffine(growth.p, growth.q - 1), start
            # Equal slopes: floor(slope t) vs floor(slope t + q - 1): constant
            # offset comparison, settled by periodic inspection later.
            if growth.q - 1 >= 0:
                return _FloorAffine(slope, Fraction(0)), base
            return _FloorAffine(growth.p, growth.q - 1), base
        return None


def _first_t_at_least(f: _FloorAffine, bound: int) -> int:
    """Least t >= 0 with f.at(t) >= bound, for nondecreasing f; 0 if immediate."""
    if f.at(0) >= bound:
        return 0
    if f.p <= 0:
        raise ValueError("no such index for a non-increasing form")
    t = int(ceil((bound - f.q) / f.p))
    while f.at(t) < bound:
        t += 1
    while t > 0 and f.at(t - 1) >= bound:
        t -= 1
    return t


# ---------------------------------------------------------------------------
# Sequence rules


class SequenceRule:
    """Tail rule of a structure sequence. Subclasses may certify properties."""

    def factor(self, t: int) -> FinStructure:
        raise NotImplementedError

    # Certificates; None/False means "cannot certify", never "false".
    def chain_embedding_from(self) -> int | None:
        return None

    def inclusion_embeddings(self) -> bool:
        return False

    def size_monotone(self) -> bool:
        return False

    def size_unbounded(self) -> bool:
        return False

    def growth(self) -> _FloorAffine | None:
        return None

    def eventually_embeds(self, A: FinStructure, offset: int) -> int | None:
        """Index from which A embeds into every factor, or None."""
        return None

    def never_embeds(self, A: FinStructure) -> bool:
        return False

    def saturation_index(self, n_vars: int, offset: int) -> int | None:
        """Index tau: any existential sentence with <= n_vars variables that
        holds at some factor >= offset already holds at factor tau."""
        return None


@dataclass(frozen=True)
class ChainRule(SequenceRule):
    """Linear orders of affine size a*t + b."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 1 or (self.a == 0 and self.b < 1):
            raise ValueError("chain sizes must be positive")

    def size(self, t: int) -> int:
        return self.a * t + self.b

    def factor(self, t: int) -> FinStructure:
        return chain(self.size(t))

    def chain_embedding_from(self) -> int | None:
        return 0

    def inclusion_embeddings(self) -> bool:
        return True

    def size_monotone(self) -> bool:
        return True

    def size_unbounded(self) -> bool:
        return self.a > 0

    def growth(self) -> _FloorAffine:
        return _FloorAffine(Fraction(self.a), Fraction(self.b))

    def eventually_embeds(self, A: FinStructure, offset: int) -> int | None:
        if not are_isomorphic(A, chain(A.size)):
            return None
        if self.a == 0:
            return offset if self.b >= A.size else None
        return max(offset, _first_t_at_least(self.growth(), A.size))

    def never_embeds(self, A: FinStructure) -> bool:
        return not are_isomorphic(A, chain(A.size))

    def saturation_index(self, n_vars: int, offset: int) -> int | None:
        if self.a == 0:
            return offset if self.b >= n_vars else None
        return max(offset, _first_t_at_least(self.growth(), max(n_vars, 1)))


@dataclass(frozen=True)
class CofinalChainRule(SequenceRule):
    """Tail follows a cofinal embedding chain over an enumerated age.

    members[t - offset] is the factor (the chain is frozen at construction);
    class_unbounded asserts the enumerated age has members of unbounded size.
    """

    members: tuple[FinStructure, ...]
    enumeration: tuple[FinStructure, ...]
    offset: int = 0
    class_unbounded: bool = True

    @classmethod
    def build(cls, age_enumeration: Sequence[FinStructure], length: int,
              offset: int = 0, class_unbounded: bool = True) -> "CofinalChainRule":
        from .structures import cofinal_chain

        return cls(tuple(cofinal_chain(age_enumeration, length)),
                   tuple(age_enumeration), offset, class_unbounded)

    def factor(self, t: int) -> FinStructure:
        i = t - self.offset
        if i < 0:
            raise IndexError("cofinal rule queried before its offset")
        return self.members[min(i, len(self.members) - 1)]

    def chain_embedding_from(self) -> int | None:
        return self.offset

    def size_monotone(self) -> bool:
        return True

    def size_unbounded(self) -> bool:
        return self.class_unbounded

    def eventually_embeds(self, A: FinStructure, offset: int) -> int | None:
        for r, member in enumerate(self.enumeration):
            if are_isomorphic(A, member):
                if r + 1 < len(self.members):
                    return max(offset, self.offset + r + 1)
                break
        for i, member in enumerate(self.members):
            if embeds(A, member):
                return max(offset, self.offset + i)
        return None

    def never_embeds(self, A: FinStructure) -> bool:
        if any(are_isomorphic(A, m) for m in self.enumeration):
            return False
        # Sound only when the enumeration covers the whole age; the cofinal
        # chain constructor works from such enumerations.
        return all(not embeds(A, m) for m in self.members)

    def saturation_index(self, n_vars: int, offset: int) -> int | None:
        idxs = [r for r, m in enumerate(self.enumeration) if m.size <= n_vars]
        if not idxs:
            return None
        r = max(idxs) + 1
        if r >= len(self.members):
            return None
        return max(offset, self.offset + r)


@dataclass(frozen=True)
class CustomRule(SequenceRule):
    fn: Callable[[int], FinStructure] = field(compare=False)

    def factor(self, t: int) -> FinStructure:
        return self.fn(t)


@dataclass(frozen=True)
class StructureSequence:
    """Explicit prefix followed by a total tail rule, one shared signature."""

    signature: Signature
    prefix: tuple[FinStructure, ...]
    rule: SequenceRule

    def __post_init__(self):
        for s in self.prefix:
            if s.signature != self.signature:
                raise ValueError("prefix factor signature mismatch")

    @classmethod
    def chains(cls, a: int = 1, b: int = 1,
               prefix: Sequence[FinStructure] = ()) -> "StructureSequence":
        from .structures import SIG_ORDER

        return cls(SIG_ORDER, tuple(prefix), ChainRule(a, b))

    @property
    def prefix_len(self) -> int:
        return len(self.prefix)

    def factor(self, t: int) -> FinStructure:
        if t < 0:
            raise IndexError("negative index")
        if t < len(self.prefix):
            return self.prefix[t]
        out = self.rule.factor(t)
        if out.signature != self.signature:
            raise ValueError("tail rule produced a factor with the wrong signature")
        return out


# ---------------------------------------------------------------------------
# Projection and evaluation


def project_copy(elements: Sequence[UltraElement], seq: StructureSequence,
                 t: int) -> tuple[int, ...]:
    """Coordinatewise image of the element tuple at index t, as a subset."""
    size = seq.factor(t).size
    return tuple(sorted({e.value_at(t, size) for e in elements}))


def _bitmap(seq: StructureSequence, phi: Formula,
            elements: Sequence[UltraElement], horizon: int) -> tuple[bool, ...]:
    out = []
    for t in range(horizon):
        M = seq.factor(t)
        assignment = {i: e.value_at(t, M.size) for i, e in enumerate(elements)}
        out.append(qf_eval(M, phi, assignment))
    return tuple(out)


def _is_quantifier_free(phi: Formula) -> bool:
    if isinstance(phi, (Rel, Eq)):
        return True
    if isinstance(phi, ColorEq):
        return False
    if isinstance(phi, Not):
        return _is_quantifier_free(phi.body)
    if isinstance(phi, (And, Or)):
        return all(_is_quantifier_free(p) for p in phi.parts)
    return False


def _count_vars(phi: Formula) -> int:
    """Upper bound on the substructure size needed to witness phi."""
    if isinstance(phi, Exists):
        return len(phi.variables) + _count_vars(phi.body)
    if isinstance(phi, ExistsCopy):
        return phi.pattern.size
    if isinstance(phi, Not):
        return _count_vars(phi.body)
    if isinstance(phi, (And, Or)):
        return sum(_count_vars(p) for p in phi.parts)
    return 0


def _is_existential_sentence(phi: Formula) -> bool:
    """Exists-rooted with negations only over quantifier-free subformulas,
    so truth is preserved upward along embeddings."""

    def positive(p: Formula) -> bool:
        if isinstance(p, (Rel, Eq)):
            return True
        if isinstance(p, Not):
            return _is_quantifier_free(p.body)
        if isinstance(p, (And, Or)):
            return all(positive(x) for x in p.parts)
        if isinstance(p, Exists):
            return positive(p.body)
        if isinstance(p, ExistsCopy):
            return True
        return False

    if isinstance(phi, ExistsCopy):
        return True
    return isinstance(phi, Exists) and positive(phi.body)


def los_eval(seq: StructureSequence, phi: Formula,
             elements: Sequence[UltraElement] = (), horizon: int = 50) -> FrechetVerdict:
    """Evaluate phi coordinatewise and certify a cofinite verdict when possible.

    Holds/Fails are issued only when the tail rule forces eventual constancy:
    existential sentences along embedding-increasing chains (with a
    saturation bound for the negative side), and quantifier-free formulas
    whose coordinate atoms are eventually periodic floor-affine comparisons.
    Anything else is reported Undecided with the checked bitmap.
    """
    if horizon < seq.prefix_len:
        raise ValueError("horizon must cover the explicit prefix")
    fv = sorted(free_variables(phi))
    if fv and (min(fv) < 0 or max(fv) >= len(elements)):
        raise ValueError("free variables must be covered by the element tuple")
    if uses_color_atoms(phi):
        raise ValueError("color atoms are not los-evaluable; use the transfer report")
    bitmap = _bitmap(seq, phi, elements, horizon)
    tag = _decide(seq, phi, elements, horizon, bitmap)
    return _verdict(tag, bitmap)


def _decide(seq: StructureSequence, phi: Formula,
            elements: Sequence[UltraElement], horizon: int,
            bitmap: tuple[bool, ...]) -> str:
    if isinstance(phi, Not):
        inner = _decide(seq, phi.body, elements, horizon,
                        tuple(not b for b in bitmap))
        if inner == "holds":
            return "fails"
        if inner == "fails":
            return "holds"
        return "undecided"
    if isinstance(phi, (And, Or)):
        sub = [
            _decide(seq, p, elements, horizon, _bitmap(seq, p, elements, horizon))
            for p in phi.parts
        ]
        good, bad = ("holds", "fails") if isinstance(phi, And) else ("fails", "holds")
        if all(s == good for s in sub):
            return good
        if any(s == bad for s in sub):
            return bad
        return "undecided"
    if _is_existential_sentence(phi) and not free_variables(phi):
        return _decide_existential(seq, phi, horizon, bitmap)
    if _is_quantifier_free(phi):
        return _decide_quantifier_free(seq, phi, elements, horizon, bitmap)
    return "undecided"


def _decide_existential(seq: StructureSequence, phi: Formula, horizon: int,
                        bitmap: tuple[bool, ...]) -> str:
    base = seq.prefix_len
    tail_start = seq.rule.chain_embedding_from()
    if tail_start is None:
        return "undecided"
    tail_start = max(tail_start, base)
    if tail_start >= horizon:
        return "undecided"
    if isinstance(phi, ExistsCopy):
        emb = seq.rule.eventually_embeds(phi.pattern, tail_start)
        if emb is not None and emb < horizon:
            assert all(bitmap[emb:]), "embedding certificate contradicts the bitmap"
            return "holds"
        if seq.rule.never_embeds(phi.pattern):
            assert not any(bitmap[tail_start:]), \
                "non-embedding certificate contradicts the bitmap"
            return "fails"
        n_vars = phi.pattern.size
    else:
        n_vars = _count_vars(phi)
    # Existential sentences persist upward along the embedding chain.
    if any(bitmap[tail_start:]):
        return "holds"
    sat = seq.rule.saturation_index(n_vars, tail_start)
    if sat is not None and sat < horizon and not bitmap[sat]:
        assert not any(bitmap[tail_start:]), \
            "saturation certificate contradicts the bitmap"
        return "fails"
    return "undecided"


_REL_ORDER = {"lt": "lt"}


def _decide_quantifier_free(seq: StructureSequence, phi: Formula,
                            elements: Sequence[UltraElement], horizon: int,
                            bitmap: tuple[bool, ...]) -> str:
    growth = seq.rule.growth()
    if growth is None:
        return "undecided"
    base = seq.prefix_len
    forms: list[tuple[_FloorAffine, int]] = []
    for e in elements:
        f = e._symbolic(growth)
        if f is None:
            return "undecided"
        forms.append(f)

    def eventual(p: Formula) -> tuple[bool, int] | None:
        if isinstance(p, Not):
            inner = eventual(p.body)
            return None if inner is None else (not inner[0], inner[1])
        if isinstance(p, (And, Or)):
            vals = []
            start = base
            for q in p.parts:
                got = eventual(q)
                if got is None:
                    return None
                vals.append(got[0])
                start = max(start, got[1])
            value = all(vals) if isinstance(p, And) else any(vals)
            return value, start
        if isinstance(p, Eq):
            return _compare(forms[p.left], forms[p.right], "eq", base)
        if isinstance(p, Rel) and len(p.args) == 2 and p.name in _REL_ORDER:
            return _compare(forms[p.args[0]], forms[p.args[1]], "lt", base)
        if isinstance(p, Rel):
            # Relation atoms other than the chain order: sample one period.
            return None
        return None

    got = eventual(phi)
    if got is None:
        return "undecided"
    value, start = got
    if start >= horizon:
        return "undecided"
    mismatch = [t for t in range(start, horizon) if bitmap[t] != value]
    assert not mismatch, f"periodic certificate contradicts bitmap at {mismatch[:3]}"
    return "holds" if value else "fails"


def _compare(fa: tuple[_FloorAffine, int], fb: tuple[_FloorAffine, int],
             rel: str, base: int) -> tuple[bool, int] | None:
    """Eventual truth of a floor-affine comparison, with its start index."""
    (f, sf), (g, sg) = fa, fb
    start = max(base, sf, sg)
    if f.p != g.p:
        lo, hi = (f, g) if f.p < g.p else (g, f)
        # Once the real gap reaches 2 the floors compare strictly, forever.
        t0 = max(start, _first_t_at_least(_FloorAffine(hi.p - lo.p, hi.q - lo.q), 2))
        if rel == "eq":
            return False, t0
        return f.p < g.p, t0
    # Equal slopes: f.at - g.at repeats with period the slope denominator
    # (adding the denominator shifts both floors by the same integer), so a
    # constant pattern over one period persists forever.
    period = f.p.denominator
    probes = range(start, start + period)
    if rel == "eq":
        vals = [f.at(t) == g.at(t) for t in probes]
    else:
        vals = [f.at(t) < g.at(t) for t in probes]
    if all(vals):
        return True, start
    if not any(vals):
        return False, start
    return None


# ---------------------------------------------------------------------------
# Derived checks


def copy_defined(A: FinStructure, elements: Sequence[UltraElement],
                 seq: StructureSequence, horizon: int = 50) -> FrechetVerdict:
    """Verdict for "the projected tuple induces a copy of A at index t"."""
    from .formulas import theta_formula

    if len(elements) != A.size:
        raise ValueError("need one element per point of the pattern")
    return los_eval(seq, theta_formula(A), elements, horizon)


def age_union_check(seq: StructureSequence, codes: Iterable[bytes],
                    horizon: int = 50) -> dict[bytes, FrechetVerdict]:
    """Per canonical code: does the coded structure embed cofinitely often?"""
    out = {}
    for code in codes:
        A = structure_from_code(seq.signature, code)
        out[code] = los_eval(seq, ExistsCopy(A), (), horizon)
    return out


@dataclass(frozen=True)
class TrendReport:
    sizes_monotone: bool
    sizes_unbounded: bool
    persistence: tuple[FrechetVerdict, ...]
    horizon: int

    @property
    def embedding_persistent(self) -> bool:
        return all(v.holds for v in self.persistence)

    @property
    def all_ok(self) -> bool:
        return self.sizes_monotone and self.sizes_unbounded and self.embedding_persistent


def is_trending(seq: StructureSequence, horizon: int = 30,
                persistence_indices: Sequence[int] | None = None) -> TrendReport:
    """The three trending conditions, checked at the given horizon.

    Sizes must be nondecreasing (prefix checked pointwise, tail certified by
    the rule) and unbounded (tail certificate); every factor up to the
    horizon must embed into cofinitely many later factors.
    """
    sizes = [seq.factor(t).size for t in range(min(horizon, seq.prefix_len + 2))]
    prefix_ok = all(a <= b for a, b in zip(sizes, sizes[1:]))
    monotone = prefix_ok and seq.rule.size_monotone()
    unbounded = seq.rule.size_unbounded()
    idxs = list(persistence_indices if persistence_indices is not None
                else range(horizon))
    persistence = tuple(
        los_eval(seq, ExistsCopy(seq.factor(i)), (), horizon) for i in idxs
    )
    return TrendReport(monotone, unbounded, persistence, horizon)


# ---------------------------------------------------------------------------
# Per-coordinate colorings and the internal coloring they induce


class ColoringRule:
    """t -> k-coloring of the copies of the pattern in the factor."""

    def coloring_at(self, t: int, factor: FinStructure,
                    pattern: FinStructure, k: int) -> dict[tuple[int, ...], int]:
        raise NotImplementedError

    def eventual_constant(self) -> int | None:
        """Color j when the rule provably agrees with constant(j) cofinitely."""
        return None

    def constant_from(self) -> int:
        return 0


@dataclass(frozen=True)
class ConstantColoring(ColoringRule):
    color: int

    def coloring_at(self, t, factor, pattern, k):
        return {c: self.color for c in enumerate_copies(pattern, factor)}

    def eventual_constant(self):
        return self.color


@dataclass(frozen=True)
class PerturbedConstantColoring(ColoringRule):
    """Constant color except finitely many explicitly overridden indices."""

    color: int
    overrides: tuple[tuple[int, int], ...]  # (t, color) pairs

    def coloring_at(self, t, factor, pattern, k):
        override = dict(self.overrides).get(t)
        c = self.color if override is None else override
        return {copy: c for copy in enumerate_copies(pattern, factor)}

    def eventual_constant(self):
        return self.color

    def constant_from(self):
        ts = [t for t, _ in self.overrides]
        return max(ts) + 1 if ts else 0


@dataclass(frozen=True)
class DevlinChainColoring(ColoringRule):
    """Color n-subsets of a chain by the Devlin type of their image on a
    reference antichain of binary tree nodes (non-Devlin images get 0)."""

    n: int
    depth: int = 200

    def _antichain(self, size_needed: int) -> list[str]:
        depth = self.depth
        while True:
            nodes = sorted(trees.antichain_x(trees.build_w0(depth)))
            if len(nodes) >= size_needed:
                return nodes
            depth *= 2

    def coloring_at(self, t, factor, pattern, k):
        nodes = self._antichain(factor.size)
        out = {}
        for copy in enumerate_copies(pattern, factor):
            image = frozenset(nodes[i] for i in copy)
            color = trees.devlin_color(image, self.n)
            out[copy] = 0 if color is None else color % k
        return out


@dataclass(frozen=True)
class CustomColoring(ColoringRule):
    fn: Callable[[int, FinStructure, FinStructure, int], dict] = field(compare=False)

    def coloring_at(self, t, factor, pattern, k):
        return self.fn(t, factor, pattern, k)


@dataclass(frozen=True)
class PerCoordColorings:
    """A family of per-factor k-colorings of pattern copies, defined off a
    finite excluded index set."""

    pattern: FinStructure
    k: int
    rule: ColoringRule
    excluded: frozenset[int] = frozenset()

    def defined_at(self, t: int) -> bool:
        return t not in self.excluded

    def coloring_at(self, t: int, factor: FinStructure) -> dict[tuple[int, ...], int]:
        if not self.defined_at(t):
            raise KeyError(f"colorings undefined at t={t}")
        colors = self.rule.coloring_at(t, factor, self.pattern, self.k)
        if any(not (0 <= c < self.k) for c in colors.values()):
            raise ValueError("color out of range")
        return colors


def internal_color(colorings: PerCoordColorings, elements: Sequence[UltraElement],
                   seq: StructureSequence, horizon: int = 50) -> int | None:
    """The color whose coordinate class is certified cofinite, else None.

    The element tuple must project to a copy of the pattern cofinitely often
    (a certified-fails projection is an error). Only one class can ever be
    certified: the classes partition the defined coordinates.
    """
    defined = copy_defined(colorings.pattern, elements, seq, horizon)
    if defined.tag == "fails":
        raise ValueError("element tuple is certified to never form a copy")
    window = []
    for t in range(horizon):
        if not colorings.defined_at(t) or not defined.bitmap[t]:
            continue
        copy = project_copy(elements, seq, t)
        window.append((t, colorings.coloring_at(t, seq.factor(t))[copy]))
    if defined.tag != "holds":
        return None
    j = colorings.rule.eventual_constant()
    if j is None:
        return None
    start = max(defined.threshold or 0, colorings.rule.constant_from(),
                max(colorings.excluded, default=-1) + 1)
    tail = [color for t, color in window if t >= start]
    assert all(color == j for color in tail), "constancy certificate contradicts data"
    return j


# ---------------------------------------------------------------------------
# The finite transfer machinery


def phi_bs_eval(factor: FinStructure, B: FinStructure, A: FinStructure,
                coloring: Mapping[tuple[int, ...], int],
                allowed: frozenset[int] | set[int]) -> bool:
    """Some copy of B in the factor has all its A-copies colored within `allowed`."""
    allowed = frozenset(allowed)
    a_copies = frozenset(enumerate_copies(A, factor))
    for b in enumerate_copies(B, factor):
        ok = True
        for sub in combinations(b, A.size):
            if sub in a_copies and coloring[sub] not in allowed:
                ok = False
                break
        if ok:
            return True
    return False


def select_s(factor: FinStructure, B: FinStructure, A: FinStructure,
             coloring: Mapping[tuple[int, ...], int], k: int,
             d: int) -> frozenset[int] | None:
    """Lexicographically least size-d color set witnessing phi_bs_eval."""
    if d < 1:
        raise ValueError("d must be >= 1")
    for combo in combinations(range(k), d):
        if phi_bs_eval(factor, B, A, coloring, frozenset(combo)):
            return frozenset(combo)
    return None


@dataclass(frozen=True)
class TransferReport:
    """Window evidence for the finite shadow of the internal transfer bound.

    part (a): selected_all_from gives the first checked index from which a
    size-d color set exists at every later checked index; certified_from
    strengthens it to all indices beyond the horizon via a per-factor arrow
    check propagated along the embedding chain. part (b): s0 is the most
    frequent selected set on the tail window with its recurrence count.
    """

    horizon: int
    k: int
    d: int
    selected_all_from: int | None
    certified_from: int | None
    s0: frozenset[int] | None
    s0_count: int
    selections: tuple[tuple[int, frozenset[int] | None], ...]

    @property
    def part_a(self) -> bool:
        return self.selected_all_from is not None

    @property
    def part_b(self) -> bool:
        return self.s0 is not None


def transfer_shadow(seq: StructureSequence, colorings: PerCoordColorings,
                    A: FinStructure, B: FinStructure, k: int, d: int,
                    horizon: int = 40, *, certify: bool = True) -> TransferReport:
    """Check the finite shadow of the transfer bound on a window.

    Per defined coordinate, select the least size-d color set S with a copy
    of B whose A-copies all land in S. The stabilized S0 is the most
    frequent selection (lexicographic tie-break). With certify=True, an
    arrow check at the first sufficient factor extends part (a) beyond the
    window along the embedding chain.
    """
    probe = min(horizon, 20)
    trend = is_trending(seq, horizon=probe,
                        persistence_indices=range(min(8, probe)))
    if not trend.all_ok:
        raise ValueError("sequence is not trending; transfer shadow undefined")
    selections: list[tuple[int, frozenset[int] | None]] = []
    for t in range(horizon):
        if not colorings.defined_at(t):
            continue
        factor = seq.factor(t)
        coloring = colorings.coloring_at(t, factor)
        selections.append((t, select_s(factor, B, A, coloring, k, d)))

    selected_all_from = None
    for t, s in selections:
        if s is None:
            selected_all_from = None
        elif selected_all_from is None:
            selected_all_from = t

    certified_from = None
    if certify and seq.rule.chain_embedding_from() is not None:
        tail = max(seq.rule.chain_embedding_from(), seq.prefix_len)
        for t in range(tail, horizon):
            if arrow_check(seq.factor(t), B, A, k, d).holds:
                certified_from = max(t, max(colorings.excluded, default=-1) + 1)
                break

    counts: dict[frozenset[int], int] = {}
    window_start = selected_all_from if selected_all_from is not None else 0
    for t, s in selections:
        if s is not None and t >= window_start:
            counts[s] = counts.get(s, 0) + 1
    s0 = None
    s0_count = 0
    if counts:
        s0 = min(counts, key=lambda s: (-counts[s], tuple(sorted(s))))
        s0_count = counts[s0]
    return TransferReport(horizon, k, d, selected_all_from, certified_from,
                          s0, s0_count, tuple(selections))
