"""Existential quantifier-free formulas and their evaluation on finite structures.

Atoms are relation atoms, equalities, and color atoms ("the copy named by
these variables has color j"). Color atoms are resolved through a total
oracle on subsets; tuples whose underlying set the oracle does not color
count as color 0, mirroring the bucketing convention used for partial
colorings.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import Callable, Mapping

from .structures import FinStructure, embeds, enumerate_copies

ColorOracle = Callable[[tuple[int, ...]], int]


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple[int, ...]


@dataclass(frozen=True)
class Eq:
    left: int
    right: int


@dataclass(frozen=True)
class ColorEq:
    """True iff the set named by args is colored `color` by the oracle."""

    args: tuple[int, ...]
    color: int


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Exists:
    variables: tuple[int, ...]
    body: "Formula"


@dataclass(frozen=True)
class ExistsCopy:
    """Sentence: some substructure is isomorphic to the pattern.

    Semantically equal to Exists(x0..x{n-1}, theta_formula(pattern)) but
    evaluated by embedding search; expand() gives the literal form.
    """

    pattern: FinStructure

    def expand(self) -> Exists:
        variables = tuple(range(self.pattern.size))
        return Exists(variables, theta_formula(self.pattern, variables))


Formula = Rel | Eq | ColorEq | Not | And | Or | Exists | ExistsCopy

TOP = And(())
BOTTOM = Or(())


def implies(a: Formula, b: Formula) -> Formula:
    return Or((Not(a), b))


def free_variables(phi: Formula) -> frozenset[int]:
    if isinstance(phi, Rel):
        return frozenset(phi.args)
    if isinstance(phi, Eq):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, ColorEq):
        return frozenset(phi.args)
    if isinstance(phi, Not):
        return free_variables(phi.body)
    if isinstance(phi, (And, Or)):
        out: frozenset[int] = frozenset()
        for p in phi.parts:
            out |= free_variables(p)
        return out
    if isinstance(phi, Exists):
        return free_variables(phi.body) - frozenset(phi.variables)
    if isinstance(phi, ExistsCopy):
        return frozenset()
    raise TypeError(f"not a formula: {phi!r}")


def uses_color_atoms(phi: Formula) -> bool:
    if isinstance(phi, ColorEq):
        return True
    if isinstance(phi, Not):
        return uses_color_atoms(phi.body)
    if isinstance(phi, (And, Or)):
        return any(uses_color_atoms(p) for p in phi.parts)
    if isinstance(phi, Exists):
        return uses_color_atoms(phi.body)
    return False


def qf_eval(N: FinStructure, phi: Formula,
            assignment: Mapping[int, int] | None = None,
            color_oracle: ColorOracle | None = None) -> bool:
    """Standard satisfaction; existential quantifiers range over N's universe."""
    env = dict(assignment or {})

    def lookup(var: int) -> int:
        try:
            return env[var]
        except KeyError:
            raise ValueError(f"unbound variable x{var}") from None

    def ev(p: Formula) -> bool:
        if isinstance(p, Rel):
            return tuple(lookup(v) for v in p.args) in N.relation(p.name)
        if isinstance(p, Eq):
            return lookup(p.left) == lookup(p.right)
        if isinstance(p, ColorEq):
            if color_oracle is None:
                raise ValueError("color atom evaluated without a color oracle")
            copy = tuple(sorted({lookup(v) for v in p.args}))
            return color_oracle(copy) == p.color
        if isinstance(p, Not):
            return not ev(p.body)
        if isinstance(p, And):
            return all(ev(q) for q in p.parts)
        if isinstance(p, Or):
            return any(ev(q) for q in p.parts)
        if isinstance(p, ExistsCopy):
            return embeds(p.pattern, N)
        if isinstance(p, Exists):
            for values in product(range(N.size), repeat=len(p.variables)):
                for var, val in zip(p.variables, values):
                    env[var] = val
                if ev(p.body):
                    for var in p.variables:
                        del env[var]
                    return True
            for var in p.variables:
                env.pop(var, None)
            return False
        raise TypeError(f"not a formula: {p!r}")

    return ev(phi)


def theta_formula(A: FinStructure, variables: tuple[int, ...] | None = None) -> Formula:
    """Diagram of A: the tuple x0..x{n-1} enumerates a copy of A, in order.

    A conjunction of relation literals (one per tuple over the universe)
    plus pairwise distinctness.
    """
    n = A.size
    xs = variables if variables is not None else tuple(range(n))
    if len(xs) != n:
        raise ValueError("need one variable per element of A")
    literals: list[Formula] = []
    for (name, arity), tuples in zip(A.signature.relations, A.interpretations):
        for t in product(range(n), repeat=arity):
            atom = Rel(name, tuple(xs[i] for i in t))
            literals.append(atom if t in tuples else Not(atom))
    for i in range(n):
        for j in range(i + 1, n):
            literals.append(Not(Eq(xs[i], xs[j])))
    return And(tuple(literals))


def color_oracle_from(colors: Mapping[tuple[int, ...], int]) -> ColorOracle:
    """Total oracle from a partial copy coloring; uncolored sets get color 0."""
    return lambda copy: colors.get(copy, 0)


def phi_bs_formula(B: FinStructure, A: FinStructure, allowed: frozenset[int]) -> Formula:
    """Sentence: some copy of B has every inner copy of A colored in `allowed`.

    Color atoms are guarded by the diagram of A over every injective
    |A|-subtuple of the copy's enumeration, so the oracle is only consulted
    on actual copies.
    """
    xs = tuple(range(B.size))
    guards: list[Formula] = [theta_formula(B, xs)]
    for sub in permutations(xs, A.size):
        ok = Or(tuple(ColorEq(tuple(sub), j) for j in sorted(allowed)))
        guards.append(implies(theta_formula(A, tuple(sub)), ok))
    return Exists(xs, And(tuple(guards)))
