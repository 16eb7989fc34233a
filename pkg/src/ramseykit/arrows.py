"""Partition arrow decisions by exhaustive, symmetry-reduced coloring search.

The arrow C -> (B)^A_{k,l} holds when every k-coloring of the copies of A in
C admits a copy of B on which at most l colors appear. The searcher looks
for a counterexample coloring; colorings are enumerated up to color-name
symmetry (color j may first appear only after colors < j), which is sound
because renaming colors preserves chromatic counts.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

from .structures import FinStructure, enumerate_copies, induced_substructure, are_isomorphic


@dataclass(frozen=True)
class Coloring:
    """A total coloring of the copies of `pattern` inside `ambient`."""

    ambient: FinStructure
    pattern: FinStructure
    k: int
    assignments: tuple[int, ...]  # aligned with enumerate_copies(pattern, ambient)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if len(self.assignments) != len(self.copies):
            raise ValueError("coloring must cover the copies exactly")
        if any(not (0 <= c < self.k) for c in self.assignments):
            raise ValueError("color out of range")

    @property
    def copies(self) -> tuple[tuple[int, ...], ...]:
        return _copies_cached(self.ambient, self.pattern)

    def color_of(self, copy: tuple[int, ...]) -> int:
        return self.as_mapping[copy]

    @property
    def as_mapping(self) -> Mapping[tuple[int, ...], int]:
        d = self.__dict__.get("_mapping")
        if d is None:
            d = dict(zip(self.copies, self.assignments))
            self.__dict__["_mapping"] = d
        return d

    @classmethod
    def from_mapping(cls, ambient: FinStructure, pattern: FinStructure, k: int,
                     colors: Mapping[tuple[int, ...], int]) -> "Coloring":
        copies = _copies_cached(ambient, pattern)
        if set(colors) != set(copies):
            raise ValueError("coloring domain must equal the set of copies")
        return cls(ambient, pattern, k, tuple(colors[c] for c in copies))

    @classmethod
    def constant(cls, ambient: FinStructure, pattern: FinStructure, k: int,
                 color: int = 0) -> "Coloring":
        copies = _copies_cached(ambient, pattern)
        return cls(ambient, pattern, k, (color,) * len(copies))


def _copies_cached(ambient: FinStructure, pattern: FinStructure) -> tuple[tuple[int, ...], ...]:
    return tuple(enumerate_copies(pattern, ambient))


@dataclass(frozen=True)
class ArrowVerdict:
    holds: bool
    witness: Coloring | None = None
    vacuous: bool = False  # Fails because no copy of B exists at all
    nodes_explored: int = field(default=0, compare=False)

    def __bool__(self):
        return self.holds


def chromatic_count(coloring: Coloring, b_copy: tuple[int, ...], B: FinStructure) -> int:
    """Number of distinct colors on the pattern copies inside the given B-copy."""
    if not are_isomorphic(B, induced_substructure(coloring.ambient, b_copy)):
        raise ValueError(f"{b_copy} is not a copy of the given structure")
    inside = set(b_copy)
    seen = {
        coloring.color_of(c)
        for c in coloring.copies
        if set(c) <= inside
    }
    return len(seen)


def _search_instance(C: FinStructure, B: FinStructure, A: FinStructure):
    a_copies = _copies_cached(C, A)
    b_copies = _copies_cached(C, B)
    members: list[list[int]] = []  # per B-copy: indices of A-copies inside it
    for b in b_copies:
        inside = set(b)
        members.append([i for i, c in enumerate(a_copies) if set(c) <= inside])
    containing: list[list[int]] = [[] for _ in a_copies]
    for bi, idxs in enumerate(members):
        for i in idxs:
            containing[i].append(bi)
    return a_copies, b_copies, members, containing


class _Searcher:
    """DFS for a coloring under which every B-copy shows more than l colors."""

    def __init__(self, C, B, A, k, l):
        self.C, self.k, self.l = C, k, l
        self.a_copies, self.b_copies, self.members, self.containing = _search_instance(C, B, A)
        self.nodes = 0

    def run(self, prefix: Sequence[int] = ()) -> tuple[int, ...] | None:
        k, l = self.k, self.l
        m = len(self.a_copies)
        nb = len(self.b_copies)
        counts = [[0] * k for _ in range(nb)]
        distinct = [0] * nb
        remaining = [len(idx) for idx in self.members]
        colors = [0] * m

        def place(i: int, color: int) -> bool:
            # Returns False when some B-copy can no longer exceed l colors.
            colors[i] = color
            ok = True
            for bi in self.containing[i]:
                if counts[bi][color] == 0:
                    distinct[bi] += 1
                counts[bi][color] += 1
                remaining[bi] -= 1
                if distinct[bi] + remaining[bi] <= l:
                    ok = False
            return ok

        def unplace(i: int) -> None:
            color = colors[i]
            for bi in self.containing[i]:
                counts[bi][color] -= 1
                if counts[bi][color] == 0:
                    distinct[bi] -= 1
                remaining[bi] += 1

        def dfs(i: int, used: int) -> bool:
            if i == m:
                return all(d > l for d in distinct)
            for color in range(min(used + 1, k)):
                self.nodes += 1
                viable = place(i, color)
                if viable and dfs(i + 1, max(used, color + 1)):
                    return True
                unplace(i)
            return False

        used = 0
        feasible = True
        for i, color in enumerate(prefix):
            self.nodes += 1
            if not place(i, color):
                feasible = False
            used = max(used, color + 1)
        if feasible and dfs(len(prefix), used):
            return tuple(colors)
        return None


def arrow_check(C: FinStructure, B: FinStructure, A: FinStructure,
                k: int, l: int, threads: int = 1) -> ArrowVerdict:
    """Decide C -> (B)^A_{k,l}.

    A Fails verdict carries the lexicographically first counterexample
    coloring in first-use canonical form. When B has no copy in C at all the
    arrow fails vacuously (any coloring defeats it) and the all-zero coloring
    is returned with the vacuous flag set.
    """
    if not (C.signature == B.signature == A.signature):
        raise ValueError("signature mismatch")
    if k < 1 or l < 1:
        raise ValueError("k and l must be >= 1")
    a_copies = _copies_cached(C, A)
    b_copies = _copies_cached(C, B)
    if not b_copies:
        return ArrowVerdict(False, Coloring.constant(C, A, k), vacuous=True)
    if k <= l or not a_copies:
        return ArrowVerdict(True)

    if threads > 1 and len(a_copies) >= 2:
        # Partition on the colors of the first two copies; branch order
        # reproduces the sequential search, so the merged verdict and
        # witness are identical to threads=1.
        prefixes = [(0, c) for c in range(min(2, k))]
        searchers = [_Searcher(C, B, A, k, l) for _ in prefixes]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda sp: sp[0].run(sp[1]), zip(searchers, prefixes)))
        nodes = sum(s.nodes for s in searchers)
        for res in results:
            if res is not None:
                witness = Coloring(C, A, k, res)
                return ArrowVerdict(False, witness, nodes_explored=nodes)
        return ArrowVerdict(True, nodes_explored=nodes)

    searcher = _Searcher(C, B, A, k, l)
    res = searcher.run()
    if res is not None:
        return ArrowVerdict(False, Coloring(C, A, k, res), nodes_explored=searcher.nodes)
    return ArrowVerdict(True, nodes_explored=searcher.nodes)


def naive_arrow_check(C: FinStructure, B: FinStructure, A: FinStructure,
                      k: int, l: int) -> ArrowVerdict:
    """Oracle: enumerate all k^copies colorings without symmetry reduction."""
    if k < 1 or l < 1:
        raise ValueError("k and l must be >= 1")
    a_copies = _copies_cached(C, A)
    b_copies = _copies_cached(C, B)
    if not b_copies:
        return ArrowVerdict(False, Coloring.constant(C, A, k), vacuous=True)
    members = []
    for b in b_copies:
        inside = set(b)
        members.append([i for i, c in enumerate(a_copies) if set(c) <= inside])
    for assignment in product(range(k), repeat=len(a_copies)):
        good = False
        for idxs in members:
            if len({assignment[i] for i in idxs}) <= l:
                good = True
                break
        if not good:
            return ArrowVerdict(False, Coloring(C, A, k, assignment))
    return ArrowVerdict(True)


def degree_search(A: FinStructure, class_candidates: Sequence[FinStructure],
                  k: int, B: FinStructure, l_max: int,
                  size_cap: int) -> tuple[int, FinStructure] | None:
    """Least l <= l_max for which some candidate ambient of size <= size_cap
    satisfies the arrow, together with the first such ambient.

    This bounds the Ramsey degree of A from the given candidates; a None
    result only means no witness exists within the caps.
    """
    pool = [C for C in class_candidates if C.size <= size_cap]
    for l in range(1, l_max + 1):
        for C in pool:
            if arrow_check(C, B, A, k, l).holds:
                return l, C
    return None
