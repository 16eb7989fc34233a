"""Finite relational structures: embeddings, copies, isomorphism, ages, chains.

Universes are always ``0..n-1`` and carry the integer order as the ambient
linear order (used for increasing enumerations of copies; it is *not* part of
the signature and embeddings do not have to preserve it).
"""

from __future__ import annotations

import struct as _struct
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations, permutations, product
from typing import Callable, Iterable, Iterator, Mapping, Sequence


@dataclass(frozen=True)
class Signature:
    """An ordered list of relation symbols with their arities."""

    relations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.relations]
        if len(set(names)) != len(names):
            raise ValueError("relation symbols must be pairwise distinct")
        for name, arity in self.relations:
            if not name or not isinstance(arity, int) or arity < 1:
                raise ValueError(f"bad relation declaration {name!r}/{arity!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    def arity(self, name: str) -> int:
        for rname, rarity in self.relations:
            if rname == name:
                return rarity
        raise KeyError(name)

    def index(self, name: str) -> int:
        for i, (rname, _) in enumerate(self.relations):
            if rname == name:
                return i
        raise KeyError(name)


#: Signature of linear orders; "lt" interprets the strict order.
SIG_ORDER = Signature((("lt", 2),))

#: Signature of (symmetric, irreflexive) graphs.
SIG_GRAPH = Signature((("E", 2),))


@dataclass(frozen=True)
class FinStructure:
    """A finite relational structure on universe ``0..size-1``."""

    signature: Signature
    size: int
    interpretations: tuple[frozenset[tuple[int, ...]], ...]

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("structures are nonempty")
        if self.size > 255:
            raise ValueError("universe too large for canonical codes")
        if len(self.interpretations) != len(self.signature.relations):
            raise ValueError("one interpretation per relation symbol required")
        for (name, arity), tuples in zip(self.signature.relations, self.interpretations):
            for t in tuples:
                if len(t) != arity:
                    raise ValueError(f"tuple {t} has wrong arity for {name}/{arity}")
                if any(not (0 <= x < self.size) for x in t):
                    raise ValueError(f"tuple {t} out of range for size {self.size}")

    @classmethod
    def make(cls, signature: Signature, size: int,
             interps: Mapping[str, Iterable[Sequence[int]]] | None = None) -> "FinStructure":
        interps = interps or {}
        unknown = set(interps) - set(signature.names)
        if unknown:
            raise ValueError(f"unknown relation symbols {sorted(unknown)}")
        table = tuple(
            frozenset(tuple(t) for t in interps.get(name, ()))
            for name, _ in signature.relations
        )
        return cls(signature, size, table)

    def relation(self, name: str) -> frozenset[tuple[int, ...]]:
        return self.interpretations[self.signature.index(name)]

    def relabel(self, new_of_old: Sequence[int]) -> "FinStructure":
        """The isomorphic structure obtained by renaming vertex i to new_of_old[i]."""
        if sorted(new_of_old) != list(range(self.size)):
            raise ValueError("relabeling must be a permutation of the universe")
        table = tuple(
            frozenset(tuple(new_of_old[x] for x in t) for t in tuples)
            for tuples in self.interpretations
        )
        return FinStructure(self.signature, self.size, table)

    @cached_property
    def _pair_masks(self) -> tuple[tuple[int, ...] | None, ...]:
        # Bitset fast path for binary relations: masks[r][u] has bit v set
        # iff (u, v) is in the r-th relation.
        out: list[tuple[int, ...] | None] = []
        for (_, arity), tuples in zip(self.signature.relations, self.interpretations):
            if arity != 2:
                out.append(None)
                continue
            masks = [0] * self.size
            for u, v in tuples:
                masks[u] |= 1 << v
            out.append(tuple(masks))
        return tuple(out)

    def __repr__(self):
        rels = ", ".join(
            f"{name}:{sorted(tuples)}"
            for (name, _), tuples in zip(self.signature.relations, self.interpretations)
            if tuples
        )
        return f"FinStructure(n={self.size}{', ' + rels if rels else ''})"


@lru_cache(maxsize=None)
def chain(n: int) -> FinStructure:
    """The n-element linear order."""
    return FinStructure.make(SIG_ORDER, n, {"lt": [(i, j) for i in range(n) for j in range(n) if i < j]})


def graph(n: int, edges: Iterable[tuple[int, int]]) -> FinStructure:
    """A graph on n vertices; edges are stored symmetrically."""
    sym = set()
    for u, v in edges:
        if u == v:
            raise ValueError("graphs are irreflexive")
        sym.add((u, v))
        sym.add((v, u))
    return FinStructure.make(SIG_GRAPH, n, {"E": sym})


def _check_subset(N: FinStructure, elems: Sequence[int]) -> tuple[int, ...]:
    t = tuple(elems)
    if any(not (0 <= x < N.size) for x in t):
        raise IndexError(f"subset {t} out of range for size {N.size}")
    if any(a >= b for a, b in zip(t, t[1:])) or not t:
        raise ValueError(f"subset {t} must be nonempty and strictly increasing")
    return t


def induced_substructure(N: FinStructure, elems: Sequence[int]) -> FinStructure:
    """Substructure induced on a strictly increasing list of universe indices."""
    t = _check_subset(N, elems)
    pos = {x: i for i, x in enumerate(t)}
    keep = set(t)
    table = tuple(
        frozenset(tuple(pos[x] for x in tup) for tup in tuples if set(tup) <= keep)
        for tuples in N.interpretations
    )
    return FinStructure(N.signature, len(t), table)


def is_embedding(A: FinStructure, B: FinStructure, image: Sequence[int]) -> bool:
    """True iff vertex i of A maps to image[i] as an embedding into B."""
    if A.signature != B.signature:
        return False
    img = tuple(image)
    if len(img) != A.size or len(set(img)) != A.size:
        return False
    if any(not (0 <= x < B.size) for x in img):
        return False
    for (name, arity), ta, tb in zip(A.signature.relations, A.interpretations, B.interpretations):
        for t in product(range(A.size), repeat=arity):
            if (t in ta) != (tuple(img[x] for x in t) in tb):
                return False
    return True


def _partial_ok(A: FinStructure, B: FinStructure, img: list[int], new: int) -> bool:
    # Exact check of all relation constraints involving source vertex `new`,
    # against the already-assigned prefix img[0..new].
    assigned = range(new + 1)
    for ridx, ((_, arity), ta, tb) in enumerate(
            zip(A.signature.relations, A.interpretations, B.interpretations)):
        if arity == 2:
            masks_a = A._pair_masks[ridx]
            masks_b = B._pair_masks[ridx]
            bn = img[new]
            for u in assigned:
                bu = img[u]
                if bool(masks_a[u] >> new & 1) != bool(masks_b[bu] >> bn & 1):
                    return False
                if bool(masks_a[new] >> u & 1) != bool(masks_b[bn] >> bu & 1):
                    return False
            continue
        for t in product(assigned, repeat=arity):
            if new not in t:
                continue
            if (t in ta) != (tuple(img[x] for x in t) in tb):
                return False
    return True


def _embeddings_iter(A: FinStructure, B: FinStructure) -> Iterator[tuple[int, ...]]:
    if A.signature != B.signature:
        raise ValueError("signature mismatch")
    if A.size > B.size:
        return
    img: list[int] = []
    used = [False] * B.size

    def extend(i: int) -> Iterator[tuple[int, ...]]:
        if i == A.size:
            yield tuple(img)
            return
        for b in range(B.size):
            if used[b]:
                continue
            img.append(b)
            used[b] = True
            if _partial_ok(A, B, img, i):
                yield from extend(i + 1)
            img.pop()
            used[b] = False

    yield from extend(0)


def enumerate_embeddings(A: FinStructure, B: FinStructure) -> list[tuple[int, ...]]:
    """All embeddings of A into B, as image lists in lexicographic order."""
    return list(_embeddings_iter(A, B))


def embeds(A: FinStructure, B: FinStructure) -> bool:
    """Whether at least one embedding of A into B exists."""
    return next(_embeddings_iter(A, B), None) is not None


def are_isomorphic(A: FinStructure, B: FinStructure) -> bool:
    if A.signature != B.signature or A.size != B.size:
        return False
    for tuples_a, tuples_b in zip(A.interpretations, B.interpretations):
        if len(tuples_a) != len(tuples_b):
            return False
    return embeds(A, B)


@lru_cache(maxsize=4096)
def _copies_cached(A: FinStructure, N: FinStructure) -> tuple[tuple[int, ...], ...]:
    if A.signature == SIG_ORDER and A == chain(A.size) and N == chain(N.size):
        # Every increasing subset of a chain induces a chain.
        return tuple(combinations(range(N.size), A.size))
    out = []
    for elems in combinations(range(N.size), A.size):
        if are_isomorphic(A, induced_substructure(N, elems)):
            out.append(elems)
    return tuple(out)


def enumerate_copies(A: FinStructure, N: FinStructure) -> list[tuple[int, ...]]:
    """All subsets of N (as increasing tuples) inducing a copy of A, in lex order."""
    if A.signature != N.signature:
        raise ValueError("signature mismatch")
    if A.size > N.size:
        return []
    return list(_copies_cached(A, N))


def theta_check(A: FinStructure, N: FinStructure, btuple: Sequence[int]) -> bool:
    """Does the tuple enumerate a substructure of N isomorphic to A via i -> b_i?

    Vertex i of A (A's universe is already its increasing enumeration)
    corresponds to btuple[i]; true iff that map is an isomorphism onto the
    induced substructure.
    """
    b = tuple(btuple)
    if len(b) != A.size:
        raise ValueError(f"tuple length {len(b)} != |A| = {A.size}")
    if any(not (0 <= x < N.size) for x in b):
        raise IndexError(f"tuple {b} out of range for size {N.size}")
    if len(set(b)) != len(b):
        return False
    for (name, arity), ta, tn in zip(A.signature.relations, A.interpretations, N.interpretations):
        for t in ta:
            if tuple(b[x] for x in t) not in tn:
                return False
        keep = set(b)
        pos = {x: i for i, x in enumerate(b)}
        for t in tn:
            if set(t) <= keep and tuple(pos[x] for x in t) not in ta:
                return False
    return True


# ---------------------------------------------------------------------------
# Canonical forms


def _serialize(size: int, interpretations: Iterable[Iterable[tuple[int, ...]]]) -> bytes:
    parts = [bytes([size])]
    for tuples in interpretations:
        rows = sorted(tuples)
        parts.append(_struct.pack(">H", len(rows)))
        for t in rows:
            parts.append(bytes(t))
    return b"".join(parts)


def canonical_code(A: FinStructure) -> bytes:
    """Minimum serialization of A over all relabelings of its universe.

    Equal codes characterize isomorphism within a fixed signature, and the
    code is decodable back into a representative via structure_from_code.
    """
    best: bytes | None = None
    rng = range(A.size)
    for perm in permutations(rng):
        cand = _serialize(A.size, (
            [tuple(perm[x] for x in t) for t in tuples]
            for tuples in A.interpretations
        ))
        if best is None or cand < best:
            best = cand
    assert best is not None
    return best


def structure_from_code(signature: Signature, code: bytes) -> FinStructure:
    """Rebuild the canonical representative encoded by canonical_code."""
    size = code[0]
    pos = 1
    table = []
    for _, arity in signature.relations:
        (count,) = _struct.unpack_from(">H", code, pos)
        pos += 2
        tuples = set()
        for _ in range(count):
            tuples.add(tuple(code[pos:pos + arity]))
            pos += arity
        table.append(frozenset(tuples))
    if pos != len(code):
        raise ValueError("trailing bytes in canonical code")
    return FinStructure(signature, size, tuple(table))


def age(N: FinStructure, max_size: int) -> list[bytes]:
    """Canonical codes of the isomorphism classes of substructures of size <= max_size."""
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    codes = set()
    for s in range(1, min(max_size, N.size) + 1):
        for elems in combinations(range(N.size), s):
            codes.add(canonical_code(induced_substructure(N, elems)))
    return sorted(codes)


# ---------------------------------------------------------------------------
# Class enumerators, joint embedding, cofinal chains


def chains_enumerator(max_size: int | None = None) -> Iterator[FinStructure]:
    """Linear orders by size; the age of any infinite chain, one per class."""
    n = 1
    while max_size is None or n <= max_size:
        yield chain(n)
        n += 1


def cliques_enumerator(max_size: int | None = None) -> Iterator[FinStructure]:
    """Complete graphs by size."""
    n = 1
    while max_size is None or n <= max_size:
        yield graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
        n += 1


def graphs_enumerator(max_size: int | None = None) -> Iterator[FinStructure]:
    """All graphs up to isomorphism, sorted by (size, canonical code)."""
    n = 1
    while max_size is None or n <= max_size:
        seen: dict[bytes, FinStructure] = {}
        pairs = list(combinations(range(n), 2))
        for picked in product((False, True), repeat=len(pairs)):
            g = graph(n, [e for e, on in zip(pairs, picked) if on])
            code = canonical_code(g)
            if code not in seen:
                seen[code] = g
        for code in sorted(seen):
            yield seen[code]
        n += 1


def jep_witness(A: FinStructure, B: FinStructure,
                class_enumerator: Iterable[FinStructure]) -> FinStructure:
    """First enumerated structure embedding both A and B.

    The enumerator must yield candidates in nondecreasing size; raises
    LookupError when it runs out without a joint embedding.
    """
    for C in class_enumerator:
        if embeds(A, C) and embeds(B, C):
            return C
    raise LookupError("class enumerator exhausted without a joint embedding")


def _sorted_classes(structures: Iterable[FinStructure]) -> list[FinStructure]:
    # Deduplicate up to isomorphism; canonical codes order same-size classes
    # but are only computed when a size actually has several classes (they
    # cost a factorial scan).
    classes: list[FinStructure] = []
    for s in structures:
        if not any(c.size == s.size and are_isomorphic(s, c) for c in classes):
            classes.append(s)
    sizes = [c.size for c in classes]
    def key(s: FinStructure):
        if sizes.count(s.size) > 1:
            return (s.size, canonical_code(s))
        return (s.size, b"")
    return sorted(classes, key=key)


def cofinal_chain(age_enumeration: Sequence[FinStructure], length: int) -> list[FinStructure]:
    """An embedding-increasing chain that is cofinal in the given age enumeration.

    B_0 is the first listed structure and B_t jointly embeds B_{t-1} and the
    t-th listed structure, the joint embedding taken as the first candidate in
    (size, canonical code) order. The chain conditions (membership, chain
    embeddings, cofinality over the enumeration prefix) are verified on the
    output.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if not age_enumeration:
        raise ValueError("empty age enumeration")
    candidates = _sorted_classes(age_enumeration)
    out = [age_enumeration[0]]
    for t in range(1, length):
        prev = out[-1]
        target = age_enumeration[min(t - 1, len(age_enumeration) - 1)]
        out.append(jep_witness(prev, target, iter(candidates)))
    for t, B in enumerate(out):
        if not any(c.size == B.size and are_isomorphic(B, c) for c in candidates):
            raise AssertionError("chain member left the enumerated classes")
        if t > 0 and not embeds(out[t - 1], B):
            raise AssertionError("chain embedding failed")
        for r in range(min(t, len(age_enumeration))):
            if not embeds(age_enumeration[r], B):
                raise AssertionError("cofinality failed")
    return out
