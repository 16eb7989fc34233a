"""Binary tree combinatorics: meet closures, tree orders, embedding types,
Devlin types, skew level trees, and type hunting inside antichains.

Nodes are strings over "01"; "" is the root. The height of a node is its
length. For incomparable s, t the lexicographic order compares the bits
right after the meet; the extended order <_E routes a node strictly between
its 0-side and 1-side extensions and agrees with <_lex on antichains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Iterator, Mapping, Sequence

Node = str
TreeSet = frozenset[str]


class PruningError(RuntimeError):
    """Raised when a tree does not contain the requested skew frame."""


def _validate(node: str) -> str:
    if any(ch not in "01" for ch in node):
        raise ValueError(f"node must be a 0/1 string, got {node!r}")
    return node


def node_sort_key(node: str) -> tuple[int, str]:
    return (len(node), node)


def is_prefix(s: str, t: str) -> bool:
    return t.startswith(s)


def meet(s: str, t: str) -> str:
    """Longest common initial segment."""
    limit = min(len(s), len(t))
    i = 0
    while i < limit and s[i] == t[i]:
        i += 1
    return s[:i]


def lex_less(s: str, t: str) -> bool:
    """s precedes t lexicographically; defined for incomparable nodes only."""
    if is_prefix(s, t) or is_prefix(t, s):
        raise ValueError(f"lex order needs incomparable nodes, got {s!r}, {t!r}")
    m = len(meet(s, t))
    return s[m] == "0" and t[m] == "1"


def e_less(s: str, t: str) -> bool:
    """Strict part of the extended order on all of the binary tree."""
    if s == t:
        return False
    if is_prefix(s, t):
        return t[len(s)] == "1"
    if is_prefix(t, s):
        return s[len(t)] == "0"
    return lex_less(s, t)


def is_antichain(nodes: Iterable[str]) -> bool:
    ns = sorted(nodes, key=len)
    for i, s in enumerate(ns):
        for t in ns[i + 1:]:
            if is_prefix(s, t):
                return False
    return True


def meet_closure(nodes: Iterable[str]) -> TreeSet:
    """Closure under pairwise meets; contains the input."""
    ns = [_validate(x) for x in set(nodes)]
    if not ns:
        raise ValueError("meet closure of an empty set")
    out = set(ns)
    for s, t in combinations(ns, 2):
        out.add(meet(s, t))
    return frozenset(out)


def _tree_parent(v: str, closure: frozenset[str]) -> str | None:
    best = None
    for w in closure:
        if w != v and is_prefix(w, v) and (best is None or len(w) > len(best)):
            best = w
    return best


# ---------------------------------------------------------------------------
# Embedding types


def _type_records(members: frozenset[str], order: Sequence[str]) -> bytes:
    pos = {v: i for i, v in enumerate(order)}
    closure = frozenset(order)
    out = bytearray()
    for v in order:
        parent = _tree_parent(v, closure)
        out.append(1 if v in members else 0)
        out.append(pos[parent] + 1 if parent is not None else 0)
        out.append(int(v[len(parent)]) + 1 if parent is not None else 0)
        lower = [w for w in order if len(w) < len(v)]
        out.append(len(lower))
        out.extend(int(v[len(w)]) for w in lower)
        out.append(0xFE)
    return bytes(out)


def embedding_type(nodes: Iterable[str]) -> bytes:
    """Canonical code of the embedding type of a finite node set.

    The meet closure is listed in height order (ties broken every possible
    way, keeping the minimum code); each node contributes its membership
    flag, meet-parent position, direction from the parent, and its bits at
    the heights of all strictly lower closure nodes. Two sets get equal
    codes exactly when a meet-tree isomorphism matches them, respecting
    height order and passing bits.
    """
    members = frozenset(_validate(x) for x in nodes)
    if not members:
        raise ValueError("embedding type of an empty set")
    closure = meet_closure(members)
    groups: list[list[str]] = []
    for v in sorted(closure, key=node_sort_key):
        if groups and len(groups[-1][0]) == len(v):
            groups[-1].append(v)
        else:
            groups.append([v])
    best: bytes | None = None
    for arrangement in _tie_arrangements(groups):
        code = _type_records(members, arrangement)
        if best is None or code < best:
            best = code
    assert best is not None
    return best


def _tie_arrangements(groups: list[list[str]]) -> Iterator[list[str]]:
    def rec(i: int, acc: list[str]) -> Iterator[list[str]]:
        if i == len(groups):
            yield list(acc)
            return
        for perm in permutations(groups[i]):
            acc.extend(perm)
            yield from rec(i + 1, acc)
            del acc[len(acc) - len(perm):]

    yield from rec(0, [])


def same_embedding_type(a: Iterable[str], b: Iterable[str]) -> bool:
    return embedding_type(a) == embedding_type(b)


def is_devlin(nodes: Iterable[str]) -> bool:
    """Whether the set realizes a Devlin embedding type.

    Checks: the set is exactly the terminal nodes of its meet closure, the
    closure heights are pairwise distinct, and every node passes lower
    non-ancestor closure heights with bit 0.
    """
    members = frozenset(_validate(x) for x in nodes)
    if not members:
        raise ValueError("empty set")
    closure = meet_closure(members)
    terminals = {
        v for v in closure
        if not any(w != v and is_prefix(v, w) for w in closure)
    }
    if terminals != members:
        return False
    heights = [len(v) for v in closure]
    if len(set(heights)) != len(heights):
        return False
    for s in closure:
        for t in closure:
            if len(s) < len(t) and not is_prefix(s, t) and t[len(s)] != "0":
                return False
    return True


# ---------------------------------------------------------------------------
# Tangent numbers (independent oracle for type counts)


def tangent(m: int) -> int:
    """m-th tangent number for odd m, via the Seidel boustrophedon triangle."""
    if m < 1 or m % 2 == 0:
        raise ValueError("tangent numbers are indexed by odd integers >= 1")
    row = [1]
    for n in range(1, m + 1):
        prev = row
        row = [0] * (n + 1)
        if n % 2 == 1:
            for i in range(1, n + 1):
                row[i] = row[i - 1] + prev[i - 1]
        else:
            for i in range(n - 1, -1, -1):
                row[i] = row[i + 1] + prev[i]
    # For odd n the zigzag value sits at the right end of the row.
    return row[m]


# ---------------------------------------------------------------------------
# Devlin type enumeration
#
# A Devlin type of an n-set is determined by a full binary meet tree with
# sided children (which subtree hangs off the 0 side) together with a linear
# height order extending the tree order. Each such pair has a canonical
# realization placing the rank-r node at height r, with zero fill between a
# node and its parent's direction bit; the deepest node then sits at height
# 2n-2, so every type is realizable exactly when the ambient depth allows
# strings of that length.


@dataclass(frozen=True)
class _Shape:
    """Full binary tree; leaves are None children."""

    zero: "_Shape | None"
    one: "_Shape | None"

    @property
    def is_leaf(self) -> bool:
        return self.zero is None


_LEAF = _Shape(None, None)


def _sided_shapes(n_leaves: int) -> list[_Shape]:
    if n_leaves == 1:
        return [_LEAF]
    out = []
    for left in range(1, n_leaves):
        for z in _sided_shapes(left):
            for o in _sided_shapes(n_leaves - left):
                out.append(_Shape(z, o))
    return out


def _shape_nodes(shape: _Shape) -> tuple[list[tuple], dict]:
    """Flatten to ids; returns (list of (id, parent_id, side, is_leaf), children map)."""
    rows: list[tuple] = []
    children: dict[int, dict[int, int]] = {}

    def rec(s: _Shape, parent: int | None, side: int | None) -> int:
        my = len(rows)
        rows.append((my, parent, side, s.is_leaf))
        if parent is not None:
            children.setdefault(parent, {})[side] = my
        if not s.is_leaf:
            children.setdefault(my, {})
            rec(s.zero, my, 0)
            rec(s.one, my, 1)
        return my

    rec(shape, None, None)
    return rows, children


def _linear_extensions(rows: list[tuple]) -> Iterator[tuple[int, ...]]:
    """All orderings of node ids in which every node follows its parent."""
    n = len(rows)
    parent = {r[0]: r[1] for r in rows}

    def rec(placed: list[int], avail: set[int]) -> Iterator[tuple[int, ...]]:
        if len(placed) == n:
            yield tuple(placed)
            return
        for v in sorted(avail):
            nxt = {u for u in range(n) if parent[u] == v}
            placed.append(v)
            new_avail = (avail - {v}) | nxt
            yield from rec(placed, new_avail)
            placed.pop()

    roots = {r[0] for r in rows if r[1] is None}
    yield from rec([], roots)


def _realize(rows: list[tuple], ranks: Mapping[int, int]) -> frozenset[str]:
    """Canonical node strings: rank-r node at height r, zero fill between."""
    strings: dict[int, str] = {}
    for node, parent, side, _ in sorted(rows, key=lambda r: ranks[r[0]]):
        if parent is None:
            strings[node] = "0" * ranks[node]
        else:
            p = strings[parent]
            strings[node] = p + str(side) + "0" * (ranks[node] - len(p) - 1)
    return frozenset(strings[r[0]] for r in rows if r[3])


_TYPE_TABLE_CACHE: dict[int, list] = {}


def _devlin_type_table(n: int) -> list[tuple[bytes, list[tuple], dict, tuple[int, ...]]]:
    """All Devlin n-types with code, shape rows, children map, rank order."""
    cached = _TYPE_TABLE_CACHE.get(n)
    if cached is not None:
        return cached
    out = []
    seen = set()
    for shape in _sided_shapes(n):
        rows, children = _shape_nodes(shape)
        for order in _linear_extensions(rows):
            ranks = {node: r for r, node in enumerate(order)}
            members = _realize(rows, ranks)
            code = embedding_type(members)
            if code in seen:
                continue
            seen.add(code)
            out.append((code, rows, children, order))
    _TYPE_TABLE_CACHE[n] = out
    return out


def enumerate_devlin_types(n: int, depth: int | None = None) -> frozenset[bytes]:
    """Type codes of all Devlin n-sets realizable within nodes of length <= depth.

    With depth None the depth starts at 2(2n-1) and grows until the count is
    stable across two successive depths. Any Devlin n-set needs 2n-1 distinct
    closure heights, so nothing is realizable below depth 2n-2 and everything
    is realizable from there on; a too-small depth therefore yields an empty
    (reported, non-fatal) result.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    table = _devlin_type_table(n)

    def at_depth(d: int) -> frozenset[bytes]:
        return frozenset(code for code, *_ in table if 2 * n - 2 <= d)

    if depth is not None:
        return at_depth(depth)
    d = 2 * (2 * n - 1)
    current = at_depth(d)
    while True:
        nxt = at_depth(d + 1)
        if nxt == current:
            return current
        current, d = nxt, d + 1


_SORTED_CODES_CACHE: dict[int, list[bytes]] = {}


def _sorted_codes(n: int) -> list[bytes]:
    if n not in _SORTED_CODES_CACHE:
        _SORTED_CODES_CACHE[n] = sorted(enumerate_devlin_types(n))
    return _SORTED_CODES_CACHE[n]


def devlin_color(nodes: Iterable[str], n: int) -> int | None:
    """Index of the set's Devlin type among the sorted type codes, or None.

    None is the sentinel for non-Devlin sets; callers needing a total
    k-coloring bucket it as color 0.
    """
    members = frozenset(nodes)
    if len(members) != n:
        raise ValueError(f"expected a set of size {n}, got {len(members)}")
    if not is_devlin(members):
        return None
    return _sorted_codes(n).index(embedding_type(members))


# ---------------------------------------------------------------------------
# Skew level trees ("W0-style" sets)


def build_w0(depth: int) -> TreeSet:
    """The leftmost skew level tree below the given depth.

    One node per height 0, 3, 6, ...; tree levels are filled left to right,
    each child hanging off its parent's direction bit followed by zero fill,
    so heights increase along (level, lex) order.
    """
    if depth < 3:
        raise ValueError("depth must be >= 3")
    heights = list(range(0, depth, 3))
    total = len(heights)
    nodes = [""]
    parents = [""]
    hi = 1
    while hi < total:
        level: list[str] = []
        for p in parents:
            for b in "01":
                if hi >= total:
                    break
                h = heights[hi]
                hi += 1
                node = p + b + "0" * (h - len(p) - 1)
                level.append(node)
                nodes.append(node)
            if hi >= total:
                break
        parents = level
    return frozenset(nodes)


def antichain_x(w: Iterable[str]) -> TreeSet:
    """The antichain {node + "01"} over a skew level tree; lex equals <_E on it."""
    return frozenset(_validate(v) + "01" for v in w)


def _tree_levels(nodes: TreeSet) -> dict[str, int]:
    levels = {}
    for v in sorted(nodes, key=node_sort_key):
        parent = _tree_parent(v, nodes)
        levels[v] = 0 if parent is None else levels[parent] + 1
    return levels


def _tree_addresses(nodes: TreeSet) -> dict[str, str]:
    addr = {}
    for v in sorted(nodes, key=node_sort_key):
        parent = _tree_parent(v, nodes)
        addr[v] = "" if parent is None else addr[parent] + v[len(parent)]
    return addr


def _bfs_prefix(count: int) -> set[str]:
    from itertools import product as _product

    out: list[str] = [""]
    width = 1
    while len(out) < count:
        out.extend("".join(bits) for bits in _product("01", repeat=width))
        width += 1
    return set(out[:count])


def check_w0_style(nodes: Iterable[str], *, require_root: str | None = None,
                   min_gap: int = 1) -> dict[int, bool]:
    """The six skew level tree properties, relative to the set's own root.

    1. unique minimal node (equal to require_root when given);
    2. heights pairwise distinct and consecutive heights at least min_gap apart;
    3. the tree positions form an initial segment of the full binary tree
       filled level by level, left to right;
    4. within each tree level, lexicographic order equals height order;
    5. all heights at one level lie below all heights at the next;
    6. above the root, every node is its parent's direction bit followed by
       zero fill (equivalently, non-member prefixes continue by 0).
    """
    w = frozenset(_validate(v) for v in nodes)
    if not w:
        raise ValueError("empty tree set")
    report = {}
    roots = [v for v in w if all(is_prefix(v, u) for u in w)]
    report[1] = len(roots) == 1 and (require_root is None or roots[0] == require_root)

    heights = sorted(len(v) for v in w)
    distinct = len(set(heights)) == len(heights)
    gaps_ok = all(b - a >= min_gap for a, b in zip(heights, heights[1:]))
    report[2] = distinct and gaps_ok

    levels = _tree_levels(w)
    addr = _tree_addresses(w)
    report[3] = set(addr.values()) == _bfs_prefix(len(w))

    ok4 = True
    by_level: dict[int, list[str]] = {}
    for v, lv in levels.items():
        by_level.setdefault(lv, []).append(v)
    for group in by_level.values():
        lex_sorted = sorted(group)
        height_sorted = sorted(group, key=len)
        ok4 = ok4 and lex_sorted == height_sorted
    report[4] = ok4

    ok5 = True
    for lv in range(max(by_level) if by_level else 0):
        if lv + 1 in by_level:
            ok5 = ok5 and max(len(v) for v in by_level[lv]) < min(len(v) for v in by_level[lv + 1])
    report[5] = ok5

    ok6 = True
    for v in w:
        parent = _tree_parent(v, w)
        if parent is None:
            continue
        fill = v[len(parent) + 1:]
        ok6 = ok6 and set(fill) <= {"0"}
    report[6] = ok6
    return report


def check_w0_properties(w: Iterable[str], depth: int) -> dict[int, bool]:
    """Absolute property check for build_w0 output below the given depth."""
    nodes = frozenset(w)
    report = check_w0_style(nodes, require_root="", min_gap=3)
    in_range = all(len(v) < depth for v in nodes)
    per_height = {h: 0 for h in range(depth)}
    for v in nodes:
        if len(v) < depth:
            per_height[len(v)] += 1
    slots_ok = all(
        count == (1 if h % 3 == 0 else 0)
        for h, count in per_height.items()
    )
    report[2] = report[2] and slots_ok and in_range
    return report


# ---------------------------------------------------------------------------
# Pruning and type hunting


def _zero_fill_candidates(pool: Sequence[str], prefix: str, min_len: int) -> list[str]:
    """Pool nodes extending prefix by zero fill only, at height >= min_len."""
    out = [
        u for u in pool
        if len(u) >= max(min_len, len(prefix))
        and u.startswith(prefix)
        and set(u[len(prefix):]) <= {"0"}
    ]
    out.sort(key=node_sort_key)
    return out


def prune_perfect(nodes: Iterable[str], target_levels: int, *, min_gap: int = 3) -> TreeSet:
    """Extract the leftmost skew level tree with target_levels branching levels.

    The input must be meet closed and rich enough to supply, below some
    root, a complete binary subtree of depth target_levels whose nodes are
    zero-filled between parent direction bits, with strictly increasing
    heights at least min_gap apart assigned in (level, lex) order. Raises
    PruningError when no such frame exists (input too shallow or too sparse).
    """
    pool = sorted({_validate(v) for v in nodes}, key=node_sort_key)
    if target_levels < 1:
        raise ValueError("target_levels must be >= 1")
    total_levels = target_levels + 1
    result = _frame_search(pool, set(), total_levels, min_gap=min_gap, need_images=False)
    if result is None:
        raise PruningError(
            f"no perfect zero-filled subtree with {target_levels} branching levels")
    frame, _ = result
    return frozenset(v for level in frame for v in level)


def _frame_search(pool: Sequence[str], members: set[str], total_levels: int,
                  *, min_gap: int, need_images: bool
                  ) -> tuple[list[list[str]], dict[str, str]] | None:
    """Backtracking search for a complete skew zero-filled frame.

    Returns (levels, images) where levels[i] lists the 2^i frame nodes of
    level i in lex order and images maps frame nodes (levels >= 1, when
    need_images) to members extending node+"0" below the next frame height.
    The first solution in (height, node) candidate order is returned.
    """
    slots = [2 ** i for i in range(total_levels)]

    def image_for(z: str, floor_h: int) -> str | None:
        for y in sorted(members, key=node_sort_key):
            if len(y) > floor_h and y.startswith(z + "0"):
                return y
        return None

    def rec(levels: list[list[str]], images: dict[str, str], last_h: int
            ) -> tuple[list[list[str]], dict[str, str]] | None:
        li = len(levels) - 1
        if len(levels[li]) == slots[li]:
            if li + 1 == total_levels:
                return [list(l) for l in levels], dict(images)
            levels.append([])
            out = rec(levels, images, last_h)
            if out is not None:
                return out
            levels.pop()
            return None
        parent_level = levels[li - 1]
        idx = len(levels[li])
        parent = parent_level[idx // 2]
        side = "01"[idx % 2]
        for cand in _zero_fill_candidates(pool, parent + side, last_h + min_gap):
            img = None
            if need_images:
                img = image_for(cand, len(cand))
                if img is None:
                    continue
            levels[li].append(cand)
            if img is not None:
                images[cand] = img
            new_last = len(img) if img is not None else len(cand)
            out = rec(levels, images, new_last)
            if out is not None:
                return out
            levels[li].pop()
            if img is not None:
                del images[cand]
        return None

    for root in pool:
        # The root only hosts a leaf read-off when the frame is a single
        # level, which callers handle separately; no root image needed.
        out = rec([[root]], {}, len(root))
        if out is not None:
            return out
    return None


def find_all_types_in(antichain: Iterable[str], n: int, *,
                      brute_limit: int = 200_000
                      ) -> tuple[dict[bytes, frozenset[str]], list[bytes]]:
    """Search an antichain for witnesses of every Devlin n-type.

    Returns (witnesses, missing): one witness n-subset per found type code
    plus the list of codes with no witness. The search extracts a skew
    zero-filled frame from the meet closure (with one member image hanging
    off each frame node's 0 side) and reads each type off the frame; if no
    frame fits it falls back to scanning n-subsets when that is affordable.
    The missing list is nonempty exactly when the antichain is too shallow.
    """
    members = frozenset(_validate(v) for v in antichain)
    if not is_antichain(members):
        raise ValueError("input is not an antichain")
    codes = _sorted_codes(n)
    witnesses: dict[bytes, frozenset[str]] = {}

    if n == 1:
        if members:
            witnesses[codes[0]] = frozenset({min(members, key=node_sort_key)})
        return witnesses, [c for c in codes if c not in witnesses]

    frame = None
    if members:
        closure = sorted(meet_closure(members) - members, key=node_sort_key)
        frame = _frame_search(closure, set(members), 2 * n - 1,
                              min_gap=1, need_images=True)
    if frame is not None:
        levels, images = frame
        for code, rows, children, order in _devlin_type_table(n):
            witness = _read_off(rows, children, order, levels, images)
            got = embedding_type(witness)
            if got != code:
                raise AssertionError("frame read-off produced the wrong type")
            witnesses[code] = witness
    else:
        total = math.comb(len(members), n)
        if total <= brute_limit:
            for combo in combinations(sorted(members, key=node_sort_key), n):
                if len(witnesses) == len(codes):
                    break
                if not is_devlin(combo):
                    continue
                code = embedding_type(combo)
                witnesses.setdefault(code, frozenset(combo))
    missing = [c for c in codes if c not in witnesses]
    return witnesses, missing


def _read_off(rows: list[tuple], children: dict, order: tuple[int, ...],
              levels: list[list[str]], images: dict[str, str]) -> frozenset[str]:
    """Place a typed meet tree into the frame and collect member images.

    The rank-r shape node lands on frame level r: first step from its
    parent's frame node follows the shape side, further descent goes through
    the 0 side. Leaves contribute their frame node's member image.
    """
    ranks = {node: r for r, node in enumerate(order)}
    child_at: dict[tuple[str, str], str] = {}
    for li in range(len(levels) - 1):
        for i, v in enumerate(levels[li]):
            child_at[(v, "0")] = levels[li + 1][2 * i]
            child_at[(v, "1")] = levels[li + 1][2 * i + 1]
    placed: dict[int, str] = {}
    witness = []
    for node, parent, side, leaf in sorted(rows, key=lambda r: ranks[r[0]]):
        if parent is None:
            placed[node] = levels[0][0]
        else:
            spot = placed[parent]
            spot = child_at[(spot, str(side))]
            for _ in range(ranks[node] - ranks[parent] - 1):
                spot = child_at[(spot, "0")]
            placed[node] = spot
        if leaf:
            witness.append(images[placed[node]])
    return frozenset(witness)
