"""Binary tree combinatorics: orders, embedding types, and their counts.

Walks the two tree orders, meet closures, Devlin's tangent-number counts,
the skew level tree construction, and the hunt for every embedding type
inside an antichain.
"""

import ramseykit as rk
from ramseykit.trees import node_sort_key

print("== the two tree orders ==")
print(f"meet(010, 011) = {rk.meet('010', '011')!r}")
print(f"lex:     00 < 01   -> {rk.lex_less('00', '01')}")
print(f"endpoint order: 0 < <> < 1 -> "
      f"{rk.e_less('0', '')} and {rk.e_less('', '1')}")

print()
print("== embedding types ==")
print(f"siblings {{0,1}} and {{00,01}} share a type: "
      f"{rk.same_embedding_type({'0', '1'}, {'00', '01'})}")
print(f"{{0,10}} vs {{0,11}} (passing bit differs):    "
      f"{rk.same_embedding_type({'0', '10'}, {'0', '11'})}")
print(f"{{0,10}} is Devlin: {rk.is_devlin({'0', '10'})};  "
      f"{{0,00}} is Devlin: {rk.is_devlin({'0', '00'})}")

print()
print("== type counts vs tangent numbers ==")
for n in (1, 2, 3, 4):
    count = len(rk.enumerate_devlin_types(n))
    print(f"n = {n}: {count:4d} Devlin types   (tangent({2 * n - 1}) = "
          f"{rk.tangent(2 * n - 1)})")

print()
print("== the skew level tree and its antichain ==")
w = rk.build_w0(30)
print("nodes by height:", ", ".join(repr(v) if v else "<>"
                                    for v in sorted(w, key=node_sort_key)))
checks = rk.check_w0_properties(w, 30)
print(f"all six properties hold: {all(checks.values())}")

x = rk.antichain_x(rk.build_w0(100))
colors = set()
from itertools import combinations
for pair in combinations(sorted(x, key=node_sort_key), 2):
    colors.add(rk.devlin_color(frozenset(pair), 2))
print(f"antichain of {len(x)} nodes; pair colors seen: {sorted(colors)}")

print()
print("== every type appears in every deep antichain ==")
for n, depth in ((2, 43), (3, 187)):
    deep = rk.antichain_x(rk.build_w0(depth))
    witnesses, missing = rk.find_all_types_in(deep, n)
    print(f"n = {n}: {len(witnesses)} types witnessed, {len(missing)} missing")
sample_code = sorted(witnesses)[0]
sample = sorted(witnesses[sample_code], key=node_sort_key)
print("a witness triple for one 3-type:")
for node in sample:
    print(f"  {node}")
