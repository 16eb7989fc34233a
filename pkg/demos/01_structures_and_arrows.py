"""Finite structures and partition arrows, from the ground up.

Builds a few linear orders and graphs, counts copies, walks the joint
embedding machinery, and then locates the classical pigeonhole boundary for
coloring pairs inside chains by exhaustive search.
"""

import ramseykit as rk

print("== structures and copies ==")
c6 = rk.chain(6)
k4 = rk.graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
tri = rk.graph(3, [(0, 1), (1, 2), (0, 2)])

print(f"pairs inside a 6-chain:      {len(rk.enumerate_copies(rk.chain(2), c6))}")
print(f"triangles inside K4:         {len(rk.enumerate_copies(tri, k4))}")
print(f"age of K4 up to size 3:      {len(rk.age(k4, 3))} isomorphism classes")

print()
print("== joint embedding and a cofinal chain ==")
edge, non_edge = rk.graph(2, [(0, 1)]), rk.graph(2, [])
witness = rk.jep_witness(edge, non_edge, rk.graphs_enumerator(3))
print(f"least graph holding both an edge and a non-edge has "
      f"{witness.size} vertices and {len(witness.relation('E')) // 2} edge(s)")

ladder = rk.cofinal_chain([rk.chain(n + 1) for n in range(8)], 8)
print(f"cofinal chain over all finite linear orders, sizes: "
      f"{[m.size for m in ladder]}")

print()
print("== the arrow C -> (B)^A_{k,l} ==")
A, B = rk.chain(2), rk.chain(3)
for size in (4, 5, 6, 7):
    verdict = rk.arrow_check(rk.chain(size), B, A, 2, 1)
    tag = "holds" if verdict.holds else "fails"
    print(f"{size}-chain -> (3-chain)^(2-chain)_(2,1): {tag:5}  "
          f"[{verdict.nodes_explored} search nodes]")

fails = rk.arrow_check(rk.chain(5), B, A, 2, 1)
print("\na 2-coloring of pairs of the 5-chain with no monochromatic triple:")
for copy, color in zip(fails.witness.copies, fails.witness.assignments):
    print(f"  pair {copy} -> color {color}")

found = rk.degree_search(A, list(rk.chains_enumerator(8)), 2, B,
                         l_max=2, size_cap=8)
print(f"\nleast l with a witness among chains of size <= 8: l = {found[0]}, "
      f"witness = {found[1].size}-chain")
