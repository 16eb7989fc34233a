"""Cofinite evaluation over a growing sequence of finite linear orders.

The sequence chain(t+1) stands in for an ultraproduct of finite chains:
whatever is decided here on a cofinite set of coordinates is forced for
every nonprincipal ultrafilter. The demo evaluates sentences, projects
product elements, induces an internal coloring, and checks the finite
window of the transfer bound.
"""

import random

import ramseykit as rk
from ramseykit.formulas import Exists, Not, Rel

seq = rk.StructureSequence.chains(1, 1)  # factor t is the (t+1)-chain

print("== sentences along the sequence ==")
pair = Exists((0, 1), Rel("lt", (0, 1)))
v = rk.los_eval(seq, pair, (), 20)
print(f"'some pair is ordered'    -> {v.tag} from index {v.threshold}")
v = rk.los_eval(seq, Not(Exists((0,), Rel("lt", (0, 0)))), (), 20)
print(f"'no point is below itself' -> {v.tag} from index {v.threshold}")

print()
print("== elements of the product and projected copies ==")
lo = rk.UltraElement.scaled(1, 3)
hi = rk.UltraElement.scaled(2, 3)
for t in (0, 2, 6, 12):
    print(f"t={t:2d}: projected pair {rk.project_copy((lo, hi), seq, t)}")
defined = rk.copy_defined(rk.chain(2), (lo, hi), seq, 30)
print(f"the pair forms a 2-chain copy {defined.tag} from index {defined.threshold}")

print()
print("== trending and ages ==")
trend = rk.is_trending(seq, 20)
print(f"sizes monotone: {trend.sizes_monotone}, unbounded: {trend.sizes_unbounded}, "
      f"factors persist: {trend.embedding_persistent}")
codes = rk.age(rk.chain(4), 4)
verdicts = rk.age_union_check(seq, codes, 20)
print(f"all {len(codes)} age classes of the 4-chain embed cofinitely: "
      f"{all(v.holds for v in verdicts.values())}")

print()
print("== internal colorings ==")
els = (rk.UltraElement.const_index(0), rk.UltraElement.const_index(2))
constant = rk.PerCoordColorings(rk.chain(2), 3, rk.ConstantColoring(2))
print(f"constant rule colors the copy: {rk.internal_color(constant, els, seq, 30)}")
bumpy = rk.PerCoordColorings(
    rk.chain(2), 3, rk.PerturbedConstantColoring(2, ((4, 0), (9, 1))))
print(f"finitely perturbed rule still: {rk.internal_color(bumpy, els, seq, 30)}")

print()
print("== the transfer window ==")


def scrambled(t, factor, pattern, k):
    local = random.Random(1000003 * t + 17)
    return {c: local.randrange(k) for c in rk.enumerate_copies(pattern, factor)}


colorings = rk.PerCoordColorings(rk.chain(2), 2, rk.CustomColoring(scrambled))
rep = rk.transfer_shadow(seq, colorings, rk.chain(2), rk.chain(3), 2, 1,
                         horizon=30)
print(f"a 1-color set for some triple exists from checked index "
      f"{rep.selected_all_from}")
print(f"certified for every later index by an arrow check at t = "
      f"{rep.certified_from}")
print(f"stabilized color set S0 = {sorted(rep.s0)} "
      f"(recurs {rep.s0_count} times on the window)")
