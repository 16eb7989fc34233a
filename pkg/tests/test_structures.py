import random
from itertools import combinations, permutations, product

import pytest

import ramseykit as rk
from ramseykit import (FinStructure, Signature, age, are_isomorphic,
                       canonical_code, chain, cofinal_chain, embeds,
                       enumerate_copies, enumerate_embeddings, graph,
                       induced_substructure, is_embedding, jep_witness,
                       structure_from_code, theta_check)

SIG1 = Signature((("R", 2),))


def rand_binary_structure(rng, size):
    tuples = [(i, j) for i in range(size) for j in range(size) if rng.random() < 0.4]
    return FinStructure.make(SIG1, size, {"R": tuples})


def perm_isomorphic(A, B):
    """Brute-force isomorphism oracle, independent of the embedding search."""
    if A.size != B.size or A.signature != B.signature:
        return False
    for p in permutations(range(A.size)):
        if all(frozenset(tuple(p[x] for x in t) for t in ta) == tb
               for ta, tb in zip(A.interpretations, B.interpretations)):
            return True
    return False


class TestInduced:
    def test_chain_restriction(self):
        sub = induced_substructure(chain(3), (0, 2))
        assert sub == chain(2)

    def test_full_universe_is_identity(self):
        n = graph(4, [(0, 1), (2, 3)])
        assert induced_substructure(n, (0, 1, 2, 3)) == n

    def test_path_endpoints_lose_the_edges(self):
        n = graph(3, [(0, 1), (1, 2)])
        sub = induced_substructure(n, (0, 2))
        assert sub == graph(2, [])

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            induced_substructure(chain(3), (0, 5))
        with pytest.raises(ValueError):
            induced_substructure(chain(3), (2, 0))


class TestEmbeddings:
    def test_identity_embeds(self):
        a = graph(3, [(0, 1)])
        assert is_embedding(a, a, (0, 1, 2))

    def test_constant_map_rejected(self):
        assert not is_embedding(chain(2), chain(2), (0, 0))

    def test_order_reversal_rejected(self):
        assert not is_embedding(chain(2), chain(3), (2, 0))

    def test_chain_pairs(self):
        out = enumerate_embeddings(chain(2), chain(3))
        assert out == [(0, 1), (0, 2), (1, 2)]

    def test_antichain_into_triangle(self):
        tri = graph(3, [(0, 1), (1, 2), (0, 2)])
        assert enumerate_embeddings(graph(2, []), tri) == []

    def test_single_point_everywhere(self):
        tri = graph(3, [(0, 1), (1, 2), (0, 2)])
        assert len(enumerate_embeddings(graph(1, []), tri)) == 3

    def test_lexicographic_and_complete(self):
        rng = random.Random(5)
        for _ in range(20):
            a = rand_binary_structure(rng, rng.randint(1, 3))
            b = rand_binary_structure(rng, rng.randint(1, 4))
            out = enumerate_embeddings(a, b)
            assert out == sorted(out)
            assert len(set(out)) == len(out)
            brute = [img for img in permutations(range(b.size), a.size)
                     if is_embedding(a, b, img)]
            assert sorted(brute) == out


class TestCopies:
    def test_chain_pairs_in_four(self):
        assert len(enumerate_copies(chain(2), chain(4))) == 6

    def test_not_embeddable(self):
        assert enumerate_copies(chain(5), chain(3)) == []

    def test_triangles_in_k4(self):
        k4 = graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
        tri = graph(3, [(0, 1), (1, 2), (0, 2)])
        copies = enumerate_copies(tri, k4)
        # oracle: a 3-subset of K4 is a triangle iff all its pairs are edges
        e = k4.relation("E")
        brute = [s for s in combinations(range(4), 3)
                 if all((a, b) in e for a in s for b in s if a != b)]
        assert copies == brute
        assert len(copies) == 4

    def test_copies_match_theta(self):
        rng = random.Random(11)
        for _ in range(15):
            a = rand_binary_structure(rng, 2)
            n = rand_binary_structure(rng, rng.randint(2, 6))
            copies = set(enumerate_copies(a, n))
            via_theta = {
                s for s in combinations(range(n.size), a.size)
                if any(theta_check(a, n, p) for p in permutations(s))
            }
            assert copies == via_theta


class TestTheta:
    def test_increasing_pair(self):
        assert theta_check(chain(2), chain(3), (0, 2))

    def test_reversed_pair(self):
        assert not theta_check(chain(2), chain(3), (2, 0))

    def test_non_edge(self):
        p3 = graph(3, [(0, 1), (1, 2)])
        assert not theta_check(graph(2, [(0, 1)]), p3, (0, 2))
        assert theta_check(graph(2, [(0, 1)]), p3, (0, 1))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            theta_check(chain(2), chain(3), (0, 1, 2))


class TestCanonical:
    def test_relabelings_of_cycle(self):
        cyc = FinStructure.make(SIG1, 3, {"R": [(0, 1), (1, 2), (2, 0)]})
        relabeled = cyc.relabel((2, 0, 1))
        assert are_isomorphic(cyc, relabeled)
        assert canonical_code(cyc) == canonical_code(relabeled)

    def test_chain_vs_antichain(self):
        anti = FinStructure.make(rk.SIG_ORDER, 2, {})
        assert not are_isomorphic(chain(2), anti)
        assert canonical_code(chain(2)) != canonical_code(anti)

    def test_single_point_code_is_fixed(self):
        assert canonical_code(graph(1, [])) == b"\x01\x00\x00"

    def test_code_matches_brute_force_iso(self):
        rng = random.Random(3)
        pool = [rand_binary_structure(rng, rng.randint(1, 5)) for _ in range(25)]
        for a in pool:
            for b in pool:
                assert (canonical_code(a) == canonical_code(b)) == perm_isomorphic(a, b)

    def test_code_round_trips(self):
        rng = random.Random(9)
        for _ in range(10):
            a = rand_binary_structure(rng, rng.randint(1, 5))
            back = structure_from_code(SIG1, canonical_code(a))
            assert are_isomorphic(a, back)
            assert canonical_code(back) == canonical_code(a)


class TestAge:
    def test_chain_age(self):
        assert len(age(chain(3), 3)) == 3

    def test_edgeless_age(self):
        assert len(age(graph(5, []), 2)) == 2

    def test_path_age(self):
        assert len(age(graph(3, [(0, 1), (1, 2)]), 2)) == 3

    def test_hereditary(self):
        n = graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
        codes = set(age(n, 3))
        for code in codes:
            member = structure_from_code(rk.SIG_GRAPH, code)
            for s in range(1, member.size + 1):
                for elems in combinations(range(member.size), s):
                    sub = induced_substructure(member, elems)
                    assert canonical_code(sub) in codes


class TestJepAndChains:
    def test_chain_jep(self):
        got = jep_witness(chain(2), chain(3), rk.chains_enumerator(6))
        assert got == chain(3)

    def test_trivial_jep(self):
        assert jep_witness(chain(1), chain(1), rk.chains_enumerator(3)) == chain(1)

    def test_graph_jep_first_in_code_order(self):
        got = jep_witness(graph(2, [(0, 1)]), graph(2, []), rk.graphs_enumerator(3))
        assert are_isomorphic(got, graph(3, [(0, 1)]))

    def test_exhaustion(self):
        with pytest.raises(LookupError):
            jep_witness(chain(4), chain(5), rk.chains_enumerator(3))

    def test_cofinal_chain_of_chains(self):
        chains = [chain(n + 1) for n in range(8)]
        out = cofinal_chain(chains, 8)
        assert [c.size for c in out] == [max(1, t) for t in range(8)]

    def test_cofinal_length_one(self):
        assert cofinal_chain([chain(1), chain(2)], 1) == [chain(1)]

    def test_cofinal_chain_of_cliques(self):
        cliques = [next(g for g in rk.cliques_enumerator(n + 1) if g.size == n + 1)
                   for n in range(6)]
        out = cofinal_chain(cliques, 6)
        assert [c.size for c in out] == [max(1, t) for t in range(6)]


class TestValidation:
    def test_duplicate_symbols_rejected(self):
        with pytest.raises(ValueError):
            Signature((("R", 2), ("R", 1)))

    def test_arity_mismatch_rejected(self):
        with pytest.raises(ValueError):
            FinStructure.make(SIG1, 3, {"R": [(0, 1, 2)]})

    def test_out_of_range_tuple_rejected(self):
        with pytest.raises(ValueError):
            FinStructure.make(SIG1, 2, {"R": [(0, 2)]})

    def test_empty_structure_rejected(self):
        with pytest.raises(ValueError):
            FinStructure.make(SIG1, 0, {})
