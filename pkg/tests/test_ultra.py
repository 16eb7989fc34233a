import random

import pytest

import ramseykit as rk
from ramseykit import (ChainRule, CofinalChainRule, ConstantColoring,
                       CustomColoring, CustomRule, DevlinChainColoring,
                       PerCoordColorings, PerturbedConstantColoring,
                       StructureSequence, UltraElement, age, age_union_check,
                       chain, copy_defined, enumerate_copies, internal_color,
                       is_trending, los_eval, phi_bs_eval, project_copy,
                       select_s, transfer_shadow)
from ramseykit.formulas import And, Eq, Exists, ExistsCopy, Not, Or, Rel
from ramseykit.structures import FinStructure, SIG_ORDER


def growing_chains(prefix=()):
    return StructureSequence.chains(1, 1, prefix=prefix)


class TestElementsAndProjection:
    def test_constant_pair(self):
        seq = growing_chains()
        els = (UltraElement.const_index(0), UltraElement.const_index(2))
        for t in range(3, 10):
            assert project_copy(els, seq, t) == (0, 2)

    def test_clamping_below(self):
        seq = growing_chains()
        els = (UltraElement.const_index(0), UltraElement.const_index(2))
        assert project_copy(els, seq, 0) == (0,)

    def test_collapsing_coordinates(self):
        seq = growing_chains()
        els = (UltraElement.const_index(1), UltraElement.const_index(1))
        assert project_copy(els, seq, 5) == (1,)

    def test_scaled_values(self):
        seq = growing_chains()
        els = (UltraElement.scaled(1, 3), UltraElement.scaled(2, 3))
        for t in range(0, 20):
            assert project_copy(els, seq, t) == tuple(sorted({t // 3, 2 * t // 3}))

    def test_prefix_override(self):
        seq = growing_chains()
        e = UltraElement.const_index(0, prefix=(0, 1))
        assert e.value_at(1, 2) == 1
        assert e.value_at(2, 3) == 0


class TestLosEval:
    def test_existential_pair(self):
        v = los_eval(growing_chains(), Exists((0, 1), Rel("lt", (0, 1))), (), 20)
        assert v.tag == "holds" and v.threshold == 1
        assert v.bitmap[0] is False and all(v.bitmap[1:])

    def test_negated_irreflexivity(self):
        v = los_eval(growing_chains(), Not(Exists((0,), Rel("lt", (0, 0)))), (), 20)
        assert v.tag == "holds" and v.threshold == 0

    def test_unsatisfiable_existential(self):
        v = los_eval(growing_chains(), Exists((0,), Rel("lt", (0, 0))), (), 20)
        assert v.tag == "fails" and v.threshold == 0

    def test_custom_rule_is_undecided(self):
        # alternating truth by parity: no cofinite side can be certified
        rule = CustomRule(lambda t: chain(2 if t % 2 else 1))
        seq = StructureSequence(SIG_ORDER, (), rule)
        v = los_eval(seq, Exists((0, 1), Rel("lt", (0, 1))), (), 12)
        assert v.tag == "undecided"
        assert v.bitmap == tuple(bool(t % 2) for t in range(12))

    def test_negation_consistency(self):
        rng = random.Random(3)
        for _ in range(30):
            phi = Exists((0, 1), rng.choice([
                Rel("lt", (0, 1)),
                And((Rel("lt", (0, 1)), Not(Eq(0, 1)))),
                Or((Rel("lt", (0, 1)), Rel("lt", (1, 0)))),
                Rel("lt", (0, 0)),
            ]))
            seq = growing_chains()
            v = los_eval(seq, phi, (), 15)
            nv = los_eval(seq, Not(phi), (), 15)
            if v.decided:
                assert nv.decided
                assert nv.holds != v.holds
                assert nv.threshold == v.threshold
            assert nv.bitmap == tuple(not b for b in v.bitmap)

    def test_bitmap_matches_brute_force(self):
        from ramseykit.formulas import qf_eval

        rng = random.Random(5)
        for _ in range(30):
            a, b = rng.choice(((1, 1), (1, 2), (2, 1))), None
            seq = StructureSequence.chains(*rng.choice(((1, 1), (1, 2), (2, 1))))
            phi = Exists((0, 1), rng.choice([
                Rel("lt", (0, 1)), And((Rel("lt", (0, 1)), Rel("lt", (1, 0)))),
            ]))
            v = los_eval(seq, phi, (), 10)
            brute = tuple(qf_eval(seq.factor(t), phi) for t in range(10))
            assert v.bitmap == brute

    def test_horizon_must_cover_prefix(self):
        seq = growing_chains(prefix=(chain(3), chain(3)))
        with pytest.raises(ValueError):
            los_eval(seq, Exists((0,), Rel("lt", (0, 0))), (), 1)

    def test_prefix_factors_respected(self):
        seq = growing_chains(prefix=(chain(5),))
        v = los_eval(seq, ExistsCopy(chain(4)), (), 20)
        assert v.bitmap[0] is True  # the prefix factor already embeds it
        assert v.tag == "holds"


class TestCopyDefined:
    def test_constant_copy(self):
        els = (UltraElement.const_index(0), UltraElement.const_index(2))
        v = copy_defined(chain(2), els, growing_chains(), 20)
        assert v.tag == "holds"

    def test_collapsed_pair_fails(self):
        els = (UltraElement.const_index(1), UltraElement.const_index(1))
        v = copy_defined(chain(2), els, growing_chains(), 20)
        assert v.tag == "fails"

    def test_scaled_pair_threshold(self):
        els = (UltraElement.scaled(1, 3), UltraElement.scaled(2, 3))
        v = copy_defined(chain(2), els, growing_chains(), 30)
        # floor(t/3) < floor(2t/3) from t = 2 on
        assert v.tag == "holds" and v.threshold == 2


class TestTrending:
    def test_growing_chains(self):
        rep = is_trending(growing_chains(), 20)
        assert rep.sizes_monotone and rep.sizes_unbounded and rep.embedding_persistent
        assert rep.all_ok

    def test_constant_size_fails_growth(self):
        seq = StructureSequence(SIG_ORDER, (), ChainRule(0, 3))
        rep = is_trending(seq, 15)
        assert rep.sizes_monotone
        assert not rep.sizes_unbounded

    def test_cofinal_chain_sequence(self):
        rule = CofinalChainRule.build([chain(n + 1) for n in range(12)], 12)
        seq = StructureSequence(SIG_ORDER, (), rule)
        rep = is_trending(seq, 10, persistence_indices=range(8))
        assert rep.all_ok


class TestAgeUnion:
    def test_chain_codes_hold(self):
        codes = age(chain(5), 5)
        out = age_union_check(growing_chains(), codes, 20)
        assert all(v.holds for v in out.values())

    def test_three_chain_threshold(self):
        code = rk.canonical_code(chain(3))
        v = age_union_check(growing_chains(), [code], 20)[code]
        assert v.tag == "holds" and v.threshold == 2

    def test_unrealized_pattern_fails(self):
        loop = FinStructure.make(SIG_ORDER, 1, {"lt": [(0, 0)]})
        code = rk.canonical_code(loop)
        v = age_union_check(growing_chains(), [code], 20)[code]
        assert v.tag == "fails" and v.threshold == 0


class TestInternalColor:
    ELS = (UltraElement.const_index(0), UltraElement.const_index(2))

    def test_constant(self):
        cc = PerCoordColorings(chain(2), 2, ConstantColoring(1))
        assert internal_color(cc, self.ELS, growing_chains(), 25) == 1

    def test_perturbed_constant(self):
        cc = PerCoordColorings(chain(2), 3, PerturbedConstantColoring(2, ((3, 0), (5, 1))))
        assert internal_color(cc, self.ELS, growing_chains(), 25) == 2

    def test_excluded_set_respected(self):
        cc = PerCoordColorings(chain(2), 2, ConstantColoring(0),
                               excluded=frozenset({0, 1, 2}))
        assert internal_color(cc, self.ELS, growing_chains(), 25) == 0

    def test_parity_is_undecided(self):
        def parity(t, factor, pattern, k):
            return {c: t % 2 for c in enumerate_copies(pattern, factor)}

        cc = PerCoordColorings(chain(2), 2, CustomColoring(parity))
        assert internal_color(cc, self.ELS, growing_chains(), 25) is None

    def test_never_a_copy_is_an_error(self):
        cc = PerCoordColorings(chain(2), 2, ConstantColoring(0))
        collapsed = (UltraElement.const_index(1), UltraElement.const_index(1))
        with pytest.raises(ValueError):
            internal_color(cc, collapsed, growing_chains(), 25)


class TestTransferPieces:
    def test_phi_bs_constant(self):
        factor = chain(4)
        coloring = {c: 1 for c in enumerate_copies(chain(2), factor)}
        assert phi_bs_eval(factor, chain(3), chain(2), coloring, {1})
        assert not phi_bs_eval(factor, chain(3), chain(2), coloring, {0})
        assert phi_bs_eval(factor, chain(3), chain(2), coloring, {0, 1})

    def test_select_s_constant(self):
        factor = chain(4)
        coloring = {c: 1 for c in enumerate_copies(chain(2), factor)}
        assert select_s(factor, chain(3), chain(2), coloring, 2, 1) == frozenset({1})
        assert select_s(factor, chain(3), chain(2), coloring, 2, 2) == frozenset({0, 1})

    def test_rainbow_blocks_singletons(self):
        factor = chain(3)
        copies = enumerate_copies(chain(2), factor)
        coloring = {c: i for i, c in enumerate(copies)}
        assert select_s(factor, chain(3), chain(2), coloring, 3, 1) is None

    def test_six_chain_always_has_a_singleton(self):
        rng = random.Random(17)
        factor = chain(6)
        for _ in range(20):
            coloring = {c: rng.randrange(2)
                        for c in enumerate_copies(chain(2), factor)}
            assert select_s(factor, chain(3), chain(2), coloring, 2, 1) is not None


class TestTransferShadow:
    def test_constant_coloring_report(self):
        cc = PerCoordColorings(chain(2), 2, ConstantColoring(1))
        rep = transfer_shadow(growing_chains(), cc, chain(2), chain(3), 2, 1,
                              horizon=25)
        assert rep.part_a
        assert rep.certified_from == 5
        assert rep.s0 == frozenset({1})
        assert rep.s0_count == len([t for t, s in rep.selections
                                    if s is not None and t >= rep.selected_all_from])

    def test_d_equals_k_trivial(self):
        cc = PerCoordColorings(chain(2), 2, ConstantColoring(0))
        rep = transfer_shadow(growing_chains(), cc, chain(2), chain(3), 2, 2,
                              horizon=15)
        assert rep.part_a
        assert rep.s0 == frozenset({0, 1})

    def test_requires_trending(self):
        seq = StructureSequence(SIG_ORDER, (), ChainRule(0, 4))
        cc = PerCoordColorings(chain(2), 2, ConstantColoring(0))
        with pytest.raises(ValueError):
            transfer_shadow(seq, cc, chain(2), chain(3), 2, 1, horizon=15)

    def test_devlin_coloring_runs(self):
        cc = PerCoordColorings(chain(2), 2, DevlinChainColoring(2))
        rep = transfer_shadow(growing_chains(), cc, chain(2), chain(3), 2, 1,
                              horizon=15)
        assert rep.certified_from == 5
