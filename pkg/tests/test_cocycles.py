import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cocycle_angle, g5_inv, g5_mul, small_box, unit
from cartan_workbench import builtins as bi
from cartan_workbench.cocycles import (
    CocycleDescriptor,
    check_inverse_symmetry,
    equivalence_chain_check,
    equivalence_chain_suite,
    eta_t_equivalence_check,
    eta_t_suite,
    is_symmetric_on,
    is_trivial_on,
    validate_cocycle,
)
from cartan_workbench.groups import Ball, GroupDescriptor
from cartan_workbench.scalars import CircleElement
from cartan_workbench.subgroups import SubgroupDescriptor

coords = st.integers(-5, 5)
g5_elements = st.tuples(coords, coords, coords, coords, coords)


def brute_force_identity_defect(terms, box):
    """First (g, h, k) in the box violating the cocycle identity, via floats."""
    for g, h, k in itertools.product(box, repeat=3):
        lhs = cocycle_angle(terms, g, g5_mul(h, k)) + cocycle_angle(terms, h, k)
        rhs = cocycle_angle(terms, g5_mul(g, h), k) + cocycle_angle(terms, g, h)
        if abs(unit(lhs) - unit(rhs)) > 1e-9:
            return g, h, k
    return None


class TestEvaluation:
    def test_example(self, c5):
        assert c5((0, 0, 0, 1, 0), (1, 0, 0, 0, 0)) == CircleElement.parse("1/2")
        assert c5((1, 0, 0, 0, 0), (0, 0, 0, 1, 0)) == CircleElement(0, 1)

    @given(g5_elements, g5_elements)
    def test_matches_float_oracle(self, a, b):
        terms = [(4, 1, Fraction(1, 2)), (2, 3, Fraction(1, 3)), (5, 5, Fraction(3, 8))]
        c = CocycleDescriptor.of(*terms)
        assert abs(c(a, b).to_complex() - unit(cocycle_angle(terms, a, b))) < 1e-9

    @given(g5_elements, g5_elements)
    def test_array_matches_exact(self, a, b):
        c = CocycleDescriptor.of((4, 1, "1/2"), (3, 2, "5/12"))
        num = int(c.eval_array(np.array(a), np.array(b)))
        assert CircleElement.from_angle(Fraction(num, c.denominator)) == c(a, b)

    def test_json(self, c5):
        assert c5.to_json() == [{"left": 4, "right": 1, "angle": "1/2"}]


class TestValidateCocycle:
    def test_builtin_passes(self, g5, c5):
        assert validate_cocycle(c5, g5, Ball(3), samples=2000).passed

    def test_torsion_builtin_passes(self, g7):
        assert validate_cocycle(bi.C7, g7, Ball(3), samples=2000).passed

    def test_untwisted_coordinate_term_is_a_cocycle(self, g5):
        # the third coordinate is never twisted, so this term is bilinear
        terms = [(5, 3, Fraction(1, 2))]
        box = list(itertools.product((0, 1), (0, 1), (-1, 0, 1), (0, 1), (-1, 1)))
        assert brute_force_identity_defect(terms, box) is None
        r = validate_cocycle(CocycleDescriptor.of(*terms), g5, Ball(2), samples=3000)
        assert r.passed

    def test_twisted_coordinate_term_fails_with_replayable_witness(self, g5):
        terms = [(4, 1, Fraction(1, 4))]
        assert brute_force_identity_defect(terms, small_box(5, 1)) is not None
        c = CocycleDescriptor.of(*terms)
        r = validate_cocycle(c, g5, Ball(2), samples=3000)
        assert r.verdict == "fail"
        w = r.clause("cocycle-identity").witnesses[0]
        g, h, k = w["g"], w["h"], w["k"]
        lhs = c(g, g5.multiply(h, k)) * c(h, k)
        rhs = c(g5.multiply(g, h), k) * c(g, h)
        assert lhs != rhs
        assert (str(lhs), str(rhs)) == (w["lhs"], w["rhs"])

    def test_torsion_incompatible_term(self, g7):
        r = validate_cocycle(CocycleDescriptor.of((5, 3, "1/3")), g7, Ball(1))
        assert r.verdict == "fail"
        assert r.clause("structure").witnesses[0]["problem"] == "left component Z/4 not respected"

    def test_out_of_range_index(self, g5):
        r = validate_cocycle(CocycleDescriptor.of((6, 1, "1/2")), g5, Ball(1))
        assert r.verdict == "fail"

    def test_deterministic(self, g5, c5):
        a = validate_cocycle(c5, g5, Ball(2), seed=4).to_json()
        b = validate_cocycle(c5, g5, Ball(2), seed=4).to_json()
        assert a == b


class TestSymmetry:
    def test_inverse_symmetry(self, g5, c5):
        assert check_inverse_symmetry(c5, g5, Ball(2)).passed

    @pytest.mark.parametrize("S", [bi.S0, bi.S1, bi.S2])
    def test_trivial_on_subgroups(self, g5, c5, S):
        assert is_trivial_on(c5, g5, S, Ball(3)).passed
        assert is_symmetric_on(c5, g5, S, Ball(3)).passed
        assert c5.is_trivial_on_box(S)

    def test_not_symmetric_on_whole_group(self, g5, c5):
        G = SubgroupDescriptor((1, 1, 1, 1, 1))
        r = is_symmetric_on(c5, g5, G, Ball(1))
        assert r.verdict == "fail"
        w = r.witnesses[0]
        assert c5(w["s"], w["t"]) != c5(w["t"], w["s"])
        assert not c5.is_trivial_on_box(G)

    @given(st.integers(1, 4), st.integers(1, 4))
    def test_box_triviality_matches_scan(self, k1, k4):
        S = SubgroupDescriptor((k1, 0, 0, k4, 0))
        d = GroupDescriptor.from_components(["Z"] * 5)
        scan = is_trivial_on(bi.C5, d, S, Ball(4)).passed
        assert bi.C5.is_trivial_on_box(S) == scan == (k1 * k4 % 2 == 0)


class TestEquivalenceChain:
    @pytest.mark.parametrize("d, c", [(bi.G5, bi.C5), (bi.G7, bi.C7)])
    def test_suite_agrees_on_every_commuting_pair(self, d, c):
        r = equivalence_chain_suite(c, d, Ball(2))
        assert r.passed
        v = r.values
        assert v["commuting_pairs"] == v["all_true"] + v["all_false"] > 0
        assert v["all_false"] > 0

    @settings(max_examples=200)
    @given(g5_elements, g5_elements)
    def test_single_pairs(self, eta, xi):
        d, c = bi.G5, bi.C5
        if not d.commute(eta, xi):
            with pytest.raises(ValueError):
                equivalence_chain_check(c, d, eta, xi)
            return
        vals = equivalence_chain_check(c, d, eta, xi)
        assert len(set(vals)) == 1
        # independent statement of the first equality
        same = abs(unit(cocycle_angle([(4, 1, 0.5)], xi, eta)) - unit(cocycle_angle([(4, 1, 0.5)], eta, xi)))
        assert vals[0] == (same < 1e-9)

    def test_example_pair(self, g5, c5):
        assert equivalence_chain_check(c5, g5, (0, 0, 0, 1, 0), (1, 0, 0, 0, 0)) == (False,) * 4


class TestEtaT:
    def test_counterexample_pair(self, g7):
        h1, h2, t = eta_t_equivalence_check(bi.C7, g7, bi.S7, (0, 0, 2, 0, 0), (0, 0, 0, 0, 1), Ball(2))
        assert (h1, h2) == (True, True)

    def test_failing_pair_reports_t(self, g5, c5):
        s, eta = (1, 0, 0, 0, 0), (0, 0, 0, 1, 0)
        h1, h2, t = eta_t_equivalence_check(c5, g5, bi.S1, s, eta, Ball(2))
        assert (h1, h2) == (False, False)
        et = g5.multiply(eta, t)
        assert c5(s, et) != c5(et, s)

    def test_rejects_non_commuting(self, g5, c5):
        with pytest.raises(ValueError):
            eta_t_equivalence_check(c5, g5, bi.S0, (0, 0, 0, 0, 1), (0, 0, 1, 0, 0), Ball(1))

    @pytest.mark.parametrize("d, c, S", [(bi.G5, bi.C5, bi.S0), (bi.G5, bi.C5, bi.S1), (bi.G5, bi.C5, bi.S2), (bi.G7, bi.C7, bi.S7)])
    def test_suite(self, d, c, S):
        r = eta_t_suite(c, d, S, Ball(2), samples=100, seed=1)
        assert r.passed
        assert r.values["tested"] == 100


def test_inverse_oracle_consistency(g5):
    for a in small_box(5, 1)[:50]:
        assert g5_mul(a, g5_inv(a)) == (0,) * 5
