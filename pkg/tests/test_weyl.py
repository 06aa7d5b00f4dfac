from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import action_oracle, cocycle_angle, g5_inv, g5_mul, sigma_oracle
from cartan_workbench import builtins as bi
from cartan_workbench.cocycles import CocycleDescriptor
from cartan_workbench.groups import Ball
from cartan_workbench.scalars import CircleElement
from cartan_workbench.subgroups import SubgroupDescriptor
from cartan_workbench.weyl import (
    Character,
    WeylContext,
    WeylError,
    char_eval,
    compose_arrows,
    coset_rep,
    coset_rep_array,
    make_arrow,
    validate_transversal,
    weyl_invariant_suite,
)

F = Fraction
small = st.integers(-3, 3)
g5_elements = st.tuples(small, small, small, small, small)
angle = st.sampled_from([F(k, q) for q in (1, 2, 3, 4, 5, 8, 12) for k in range(q)])


def ang(*xs):
    return Character.of(*xs)


def wrap(xs):
    return tuple(CircleElement.from_angle(F(x)) for x in xs)


SUBGROUPS = {"S0": bi.S0, "S1": bi.S1, "S2": bi.S2}


@pytest.fixture(params=["S0", "S1", "S2"])
def labelled_ctx(request):
    return request.param, WeylContext(bi.G5, bi.C5, SUBGROUPS[request.param])


class TestCosetRep:
    @pytest.mark.parametrize(
        "S, g, rep",
        [
            (bi.S1, (5, -2, 7, 3, 4), (0, 0, 0, 1, 4)),
            (bi.S0, (1, 2, 3, 4, 5), (0, 0, 3, 4, 0)),
            (bi.S2, (3, 1, 1, 1, -2), (1, 0, 0, 0, -2)),
            (bi.S1, (1, 1, 1, 2, 0), (0, 0, 0, 0, 0)),
        ],
    )
    def test_examples(self, g5, S, g, rep):
        assert coset_rep(S, g5, g) == rep

    def test_torsion(self, g7):
        assert coset_rep(bi.S7, g7, (3, 1, 5, 3, 3)) == (0, 0, 0, 1, 1)

    @given(g5_elements)
    def test_array_matches_scalar(self, g):
        for S in SUBGROUPS.values():
            assert tuple(coset_rep_array(S, bi.G5, np.array([g]))[0]) == coset_rep(S, bi.G5, g)

    @pytest.mark.parametrize("S", [bi.S0, bi.S1, bi.S2])
    def test_validate(self, g5, S):
        assert validate_transversal(S, g5, Ball(3)).passed

    def test_validate_torsion(self, g7):
        assert validate_transversal(bi.S7, g7, Ball(3)).passed

    def test_corrupted_rep_is_caught(self, g5):
        def corrupted(A):
            out = coset_rep_array(bi.S1, g5, A)
            out[..., 3] = A[..., 3]  # skip the residue on the fourth coordinate
            return out

        r = validate_transversal(bi.S1, g5, Ball(3), rep=corrupted)
        assert r.verdict == "fail"
        w = r.clause("constant-on-cosets").witnesses[0]
        gs = g5_mul(w["g"], w["s"])
        assert bi.S1.contains(w["s"])
        assert tuple(corrupted(np.array([w["g"]]))[0]) != tuple(corrupted(np.array([gs]))[0])


class TestCharacters:
    def test_char_eval_examples(self, g7):
        assert char_eval(bi.S1, ang("1/8", "1/3", 0, 0), (1, 1, 0, 2, 0)) == CircleElement.parse("11/24")
        assert char_eval(bi.S1, ang("1/8", "1/3", "1/2", "1/5"), (0,) * 5) == CircleElement(0, 1)
        assert char_eval(bi.S7, ang(0, 0, 0, 0, "1/2"), (0, 0, 0, 0, 2)) == CircleElement.parse("1/2")

    def test_non_member(self):
        with pytest.raises(ValueError):
            char_eval(bi.S1, ang(0, 0, 0, 0), (0, 0, 0, 1, 0))

    def test_torsion_orders(self, g7):
        ctx = WeylContext(g7, bi.C7, bi.S7)
        assert ctx.char_orders() == [4, 4, 0, 0, 2]
        ctx.check_character(ang(0, "1/4", "1/7", 0, "1/2"))
        with pytest.raises(WeylError, match="not compatible"):
            ctx.check_character(ang(0, 0, 0, 0, "1/4"))
        with pytest.raises(WeylError, match="needs 5"):
            ctx.check_character(ang(0, 0))

    def test_json(self):
        nu = ang("1/8", "1/3")
        assert nu.to_json() == ["1/8", "1/3"]
        assert Character.parse(nu.to_json()) == nu


class TestWeylAction:
    def test_s0_example(self):
        ctx = WeylContext(bi.G5, bi.C5, bi.S0)
        assert ctx.weyl_action((0, 0, 1, 1, 0), ang("1/8", "1/3", 0)) == ang("5/8", "1/3", "11/12")

    def test_s2_example(self):
        ctx = WeylContext(bi.G5, bi.C5, bi.S2)
        assert ctx.weyl_action((1, 0, 0, 0, 1), ang("1/8", "1/3", 0, 0)) == ang("1/8", "1/3", "7/8", "5/6")

    @settings(max_examples=150, deadline=None)
    @given(g5_elements, st.lists(angle, min_size=4, max_size=4), st.sampled_from(["S0", "S1", "S2"]))
    def test_closed_forms(self, g, th, label):
        ctx = WeylContext(bi.G5, bi.C5, SUBGROUPS[label])
        th = th[: ctx.char_rank]
        got = ctx.weyl_action(g, Character(wrap(th)))
        assert got.angles == wrap(action_oracle(label, g, th))

    @settings(max_examples=60, deadline=None)
    @given(g5_elements, st.lists(angle, min_size=4, max_size=4))
    def test_members_act_trivially(self, s, th):
        for S in SUBGROUPS.values():
            ctx = WeylContext(bi.G5, bi.C5, S)
            member = tuple(x * k for x, k in zip(s, S.scalings))
            nu = Character(wrap(th[: ctx.char_rank]))
            assert ctx.weyl_action(member, nu) == nu

    def test_float_formula(self, labelled_ctx):
        # the defining formula evaluated with floats at one generator
        label, ctx = labelled_ctx
        g, th = (1, 2, -1, 3, 1), [F(1, 8), F(1, 3), F(1, 5), F(2, 7)][: ctx.char_rank]
        nu = Character(wrap(th))
        terms = [(4, 1, 0.5)]
        gi = g5_inv(g)
        for e, got in zip(ctx.subgroup.generators(), ctx.weyl_action(g, nu).angles):
            conj = g5_mul(g5_mul(gi, e), g)
            coords = ctx.subgroup.coordinates(conj)
            x = (
                -cocycle_angle(terms, g, gi)
                + cocycle_angle(terms, gi, e)
                + cocycle_angle(terms, g5_mul(gi, e), g)
                + sum(float(c * t) for c, t in zip(coords, th))
            )
            assert abs(((x - float(got.angle)) + 0.5) % 1 - 0.5) < 1e-9

    def test_nontrivial_cocycle_on_s_is_rejected(self):
        with pytest.raises(WeylError, match="not trivial"):
            WeylContext(bi.G5, bi.C5, SubgroupDescriptor((1, 1, 1, 1, 0)))

    def test_non_normal_subgroup_is_rejected(self, g5):
        ctx = WeylContext(g5, CocycleDescriptor.of(), SubgroupDescriptor((0, 0, 1, 0, 0)))
        with pytest.raises(WeylError, match="not normal"):
            ctx.weyl_action((0, 0, 0, 0, 1), ang(0))


class TestWeylCocycle:
    @pytest.mark.parametrize(
        "S, g, h, nu, expected",
        [
            (bi.S0, (1, 2, 3, 4, 5), (0, 1, -1, 1, 2), ang("1/8", "1/3", "1/5"), "0/1"),
            (bi.S1, (0, 0, 0, 0, 1), (0, 0, 0, 1, 0), ang(0, "1/3", 0, 0), "2/3"),
            (bi.S2, (1, 0, 0, 0, 0), (1, 0, 0, 0, 0), ang("1/4", 0, 0, 0), "1/4"),
        ],
    )
    def test_examples(self, S, g, h, nu, expected):
        ctx = WeylContext(bi.G5, bi.C5, S)
        assert str(ctx.weyl_cocycle(g, h, nu)) == expected
        assert ctx.dual_path_checks == 1

    @settings(max_examples=100, deadline=None)
    @given(g5_elements, g5_elements, st.lists(angle, min_size=4, max_size=4), st.sampled_from(["S0", "S1", "S2"]))
    def test_closed_forms(self, g, h, th, label):
        ctx = WeylContext(bi.G5, bi.C5, SUBGROUPS[label])
        th = th[: ctx.char_rank]
        got = ctx.weyl_cocycle(g, h, Character(wrap(th)))
        assert got == CircleElement.from_angle(sigma_oracle(label, g, h, th))

    @settings(max_examples=60, deadline=None)
    @given(g5_elements, g5_elements, g5_elements, st.lists(angle, min_size=4, max_size=4))
    def test_groupoid_cocycle_identity(self, g, h, k, th):
        for S in SUBGROUPS.values():
            ctx = WeylContext(bi.G5, bi.C5, S)
            assert ctx.sigma_cocycle_identity_check(g, h, k, Character(wrap(th[: ctx.char_rank])))

    def test_identity_at_unit(self, labelled_ctx):
        _, ctx = labelled_ctx
        e = (0,) * 5
        assert ctx.sigma_cocycle_identity_check(e, e, e, Character(wrap([F(1, 3)] * ctx.char_rank)))

    def test_dual_path_disagreement_raises(self, monkeypatch):
        from cartan_workbench.weyl import ConsistencyError

        ctx = WeylContext(bi.G5, bi.C5, bi.S1)
        lam_w = ctx.sigma_scalar
        monkeypatch.setattr(
            ctx, "sigma_scalar", lambda g, h: (lam_w(g, h)[0] * CircleElement.parse("1/2"), lam_w(g, h)[1])
        )
        with pytest.raises(ConsistencyError):
            ctx.weyl_cocycle((0, 0, 0, 0, 1), (0, 0, 0, 1, 0), ang(0, "1/3", 0, 0))


class TestRotation:
    @pytest.mark.parametrize("n", range(-4, 5))
    def test_translation(self, n):
        ctx = WeylContext(bi.GROT, bi.CROT, bi.SROT)
        nu = ang("1/7")
        assert ctx.weyl_action((n, 0), nu) == ang(F(1, 7) + F(n, 5))
        assert ctx.weyl_cocycle((n, 3), (2 - n, -1), nu).is_identity()

    @pytest.mark.parametrize("n", range(-4, 5))
    def test_first_axis_has_opposite_sign(self, n):
        ctx = WeylContext(bi.GROT, bi.CROT, bi.SROT_FIRST_AXIS)
        assert ctx.weyl_action((0, n), ang("1/7")) == ang(F(1, 7) - F(n, 5))

    def test_other_theta(self):
        ctx = WeylContext(bi.GROT, bi.rotation_cocycle(F(2, 9)), bi.SROT)
        assert ctx.weyl_action((2, 0), ang(0)) == ang(F(4, 9))


class TestArrows:
    def test_unit_arrow(self):
        ctx = WeylContext(bi.G5, bi.C5, bi.S0)
        a = make_arrow(ctx, (0, 0, 1, 2, 0), ang("1/8", "1/3", 0))
        unit_at_range = make_arrow(ctx, (0,) * 5, ctx.weyl_action(a.rep, a.source))
        assert compose_arrows(ctx, unit_at_range, a) == a

    def test_s0_composition(self):
        ctx = WeylContext(bi.G5, bi.C5, bi.S0)
        nu = ang("1/8", "1/3", 0)
        a2 = make_arrow(ctx, (0, 0, 0, 1, 0), nu)
        a1 = make_arrow(ctx, (0, 0, 1, 0, 0), ctx.weyl_action(a2.rep, nu))
        out = compose_arrows(ctx, a1, a2)
        assert out.rep == (0, 0, 1, 1, 0) and out.source == nu

    def test_mismatch(self):
        ctx = WeylContext(bi.G5, bi.C5, bi.S0)
        a2 = make_arrow(ctx, (0, 0, 0, 1, 0), ang("1/8", "1/3", 0))
        with pytest.raises(WeylError, match="not composable"):
            compose_arrows(ctx, a2, a2)


class TestSuites:
    @pytest.mark.parametrize("S", [bi.S0, bi.S1, bi.S2])
    def test_invariant_suite(self, S):
        ctx = WeylContext(bi.G5, bi.C5, S)
        results = weyl_invariant_suite(ctx, Ball(2), samples=50, seed=3)
        assert all(r.passed for r in results), [r.check for r in results if not r.passed]
        assert results[-1].values["agreeing_calls"] > 0

    def test_torsion_invariant_suite(self, g7):
        results = weyl_invariant_suite(WeylContext(g7, bi.C7, bi.S7), Ball(2), samples=50)
        assert all(r.passed for r in results)

    @pytest.mark.parametrize("S", [bi.S1, bi.S2], ids=["S1", "S2"])
    def test_freeness(self, S):
        r = WeylContext(bi.G5, bi.C5, S).freeness_scan(Ball(2))
        assert r.passed
        assert r.values["classes_without"] == 0

    def test_rotation_freeness_skips_identity(self):
        r = WeylContext(bi.GROT, bi.CROT, bi.SROT).freeness_scan(Ball(2))
        assert r.passed
        assert r.values["classes_with_witness"] == 4
