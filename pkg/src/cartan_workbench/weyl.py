"""Characters of S, coset transversals, the Weyl action and the Weyl 2-cocycle.

Everything assumes c is trivial on S and S is normal and coordinatewise, so
a character of S is determined by one angle per non-trivial component.
Angles are exact; the action and cocycle are additive in angle notation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .algebra import ConvolutionAlgebra
from .cocycles import CocycleDescriptor
from .groups import Ball, GroupDescriptor, GroupElement, as_tuple, ball_array, probe_order
from .report import CheckResult, Clause
from .scalars import CircleElement, Cyclotomic, circle_product
from .subgroups import SubgroupDescriptor

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23)
# random characters use these denominators so that the lcm (the conductor of
# the convolution route) stays small
CHAR_DENOMINATORS = (1, 2, 3, 4, 5, 6, 8, 10, 12, 24)


class WeylError(ValueError):
    pass


class ConsistencyError(AssertionError):
    """Two independent computations of the same quantity disagreed."""


@dataclass(frozen=True)
class Character:
    angles: tuple[CircleElement, ...]

    @classmethod
    def of(cls, *angles) -> Character:
        return cls(tuple(a if isinstance(a, CircleElement) else CircleElement.from_angle(Fraction(a)) for a in angles))

    @classmethod
    def parse(cls, items: Sequence[str]) -> Character:
        return cls(tuple(CircleElement.parse(x) for x in items))

    def to_json(self) -> list[str]:
        return [str(a) for a in self.angles]

    def __str__(self) -> str:
        return "(" + ", ".join(str(a) for a in self.angles) + ")"


def coset_rep(S: SubgroupDescriptor, d: GroupDescriptor, g: Sequence[int]) -> GroupElement:
    """Componentwise residue: g_i mod k_i for scaling k_i >= 1, g_i where S is trivial."""
    g = d.element(g)
    return d.element([x % k if k else x for x, k in zip(g, S.scalings)])


def coset_rep_array(S: SubgroupDescriptor, d: GroupDescriptor, G: np.ndarray) -> np.ndarray:
    out = np.array(G, dtype=np.int64, copy=True)
    for i, k in enumerate(S.scalings):
        if k:
            out[..., i] %= k
    return d.reduce_array(out)


def validate_transversal(
    S: SubgroupDescriptor,
    d: GroupDescriptor,
    ball: Ball,
    rep: Callable[[np.ndarray], np.ndarray] | None = None,
    pair_samples: int = 2000,
    seed: int = 0,
) -> CheckResult:
    """Check a representative map on the ball.

    ``rep`` maps an array of elements to their representatives (defaults to
    the componentwise residue); pass a different map to test it.
    """
    rep = rep or (lambda A: coset_rep_array(S, d, A))
    G = probe_order(d, ball_array(d, ball))
    R = rep(G)
    clauses = []

    inside = S.contains_array(d.multiply_array(d.inverse_array(R), G))
    bad = np.nonzero(~inside)[0]
    clauses.append(
        Clause("rep^-1 g in S", len(bad) == 0, [{"g": as_tuple(G[i]), "rep": as_tuple(R[i])} for i in bad[:1]], len(G))
    )

    bad = np.nonzero(~np.all(rep(R) == R, axis=-1))[0]
    clauses.append(Clause("idempotent", len(bad) == 0, [{"g": as_tuple(G[i])} for i in bad[:1]], len(G)))

    # rep constant along S: together with the first clause (and normality)
    # this gives rep(g) = rep(h) iff g h^-1 in S
    witness = None
    for gen in S.generators():
        for sign in (1, -1):
            t = np.array(d.power(gen, sign), dtype=np.int64)
            moved = rep(d.multiply_array(G, t))
            bad = np.nonzero(~np.all(moved == R, axis=-1))[0]
            if len(bad) and witness is None:
                i = bad[0]
                witness = {"g": as_tuple(G[i]), "s": as_tuple(t), "rep(g)": as_tuple(R[i]), "rep(gs)": as_tuple(moved[i])}
    clauses.append(Clause("constant-on-cosets", witness is None, [witness] if witness else [], len(G)))

    rng = np.random.default_rng(seed)
    members = S.ball_members(d, ball)
    i = rng.integers(len(G), size=pair_samples)
    g = G[i]
    # half the pairs share a coset by construction, half are random
    h = np.where(
        (np.arange(pair_samples) % 2 == 0)[:, None],
        d.multiply_array(members[rng.integers(len(members), size=pair_samples)], g),
        G[rng.integers(len(G), size=pair_samples)],
    )
    same_rep = np.all(rep(g) == rep(h), axis=-1)
    same_coset = S.contains_array(d.multiply_array(g, d.inverse_array(h)))
    bad = np.nonzero(same_rep != same_coset)[0]
    clauses.append(
        Clause("rep-equal-iff-same-coset", len(bad) == 0, [{"g": as_tuple(g[j]), "h": as_tuple(h[j])} for j in bad[:1]], pair_samples)
    )
    return CheckResult.from_clauses("transversal", clauses, ball=ball.radius, seed=seed)


def char_eval(S: SubgroupDescriptor, nu: Character, s: Sequence[int]) -> CircleElement:
    coords = S.coordinates(s)
    return CircleElement.from_angle(sum((x * a.angle for x, a in zip(coords, nu.angles)), Fraction(0)))


class WeylContext:
    """The data (G, c, S) with c trivial on S, plus the Weyl constructions."""

    def __init__(self, group: GroupDescriptor, cocycle: CocycleDescriptor, subgroup: SubgroupDescriptor):
        subgroup.check_against(group)
        if not cocycle.is_trivial_on_box(subgroup):
            raise WeylError("cocycle is not trivial on S; the Weyl construction needs c|S = 1")
        self.group = group
        self.cocycle = cocycle
        self.subgroup = subgroup
        self.dual_path_checks = 0
        self._algebras: dict[int, ConvolutionAlgebra] = {}

    # --- characters -----------------------------------------------------------

    @property
    def char_rank(self) -> int:
        return len(self.subgroup.active)

    def char_orders(self) -> list[int]:
        """Order of each generator of S (0 for infinite order)."""
        out = []
        for i in self.subgroup.active:
            m = self.group.moduli[i]
            out.append(m // self.subgroup.scalings[i] if m else 0)
        return out

    def check_character(self, nu: Character) -> None:
        if len(nu.angles) != self.char_rank:
            raise WeylError(f"character needs {self.char_rank} angles, got {len(nu.angles)}")
        for a, n in zip(nu.angles, self.char_orders()):
            if n and not (a ** n).is_identity():
                raise WeylError(f"angle {a} is not compatible with a generator of order {n}")

    def char_eval(self, nu: Character, s: Sequence[int]) -> CircleElement:
        return char_eval(self.subgroup, nu, s)

    def random_character(self, rng: np.random.Generator) -> Character:
        angles = []
        for n in self.char_orders():
            q = n if n else int(rng.choice(CHAR_DENOMINATORS))
            angles.append(CircleElement.from_angle(Fraction(int(rng.integers(q)), q)))
        return Character(tuple(angles))

    def prime_characters(self) -> list[Character]:
        """Angles 1/p on every free generator, for each prime p <= 23."""
        out = []
        for p in PRIMES:
            angles = []
            for n in self.char_orders():
                q = n if n else p
                angles.append(CircleElement.from_angle(Fraction(1, q)))
            out.append(Character(tuple(angles)))
        return out

    # --- transversal ----------------------------------------------------------

    def rep(self, g: Sequence[int]) -> GroupElement:
        return coset_rep(self.subgroup, self.group, g)

    # --- action ---------------------------------------------------------------

    def action_at(self, g: Sequence[int], nu: Character, s: Sequence[int]) -> CircleElement:
        """conj(c(g,g^-1)) c(g^-1,s) c(g^-1 s,g) nu(g^-1 s g), for s in S."""
        d, c = self.group, self.cocycle
        g = d.element(g)
        g_inv = d.inverse(g)
        g_inv_s = d.multiply(g_inv, s)
        conj = d.multiply(g_inv_s, g)
        if not self.subgroup.contains(conj):
            raise WeylError(f"g^-1 s g = {conj} is not in S (S not normal)")
        return circle_product(
            [c(g, g_inv).conjugate(), c(g_inv, s), c(g_inv_s, g), self.char_eval(nu, conj)]
        )

    def weyl_action(self, g: Sequence[int], nu: Character) -> Character:
        self.check_character(nu)
        return Character(tuple(self.action_at(g, nu, e) for e in self.subgroup.generators()))

    # --- cocycle --------------------------------------------------------------

    def _algebra(self, conductor: int) -> ConvolutionAlgebra:
        alg = self._algebras.get(conductor)
        if alg is None:
            alg = self._algebras[conductor] = ConvolutionAlgebra(self.group, self.cocycle, conductor)
        return alg

    def sigma_scalar(self, g: Sequence[int], h: Sequence[int]) -> tuple[CircleElement, GroupElement]:
        """(lambda, w) with delta_{r[gh]}^* delta_{r[g]} delta_{r[h]} = lambda delta_w."""
        d, c = self.group, self.cocycle
        a, b = self.rep(g), self.rep(h)
        x = self.rep(d.multiply(g, h))
        x_inv = d.inverse(x)
        w = d.multiply(d.multiply(x_inv, a), b)
        if not self.subgroup.contains(w):
            raise ConsistencyError(f"r[gh]^-1 r[g] r[h] = {w} is not in S")
        lam = circle_product([c(x, x_inv).conjugate(), c(x_inv, a), c(d.multiply(x_inv, a), b)])
        return lam, w

    def weyl_cocycle(self, g: Sequence[int], h: Sequence[int], nu: Character) -> CircleElement:
        self.check_character(nu)
        lam, w = self.sigma_scalar(g, h)
        value = lam * self.char_eval(nu, w)

        # second route: convolve the deltas and pair the result with nu
        den = math.lcm(value.den, *(a.den for a in nu.angles))
        alg = self._algebra(den)
        d = self.group
        x = self.rep(d.multiply(g, h))
        prod = alg.delta(x).star() * alg.delta(self.rep(g)) * alg.delta(self.rep(h))
        paired = Cyclotomic.zero(alg.conductor)
        for s, z in prod.terms.items():
            if not self.subgroup.contains(s):
                raise ConsistencyError(f"product of representatives has support {s} outside S")
            paired = paired + z * alg.root(self.char_eval(nu, s))
        if paired.norm_sq() != 1 or paired != alg.root(value):
            raise ConsistencyError(
                f"Weyl cocycle routes disagree at g={tuple(g)}, h={tuple(h)}, nu={nu}: "
                f"{value} vs {paired}"
            )
        self.dual_path_checks += 1
        return value

    def sigma_cocycle_identity_check(
        self, g: Sequence[int], h: Sequence[int], k: Sequence[int], nu: Character
    ) -> bool:
        """sigma(g,h,a_k nu) sigma(gh,k,nu) == sigma(g,hk,nu) sigma(h,k,nu), plus normalization."""
        d = self.group
        e = d.identity
        moved = self.weyl_action(k, nu)
        lhs = self.weyl_cocycle(g, h, moved) * self.weyl_cocycle(d.multiply(g, h), k, nu)
        rhs = self.weyl_cocycle(g, d.multiply(h, k), nu) * self.weyl_cocycle(h, k, nu)
        normalized = (
            self.weyl_cocycle(e, h, nu).is_identity() and self.weyl_cocycle(g, e, nu).is_identity()
        )
        return lhs == rhs and normalized

    # --- freeness evidence ------------------------------------------------------

    def class_reps(self, ball: Ball) -> list[GroupElement]:
        G = probe_order(self.group, ball_array(self.group, ball))
        R = coset_rep_array(self.subgroup, self.group, G)
        _, first = np.unique(R, axis=0, return_index=True)
        return [as_tuple(R[i]) for i in sorted(first)]

    def freeness_scan(self, ball: Ball, char_samples: int = 50, seed: int = 0) -> CheckResult:
        rng = np.random.default_rng(seed)
        chars = self.prime_characters() + [self.random_character(rng) for _ in range(char_samples)]
        identity_rep = self.rep(self.group.identity)
        moved, stuck = [], []
        for r in self.class_reps(ball):
            if r == identity_rep:
                continue
            for nu in chars:
                image = self.weyl_action(r, nu)
                if image != nu:
                    moved.append({"class": r, "nu": nu.to_json(), "image": image.to_json()})
                    break
            else:
                stuck.append({"class": r})
        return CheckResult.from_clauses(
            "freeness-evidence",
            [Clause("every-nontrivial-class-moves-a-character", None if stuck else True, stuck[:10], len(moved) + len(stuck))],
            ball=ball.radius,
            seed=seed,
            values={"classes_with_witness": len(moved), "classes_without": len(stuck), "examples": moved[:5]},
            note="witness-based evidence only, not a density certificate",
        )


# ---------------------------------------------------------------------------
# the Weyl groupoid


@dataclass(frozen=True)
class WeylArrow:
    rep: GroupElement
    source: Character


def make_arrow(ctx: WeylContext, g: Sequence[int], source: Character) -> WeylArrow:
    ctx.check_character(source)
    return WeylArrow(ctx.rep(g), source)


def arrow_range(ctx: WeylContext, a: WeylArrow) -> Character:
    return ctx.weyl_action(a.rep, a.source)


def compose_arrows(ctx: WeylContext, a1: WeylArrow, a2: WeylArrow) -> WeylArrow:
    """a1 after a2: ([g], a_h y) . ([h], y) = ([gh], y)."""
    if arrow_range(ctx, a2) != a1.source:
        raise WeylError(
            f"arrows are not composable: range {arrow_range(ctx, a2)} != source {a1.source}"
        )
    return WeylArrow(ctx.rep(ctx.group.multiply(a1.rep, a2.rep)), a2.source)


# ---------------------------------------------------------------------------
# sampled invariant suite


def weyl_invariant_suite(
    ctx: WeylContext, ball: Ball = Ball(2), samples: int = 200, seed: int = 0
) -> list[CheckResult]:
    d = ctx.group
    rng = np.random.default_rng(seed)
    G = ball_array(d, ball)
    members = ctx.subgroup.ball_members(d, ball)
    fails: dict[str, dict | None] = {
        "rep-independence": None,
        "action-law": None,
        "character-integrity": None,
        "sigma-normalization": None,
        "sigma-cocycle-identity": None,
    }
    before = ctx.dual_path_checks

    def pick(pool):
        return as_tuple(pool[rng.integers(len(pool))])

    for _ in range(samples):
        g, h, k, s = pick(G), pick(G), pick(G), pick(members)
        nu = ctx.random_character(rng)
        out = ctx.weyl_action(g, nu)
        if ctx.weyl_action(d.multiply(s, g), nu) != out and fails["rep-independence"] is None:
            fails["rep-independence"] = {"g": g, "s": s, "nu": nu.to_json()}
        if ctx.weyl_action(g, ctx.weyl_action(h, nu)) != ctx.weyl_action(d.multiply(g, h), nu):
            fails["action-law"] = fails["action-law"] or {"g": g, "h": h, "nu": nu.to_json()}
        try:
            ctx.check_character(out)
            t, u = pick(members), pick(members)
            ok = ctx.char_eval(out, d.multiply(t, u)) == ctx.char_eval(out, t) * ctx.char_eval(out, u)
            ok = ok and ctx.char_eval(out, t) == ctx.action_at(g, nu, t)
        except Exception:  # noqa: BLE001 - any failure here is a broken invariant
            ok = False
        if not ok and fails["character-integrity"] is None:
            fails["character-integrity"] = {"g": g, "nu": nu.to_json()}
        e = d.identity
        if not (ctx.weyl_cocycle(e, h, nu).is_identity() and ctx.weyl_cocycle(g, e, nu).is_identity()):
            fails["sigma-normalization"] = fails["sigma-normalization"] or {"g": g, "h": h, "nu": nu.to_json()}
        if not ctx.sigma_cocycle_identity_check(g, h, k, nu):
            fails["sigma-cocycle-identity"] = fails["sigma-cocycle-identity"] or {
                "g": g, "h": h, "k": k, "nu": nu.to_json()
            }
    results = [
        CheckResult.from_clauses(f"weyl-{name}", [Clause(name, w is None, [w] if w else [], samples)], ball=ball.radius, seed=seed)
        for name, w in fails.items()
    ]
    results.append(
        CheckResult(
            "weyl-dual-path",
            "pass",
            ball=ball.radius,
            seed=seed,
            values={"agreeing_calls": ctx.dual_path_checks - before},
        )
    )
    return results
