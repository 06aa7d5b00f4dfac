"""Twisted convolution *-algebra of finitely supported functions G -> Q(zeta_N)."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cocycles import CocycleDescriptor
from .groups import Ball, GroupDescriptor, GroupElement, as_tuple, ball_array, probe_order
from .report import CheckResult, Clause
from .scalars import CircleElement, Cyclotomic
from .subgroups import SubgroupDescriptor


@lru_cache(maxsize=4096)
def _root(num: int, den: int, conductor: int) -> Cyclotomic:
    return Cyclotomic.from_circle(CircleElement(num, den), conductor)


class AlgebraElement:
    """A finite formal sum of group elements with cyclotomic coefficients."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: ConvolutionAlgebra, terms: Mapping[GroupElement, Cyclotomic]):
        self.algebra = algebra
        clean = {}
        for g, z in terms.items():
            if not z.is_zero():
                clean[tuple(g)] = z.promote(algebra.conductor) if z.conductor != algebra.conductor else z
        self.terms: dict[GroupElement, Cyclotomic] = clean

    def __call__(self, g: Sequence[int]) -> Cyclotomic:
        return self.terms.get(tuple(g), Cyclotomic.zero(self.algebra.conductor))

    @property
    def support(self) -> list[GroupElement]:
        return sorted(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        return self.algebra.add(self, other)

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        return self.algebra.add(self, -other)

    def __neg__(self) -> AlgebraElement:
        return self.algebra.scale(-1, self)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self.algebra.convolve(self, other)
        return self.algebra.scale(other, self)

    def __rmul__(self, other):
        return self.algebra.scale(other, self)

    def star(self) -> AlgebraElement:
        return self.algebra.adjoint(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if self.terms.keys() != other.terms.keys():
            return False
        return all(self.terms[g] == other.terms[g] for g in self.terms)

    __hash__ = None  # type: ignore[assignment]

    def to_json(self) -> list[dict]:
        return [{"element": list(g), "coeff": self.terms[g].to_json()} for g in self.support]

    def __repr__(self) -> str:
        inner = " + ".join(f"({self.terms[g]})*d{g}" for g in self.support)
        return f"AlgebraElement({inner or '0'})"


class ConvolutionAlgebra:
    """C_c(G, c) with coefficients in Q(zeta_N), N fixed per session."""

    def __init__(self, group: GroupDescriptor, cocycle: CocycleDescriptor, conductor: int = 1):
        self.group = group
        self.cocycle = cocycle
        self.conductor = math.lcm(cocycle.denominator, 4, conductor)

    # --- scalars ------------------------------------------------------------

    def root(self, a: CircleElement) -> Cyclotomic:
        return _root(a.num, a.den, self.conductor)

    def c(self, a: Sequence[int], b: Sequence[int]) -> Cyclotomic:
        return self.root(self.cocycle(a, b))

    def _coeff(self, z) -> Cyclotomic:
        if isinstance(z, CircleElement):
            return self.root(z)
        if isinstance(z, Cyclotomic):
            return z
        return Cyclotomic.rational(z, self.conductor)

    # --- linear structure ---------------------------------------------------

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, {})

    def delta(self, g: Sequence[int], coeff=1) -> AlgebraElement:
        return AlgebraElement(self, {self.group.element(g): self._coeff(coeff)})

    def element(self, terms: Iterable[tuple[Sequence[int], object]]) -> AlgebraElement:
        out = self.zero()
        for g, z in terms:
            out = out + self.delta(g, z)
        return out

    def add(self, f: AlgebraElement, h: AlgebraElement) -> AlgebraElement:
        terms = dict(f.terms)
        for g, z in h.terms.items():
            terms[g] = terms[g] + z if g in terms else z
        return AlgebraElement(self, terms)

    def scale(self, z, f: AlgebraElement) -> AlgebraElement:
        z = self._coeff(z)
        return AlgebraElement(self, {g: z * w for g, w in f.terms.items()})

    # --- *-algebra structure ------------------------------------------------

    def convolve(self, f: AlgebraElement, h: AlgebraElement) -> AlgebraElement:
        """(f*h) = sum over pairs of f(a) h(b) c(a, b) delta_{ab}."""
        d = self.group
        terms: dict[GroupElement, Cyclotomic] = {}
        for a, x in f.terms.items():
            for b, y in h.terms.items():
                g = d.multiply(a, b)
                z = x * y * self.c(a, b)
                terms[g] = terms[g] + z if g in terms else z
        return AlgebraElement(self, terms)

    def adjoint(self, f: AlgebraElement) -> AlgebraElement:
        """f*(gamma) = conj(f(gamma^-1) c(gamma, gamma^-1))."""
        d = self.group
        terms = {}
        for g, z in f.terms.items():
            gamma = d.inverse(g)
            terms[gamma] = (z * self.c(gamma, g)).conj()
        return AlgebraElement(self, terms)

    def conj_by_delta(self, g: Sequence[int], f: AlgebraElement) -> AlgebraElement:
        dg = self.delta(g)
        return self.convolve(self.convolve(dg, f), self.adjoint(dg))

    def closed_form_delta_conj(
        self, g: Sequence[int], s: Sequence[int]
    ) -> tuple[CircleElement, GroupElement]:
        """Scalar and element with delta_g delta_s delta_g^* = scalar * delta_{g s g^-1}."""
        d, c = self.group, self.cocycle
        g_inv = d.inverse(g)
        scalar = (
            c(g, g_inv).conjugate() * c(s, g_inv) * c(g, d.multiply(s, g_inv))
        )
        return scalar, d.conjugate(g, s)

    def cond_expect(self, f: AlgebraElement, S: SubgroupDescriptor) -> AlgebraElement:
        return AlgebraElement(self, {g: z for g, z in f.terms.items() if S.contains(g)})

    def faithfulness_identity(
        self, f: AlgebraElement, S: SubgroupDescriptor
    ) -> tuple[Cyclotomic, Cyclotomic, bool]:
        lhs = self.cond_expect(self.convolve(self.adjoint(f), f), S)(self.group.identity)
        rhs = Cyclotomic.zero(self.conductor)
        for z in f.terms.values():
            rhs = rhs + z.norm_sq()
        return lhs, rhs, lhs == rhs

    def commutation_identity_check(
        self, h: AlgebraElement, s: Sequence[int], nu: Sequence[int]
    ) -> bool:
        """h(nu) c(s, nu) == h(s nu s^-1) c(s nu s^-1, s)."""
        d = self.group
        conj = d.conjugate(s, nu)
        return h(nu) * self.c(s, nu) == h(conj) * self.c(conj, s)

    # --- scans ----------------------------------------------------------------

    def commutant_scan(
        self, h: AlgebraElement, S: SubgroupDescriptor, ball: Ball
    ) -> CheckResult:
        """h * delta_s - delta_s * h for every s in S within the ball."""
        probes = probe_order(self.group, S.ball_members(self.group, ball))
        nonzero = 0
        support: set[GroupElement] = set()
        witness = None
        for row in probes:
            s = as_tuple(row)
            ds = self.delta(s)
            comm = self.convolve(h, ds) - self.convolve(ds, h)
            if not comm.is_zero():
                nonzero += 1
                support.update(comm.support)
                if witness is None:
                    witness = {"s": s, "commutator": comm.to_json()}
        return CheckResult.from_clauses(
            "commutant",
            [Clause("commutes-with-S", witness is None, [witness] if witness else [], len(probes))],
            ball=ball.radius,
            values={
                "probes": len(probes),
                "nonzero_commutators": nonzero,
                "commutator_support": sorted(support)[:20],
                "commutator_support_size": len(support),
            },
        )

    def abelian_on_S_check(
        self, S: SubgroupDescriptor, ball: Ball, samples: int = 200, seed: int = 0
    ) -> CheckResult:
        """f*g == g*f for random f, g supported in S within the ball."""
        rng = np.random.default_rng(seed)
        members = S.ball_members(self.group, ball)
        witness = None
        for _ in range(samples):
            f = self.random_element(rng, members)
            g = self.random_element(rng, members)
            if self.convolve(f, g) != self.convolve(g, f):
                witness = {"f": f.to_json(), "g": g.to_json()}
                break
        return CheckResult.from_clauses(
            "abelian-C_c(S)",
            [Clause("f*g=g*f", witness is None, [witness] if witness else [], samples)],
            ball=ball.radius,
            seed=seed,
        )

    def random_element(
        self, rng: np.random.Generator, pool: np.ndarray, max_support: int = 3
    ) -> AlgebraElement:
        """Support of size 1..max_support from ``pool``, coefficients in {1, i, -1}."""
        coeffs = (1, Cyclotomic.zeta(4), -1)
        size = int(rng.integers(1, max_support + 1))
        idx = rng.choice(len(pool), size=min(size, len(pool)), replace=False)
        return self.element(
            (as_tuple(pool[i]), coeffs[int(rng.integers(len(coeffs)))]) for i in idx
        )


def algebra_law_suite(
    alg: ConvolutionAlgebra,
    S: SubgroupDescriptor,
    samples: int = 200,
    seed: int = 0,
    ball: Ball = Ball(2),
    normal: bool = True,
) -> list[CheckResult]:
    """Exact law checks on seeded random elements from the ball.

    ``normal`` enables the normalizer-closure clause (only meaningful when S
    is normal in G).
    """
    d = alg.group
    rng = np.random.default_rng(seed)
    pool = ball_array(d, ball)
    s_pool = S.ball_members(d, ball)
    e = alg.delta(d.identity)
    failures: dict[str, dict | None] = {
        name: None
        for name in (
            "associativity",
            "anti-multiplicativity",
            "involution",
            "delta-product",
            "unit",
            "delta-conjugation",
            "bimodule",
            "faithfulness",
            "normalizer-closure",
        )
    }

    def fail(name: str, **witness) -> None:
        if failures[name] is None:
            failures[name] = {k: (v.to_json() if isinstance(v, AlgebraElement) else v) for k, v in witness.items()}

    for _ in range(samples):
        f = alg.random_element(rng, pool)
        g = alg.random_element(rng, pool)
        h = alg.random_element(rng, pool)
        if alg.convolve(alg.convolve(f, g), h) != alg.convolve(f, alg.convolve(g, h)):
            fail("associativity", f=f, g=g, h=h)
        if alg.adjoint(alg.convolve(f, g)) != alg.convolve(alg.adjoint(g), alg.adjoint(f)):
            fail("anti-multiplicativity", f=f, g=g)
        if alg.adjoint(alg.adjoint(f)) != f:
            fail("involution", f=f)
        if alg.convolve(e, f) != f or alg.convolve(f, e) != f:
            fail("unit", f=f)

        a = as_tuple(pool[rng.integers(len(pool))])
        b = as_tuple(pool[rng.integers(len(pool))])
        if alg.convolve(alg.delta(a), alg.delta(b)) != alg.delta(d.multiply(a, b), alg.cocycle(a, b)):
            fail("delta-product", g=a, h=b)

        s = as_tuple(s_pool[rng.integers(len(s_pool))])
        scalar, conj = alg.closed_form_delta_conj(a, s)
        if alg.conj_by_delta(a, alg.delta(s)) != alg.delta(conj, scalar):
            fail("delta-conjugation", g=a, s=s)

        fs = alg.random_element(rng, s_pool)
        if normal and not all(S.contains(x) for x in alg.conj_by_delta(a, fs).terms):
            fail("normalizer-closure", g=a, f=fs)

        b1 = alg.random_element(rng, s_pool)
        b2 = alg.random_element(rng, s_pool)
        lhs = alg.cond_expect(alg.convolve(alg.convolve(b1, f), b2), S)
        rhs = alg.convolve(alg.convolve(b1, alg.cond_expect(f, S)), b2)
        if lhs != rhs:
            fail("bimodule", b=b1, f=f, b_prime=b2)

        if not alg.faithfulness_identity(f, S)[2]:
            fail("faithfulness", f=f)

    results = []
    for name, w in failures.items():
        if name == "normalizer-closure" and not normal:
            continue
        results.append(
            CheckResult.from_clauses(
                f"algebra-{name}",
                [Clause(name, w is None, [w] if w else [], samples)],
                ball=ball.radius,
                seed=seed,
            )
        )
    return results
