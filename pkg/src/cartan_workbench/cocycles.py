"""T-valued 2-cocycles with rational bilinear exponents.

``c(a, b) = exp(2 pi i * sum_t r_t * a[j_t] * b[k_t])``.  Values are exact
``CircleElement``s; vectorized scans work with integer numerators over the
common denominator of the angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._scan import count_bad_pairs, first_bad_pair, row_chunks
from .groups import Ball, GroupDescriptor, as_tuple, ball_array, probe_order, rows_equal
from .report import CheckResult, Clause
from .scalars import CircleElement
from .subgroups import SubgroupDescriptor


class CocycleError(ValueError):
    pass


@dataclass(frozen=True)
class CocycleTerm:
    left: int
    right: int
    angle: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle", Fraction(self.angle))

    def to_json(self) -> dict:
        a = self.angle
        return {"left": self.left, "right": self.right, "angle": f"{a.numerator}/{a.denominator}"}


@dataclass(frozen=True)
class CocycleDescriptor:
    terms: tuple[CocycleTerm, ...] = ()

    @classmethod
    def of(cls, *terms: tuple[int, int, Fraction | int | str]) -> CocycleDescriptor:
        return cls(tuple(CocycleTerm(j, k, Fraction(r)) for j, k, r in terms))

    @property
    def denominator(self) -> int:
        return math.lcm(1, *(t.angle.denominator for t in self.terms))

    def to_json(self) -> list[dict]:
        return [t.to_json() for t in self.terms]

    # --- evaluation ---------------------------------------------------------

    def exponent(self, a: Sequence[int], b: Sequence[int]) -> Fraction:
        return sum((t.angle * a[t.left - 1] * b[t.right - 1] for t in self.terms), Fraction(0))

    def __call__(self, a: Sequence[int], b: Sequence[int]) -> CircleElement:
        return CircleElement.from_angle(self.exponent(a, b))

    def eval_array(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Numerators (mod ``denominator``) of c(a, b), broadcasting rows."""
        D = self.denominator
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        shape = np.broadcast_shapes(A.shape[:-1], B.shape[:-1])
        out = np.zeros(shape, dtype=np.int64)
        for t in self.terms:
            w = int(t.angle * D)
            out = out + w * A[..., t.left - 1] * B[..., t.right - 1]
        return out % D

    # --- structure ----------------------------------------------------------

    def structural_problems(self, d: GroupDescriptor) -> list[dict]:
        problems = []
        for t in self.terms:
            for side, idx in (("left", t.left), ("right", t.right)):
                if not 1 <= idx <= d.rank:
                    problems.append({"term": t.to_json(), "problem": f"{side} index out of range"})
                    continue
                m = d.moduli[idx - 1]
                if m and (t.angle * m).denominator != 1:
                    problems.append(
                        {"term": t.to_json(), "problem": f"{side} component Z/{m} not respected"}
                    )
        return problems

    def is_trivial_on_box(self, S: SubgroupDescriptor) -> bool:
        """Exact global test of c == 1 on a box subgroup: on generator
        coordinates the exponent is a bilinear form with coefficients
        r * k_j * k_k, so it vanishes iff each aggregated coefficient is integral."""
        agg: dict[tuple[int, int], Fraction] = {}
        for t in self.terms:
            kj, kk = S.scalings[t.left - 1], S.scalings[t.right - 1]
            agg[(t.left, t.right)] = agg.get((t.left, t.right), Fraction(0)) + t.angle * kj * kk
        return all(v.denominator == 1 for v in agg.values())


# ---------------------------------------------------------------------------
# validation


def validate_cocycle(
    c: CocycleDescriptor,
    d: GroupDescriptor,
    ball: Ball,
    samples: int = 1000,
    seed: int = 0,
) -> CheckResult:
    clauses: list[Clause] = []
    problems = c.structural_problems(d)
    clauses.append(Clause("structure", not problems, problems[:1]))
    if problems:
        return CheckResult.from_clauses("cocycle", clauses, ball=ball.radius, seed=seed)

    rng = np.random.default_rng(seed)
    pts = ball_array(d, ball)
    idx = rng.integers(0, len(pts), size=(samples, 3))
    g, h, k = pts[idx[:, 0]], pts[idx[:, 1]], pts[idx[:, 2]]
    e = np.zeros(d.rank, dtype=np.int64)

    norm_ok = (c.eval_array(e, g) == 0) & (c.eval_array(g, e) == 0)
    bad = np.nonzero(~norm_ok)[0]
    clauses.append(
        Clause("normalization", len(bad) == 0, [{"g": as_tuple(g[i])} for i in bad[:1]], samples)
    )

    D = c.denominator
    lhs = (c.eval_array(g, d.multiply_array(h, k)) + c.eval_array(h, k)) % D
    rhs = (c.eval_array(d.multiply_array(g, h), k) + c.eval_array(g, h)) % D
    bad = np.nonzero(lhs != rhs)[0]
    clauses.append(
        Clause(
            "cocycle-identity",
            len(bad) == 0,
            [
                {
                    "g": as_tuple(g[i]),
                    "h": as_tuple(h[i]),
                    "k": as_tuple(k[i]),
                    "lhs": str(CircleElement.from_angle(Fraction(int(lhs[i]), D))),
                    "rhs": str(CircleElement.from_angle(Fraction(int(rhs[i]), D))),
                }
                for i in bad[:1]
            ],
            samples,
        )
    )

    torsion = [i for i, m in enumerate(d.moduli) if m]
    witnesses = []
    base = c.eval_array(g, h)
    for i in torsion:
        shift = np.zeros(d.rank, dtype=np.int64)
        shift[i] = d.moduli[i]
        for shifted in (c.eval_array(g + shift, h), c.eval_array(g, h + shift)):
            bad = np.nonzero(shifted != base)[0]
            if len(bad) and not witnesses:
                j = bad[0]
                witnesses.append({"a": as_tuple(g[j]), "b": as_tuple(h[j]), "component": i + 1})
    clauses.append(Clause("torsion-shift", not witnesses, witnesses, samples))
    return CheckResult.from_clauses("cocycle", clauses, ball=ball.radius, seed=seed)


def check_inverse_symmetry(c: CocycleDescriptor, d: GroupDescriptor, ball: Ball) -> CheckResult:
    """c(g, g^-1) == c(g^-1, g) for every ball element."""
    G = ball_array(d, ball)
    inv = d.inverse_array(G)
    bad = np.nonzero(c.eval_array(G, inv) != c.eval_array(inv, G))[0]
    witnesses = [{"g": as_tuple(G[i])} for i in bad[:1]]
    return CheckResult.from_clauses(
        "inverse-symmetry",
        [Clause("c(g,g^-1)=c(g^-1,g)", len(bad) == 0, witnesses, len(G))],
        ball=ball.radius,
    )


def _pair_check(name, c, S, d, ball, bad_fn) -> CheckResult:
    X = probe_order(d, S.ball_members(d, ball))
    hit = first_bad_pair(X, X, bad_fn)
    witnesses = []
    if hit is not None:
        s, t = as_tuple(X[hit[0]]), as_tuple(X[hit[1]])
        witnesses.append({"s": s, "t": t, "c(s,t)": str(c(s, t)), "c(t,s)": str(c(t, s))})
    return CheckResult.from_clauses(
        name, [Clause(name, hit is None, witnesses, len(X) ** 2)], ball=ball.radius
    )


def is_symmetric_on(
    c: CocycleDescriptor, d: GroupDescriptor, S: SubgroupDescriptor, ball: Ball
) -> CheckResult:
    return _pair_check(
        "c-symmetric-on-S", c, S, d, ball, lambda A, B: c.eval_array(A, B) != c.eval_array(B, A)
    )


def is_trivial_on(
    c: CocycleDescriptor, d: GroupDescriptor, S: SubgroupDescriptor, ball: Ball
) -> CheckResult:
    return _pair_check("c-trivial-on-S", c, S, d, ball, lambda A, B: c.eval_array(A, B) != 0)


# ---------------------------------------------------------------------------
# identities behind the maximality criterion


def _chain_values(c: CocycleDescriptor, d: GroupDescriptor, eta, xi) -> np.ndarray:
    """The four equalities for commuting eta, xi (arrays, broadcasting)."""
    eta_inv = d.inverse_array(eta)
    xe = d.multiply_array(xi, eta)
    xei = d.multiply_array(xi, eta_inv)
    return np.stack(
        [
            c.eval_array(xi, eta) == c.eval_array(eta, xi),
            c.eval_array(xe, eta_inv) == c.eval_array(eta_inv, xe),
            c.eval_array(xi, eta_inv) == c.eval_array(eta_inv, xi),
            c.eval_array(xei, eta) == c.eval_array(eta, xei),
        ],
        axis=-1,
    )


def equivalence_chain_check(
    c: CocycleDescriptor, d: GroupDescriptor, eta: Sequence[int], xi: Sequence[int]
) -> tuple[bool, bool, bool, bool]:
    """Evaluate c(xi,eta)=c(eta,xi), c(xi eta,eta^-1)=c(eta^-1,xi eta),
    c(xi,eta^-1)=c(eta^-1,xi) and c(xi eta^-1,eta)=c(eta,xi eta^-1)."""
    if not d.commute(eta, xi):
        raise ValueError(f"{tuple(eta)} and {tuple(xi)} do not commute")
    vals = _chain_values(c, d, np.array(eta), np.array(xi))
    return tuple(bool(v) for v in vals)  # type: ignore[return-value]


def equivalence_chain_suite(c: CocycleDescriptor, d: GroupDescriptor, ball: Ball) -> CheckResult:
    """Run the four-way equivalence on every commuting ball pair."""
    X = ball_array(d, ball)
    commuting = 0
    all_true = 0
    witness = None
    for sl in row_chunks(len(X), len(X)):
        eta = np.broadcast_to(X[sl, None, :], (sl.stop - sl.start, len(X), d.rank))
        xi = np.broadcast_to(X[None, :, :], eta.shape)
        mask = rows_equal(d.multiply_array(eta, xi), d.multiply_array(xi, eta))
        e, x = eta[mask], xi[mask]
        vals = _chain_values(c, d, e, x)
        commuting += len(e)
        all_true += int(vals.all(axis=1).sum())
        mixed = np.nonzero(vals.any(axis=1) & ~vals.all(axis=1))[0]
        if len(mixed) and witness is None:
            i = mixed[0]
            witness = {"eta": as_tuple(e[i]), "xi": as_tuple(x[i]), "values": vals[i].tolist()}
    clause = Clause("four-way-agreement", witness is None, [witness] if witness else [], commuting)
    return CheckResult.from_clauses(
        "equivalence-chain",
        [clause],
        ball=ball.radius,
        values={"commuting_pairs": commuting, "all_true": all_true, "all_false": commuting - all_true},
    )


def eta_t_equivalence_check(
    c: CocycleDescriptor,
    d: GroupDescriptor,
    S: SubgroupDescriptor,
    s: Sequence[int],
    eta: Sequence[int],
    ball: Ball,
) -> tuple[bool, bool, tuple[int, ...] | None]:
    """Return (c(s,eta)=c(eta,s), all t in S-ball: c(s,eta t)=c(eta t,s), failing t)."""
    if not d.commute(s, eta):
        raise ValueError(f"{tuple(s)} and {tuple(eta)} do not commute")
    hyp1 = c(s, eta) == c(eta, s)
    T = probe_order(d, S.ball_members(d, ball))
    et = d.multiply_array(np.array(eta), T)
    sv = np.array(s)
    ok = c.eval_array(sv, et) == c.eval_array(et, sv)
    bad = np.nonzero(~ok)[0]
    failing = as_tuple(T[bad[0]]) if len(bad) else None
    return hyp1, failing is None, failing


def eta_t_suite(
    c: CocycleDescriptor,
    d: GroupDescriptor,
    S: SubgroupDescriptor,
    ball: Ball,
    samples: int = 200,
    seed: int = 0,
) -> CheckResult:
    rng = np.random.default_rng(seed)
    members = S.ball_members(d, ball)
    G = ball_array(d, ball)
    tested = 0
    agreed_true = 0
    witness = None
    for _ in range(samples):
        s = members[rng.integers(len(members))]
        comm = G[rows_equal(d.multiply_array(s, G), d.multiply_array(G, s))]
        eta = comm[rng.integers(len(comm))]
        h1, h2, _ = eta_t_equivalence_check(c, d, S, as_tuple(s), as_tuple(eta), ball)
        tested += 1
        agreed_true += h1 and h2
        if h1 != h2 and witness is None:
            witness = {"s": as_tuple(s), "eta": as_tuple(eta), "hyp1": h1, "hyp2": h2}
    return CheckResult.from_clauses(
        "eta-t-equivalence",
        [Clause("hypotheses-agree", witness is None, [witness] if witness else [], tested)],
        ball=ball.radius,
        seed=seed,
        values={"tested": tested, "both_true": agreed_true, "both_false": tested - agreed_true},
    )
