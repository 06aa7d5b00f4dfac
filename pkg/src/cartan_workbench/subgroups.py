"""Box subgroups and ball-bounded checks of the Cartan hypotheses.

A box subgroup is given by one scaling per coordinate: 0 forces the
coordinate to vanish, k >= 1 requires it to be divisible by k.  Every check
here quantifies over a finite ball, so a PASS means "no counterexample in
the window" while a FAIL carries a concrete, globally valid witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._scan import first_bad_pair, row_chunks
from .groups import (
    Ball,
    GroupDescriptor,
    GroupElement,
    as_tuple,
    ball_array,
    probe_order,
    rows_equal,
)
from .report import CheckResult, Clause

# scans first try this many of the smallest probes; most elements already
# meet a witness there, and only the survivors are run against everything
SMALL_PROBES = 64


class SubgroupError(ValueError):
    pass


@dataclass(frozen=True)
class SubgroupDescriptor:
    scalings: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "scalings", tuple(int(k) for k in self.scalings))
        if any(k < 0 for k in self.scalings):
            raise SubgroupError("scalings must be non-negative")

    def check_against(self, d: GroupDescriptor) -> None:
        if len(self.scalings) != d.rank:
            raise SubgroupError(
                f"subgroup has {len(self.scalings)} scalings, group has {d.rank} components"
            )
        for i, (k, m) in enumerate(zip(self.scalings, d.moduli), start=1):
            if m and k and m % k:
                raise SubgroupError(f"component {i}: scaling {k} does not divide {m}")

    @property
    def active(self) -> list[int]:
        """0-based indices of the non-trivial components."""
        return [i for i, k in enumerate(self.scalings) if k]

    def to_json(self) -> list[int]:
        return list(self.scalings)

    def contains(self, a: Sequence[int]) -> bool:
        return all((a_i % k == 0) if k else a_i == 0 for a_i, k in zip(a, self.scalings))

    def contains_array(self, A: np.ndarray) -> np.ndarray:
        ok = np.ones(A.shape[:-1], dtype=bool)
        for i, k in enumerate(self.scalings):
            ok &= (A[..., i] % k == 0) if k else (A[..., i] == 0)
        return ok

    def coordinates(self, s: Sequence[int]) -> tuple[int, ...]:
        if not self.contains(s):
            raise SubgroupError(f"{tuple(s)} is not in the subgroup")
        return tuple(s[i] // self.scalings[i] for i in self.active)

    def coordinates_array(self, A: np.ndarray) -> np.ndarray:
        idx = self.active
        return A[..., idx] // np.array([self.scalings[i] for i in idx], dtype=np.int64)

    def generators(self) -> list[GroupElement]:
        gens = []
        for i in self.active:
            e = [0] * len(self.scalings)
            e[i] = self.scalings[i]
            gens.append(tuple(e))
        return gens

    def ball_members(self, d: GroupDescriptor, ball: Ball) -> np.ndarray:
        """S intersected with the ball, lexicographic."""
        self.check_against(d)
        axes = []
        for r, k in zip(ball.ranges(d), self.scalings):
            vals = np.arange(r.start, r.stop, dtype=np.int64)
            axes.append(vals[vals % k == 0] if k else np.zeros(1, dtype=np.int64))
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.reshape(-1) for g in grids], axis=-1)


def conjugate(d: GroupDescriptor, g: Sequence[int], s: Sequence[int]) -> GroupElement:
    """g s g^-1."""
    return d.conjugate(g, s)


def validate_subgroup(S: SubgroupDescriptor, d: GroupDescriptor, ball: Ball) -> CheckResult:
    try:
        S.check_against(d)
    except SubgroupError as exc:
        return CheckResult.from_clauses(
            "subgroup", [Clause("structure", False, [{"error": str(exc)}])], ball=ball.radius
        )
    X = probe_order(d, S.ball_members(d, ball))
    n2 = len(X) ** 2
    clauses = [Clause("structure", True)]

    hit = first_bad_pair(X, X, lambda A, B: ~S.contains_array(d.multiply_array(A, B)))
    bad = np.nonzero(~S.contains_array(d.inverse_array(X)))[0]
    w = []
    if hit is not None:
        w.append({"s": as_tuple(X[hit[0]]), "t": as_tuple(X[hit[1]])})
    if len(bad):
        w.append({"s": as_tuple(X[bad[0]]), "inverse": as_tuple(d.inverse_array(X[bad[0]]))})
    clauses.append(Clause("closure", not w, w[:1], n2))

    hit = first_bad_pair(
        X, X, lambda A, B: ~rows_equal(d.multiply_array(A, B), d.multiply_array(B, A))
    )
    w = [] if hit is None else [{"s": as_tuple(X[hit[0]]), "t": as_tuple(X[hit[1]])}]
    clauses.append(Clause("abelian", hit is None, w, n2))

    def not_coordinatewise(A, B):
        return ~rows_equal(d.multiply_array(A, B), d.reduce_array(A + B))

    hit = first_bad_pair(X, X, not_coordinatewise)
    w = [] if hit is None else [{"s": as_tuple(X[hit[0]]), "t": as_tuple(X[hit[1]])}]
    clauses.append(Clause("coordinatewise", hit is None, w, n2))
    return CheckResult.from_clauses("subgroup", clauses, ball=ball.radius)


def is_normal(
    S: SubgroupDescriptor,
    d: GroupDescriptor,
    ball: Ball,
    closed_form: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
) -> CheckResult:
    """g^-1 s g in S for all ball g and ball s in S.

    ``closed_form(G, S)`` (optional) must return g^-1 s g for broadcast
    arrays; it is compared against the product computed from the group law.
    """
    G = probe_order(d, ball_array(d, ball))
    X = probe_order(d, S.ball_members(d, ball))
    Ginv = d.inverse_array(G)
    witness = None
    mismatch = None
    for sl in row_chunks(len(G), len(X)):
        g = G[sl, None, :]
        conj = d.multiply_array(d.multiply_array(Ginv[sl, None, :], X[None, :, :]), g)
        bad = np.argwhere(~S.contains_array(conj))
        if len(bad) and witness is None:
            i, j = bad[0]
            witness = {"g": as_tuple(G[sl][i]), "s": as_tuple(X[j]), "g^-1sg": as_tuple(conj[i, j])}
        if closed_form is not None and mismatch is None:
            expected = d.reduce_array(np.array(closed_form(g, X[None, :, :]), dtype=np.int64))
            off = np.argwhere(~rows_equal(conj, expected))
            if len(off):
                i, j = off[0]
                mismatch = {
                    "g": as_tuple(G[sl][i]),
                    "s": as_tuple(X[j]),
                    "computed": as_tuple(conj[i, j]),
                    "closed_form": as_tuple(expected[i, j]),
                }
        if witness is not None and closed_form is None:
            break
    clauses = [Clause("normal", witness is None, [witness] if witness else [], len(G) * len(X))]
    if closed_form is not None:
        clauses.append(Clause("closed-form", mismatch is None, [mismatch] if mismatch else []))
    return CheckResult.from_clauses("normal", clauses, ball=ball.radius)


# ---------------------------------------------------------------------------
# centralizing


@dataclass
class CentralizingReport:
    element: GroupElement
    verdict: str  # "1-centralizing" | "k-centralizing" | "not-centralizing"
    k: int | None
    witness_t: GroupElement | None = None
    witness_j: int | None = None
    k_max: int = 0

    @property
    def is_one_centralizing(self) -> bool:
        return self.verdict == "1-centralizing"

    def is_k_centralizing(self, k: int) -> bool:
        return self.k is not None and self.k <= k

    def to_json(self) -> dict:
        return {
            "element": list(self.element),
            "verdict": self.verdict,
            "k": self.k,
            "k_max": self.k_max,
            "witness_t": None if self.witness_t is None else list(self.witness_t),
            "witness_j": self.witness_j,
        }


def _min_commuting_power(
    d: GroupDescriptor, V: np.ndarray, powers: list[np.ndarray]
) -> np.ndarray:
    """J[i, t] = least j with V[i] t^j = t^j V[i] (0 if none up to len(powers))."""
    J = np.zeros((len(V), len(powers[0])), dtype=np.int64)
    v = V[:, None, :]
    for j, P in enumerate(powers, start=1):
        p = P[None, :, :]
        ok = rows_equal(d.multiply_array(v, p), d.multiply_array(p, v))
        J = np.where((J == 0) & ok, j, J)
    return J


def _powers(d: GroupDescriptor, T: np.ndarray, k_max: int) -> list[np.ndarray]:
    out = [T]
    for _ in range(1, k_max):
        out.append(d.multiply_array(out[-1], T))
    return out


def _classify(nu: GroupElement, J: np.ndarray, T: np.ndarray, k_max: int) -> CentralizingReport:
    never = np.nonzero(J == 0)[0]
    if len(never):
        t = as_tuple(T[never[0]])
        return CentralizingReport(nu, "not-centralizing", None, t, None, k_max)
    k = int(J.max()) if len(J) else 1
    if k == 1:
        return CentralizingReport(nu, "1-centralizing", 1, None, None, k_max)
    i = int(np.argmax(J != 1))
    return CentralizingReport(nu, "k-centralizing", k, as_tuple(T[i]), int(J[i]), k_max)


def centralizing_class(
    S: SubgroupDescriptor,
    d: GroupDescriptor,
    nu: Sequence[int],
    k_max: int,
    ball: Ball,
) -> CentralizingReport:
    """Least k <= k_max such that nu is k-centralizing against S in the ball.

    The witness t is the first probe (small-first) that does not commute
    with nu; ``witness_j`` is the least power of t that does.
    """
    T = probe_order(d, S.ball_members(d, ball))
    nu_arr = np.array([d.element(nu)], dtype=np.int64)
    J = _min_commuting_power(d, nu_arr, _powers(d, T, k_max))[0]
    return _classify(d.element(nu), J, T, k_max)


def unique_root_collision(
    d: GroupDescriptor, ball: Ball, k_max: int
) -> tuple[GroupElement, GroupElement, int] | None:
    """A pair g != h in the ball with g^j = h^j for some 2 <= j <= k_max."""
    G = probe_order(d, ball_array(d, ball))
    P = G
    for j in range(2, k_max + 1):
        P = d.multiply_array(P, G)
        _, first, inverse = np.unique(P, axis=0, return_index=True, return_inverse=True)
        inverse = inverse.reshape(-1)
        clash = np.nonzero(first[inverse] != np.arange(len(G)))[0]
        if len(clash):
            h = clash[0]
            g = first[inverse[h]]
            return as_tuple(G[g]), as_tuple(G[h]), j
    return None


def immediately_centralizing_scan(
    S: SubgroupDescriptor, d: GroupDescriptor, k_max: int, ball: Ball
) -> CheckResult:
    """Every ball element that is k-centralizing (k <= k_max) must be 1-centralizing.

    Two independent routes: the unique-root test on the ball (sufficient) and
    a full classification of every ball element against S.
    """
    collision = unique_root_collision(d, ball, k_max)
    G = probe_order(d, ball_array(d, ball))
    T = probe_order(d, S.ball_members(d, ball))
    powers = _powers(d, T, k_max)
    small = [P[:SMALL_PROBES] for P in powers]

    failure: CentralizingReport | None = None
    counts = {"1-centralizing": 0, "k-centralizing": 0, "not-centralizing": 0}
    for sl in row_chunks(len(G), len(T)):
        V = G[sl]
        J_small = _min_commuting_power(d, V, small)
        dropped = (J_small == 0).any(axis=1)
        counts["not-centralizing"] += int(dropped.sum())
        keep = np.nonzero(~dropped)[0]
        if not len(keep):
            continue
        J = _min_commuting_power(d, V[keep], powers)
        for row, i in zip(J, keep):
            rep = _classify(as_tuple(V[i]), row, T, k_max)
            counts[rep.verdict] += 1
            if rep.verdict == "k-centralizing" and failure is None:
                failure = rep
    scan = Clause(
        "k-centralizing-implies-1-centralizing",
        failure is None,
        [] if failure is None else [failure.to_json()],
        len(G),
    )
    root = Clause(
        "unique-root-consistency",
        # unique roots on the ball imply the property, so the routes must agree
        not (collision is None and failure is not None),
        [],
    )
    values = {"classes": counts, "unique_root_on_ball": collision is None}
    if collision is not None:
        values["root_collision"] = {"g": collision[0], "h": collision[1], "j": collision[2]}
    note = "unique-root-on-ball" if collision is None else ""
    return CheckResult.from_clauses(
        "immediately-centralizing",
        [scan, root],
        ball=ball.radius,
        values=values,
        note=note,
    )


# ---------------------------------------------------------------------------
# maximality


def _blocking(d, c, E, T):
    """True where probe t blocks eta from being adjoined to S."""
    e, t = E[:, None, :], T[None, :, :]
    noncommuting = ~rows_equal(d.multiply_array(e, t), d.multiply_array(t, e))
    asymmetric = c.eval_array(t, e) != c.eval_array(e, t)
    return noncommuting | asymmetric


def maximality_witness(
    S: SubgroupDescriptor, d: GroupDescriptor, c, eta: Sequence[int], ball: Ball
) -> dict | None:
    """First s in S (small-first) with eta s != s eta or c(s, eta) != c(eta, s)."""
    T = probe_order(d, S.ball_members(d, ball))
    E = np.array([d.element(eta)], dtype=np.int64)
    hits = np.nonzero(_blocking(d, c, E, T)[0])[0]
    if not len(hits):
        return None
    s = as_tuple(T[hits[0]])
    eta = d.element(eta)
    reason = "non-commuting" if not d.commute(s, eta) else "asymmetric"
    return {"eta": eta, "s": s, "reason": reason, "c(s,eta)": c(s, eta), "c(eta,s)": c(eta, s)}


def maximality_scan(
    S: SubgroupDescriptor, d: GroupDescriptor, c, ball: Ball, limit: int = 10
) -> CheckResult:
    """Every ball element outside S must be blocked by some s in S within the ball."""
    G = probe_order(d, ball_array(d, ball))
    E = G[~S.contains_array(G)]
    T = probe_order(d, S.ball_members(d, ball))
    small = T[:SMALL_PROBES]
    unblocked: list[np.ndarray] = []
    for sl in row_chunks(len(E), len(small)):
        rest = E[sl][~_blocking(d, c, E[sl], small).any(axis=1)]
        for sl2 in row_chunks(len(rest), len(T)):
            chunk = rest[sl2]
            unblocked.extend(chunk[~_blocking(d, c, chunk, T).any(axis=1)])
    ok = None if unblocked else True
    witnesses = [{"eta": as_tuple(u), "status": "no blocking s in ball"} for u in unblocked[:limit]]
    return CheckResult.from_clauses(
        "maximality",
        [Clause("every-outside-element-blocked", ok, witnesses, len(E))],
        ball=ball.radius,
        values={"outside_elements": len(E), "unblocked": len(unblocked)},
        note="maximal-on-ball" if ok else "",
    )
