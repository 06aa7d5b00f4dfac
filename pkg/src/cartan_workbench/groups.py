"""Coordinate groups with a strictly triangular quadratic twist.

An element is an integer tuple with one entry per component; a component is
either Z (modulus 0) or Z/m.  The product is coordinatewise addition plus,
for each twist term ``(target i, left j, right k, coeff q)``, the extra
summand ``q * a_j * b_k`` in coordinate ``i``.  Indices are 1-based in the
public API and in serialized form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .report import CheckResult, Clause

GroupElement = tuple[int, ...]


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class TwistTerm:
    target: int
    left: int
    right: int
    coeff: int

    def to_json(self) -> dict:
        return {"target": self.target, "left": self.left, "right": self.right, "coeff": self.coeff}


@dataclass(frozen=True)
class GroupDescriptor:
    moduli: tuple[int, ...]
    twist: tuple[TwistTerm, ...] = ()

    def __post_init__(self) -> None:
        for m in self.moduli:
            if m < 0 or m == 1:
                raise GroupError(f"component modulus must be 0 (for Z) or >= 2, got {m}")
        n = len(self.moduli)
        for t in self.twist:
            for idx in (t.target, t.left, t.right):
                if not 1 <= idx <= n:
                    raise GroupError(f"twist index {idx} out of range 1..{n}")

    @classmethod
    def from_components(cls, components: Sequence[str], twist=()) -> GroupDescriptor:
        moduli = []
        for c in components:
            c = c.strip()
            if c == "Z":
                moduli.append(0)
            elif c.startswith("Z/"):
                moduli.append(int(c[2:]))
            else:
                raise GroupError(f"unknown component kind {c!r}")
        terms = tuple(t if isinstance(t, TwistTerm) else TwistTerm(*t) for t in twist)
        return cls(tuple(moduli), terms)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def components(self) -> list[str]:
        return ["Z" if m == 0 else f"Z/{m}" for m in self.moduli]

    @property
    def identity(self) -> GroupElement:
        return (0,) * self.rank

    def is_abelian_by_construction(self) -> bool:
        return not self.twist

    def to_json(self) -> dict:
        return {"components": self.components, "twist": [t.to_json() for t in self.twist]}

    # --- structural checks ------------------------------------------------

    def triangularity_violations(self) -> list[TwistTerm]:
        return [t for t in self.twist if not (t.left > t.target and t.right > t.target)]

    def well_definedness_violations(self) -> list[tuple[TwistTerm, str]]:
        """Twist terms whose value depends on the representative of a residue."""
        bad = []
        for t in self.twist:
            m_out = self.moduli[t.target - 1]
            for side, idx in (("left", t.left), ("right", t.right)):
                m_in = self.moduli[idx - 1]
                if m_in == 0:
                    continue
                shift = t.coeff * m_in
                if (m_out == 0 and shift != 0) or (m_out and shift % m_out):
                    bad.append((t, side))
        return bad

    # --- exact element API ------------------------------------------------

    def element(self, coords: Sequence[int]) -> GroupElement:
        if len(coords) != self.rank:
            raise GroupError(f"expected {self.rank} coordinates, got {len(coords)}")
        return tuple(int(a) % m if m else int(a) for a, m in zip(coords, self.moduli))

    def multiply(self, a: Sequence[int], b: Sequence[int]) -> GroupElement:
        if len(a) != self.rank or len(b) != self.rank:
            raise GroupError(f"arity mismatch: group has {self.rank} components")
        out = [x + y for x, y in zip(a, b)]
        for t in self.twist:
            out[t.target - 1] += t.coeff * a[t.left - 1] * b[t.right - 1]
        return self.element(out)

    def inverse(self, a: Sequence[int]) -> GroupElement:
        if len(a) != self.rank:
            raise GroupError(f"arity mismatch: group has {self.rank} components")
        x = [-v for v in a]
        # back-substitution: twist terms feeding coordinate i only involve later ones
        for i in range(self.rank - 1, -1, -1):
            for t in self._terms_by_target[i]:
                x[i] -= t.coeff * a[t.left - 1] * x[t.right - 1]
            if self.moduli[i]:
                x[i] %= self.moduli[i]
        return self.element(x)

    def power(self, a: Sequence[int], j: int) -> GroupElement:
        base = self.element(a) if j >= 0 else self.inverse(a)
        result = self.identity
        for _ in range(abs(j)):
            result = self.multiply(result, base)
        return result

    def conjugate(self, g: Sequence[int], s: Sequence[int]) -> GroupElement:
        """g s g^-1."""
        return self.multiply(self.multiply(g, s), self.inverse(g))

    def commute(self, a: Sequence[int], b: Sequence[int]) -> bool:
        return self.multiply(a, b) == self.multiply(b, a)

    @property
    def _terms_by_target(self) -> list[list[TwistTerm]]:
        cached = self.__dict__.get("_tbt")
        if cached is None:
            cached = [[] for _ in range(self.rank)]
            for t in self.twist:
                cached[t.target - 1].append(t)
            object.__setattr__(self, "_tbt", cached)
        return cached

    # --- vectorized kernels (rows are elements) ----------------------------

    def reduce_array(self, A: np.ndarray) -> np.ndarray:
        for i, m in enumerate(self.moduli):
            if m:
                A[..., i] %= m
        return A

    def multiply_array(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A, B = np.broadcast_arrays(np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64))
        out = A + B
        for t in self.twist:
            out[..., t.target - 1] += t.coeff * A[..., t.left - 1] * B[..., t.right - 1]
        return self.reduce_array(out)

    def inverse_array(self, A: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        X = -A.copy()
        for i in range(self.rank - 1, -1, -1):
            for t in self._terms_by_target[i]:
                X[..., i] -= t.coeff * A[..., t.left - 1] * X[..., t.right - 1]
            if self.moduli[i]:
                X[..., i] %= self.moduli[i]
        return self.reduce_array(X)

    def power_array(self, A: np.ndarray, j: int) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        base = A if j >= 0 else self.inverse_array(A)
        out = np.zeros_like(A)
        for _ in range(abs(j)):
            out = self.multiply_array(out, base)
        return out


@dataclass(frozen=True)
class Ball:
    """Elements whose Z-coordinates lie in [-radius, radius]; torsion unrestricted."""

    radius: int

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise GroupError("ball radius must be non-negative")

    def ranges(self, d: GroupDescriptor) -> list[range]:
        return [range(m) if m else range(-self.radius, self.radius + 1) for m in d.moduli]

    def size(self, d: GroupDescriptor) -> int:
        n = 1
        for r in self.ranges(d):
            n *= len(r)
        return n

    def contains(self, d: GroupDescriptor, a: Sequence[int]) -> bool:
        return all(m or abs(x) <= self.radius for x, m in zip(a, d.moduli))


def enumerate_ball(d: GroupDescriptor, ball: Ball) -> Iterator[GroupElement]:
    """Lexicographic enumeration of the ball."""
    return itertools.product(*ball.ranges(d))


def ball_array(d: GroupDescriptor, ball: Ball) -> np.ndarray:
    axes = [np.arange(r.start, r.stop, dtype=np.int64) for r in ball.ranges(d)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=-1)


def centered(d: GroupDescriptor, A: np.ndarray) -> np.ndarray:
    """Torsion residues shifted into (-m/2, m/2]."""
    C = np.array(A, dtype=np.int64, copy=True)
    for i, m in enumerate(d.moduli):
        if m:
            col = C[..., i] % m
            C[..., i] = np.where(col > m // 2, col - m, col)
    return C


def probe_order(d: GroupDescriptor, A: np.ndarray) -> np.ndarray:
    """Sort rows small-first: by l1 size of centered coordinates, then
    preferring positive entries in earlier slots.  Scans walk elements in
    this order so that reported witnesses are the simplest available."""
    A = np.asarray(A, dtype=np.int64)
    if len(A) == 0:
        return A
    C = centered(d, A)
    keys = [(-C[:, i]) for i in range(C.shape[1] - 1, -1, -1)]
    keys.append(np.abs(C).sum(axis=1))
    return A[np.lexsort(keys)]


def as_tuple(row) -> GroupElement:
    return tuple(int(x) for x in row)


def rows_equal(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.all(A == B, axis=-1)


def validate_descriptor(
    d: GroupDescriptor, ball: Ball, samples: int = 500, seed: int = 0
) -> CheckResult:
    """Structural triangularity plus sampled group-law checks on the ball."""
    clauses: list[Clause] = []

    tri = d.triangularity_violations()
    clauses.append(
        Clause(
            "triangularity",
            not tri,
            [{"twist": t.to_json()} for t in tri[:1]],
        )
    )
    wd = d.well_definedness_violations()
    clauses.append(
        Clause(
            "torsion-well-defined",
            not wd,
            [{"twist": t.to_json(), "side": side} for t, side in wd[:1]],
        )
    )
    if tri or wd:
        return CheckResult.from_clauses("group-law", clauses, ball=ball.radius)

    rng = np.random.default_rng(seed)
    pts = ball_array(d, ball)
    idx = rng.integers(0, len(pts), size=(samples, 3))
    a, b, c = pts[idx[:, 0]], pts[idx[:, 1]], pts[idx[:, 2]]
    lhs = d.multiply_array(d.multiply_array(a, b), c)
    rhs = d.multiply_array(a, d.multiply_array(b, c))
    bad = np.nonzero(~rows_equal(lhs, rhs))[0]
    clauses.append(
        Clause(
            "associativity",
            len(bad) == 0,
            [{"a": as_tuple(a[i]), "b": as_tuple(b[i]), "c": as_tuple(c[i])} for i in bad[:1]],
            samples=samples,
        )
    )

    e = np.zeros(d.rank, dtype=np.int64)
    ok_left = rows_equal(d.multiply_array(e, a), a)
    ok_right = rows_equal(d.multiply_array(a, e), a)
    bad = np.nonzero(~(ok_left & ok_right))[0]
    clauses.append(
        Clause("identity", len(bad) == 0, [{"a": as_tuple(a[i])} for i in bad[:1]], samples=samples)
    )

    inv = d.inverse_array(a)
    ok = rows_equal(d.multiply_array(a, inv), e) & rows_equal(d.multiply_array(inv, a), e)
    bad = np.nonzero(~ok)[0]
    clauses.append(
        Clause("inverse", len(bad) == 0, [{"a": as_tuple(a[i])} for i in bad[:1]], samples=samples)
    )
    return CheckResult.from_clauses("group-law", clauses, ball=ball.radius, seed=seed)
