"""Built-in scenarios: the quadratic-twist group on Z^5, its torsion variant,
and the rotation cocycle on Z^2, together with the hand-derived closed forms
used to cross-check the generic computations."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from .cocycles import CocycleDescriptor
from .config import WorkbenchConfig, parse_config
from .groups import GroupDescriptor
from .subgroups import SubgroupDescriptor

QUADRATIC_TWIST = ((1, 5, 3, 2), (2, 5, 4, 2))

G5 = GroupDescriptor.from_components(["Z"] * 5, QUADRATIC_TWIST)
C5 = CocycleDescriptor.of((4, 1, "1/2"))
S0 = SubgroupDescriptor((1, 1, 0, 0, 1))
S1 = SubgroupDescriptor((1, 1, 1, 2, 0))
S2 = SubgroupDescriptor((2, 1, 1, 1, 0))

G7 = GroupDescriptor.from_components(["Z/4", "Z/4", "Z", "Z", "Z/4"], QUADRATIC_TWIST)
C7 = CocycleDescriptor.of((4, 1, "1/2"))
S7 = SubgroupDescriptor((1, 1, 1, 2, 2))
NU_BAR = (0, 0, 0, 0, 1)
MU_BAR = (2, 0, 0, 0, 1)

ROTATION_THETA = Fraction(1, 5)
GROT = GroupDescriptor.from_components(["Z", "Z"])
SROT = SubgroupDescriptor((0, 1))
SROT_FIRST_AXIS = SubgroupDescriptor((1, 0))


def rotation_cocycle(theta: Fraction = ROTATION_THETA) -> CocycleDescriptor:
    """c((n1, n2), (m1, m2)) = theta * n2 * m1, with theta a rational stand-in."""
    return CocycleDescriptor.of((2, 1, theta))


CROT = rotation_cocycle()


def load_config(name: str) -> WorkbenchConfig:
    """One of the packaged configs: g5, counterexample, rotation."""
    text = resources.files("cartan_workbench.data").joinpath(f"{name}.json").read_text("utf-8")
    return parse_config(text)


def expected_verdicts() -> dict:
    text = resources.files("cartan_workbench.data").joinpath("expected_verdicts.json").read_text("utf-8")
    return json.loads(text)


def g5_conjugation(G: np.ndarray, S: np.ndarray) -> np.ndarray:
    """g^-1 s g = (s1 + 2 s5 g3 - 2 g5 s3, s2 + 2 s5 g4 - 2 g5 s4, s3, s4, s5)."""
    G, S = np.broadcast_arrays(G, S)
    out = S.copy()
    out[..., 0] = S[..., 0] + 2 * S[..., 4] * G[..., 2] - 2 * G[..., 4] * S[..., 2]
    out[..., 1] = S[..., 1] + 2 * S[..., 4] * G[..., 3] - 2 * G[..., 4] * S[..., 3]
    return out


def g5_power(g: Sequence[int], j: int) -> tuple[int, ...]:
    """g^j = (j g1 + j(j-1) g5 g3, j g2 + j(j-1) g5 g4, j g3, j g4, j g5)."""
    g1, g2, g3, g4, g5 = g
    return (j * g1 + j * (j - 1) * g5 * g3, j * g2 + j * (j - 1) * g5 * g4, j * g3, j * g4, j * g5)


def _parity(x: int) -> int:
    return x % 2


# Closed forms in angle notation: a character is the tuple of generator
# angles, the action returns the new tuple, sigma returns one angle.


def _s0_action(g, th):
    t1, t2, t3 = th
    return (t1 + Fraction(g[3], 2), t2, t3 + 2 * g[2] * t1 + 2 * g[3] * t2)


def _s0_sigma(g, h, th):
    return Fraction(0)


def _s1_action(g, th):
    t1, t2, t3, t4 = th
    return (t1 + Fraction(g[3], 2), t2, t3 - 2 * g[4] * t1, t4 - 4 * g[4] * t2)


def _s1_sigma(g, h, th):
    t2, t4 = th[1], th[3]
    if _parity(h[3]) == 0:
        return Fraction(0)
    if _parity(g[3]) == 0:
        return 2 * g[4] * t2
    return (-2 * g[4] - 4 * h[4]) * t2 + t4


def _s2_action(g, th):
    t1, t2, t3, t4 = th
    return (t1, t2, t3 - g[4] * t1, t4 + Fraction(g[0], 2) - 2 * g[4] * t2)


def _s2_sigma(g, h, th):
    if _parity(g[0]) == 1 and _parity(h[0]) == 1:
        return th[0]
    return Fraction(0)


def _rotation_action(theta):
    return lambda g, th: (th[0] + g[0] * theta,)


def _rotation_sigma(g, h, th):
    return Fraction(0)


@dataclass(frozen=True)
class ClosedForms:
    label: str
    action: Callable
    sigma: Callable
    conjugation: Callable | None = None


def closed_forms_for(
    group: GroupDescriptor, cocycle: CocycleDescriptor, subgroup: SubgroupDescriptor
) -> ClosedForms | None:
    """Hand-derived formulas for a built-in (G, c, S), matched by descriptor equality."""
    if group == G5 and cocycle == C5:
        table = {
            S0: ClosedForms("S0", _s0_action, _s0_sigma, g5_conjugation),
            S1: ClosedForms("S1", _s1_action, _s1_sigma, g5_conjugation),
            S2: ClosedForms("S2", _s2_action, _s2_sigma, g5_conjugation),
        }
        return table.get(subgroup)
    if group == GROT and subgroup == SROT and len(cocycle.terms) == 1:
        t = cocycle.terms[0]
        if (t.left, t.right) == (2, 1):
            return ClosedForms("rotation", _rotation_action(t.angle), _rotation_sigma)
    return None


def conjugation_closed_form(group: GroupDescriptor) -> Callable | None:
    return g5_conjugation if group == G5 else None
