"""Shared fixtures and independent oracles.

The oracles re-derive values from hand formulas or by brute force with
floating complex numbers, so they share no code path with the package.
"""

import cmath
import itertools
import math

from fractions import Fraction

import pytest

from cartan_workbench import builtins as bi
from cartan_workbench.algebra import ConvolutionAlgebra
from cartan_workbench.groups import Ball


@pytest.fixture
def g5():
    return bi.G5


@pytest.fixture
def g7():
    return bi.G7


@pytest.fixture
def c5():
    return bi.C5


@pytest.fixture
def alg5():
    return ConvolutionAlgebra(bi.G5, bi.C5)


@pytest.fixture
def alg7():
    return ConvolutionAlgebra(bi.G7, bi.C7)


@pytest.fixture
def ball2():
    return Ball(2)


@pytest.fixture
def ball3():
    return Ball(3)


# --- hand formulas for the Z^5 group -----------------------------------------


def g5_mul(a, b):
    return (
        a[0] + b[0] + 2 * a[4] * b[2],
        a[1] + b[1] + 2 * a[4] * b[3],
        a[2] + b[2],
        a[3] + b[3],
        a[4] + b[4],
    )


def g5_inv(a):
    return (2 * a[2] * a[4] - a[0], 2 * a[3] * a[4] - a[1], -a[2], -a[3], -a[4])


def g7_inv(a):
    x = (2 * a[4] * a[2] - a[0], 2 * a[4] * a[3] - a[1], -a[2], -a[3], -a[4])
    return (x[0] % 4, x[1] % 4, x[2], x[3], x[4] % 4)


def cocycle_angle(terms, a, b):
    """sum r * a_j * b_k as a float angle (terms use 1-based indices)."""
    return sum(float(r) * a[j - 1] * b[k - 1] for j, k, r in terms)


def unit(angle):
    return cmath.exp(2j * math.pi * angle)


def literal_convolution(mul, inv, c, f, h):
    """(f*h)(gamma) = sum_eta f(gamma eta) h(eta^-1) c(gamma eta, eta^-1), with
    f, h dicts of complex numbers and c returning a complex number."""
    out = {}
    candidates = {mul(a, b) for a in f for b in h}
    for gamma in candidates:
        total = 0j
        for b in h:
            eta = inv(b)
            ge = mul(gamma, eta)
            if ge in f:
                total += f[ge] * h[b] * c(ge, b)
        if abs(total) > 1e-12:
            out[gamma] = total
    return out


def small_box(rank, r=1):
    return list(itertools.product(range(-r, r + 1), repeat=rank))


# --- Weyl closed forms, written apart from the package's own table ---------


def action_oracle(label, g, th):
    if label == "S0":
        return (th[0] + Fraction(g[3], 2), th[1], th[2] + 2 * g[2] * th[0] + 2 * g[3] * th[1])
    if label == "S1":
        return (th[0] + Fraction(g[3], 2), th[1], th[2] - 2 * g[4] * th[0], th[3] - 4 * g[4] * th[1])
    return (th[0], th[1], th[2] - g[4] * th[0], th[3] + Fraction(g[0], 2) - 2 * g[4] * th[1])


def sigma_oracle(label, g, h, th):
    if label == "S0":
        return Fraction(0)
    if label == "S1":
        if h[3] % 2 == 0:
            return Fraction(0)
        if g[3] % 2 == 0:
            return 2 * g[4] * th[1]
        return (-2 * g[4] - 4 * h[4]) * th[1] + th[3]
    return th[0] if g[0] % 2 and h[0] % 2 else Fraction(0)
