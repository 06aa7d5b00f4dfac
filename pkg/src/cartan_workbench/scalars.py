"""Exact scalars: rational angles on the circle group and cyclotomic numbers.

``CircleElement`` stores an element of T as a reduced angle ``num/den`` in
[0, 1), read as exp(2*pi*i*num/den).  ``Cyclotomic`` stores an element of
Q(zeta_N) in the power basis, reduced modulo the N-th cyclotomic polynomial.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class CircleElement:
    num: int = 0
    den: int = 1

    def __post_init__(self) -> None:
        if self.den <= 0:
            raise ValueError(f"denominator must be positive, got {self.den}")
        if not (0 <= self.num < self.den) or math.gcd(self.num, self.den) != 1:
            if self.num == 0 and self.den == 1:
                return
            raise ValueError(
                f"{self.num}/{self.den} is not a reduced angle in [0, 1); "
                "use CircleElement.from_angle"
            )

    @classmethod
    def from_angle(cls, angle: Rational) -> CircleElement:
        a = Fraction(angle) % 1
        return cls(a.numerator, a.denominator)

    @classmethod
    def parse(cls, text: str) -> CircleElement:
        return cls.from_angle(Fraction(text.strip()))

    @property
    def angle(self) -> Fraction:
        return Fraction(self.num, self.den)

    def is_identity(self) -> bool:
        return self.num == 0

    def __mul__(self, other: CircleElement) -> CircleElement:
        if not isinstance(other, CircleElement):
            return NotImplemented
        return CircleElement.from_angle(self.angle + other.angle)

    def __truediv__(self, other: CircleElement) -> CircleElement:
        if not isinstance(other, CircleElement):
            return NotImplemented
        return CircleElement.from_angle(self.angle - other.angle)

    def __pow__(self, k: int) -> CircleElement:
        return CircleElement.from_angle(self.angle * k)

    def inverse(self) -> CircleElement:
        return CircleElement.from_angle(-self.angle)

    # complex conjugation on T is inversion
    conjugate = inverse

    def order(self) -> int:
        return self.den

    def to_complex(self) -> complex:
        return cmath.exp(2j * math.pi * self.num / self.den)

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


ONE = CircleElement()


def circle_product(values: Iterable[CircleElement]) -> CircleElement:
    total = Fraction(0)
    for v in values:
        total += v.angle
    return CircleElement.from_angle(total)


# ---------------------------------------------------------------------------
# integer polynomial helpers (coefficient lists, lowest degree first)


def _poly_mul(p: Sequence[int], q: Sequence[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _poly_divexact(p: Sequence[int], q: Sequence[int]) -> list[int]:
    # q monic
    p = list(p)
    dq = len(q) - 1
    quot = [0] * (len(p) - dq)
    for i in range(len(p) - 1, dq - 1, -1):
        coef = p[i]
        if coef:
            quot[i - dq] = coef
            for j, b in enumerate(q):
                p[i - dq + j] -= coef * b
    if any(p[:dq]):
        raise ArithmeticError("inexact polynomial division")
    return quot


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("conductor must be positive")
    num = [-1] + [0] * (n - 1) + [1]
    den = [1]
    for d in range(1, n):
        if n % d == 0:
            den = _poly_mul(den, cyclotomic_polynomial(d))
    return tuple(_poly_divexact(num, den))


def totient(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


@lru_cache(maxsize=None)
def _monomial_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Canonical forms of x^k mod Phi_n for 0 <= k < n."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by x, then eliminate x^deg using the monic Phi_n
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(deg):
                cur[j] -= top * phi[j]
    return tuple(rows)


def _reduce_folded(n: int, folded: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Reduce a length-n coefficient vector (exponents already mod n)."""
    table = _monomial_table(n)
    deg = len(table[0])
    out = [Fraction(0)] * deg
    for k, c in enumerate(folded):
        if c:
            if k < deg:
                out[k] += c
            else:
                for j, t in enumerate(table[k]):
                    if t:
                        out[j] += c * t
    return tuple(out)


class Cyclotomic:
    """An element of Q(zeta_N) in canonical power-basis form.

    Arithmetic between different conductors promotes both operands to the
    lcm conductor.  Instances are immutable.
    """

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: Iterable[Rational] = ()) -> None:
        n = int(conductor)
        if n < 1:
            raise ValueError("conductor must be positive")
        folded = [Fraction(0)] * n
        for k, c in enumerate(coeffs):
            folded[k % n] += Fraction(c)
        object.__setattr__(self, "conductor", n)
        object.__setattr__(self, "coeffs", _reduce_folded(n, folded))

    def __setattr__(self, name, value):
        raise AttributeError("Cyclotomic is immutable")

    # --- constructors -----------------------------------------------------

    @classmethod
    def _raw(cls, n: int, coeffs: tuple[Fraction, ...]) -> Cyclotomic:
        obj = object.__new__(cls)
        object.__setattr__(obj, "conductor", n)
        object.__setattr__(obj, "coeffs", coeffs)
        return obj

    @classmethod
    def rational(cls, r: Rational, conductor: int = 1) -> Cyclotomic:
        return cls(conductor, [r])

    @classmethod
    def zero(cls, conductor: int = 1) -> Cyclotomic:
        return cls(conductor)

    @classmethod
    def one(cls, conductor: int = 1) -> Cyclotomic:
        return cls(conductor, [1])

    @classmethod
    def zeta(cls, conductor: int, power: int = 1) -> Cyclotomic:
        n = int(conductor)
        folded = [Fraction(0)] * n
        folded[power % n] = Fraction(1)
        return cls._raw(n, _reduce_folded(n, folded))

    @classmethod
    def from_circle(cls, a: CircleElement, conductor: int) -> Cyclotomic:
        """The root of unity exp(2 pi i a) as an element of Q(zeta_conductor)."""
        if conductor % a.den:
            raise ValueError(
                f"conductor mismatch: denominator {a.den} does not divide {conductor}"
            )
        return cls.zeta(conductor, a.num * (conductor // a.den))

    # --- structure ----------------------------------------------------------

    def promote(self, conductor: int) -> Cyclotomic:
        n = int(conductor)
        if n == self.conductor:
            return self
        if n % self.conductor:
            raise ValueError(f"cannot promote conductor {self.conductor} to {n}")
        step = n // self.conductor
        folded = [Fraction(0)] * n
        for k, c in enumerate(self.coeffs):
            folded[(k * step) % n] += c
        return Cyclotomic._raw(n, _reduce_folded(n, folded))

    def _common(self, other: Cyclotomic) -> tuple[Cyclotomic, Cyclotomic]:
        if self.conductor == other.conductor:
            return self, other
        n = math.lcm(self.conductor, other.conductor)
        return self.promote(n), other.promote(n)

    @staticmethod
    def _coerce(value) -> Cyclotomic | None:
        if isinstance(value, Cyclotomic):
            return value
        if isinstance(value, (int, Fraction)):
            return Cyclotomic.rational(value)
        return None

    def reduce(self) -> Cyclotomic:
        return Cyclotomic(self.conductor, self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    # --- ring operations ----------------------------------------------------

    def __add__(self, other) -> Cyclotomic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        x, y = self._common(o)
        return Cyclotomic._raw(x.conductor, tuple(a + b for a, b in zip(x.coeffs, y.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> Cyclotomic:
        return Cyclotomic._raw(self.conductor, tuple(-a for a in self.coeffs))

    def __sub__(self, other) -> Cyclotomic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> Cyclotomic:
        return (-self) + other

    def __mul__(self, other) -> Cyclotomic:
        if isinstance(other, (int, Fraction)):
            r = Fraction(other)
            return Cyclotomic._raw(self.conductor, tuple(a * r for a in self.coeffs))
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        x, y = self._common(other)
        n = x.conductor
        folded = [Fraction(0)] * n
        for i, a in enumerate(x.coeffs):
            if a:
                for j, b in enumerate(y.coeffs):
                    if b:
                        folded[(i + j) % n] += a * b
        return Cyclotomic._raw(n, _reduce_folded(n, folded))

    __rmul__ = __mul__

    def conj(self) -> Cyclotomic:
        """Complex conjugate: zeta_N -> zeta_N^(N-1)."""
        n = self.conductor
        folded = [Fraction(0)] * n
        for k, c in enumerate(self.coeffs):
            folded[(-k) % n] += c
        return Cyclotomic._raw(n, _reduce_folded(n, folded))

    def norm_sq(self) -> Cyclotomic:
        return self * self.conj()

    def to_complex(self) -> complex:
        w = cmath.exp(2j * math.pi / self.conductor)
        return sum((complex(float(c)) * w**k for k, c in enumerate(self.coeffs)), 0j)

    # --- comparison / serialization -----------------------------------------

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        x, y = self._common(o)
        return x.coeffs == y.coeffs

    # equality crosses conductors, so there is no cheap consistent hash
    __hash__ = None  # type: ignore[assignment]

    def to_json(self) -> dict:
        return {
            "conductor": self.conductor,
            "coeffs": [f"{c.numerator}/{c.denominator}" for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> Cyclotomic:
        return cls(int(data["conductor"]), [Fraction(c) for c in data["coeffs"]])

    def __repr__(self) -> str:
        return f"Cyclotomic({self.conductor}, [{', '.join(str(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mono = f"z{self.conductor}" + (f"^{k}" if k > 1 else "")
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms) if terms else "0"
