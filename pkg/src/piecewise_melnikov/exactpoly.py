"""Exact polynomial arithmetic over Fraction and over Fraction + Fraction*pi.

Coefficients live in the field of rationals, or, for the reduced forms where
the quarter-circle area enters linearly, in numbers q0 + q1*pi with rational
q0, q1.  Products of two pi-carrying numbers never arise in this package and
are rejected rather than silently widened.
"""

from __future__ import annotations

import math
from fractions import Fraction


class PiRat:
    """Number q0 + q1*pi with exact rational q0, q1."""

    __slots__ = ("q0", "q1")

    def __init__(self, q0=0, q1=0):
        self.q0 = Fraction(q0)
        self.q1 = Fraction(q1)

    def __add__(self, other):
        other = as_pirat(other)
        return PiRat(self.q0 + other.q0, self.q1 + other.q1)

    __radd__ = __add__

    def __sub__(self, other):
        other = as_pirat(other)
        return PiRat(self.q0 - other.q0, self.q1 - other.q1)

    def __rsub__(self, other):
        return as_pirat(other) - self

    def __neg__(self):
        return PiRat(-self.q0, -self.q1)

    def __mul__(self, other):
        if isinstance(other, PiRat):
            if other.q1 != 0 and self.q1 != 0:
                raise ValueError("pi^2 terms are not representable")
            if other.q1 == 0:
                return PiRat(self.q0 * other.q0, self.q1 * other.q0)
            other, self_ = self, other
            return PiRat(other.q0 * self_.q0, other.q0 * self_.q1)
        r = Fraction(other)
        return PiRat(self.q0 * r, self.q1 * r)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = as_pirat(other)
        return self.q0 == other.q0 and self.q1 == other.q1

    def __hash__(self):
        return hash((self.q0, self.q1))

    def __bool__(self):
        return self.q0 != 0 or self.q1 != 0

    def __float__(self):
        return float(self.q0) + float(self.q1) * math.pi

    def __repr__(self):
        return f"PiRat({self.q0!s}, {self.q1!s})"

    def as_strings(self) -> tuple[str, str]:
        return (str(self.q0), str(self.q1))


def as_pirat(v) -> PiRat:
    if isinstance(v, PiRat):
        return v
    return PiRat(Fraction(v), 0)


class Poly:
    """Dense univariate polynomial with exact coefficients (ascending order).

    Coefficients are Fractions or PiRats; the zero polynomial has degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = cs

    @classmethod
    def zero(cls) -> "Poly":
        return cls(())

    @classmethod
    def monomial(cls, coeff, power: int) -> "Poly":
        if not coeff:
            return cls(())
        return cls([Fraction(0)] * power + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[k] + other[k] for k in range(n)])

    def __sub__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[k] - other[k] for k in range(n)])

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, Poly):
            if not self.coeffs or not other.coeffs:
                return Poly(())
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if not a:
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return Poly(out)
        return Poly([c * other for c in self.coeffs])

    __rmul__ = __mul__

    def shift(self, k: int) -> "Poly":
        """Multiply by x^k (k may be negative if low coefficients vanish)."""
        if k >= 0:
            return Poly([Fraction(0)] * k + self.coeffs)
        if any(self.coeffs[i] for i in range(min(-k, len(self.coeffs)))):
            raise ValueError("shift would drop nonzero low-order coefficients")
        return Poly(self.coeffs[-k:])

    def compose(self, inner: "Poly") -> "Poly":
        """self(inner(x)) by Horner; exact."""
        out = Poly(())
        for c in reversed(self.coeffs):
            out = out * inner + Poly((c,))
        return out

    def eval_fraction(self, x: Fraction):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def float_coeffs(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    def coeff_strings(self) -> list:
        out = []
        for c in self.coeffs:
            out.append(list(c.as_strings()) if isinstance(c, PiRat) else str(c))
        return out

    def __repr__(self):
        return f"Poly({self.coeffs!r})"


# h expressed in u: h = u^2 + u^4
H_IN_U = Poly([Fraction(0), Fraction(0), Fraction(1), Fraction(0), Fraction(1)])
