"""Closed forms and exact-rational reduction of the circle-arc moments.

Six moment families, one per oriented arc between corner points:

    I[i,j]  = int_{AB} x^i y^j dx        J[i,j]  = int_{BC} x^i y^j dx
    It[i,j] = int_{CD} x^i y^j dx        Jt[i,j] = int_{DA} x^i y^j dx
    U[i,j]  = int_{AD, lower} x^i y^j dx V[i,j]  = int_{DA, upper} x^i y^j dx

Every moment reduces, with exact rational coefficients, to

    coeff * h^m * (base integral)  +  polynomial in u,

where u^2 = (sqrt(1+4h)-1)/2 (so a term q*u^p stands for q*Z^(p/2) with
Z = u^2) and the base integrals are

    I01, I11, J00, J01        (four-zone families)
    U00, U01, V00, V01        (two-zone families).

The reduction uses two devices on an arc from P to Q:

  (i+j+1)*Arc[i,j] = (i-1)*h*Arc[i-2,j] - [x^(i-1) y^(j+2)]_P^Q   (lower i)
  (i+j+1)*Arc[i,j] = j*h*Arc[i,j-2] + [x^(i+1) y^j]_P^Q           (lower j)

obtained by multiplying x + y y' = 0 (respectively x^2 + y^2 = h) by a
monomial form and integrating by parts.  Boundary brackets are monomials in
u because every corner point is (+-u, +-u^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactpoly import Poly
from .geometry import u_of_h

FAMILIES = ("I", "J", "It", "Jt", "U", "V")

# corner signs: x = sx*u, y = sy*u^2
_CORNERS = {"A": (1, 1), "B": (1, -1), "C": (-1, -1), "D": (-1, 1)}

# family -> (start corner, end corner, vanishing parity, base table)
_FAMILY = {
    "I": ("A", "B", "even-j", {(0, 1): "I01", (1, 1): "I11"}),
    "J": ("B", "C", "odd-i", {(0, 0): "J00", (0, 1): "J01"}),
    "U": ("A", "D", "odd-i", {(0, 0): "U00", (0, 1): "U01"}),
    "V": ("D", "A", "odd-i", {(0, 0): "V00", (0, 1): "V01"}),
}

BASES = ("I01", "I11", "J00", "J01", "U00", "U01", "V00", "V01")


@dataclass(frozen=True)
class ReducedMoment:
    """coeff * h^power * base + boundary(u), all coefficients exact rationals."""

    base: str | None  # None for the zero representation
    coeff: Fraction
    power: int
    boundary: Poly  # polynomial in u

    def scaled(self, c: Fraction) -> "ReducedMoment":
        return ReducedMoment(self.base, self.coeff * c, self.power, self.boundary * c)

    def evaluate(self, h: float, base_values: dict[str, float]) -> float:
        u = u_of_h(h)
        val = self.boundary(u)
        if self.base is not None:
            val += float(self.coeff) * h**self.power * base_values[self.base]
        return val


_ZERO = ReducedMoment(None, Fraction(0), 0, Poly.zero())


def _bracket(P: str, Q: str, p: int, q: int) -> tuple[int, int]:
    """[x^p y^q]_P^Q = s * u^(p+2q); returns (s, p+2q)."""
    sxq, syq = _CORNERS[Q]
    sxp, syp = _CORNERS[P]
    s = sxq**p * syq**q - sxp**p * syp**q
    return s, p + 2 * q


def _h_times(rm: ReducedMoment) -> ReducedMoment:
    # h = u^2 + u^4, so h * u^p contributes at exponents p+2 and p+4
    b = rm.boundary
    return ReducedMoment(rm.base, rm.coeff, rm.power + 1, b.shift(2) + b.shift(4))


@lru_cache(maxsize=None)
def reduce_moment(family: str, i: int, j: int) -> ReducedMoment:
    """Exact reduction of family[i,j] to its base integral plus a u-polynomial."""
    if family == "It":
        rm = reduce_moment("I", i, j)
        return rm.scaled(Fraction((-1) ** (i + j + 1)))
    if family == "Jt":
        rm = reduce_moment("J", i, j)
        return rm.scaled(Fraction((-1) ** (j + 1)))
    if family not in _FAMILY:
        raise ValueError(f"unknown moment family {family!r}")
    if i < 0 or j < 0:
        raise ValueError("moment indices must be nonnegative")
    P, Q, vanish, bases = _FAMILY[family]
    if vanish == "even-j" and j % 2 == 0:
        return _ZERO
    if vanish == "odd-i" and i % 2 == 1:
        return _ZERO
    if (i, j) in bases:
        return ReducedMoment(bases[(i, j)], Fraction(1), 0, Poly.zero())
    inv = Fraction(1, i + j + 1)
    if j >= 2 and (family != "I" or j >= 3):
        # lower j: (i+j+1)*M[i,j] = j*h*M[i,j-2] + [x^(i+1) y^j]
        s, e = _bracket(P, Q, i + 1, j)
        rm = _h_times(reduce_moment(family, i, j - 2)).scaled(inv * j)
        return ReducedMoment(
            rm.base, rm.coeff, rm.power, rm.boundary + Poly.monomial(inv * s, e)
        )
    # lower i: (i+j+1)*M[i,j] = (i-1)*h*M[i-2,j] - [x^(i-1) y^(j+2)]
    if i < 2:
        raise ValueError(f"no reduction path for {family}[{i},{j}]")
    s, e = _bracket(P, Q, i - 1, j + 2)
    rm = _h_times(reduce_moment(family, i - 2, j)).scaled(inv * (i - 1))
    return ReducedMoment(
        rm.base, rm.coeff, rm.power, rm.boundary + Poly.monomial(-inv * s, e)
    )


def half_circle_chord_integral(h: float) -> float:
    """int_0^u sqrt(h - x^2) dx by its closed antiderivative."""
    u = u_of_h(h)
    return 0.5 * (u * u * u + h * math.asin(u / math.sqrt(h)))


def base_integrals(h: float) -> dict[str, float]:
    """Closed-form values of all base integrals at level h.

    The chord integral G = int_0^u sqrt(h-x^2) dx ties them together:
    I01 = pi*h/2 - 2G, J01 = 2G, U01 = pi*h - 2G, V01 = 2G,
    J00 = U00 = -2u, V00 = 2u, I11 = (2/3) u^6.
    """
    if h <= 0.0:
        raise ValueError(f"energy level must be positive, got h={h}")
    u = u_of_h(h)
    g2 = 2.0 * half_circle_chord_integral(h)
    return {
        "J00": -2.0 * u,
        "I11": (2.0 / 3.0) * u**6,
        "I01": math.pi * h / 2.0 - g2,
        "J01": g2,
        "U00": -2.0 * u,
        "U01": math.pi * h - g2,
        "V00": 2.0 * u,
        "V01": g2,
    }


def moment(family: str, i: int, j: int, h: float) -> float:
    """Numeric value of family[i,j] at level h via the exact reduction."""
    return reduce_moment(family, i, j).evaluate(h, base_integrals(h))
