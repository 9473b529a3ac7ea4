"""First-order Melnikov function of the perturbed piecewise system.

Two independent evaluation routes are provided and cross-checked everywhere:

  * melnikov_direct: adaptive quadrature of g_k dx - f_k dy over the
    flow-oriented arcs, one arc per zone;
  * canonical_form / u_form / melnikov_canonical: exact-rational reduction to

        M(h) = alpha(h) I01 + beta(h) I11 + gamma(h) J00 + delta(h) J01 + phi(u)

    (four-zone; the two-zone analogue runs over U00, U01, V00, V01), and the
    substituted form M(u) = u P(u) + (u^4 + u^2) Q(u^4 + u^2) W(u) with
    W(u) = int_0^{1/sqrt(1+u^2)} sqrt(1-t^2) dt.

The degree bounds of the reduced polynomials are enforced exactly; P carries
coefficients q0 + q1*pi because the quarter-circle area enters linearly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import quadrature
from .exactpoly import H_IN_U, PiRat, Poly
from .geometry import (
    FOUR_ZONE,
    TWO_ZONE_LOWER,
    TWO_ZONE_UPPER,
    check_mode,
    corner_points,
    u_of_h,
)
from .moments import base_integrals, reduce_moment

ZONES_FOR_MODE = {FOUR_ZONE: (1, 2, 3, 4), TWO_ZONE_UPPER: (1, 4), TWO_ZONE_LOWER: (1, 4)}


class DegenerateCornerError(Exception):
    """A corner denominator of the crossing factors vanished (h > 0 excludes this)."""


@dataclass(frozen=True)
class PerturbationSpec:
    """Degree-n piecewise polynomial perturbation.

    coeffs maps (zone, table, i, j) -> Fraction with table in {"a", "b"};
    "a" perturbs xdot, "b" perturbs ydot.  Absent entries are zero.
    """

    n: int
    mode: str
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        check_mode(self.mode)
        if self.n < 0:
            raise ValueError("degree n must be nonnegative")
        zones = ZONES_FOR_MODE[self.mode]
        clean = {}
        for key, value in self.coeffs.items():
            zone, table, i, j = key
            if zone not in zones:
                raise ValueError(f"zone {zone} not valid for mode {self.mode}")
            if table not in ("a", "b"):
                raise ValueError(f"table must be 'a' or 'b', got {table!r}")
            if i < 0 or j < 0 or i + j > self.n:
                raise ValueError(f"index ({i},{j}) outside triangle i+j <= {self.n}")
            value = Fraction(value)
            if value != 0:
                clean[key] = value
        object.__setattr__(self, "coeffs", clean)

    def coeff(self, zone: int, table: str, i: int, j: int) -> Fraction:
        return self.coeffs.get((zone, table, i, j), Fraction(0))

    def zone_tables(self, zone: int) -> tuple[np.ndarray, np.ndarray]:
        """(a, b) coefficient matrices, entry [i, j] multiplying x^i y^j."""
        a = np.zeros((self.n + 1, self.n + 1))
        b = np.zeros((self.n + 1, self.n + 1))
        for (z, table, i, j), v in self.coeffs.items():
            if z == zone:
                (a if table == "a" else b)[i, j] = float(v)
        return a, b

    def __add__(self, other: "PerturbationSpec") -> "PerturbationSpec":
        if other.mode != self.mode:
            raise ValueError("cannot add specs of different modes")
        merged = dict(self.coeffs)
        for key, v in other.coeffs.items():
            merged[key] = merged.get(key, Fraction(0)) + v
        return PerturbationSpec(max(self.n, other.n), self.mode, merged)

    def reflected(self) -> "PerturbationSpec":
        """Image under (x, y) -> (x, -y) with time reversal.

        Swaps the two-zone-upper and two-zone-lower systems; zone labels are
        preserved, coefficients pick up parity signs.
        """
        if self.mode == TWO_ZONE_UPPER:
            new_mode = TWO_ZONE_LOWER
        elif self.mode == TWO_ZONE_LOWER:
            new_mode = TWO_ZONE_UPPER
        else:
            raise ValueError("reflection is defined for the two-zone modes")
        out = {}
        for (z, table, i, j), v in self.coeffs.items():
            sign = (-1) ** (j + 1) if table == "a" else (-1) ** j
            out[(z, table, i, j)] = sign * v
        return PerturbationSpec(self.n, new_mode, out)


def eval_W(u) -> float:
    """W(u) = int_0^{1/sqrt(1+u^2)} sqrt(1-t^2) dt, by closed antiderivative.

    The antiderivative value (s*sqrt(1-s^2) + asin s)/2 at s = 1/sqrt(1+u^2)
    is evaluated through the identity asin(s) = pi/2 - atan(u): the asin form
    loses O(eps/u) precision as s -> 1, the atan form none.  W(0) = pi/4 and
    W(u) = pi/4 - u^3/3 + (2/5) u^5 + ... near zero.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("eval_W requires u >= 0")
    val = math.pi / 4.0 + eval_W_tail(u)
    return val if np.ndim(val) else float(val)


def eval_W_tail(u):
    """W(u) - pi/4, evaluated without cancellation for small u.

    Equals (u/(1+u^2) - atan u)/2; below u = 0.25 that difference loses all
    significance, so the alternating series sum_{k>=1} (-1)^k k/(2k+1) u^(2k+1)
    is used instead (25 terms reach full precision there).
    """
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = u <= 0.25
    if np.any(small):
        us = u[small]
        u2 = us * us
        acc = np.zeros_like(us)
        for k in range(25, 0, -1):
            acc = acc * u2 + ((-1) ** k) * k / (2 * k + 1)
        out[small] = acc * us * u2
    if np.any(~small):
        ub = u[~small]
        out[~small] = 0.5 * (ub / (1.0 + ub * ub) - np.arctan(ub))
    return out if out.ndim else float(out)


def phi_factors(h: float, mode: str = FOUR_ZONE) -> tuple[float, float, float, float]:
    """Crossing-correction factors built from per-zone gradient ratios.

    Each factor is a telescoping product of [H_x + H_y * slope] brackets at the
    corner points, with the switching-curve slopes 2x (upper parabola) and -2x
    (lower).  All zone Hamiltonians coincide here, so the identity value is 1;
    the product is computed literally rather than short-circuited.  Two-zone
    modes have two crossing points, so slots 3 and 4 are exactly 1.
    """
    check_mode(mode)
    cp = corner_points(h)

    def grad(zone: int, point):
        # every zone carries H = (x^2 + y^2)/2
        x, y = point
        return (x, y)

    def bracket(zone: int, point, slope: float) -> float:
        hx, hy = grad(zone, point)
        val = hx + hy * slope
        if val == 0.0:
            raise DegenerateCornerError(f"corner bracket vanished at {point}")
        return val

    up = lambda x: 2.0 * x  # slope of y = x^2
    dn = lambda x: -2.0 * x  # slope of y = -x^2

    if mode == FOUR_ZONE:
        bA1 = bracket(1, cp.A, up(cp.a))
        bA4 = bracket(4, cp.A, up(cp.a))
        bB2 = bracket(2, cp.B, dn(cp.b))
        bB1 = bracket(1, cp.B, dn(cp.b))
        bC3 = bracket(3, cp.C, dn(cp.c))
        bC2 = bracket(2, cp.C, dn(cp.c))
        bD4 = bracket(4, cp.D, up(cp.d))
        bD3 = bracket(3, cp.D, up(cp.d))
        phi1 = (bA1 * bB2 * bC3 * bD4) / (bA4 * bB1 * bC2 * bD3)
        phi2 = (bA1 * bC3 * bD4) / (bA4 * bC2 * bD3)
        phi3 = (bA1 * bD4) / (bA4 * bD3)
        phi4 = bA1 / bA4
        return (phi1, phi2, phi3, phi4)

    # two-zone modes: crossings at A and D (upper curve) or B and C (lower)
    if mode == TWO_ZONE_UPPER:
        p1, p2, s1, s2 = cp.A, cp.D, up(cp.a), up(cp.d)
    else:
        p1, p2, s1, s2 = cp.B, cp.C, dn(cp.b), dn(cp.c)
    b11 = bracket(1, p1, s1)
    b14 = bracket(4, p1, s1)
    b24 = bracket(4, p2, s2)
    b21 = bracket(1, p2, s2)
    return ((b11 * b24) / (b14 * b21), b11 / b14, 1.0, 1.0)


def _poly_pair(a_tab: np.ndarray, b_tab: np.ndarray):
    def f(x, y):
        return _eval_table(a_tab, x, y)

    def g(x, y):
        return _eval_table(b_tab, x, y)

    return f, g


def _eval_table(tab: np.ndarray, x, y):
    # Horner in x of Horner-in-y rows
    acc = 0.0
    for row in tab[::-1]:
        racc = 0.0
        for c in row[::-1]:
            racc = racc * y + c
        acc = acc * x + racc
    return acc


def melnikov_direct(spec: PerturbationSpec, h: float, tol: float = 1e-11) -> float:
    """M(h) by adaptive quadrature of g_k dx - f_k dy over the flow arcs."""
    total = 0.0
    for a, zone in quadrature.flow_arcs(spec.mode, h):
        a_tab, b_tab = spec.zone_tables(zone)
        f, g = _poly_pair(a_tab, b_tab)
        total += quadrature.line_integral(a, g, f, h, tol=tol)
    return total


@dataclass(frozen=True)
class CanonicalForm:
    """Exact reduced representation of M(h).

    Four-zone: M = alpha*I01 + beta*I11 + gamma*J00 + delta*J01 + phi(u).
    Two-zone:  M = alpha*U00 + beta*U01 + gamma*V00 + delta*V01 + phi(u).
    alpha..delta are polynomials in h, phi is a polynomial in u; all
    coefficients are exact rationals.
    """

    mode: str
    n: int
    alpha: Poly
    beta: Poly
    gamma: Poly
    delta: Poly
    phi: Poly

    def degree_bounds(self) -> dict[str, int]:
        n = self.n
        if self.mode == FOUR_ZONE:
            return {
                "alpha": (n - 1) // 2 if n >= 1 else -1,
                "beta": (n - 2) // 2 if n >= 2 else -1,
                "gamma": n // 2,
                "delta": (n - 1) // 2 if n >= 1 else -1,
                "phi": 2 * n + (3 + (-1) ** n) // 2,
            }
        return {
            "alpha": n // 2,
            "beta": (n - 1) // 2 if n >= 1 else -1,
            "gamma": n // 2,
            "delta": (n - 1) // 2 if n >= 1 else -1,
            "phi": 3 + 2 * (n - 1) if n >= 1 else 2,
        }

    def degrees(self) -> dict[str, int]:
        return {
            "alpha": self.alpha.degree,
            "beta": self.beta.degree,
            "gamma": self.gamma.degree,
            "delta": self.delta.degree,
            "phi": self.phi.degree,
        }

    def bounds_satisfied(self) -> bool:
        bounds = self.degree_bounds()
        return all(deg <= bounds[name] for name, deg in self.degrees().items())

    def evaluate(self, h: float) -> float:
        base = base_integrals(h)
        u = u_of_h(h)
        if self.mode == FOUR_ZONE:
            names = ("I01", "I11", "J00", "J01")
        else:
            names = ("U00", "U01", "V00", "V01")
        val = self.phi(u)
        for poly, name in zip((self.alpha, self.beta, self.gamma, self.delta), names):
            if poly:
                val += poly(h) * base[name]
        return val


# accumulation slot for each (family, base): which canonical polynomial it feeds
_BASE_SLOT = {
    "I01": "alpha", "I11": "beta", "J00": "gamma", "J01": "delta",
    "U00": "alpha", "U01": "beta", "V00": "gamma", "V01": "delta",
}


def canonical_form(spec: PerturbationSpec) -> CanonicalForm:
    """Assemble the exact canonical representation of M(h).

    The b-tables contribute moments directly; the a-tables are integrated by
    parts, shifting (i, j) -> (i-1, j+1) and leaving corner boundary terms.
    Arc symmetries fold the CD and DA moments onto the AB and BC families.
    The two-zone-lower system is the reflection of the upper one, so its form
    is assembled from the reflected spec and negated.
    """
    if spec.mode == TWO_ZONE_LOWER:
        upper = canonical_form(spec.reflected())
        return CanonicalForm(
            mode=TWO_ZONE_LOWER,
            n=spec.n,
            alpha=-upper.alpha,
            beta=-upper.beta,
            gamma=-upper.gamma,
            delta=-upper.delta,
            phi=-upper.phi,
        )

    if spec.mode == FOUR_ZONE:
        # (zone) -> moment family of its arc, and corner pair for dy brackets
        zone_family = {1: "I", 2: "J", 3: "It", 4: "Jt"}
        zone_corners = {1: ("A", "B"), 2: ("B", "C"), 3: ("C", "D"), 4: ("D", "A")}
    else:
        zone_family = {1: "U", 4: "V"}
        zone_corners = {1: ("A", "D"), 4: ("D", "A")}

    from .moments import _bracket  # corner monomial differences

    weights: dict[tuple[str, int, int], Fraction] = {}
    phi = Poly.zero()

    def add_weight(family: str, i: int, j: int, w: Fraction):
        if w:
            key = (family, i, j)
            weights[key] = weights.get(key, Fraction(0)) + w

    for (zone, table, i, j), v in spec.coeffs.items():
        fam = zone_family[zone]
        if table == "b":
            add_weight(fam, i, j, v)
            continue
        # a-coefficient: -a * int x^i y^j dy over the zone arc
        #   int dy = -(i/(j+1)) * fam[i-1, j+1] + bracket/(j+1)
        inv = Fraction(1, j + 1)
        if i >= 1:
            add_weight(fam, i - 1, j + 1, v * i * inv)
        P, Q = zone_corners[zone]
        s, e = _bracket(P, Q, i, j + 1)
        if s:
            phi = phi + Poly.monomial(-v * s * inv, e)

    parts = {"alpha": Poly.zero(), "beta": Poly.zero(), "gamma": Poly.zero(), "delta": Poly.zero()}
    for (fam, i, j), w in weights.items():
        rm = reduce_moment(fam, i, j)
        phi = phi + rm.boundary * w
        if rm.base is not None:
            slot = _BASE_SLOT[rm.base]
            parts[slot] = parts[slot] + Poly.monomial(w * rm.coeff, rm.power)

    return CanonicalForm(
        mode=spec.mode,
        n=spec.n,
        alpha=parts["alpha"],
        beta=parts["beta"],
        gamma=parts["gamma"],
        delta=parts["delta"],
        phi=phi,
    )


@dataclass(frozen=True)
class UForm:
    """M(u) = u * P(u) + (u^4 + u^2) * Qc(u^4 + u^2) * W(u).

    P has coefficients q0 + q1*pi; Qc is rational in v = u^4 + u^2.  The
    series part S(u) = u P(u) + (pi/4) v Qc(v), precomputed exactly, allows a
    cancellation-free split M(u) = S(u) + v Qc(v) (W(u) - pi/4); near u = 0
    the two naive summands agree to O(u^3) relatively, which doubles cannot
    resolve.
    """

    mode: str
    n: int
    P: Poly
    Qc: Poly
    S: Poly

    def p_float(self) -> np.ndarray:
        return np.asarray(self.P.float_coeffs() or [0.0])

    def qc_float(self) -> np.ndarray:
        return np.asarray(self.Qc.float_coeffs() or [0.0])

    def s_float(self) -> np.ndarray:
        return np.asarray(self.S.float_coeffs() or [0.0])

    def evaluate(self, u) -> np.ndarray | float:
        """Vectorized M(u) via the stable series/tail split."""
        u = np.asarray(u, dtype=float)
        sc = self.s_float()[::-1]
        qc = self.qc_float()[::-1]
        v = u * u * (1.0 + u * u)
        val = np.polyval(sc, u) + v * np.polyval(qc, v) * eval_W_tail(u)
        return val if val.ndim else float(val)


def u_form(cf: CanonicalForm) -> UForm:
    """Substitute the base-integral closed forms and h = u^4 + u^2 into cf.

    Uses J01 = 2 h W(u), I01 = pi h / 2 - 2 h W, U01 = pi h - 2 h W,
    V01 = 2 h W, I11 = (2/3) u^6, J00 = U00 = -2u, V00 = 2u.
    """
    two = Fraction(2)
    if cf.mode == FOUR_ZONE:
        # u*P collects alpha*(pi h/2), beta*(2/3)u^6, gamma*(-2u), phi
        up = (
            cf.alpha.compose(H_IN_U) * H_IN_U * PiRat(0, Fraction(1, 2))
            + cf.beta.compose(H_IN_U) * Poly.monomial(Fraction(2, 3), 6)
            + cf.gamma.compose(H_IN_U) * Poly.monomial(Fraction(-2), 1)
            + cf.phi
        )
        qc = (cf.delta - cf.alpha) * two
    else:
        up = (
            cf.alpha.compose(H_IN_U) * Poly.monomial(Fraction(-2), 1)
            + cf.beta.compose(H_IN_U) * H_IN_U * PiRat(0, 1)
            + cf.gamma.compose(H_IN_U) * Poly.monomial(Fraction(2), 1)
            + cf.phi
        )
        qc = (cf.delta - cf.beta) * two
    series = up + qc.compose(H_IN_U) * H_IN_U * PiRat(0, Fraction(1, 4))
    return UForm(mode=cf.mode, n=cf.n, P=up.shift(-1), Qc=qc, S=series)


def melnikov_canonical(uf: UForm, h: float) -> float:
    """Evaluate the reduced form at level h (through u = u_of_h(h))."""
    return float(uf.evaluate(u_of_h(h)))
