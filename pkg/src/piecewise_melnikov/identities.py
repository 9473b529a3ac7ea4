"""Numerical identity suite: every closed-form claim against brute quadrature.

Each check returns its worst error over a small jittered h-grid; the CLI
prints one pass/fail line per identity.  The recurrences are exercised by
substituting independently computed arc moments on both sides, so they hold
or fail regardless of how reduce_moment orders its reductions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .geometry import u_of_h
from .melnikov import phi_factors
from .moments import _bracket, base_integrals
from .quadrature import Arc, arc, arc_moment, integrate_1d

_FAM_ARC = {
    "I": "AB",
    "J": "BC",
    "It": "CD",
    "Jt": "DA",
    "U": "AD-lower",
    "V": "DA-upper",
}

# corner pairs including the folded families
_FAM_CORNERS = {
    "I": ("A", "B"),
    "J": ("B", "C"),
    "It": ("C", "D"),
    "Jt": ("D", "A"),
    "U": ("A", "D"),
    "V": ("D", "A"),
}


@dataclass(frozen=True)
class IdentityResult:
    name: str
    max_err: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_err <= self.tol


def _h_grid(seed: int | None) -> list[float]:
    base = [0.5, 2.0, 5.0]
    if seed is None:
        return base
    rng = random.Random(seed)
    return [h * (1.0 + 0.05 * (rng.random() - 0.5)) for h in base]


def _q(fam: str, i: int, j: int, h: float, form: str = "dx") -> float:
    return arc_moment(arc(_FAM_ARC[fam], h), i, j, form, h)


def check_base_integrals(h_grid) -> IdentityResult:
    pairs = {
        "J00": ("J", 0, 0), "I11": ("I", 1, 1), "I01": ("I", 0, 1),
        "J01": ("J", 0, 1), "U00": ("U", 0, 0), "U01": ("U", 0, 1),
        "V00": ("V", 0, 0), "V01": ("V", 0, 1),
    }
    worst = 0.0
    for h in h_grid:
        closed = base_integrals(h)
        for name, (fam, i, j) in pairs.items():
            worst = max(worst, abs(closed[name] - _q(fam, i, j, h)))
    return IdentityResult("base integrals (closed form vs quadrature)", worst, 1e-10)


def check_recurrence_table(h_grid) -> IdentityResult:
    """The five displayed degree <= 5 reductions of the I family.

    Coefficients follow from the two reduction devices; the h*(.)^{7/2} terms
    of I[2,3] and I[4,1] carry + signs (the devices and quadrature agree on
    this).  Both sides are evaluated independently.
    """
    worst = 0.0
    for h in h_grid:
        u = u_of_h(h)
        I01 = _q("I", 0, 1, h)
        z7, z9, z11 = u**7, u**9, u**11
        table = {
            (0, 3): 0.75 * h * I01 - 0.5 * z7,
            (2, 1): 0.25 * h * I01 + 0.5 * z7,
            (0, 5): (5 / 8) * h * h * I01 - (5 / 12) * h * z7 - (1 / 3) * z11,
            (2, 3): (1 / 8) * h * h * I01 + (1 / 4) * h * z7 - (1 / 3) * z9,
            (4, 1): (1 / 8) * h * h * I01 + (1 / 4) * h * z7 + (1 / 3) * z9,
        }
        for (i, j), rhs in table.items():
            lhs = _q("I", i, j, h)
            worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    return IdentityResult("recurrence table I[0,3] I[2,1] I[0,5] I[2,3] I[4,1]", worst, 1e-9)


def check_dy_identities(h_grid, deg: int = 5) -> IdentityResult:
    """int x^i y^j dy = -(i/(j+1)) Fam[i-1,j+1] + corner bracket, per family."""
    worst = 0.0
    for h in h_grid:
        u = u_of_h(h)
        for fam, (P, Q) in _FAM_CORNERS.items():
            for i in range(deg + 1):
                for j in range(deg + 1 - i):
                    lhs = _q(fam, i, j, h, "dy")
                    s, e = _bracket(P, Q, i, j + 1)
                    rhs = s * u**e / (j + 1)
                    if i >= 1:
                        rhs -= i / (j + 1) * _q(fam, i - 1, j + 1, h)
                    worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    return IdentityResult("integration-by-parts dy identities (all six arcs)", worst, 1e-9)


def check_recurrences(h_grid, deg: int = 5) -> IdentityResult:
    """Both reduction devices with arc moments substituted on both sides."""
    worst = 0.0
    fams = ("I", "J", "U", "V")
    for h in h_grid:
        u = u_of_h(h)
        for fam in fams:
            P, Q = _FAM_CORNERS[fam]
            for i in range(deg + 1):
                for j in range(deg + 1 - i):
                    # level relation: Fam[i,j] = h*Fam[i,j-2] - Fam[i+2,j-2]
                    if j >= 2:
                        lhs = _q(fam, i, j, h)
                        rhs = h * _q(fam, i, j - 2, h) - _q(fam, i + 2, j - 2, h)
                        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
                    # tangency relation, lowering i by 2
                    if i >= 2:
                        s, e = _bracket(P, Q, i - 1, j + 2)
                        lhs = _q(fam, i, j, h)
                        rhs = (i - 1) / (j + 2) * _q(fam, i - 2, j + 2, h) - s * u**e / (j + 2)
                        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    return IdentityResult("moment recurrences (tangency and level devices)", worst, 1e-9)


def check_symmetries(h_grid, deg: int = 4) -> IdentityResult:
    """Fold rules: It[i,j] = (-1)^(i+j+1) I[i,j] and Jt[i,j] = (-1)^(j+1) J[i,j]."""
    worst = 0.0
    for h in h_grid:
        for i in range(deg + 1):
            for j in range(deg + 1 - i):
                lhs = _q("It", i, j, h)
                rhs = (-1) ** (i + j + 1) * _q("I", i, j, h)
                worst = max(worst, abs(lhs - rhs))
                lhs = _q("Jt", i, j, h)
                rhs = (-1) ** (j + 1) * _q("J", i, j, h)
                worst = max(worst, abs(lhs - rhs))
    return IdentityResult("arc symmetry folds (CD onto AB, DA onto BC)", worst, 1e-9)


def check_vanishing(h_grid) -> IdentityResult:
    worst = 0.0
    for h in h_grid:
        for l in range(5):
            for k in range(5):
                if 2 * l + k <= 8:
                    worst = max(worst, abs(_q("I", k, 2 * l, h)))
                if 2 * l + 1 + k <= 8:
                    worst = max(worst, abs(_q("J", 2 * l + 1, k, h)))
                    worst = max(worst, abs(_q("U", 2 * l + 1, k, h)))
                    worst = max(worst, abs(_q("V", 2 * l + 1, k, h)))
    return IdentityResult("vanishing rows (even j on AB, odd i on BC/AD/DA)", worst, 1e-10)


def check_loop_closure(h_grid) -> IdentityResult:
    worst = 0.0
    for h in h_grid:
        for (i, j) in ((0, 0), (1, 0), (0, 1), (2, 1)):
            total = sum(_q(f, i, j, h) for f in ("I", "J", "It", "Jt"))
            full = arc_moment(Arc("full", math.pi, -math.pi), i, j, "dx", h)
            worst = max(worst, abs(total - full))
    return IdentityResult("full-loop closure (four arcs vs closed circle)", worst, 1e-10)


def check_orientation(h_grid) -> IdentityResult:
    worst = 0.0
    for h in h_grid:
        a = arc("AB", h)
        worst = max(
            worst,
            abs(arc_moment(a, 2, 1, "dx", h) + arc_moment(a.reversed(), 2, 1, "dx", h)),
        )
    return IdentityResult("orientation reversal negates arc moments", worst, 1e-12)


def check_phi(seed: int | None = None) -> IdentityResult:
    worst = 0.0
    for k in range(61):
        h = 10.0 ** (-3 + 6 * k / 60)
        for mode in ("four-zone", "two-zone-upper", "two-zone-lower"):
            for p in phi_factors(h, mode):
                worst = max(worst, abs(p - 1.0))
    return IdentityResult("crossing factors identically 1", worst, 1e-12)


def check_quarter_circle() -> IdentityResult:
    import numpy as np

    val = integrate_1d(lambda t: np.sqrt(1.0 - t * t), 0.0, 1.0)
    return IdentityResult("quarter-circle integral pi/4", abs(val - math.pi / 4), 1e-10)


def run_identity_suite(seed: int | None = None) -> list[IdentityResult]:
    h_grid = _h_grid(seed)
    return [
        check_quarter_circle(),
        check_base_integrals(h_grid),
        check_recurrence_table(h_grid),
        check_dy_identities(h_grid),
        check_recurrences(h_grid),
        check_symmetries(h_grid),
        check_vanishing(h_grid),
        check_loop_closure(h_grid),
        check_orientation(h_grid),
        check_phi(seed),
    ]
