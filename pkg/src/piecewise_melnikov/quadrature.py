"""Adaptive 1-d quadrature and oriented arc moments on the level circle.

This is the brute-force numerical oracle for every closed-form identity in
the package.  Arcs are parametrized by the polar angle (never by x), so the
sqrt(h - x^2) endpoint singularity never appears.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import FOUR_ZONE, TWO_ZONE_LOWER, TWO_ZONE_UPPER, corner_points

# 15-point Kronrod nodes with the embedded 7-point Gauss weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full symmetric node/weight tables on [-1, 1]
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WGAUSS = np.zeros_like(_WK)
_WGAUSS[1:-1:2] = np.concatenate([_WG[:-1], _WG[::-1]])


class QuadratureAccuracyError(Exception):
    """Subdivision limit reached; carries the best estimate and error bound."""

    def __init__(self, estimate: float, error: float):
        super().__init__(
            f"quadrature did not converge: estimate={estimate!r}, error bound={error!r}"
        )
        self.estimate = estimate
        self.error = error


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(f(mid + half * _NODES), dtype=float)
    kron = half * float(_WK @ fx)
    gauss = half * float(_WGAUSS @ fx)
    diff = abs(kron - gauss)
    err = min(diff, (200.0 * diff) ** 1.5) if diff > 0 else 0.0
    return kron, err


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-11,
    max_panels: int = 1 << 16,
) -> float:
    """Integral of a vectorized f over [a, b] to mixed absolute/relative tol.

    Adaptive bisection of the panel with the largest embedded-rule error.
    Raises QuadratureAccuracyError when max_panels panels do not suffice.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0
    value, err = _gk15(f, a, b)
    # max-heap on panel error
    panels = [(-err, a, b, value)]
    total = value
    total_err = err
    while total_err > tol * (1.0 + abs(total)):
        if len(panels) >= max_panels:
            raise QuadratureAccuracyError(sign * total, total_err)
        neg_err, pa, pb, pval = heapq.heappop(panels)
        pm = 0.5 * (pa + pb)
        lv, le = _gk15(f, pa, pm)
        rv, re = _gk15(f, pm, pb)
        total += lv + rv - pval
        total_err += le + re + neg_err  # neg_err is -old error
        heapq.heappush(panels, (-le, pa, pm, lv))
        heapq.heappush(panels, (-re, pm, pb, rv))
    return sign * total


@dataclass(frozen=True)
class Arc:
    """Circle arc from theta0 to theta1; flow-oriented arcs have theta decreasing."""

    label: str
    theta0: float
    theta1: float

    def reversed(self) -> "Arc":
        return Arc(self.label + "-rev", self.theta1, self.theta0)


def arc(label: str, h: float) -> Arc:
    """Named arc between corner points at level h.

    AB, BC, CD, DA are the four-zone arcs; AD-lower and DA-upper are the long
    and short routes of the two-zone split along y = x^2.
    """
    ta = corner_points(h).theta_a
    ranges = {
        "AB": (ta, -ta),
        "BC": (-ta, -math.pi + ta),
        "CD": (-math.pi + ta, -math.pi - ta),
        "DA": (math.pi - ta, ta),
        "AD-lower": (ta, -math.pi - ta),
        "DA-upper": (math.pi - ta, ta),
        # long route from C over the top back to B (two-zone-lower, zone 1)
        "CB-upper": (-math.pi + ta, -2.0 * math.pi - ta),
    }
    if label not in ranges:
        raise ValueError(f"unknown arc label {label!r}")
    t0, t1 = ranges[label]
    return Arc(label, t0, t1)


def arc_moment(a: Arc, i: int, j: int, form: str, h: float, tol: float = 1e-11) -> float:
    """Oriented line integral of x^i y^j dx (or dy) along the arc.

    Parametrized as x = sqrt(h) cos(theta), y = sqrt(h) sin(theta); the sign of
    the result follows the arc orientation.
    """
    if i < 0 or j < 0:
        raise ValueError("moment indices must be nonnegative")
    if form not in ("dx", "dy"):
        raise ValueError(f"form must be 'dx' or 'dy', got {form!r}")
    r = math.sqrt(h)
    p = r ** (i + j + 1)

    if form == "dx":
        def integrand(theta):
            return -p * np.cos(theta) ** i * np.sin(theta) ** (j + 1)
    else:
        def integrand(theta):
            return p * np.cos(theta) ** (i + 1) * np.sin(theta) ** j

    return integrate_1d(integrand, a.theta0, a.theta1, tol=tol)


def line_integral(a: Arc, g, f, h: float, tol: float = 1e-11) -> float:
    """Oriented integral of g(x,y) dx - f(x,y) dy along the arc.

    g and f must accept numpy arrays.
    """
    r = math.sqrt(h)

    def integrand(theta):
        x = r * np.cos(theta)
        y = r * np.sin(theta)
        return g(x, y) * (-y) - f(x, y) * x

    return integrate_1d(integrand, a.theta0, a.theta1, tol=tol)


def flow_arcs(mode: str, h: float) -> list[tuple[Arc, int]]:
    """(arc, zone) pairs covering one revolution of the unperturbed orbit."""
    if mode == FOUR_ZONE:
        return [(arc("AB", h), 1), (arc("BC", h), 2), (arc("CD", h), 3), (arc("DA", h), 4)]
    if mode == TWO_ZONE_UPPER:
        return [(arc("AD-lower", h), 1), (arc("DA-upper", h), 4)]
    if mode == TWO_ZONE_LOWER:
        return [(arc("CB-upper", h), 1), (arc("BC", h), 4)]
    raise ValueError(f"unknown mode {mode!r}")
