"""Level-set geometry of the unperturbed center and the parabolic switching curves.

The unperturbed flow is the clockwise rotation xdot = y, ydot = -x with first
integral x^2 + y^2 = h.  The switching curves y = x^2 and y = -x^2 meet the
level circle at four corner points

    A = (u, u^2),  B = (u, -u^2),  C = (-u, -u^2),  D = (-u, u^2),

where u > 0 solves u^4 + u^2 = h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

FOUR_ZONE = "four-zone"
TWO_ZONE_UPPER = "two-zone-upper"
TWO_ZONE_LOWER = "two-zone-lower"
MODES = (FOUR_ZONE, TWO_ZONE_UPPER, TWO_ZONE_LOWER)


class OnSwitchingCurve(Exception):
    """Point lies on a switching curve within tolerance; zone is ambiguous."""


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    return mode


def u_of_h(h: float) -> float:
    """Positive root u of u^4 + u^2 = h.

    Uses u^2 = 2h / (sqrt(1+4h) + 1), which is cancellation-free for small h.
    """
    if h <= 0.0:
        raise ValueError(f"energy level must be positive, got h={h}")
    return math.sqrt(2.0 * h / (math.sqrt(1.0 + 4.0 * h) + 1.0))


def h_of_u(u: float) -> float:
    """Inverse of u_of_h: h = u^2 (1 + u^2)."""
    if u <= 0.0:
        raise ValueError(f"u must be positive, got u={u}")
    return u * u * (1.0 + u * u)


@dataclass(frozen=True)
class CornerPoints:
    """Intersections of the level circle with y = x^2 (A, D) and y = -x^2 (B, C)."""

    u: float
    h: float

    @property
    def A(self) -> tuple[float, float]:
        return (self.u, self.u * self.u)

    @property
    def B(self) -> tuple[float, float]:
        return (self.u, -self.u * self.u)

    @property
    def C(self) -> tuple[float, float]:
        return (-self.u, -self.u * self.u)

    @property
    def D(self) -> tuple[float, float]:
        return (-self.u, self.u * self.u)

    # abscissas of A, B, C, D
    @property
    def a(self) -> float:
        return self.u

    @property
    def b(self) -> float:
        return self.u

    @property
    def c(self) -> float:
        return -self.u

    @property
    def d(self) -> float:
        return -self.u

    @property
    def theta_a(self) -> float:
        """Polar angle of A; equals atan(u) since tan(theta) = u^2/u."""
        return math.atan2(self.u * self.u, self.u)


def corner_points(h: float) -> CornerPoints:
    return CornerPoints(u=u_of_h(h), h=h)


def boundary_tolerance(x: float, y: float) -> float:
    # scale-aware and well below integrator accuracy
    return 1e-10 * max(1.0, x * x + y * y)


def zone_of(x: float, y: float, mode: str = FOUR_ZONE) -> int:
    """Zone index of (x, y) for the given mode.

    Four-zone: 1 = right sliver (x^2 > y > -x^2, x > 0), 2 = below y = -x^2,
    3 = left sliver, 4 = above y = x^2.  Two-zone-upper splits along y = x^2
    only (1 below, 4 above); two-zone-lower along y = -x^2 (1 above, 4 below).

    Raises OnSwitchingCurve when (x, y) is within tolerance of an active curve.
    """
    check_mode(mode)
    tol = boundary_tolerance(x, y)
    upper = y - x * x
    lower = y + x * x
    if mode == TWO_ZONE_UPPER:
        if abs(upper) <= tol:
            raise OnSwitchingCurve(f"({x}, {y}) lies on y = x^2")
        return 4 if upper > 0 else 1
    if mode == TWO_ZONE_LOWER:
        if abs(lower) <= tol:
            raise OnSwitchingCurve(f"({x}, {y}) lies on y = -x^2")
        return 4 if lower < 0 else 1
    if abs(upper) <= tol or abs(lower) <= tol:
        raise OnSwitchingCurve(f"({x}, {y}) lies on a switching curve")
    if upper > 0:
        return 4
    if lower < 0:
        return 2
    return 1 if x > 0 else 3
