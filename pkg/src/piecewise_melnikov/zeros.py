"""Zero counting for the reduced Melnikov function and constructive realization.

count_zeros brackets the sign changes of M(u) on (0, u_max] with an adaptive
grid, bisects them to a requested width, and compares the count against the
theoretical ceiling.  realize_max_zeros inverts the degree-1 coefficient map
to place a maximal zero configuration near requested locations and certifies
it numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .geometry import FOUR_ZONE, TWO_ZONE_LOWER, TWO_ZONE_UPPER, check_mode
from .melnikov import PerturbationSpec, UForm, canonical_form, u_form

ODD_SIMPLE = "odd-simple"
EVEN_SUSPECTED = "even-suspected"


class ZeroResolutionError(Exception):
    """A cluster of sign changes did not separate at the finest refinement."""

    def __init__(self, cluster: tuple[float, float]):
        super().__init__(f"unresolved zero cluster in u-interval {cluster}")
        self.cluster = cluster


class RealizationError(Exception):
    def __init__(self, message: str, report: "ZeroReport | None" = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class ZeroRecord:
    u: float
    h: float
    bracket_width: float
    multiplicity: str  # ODD_SIMPLE or EVEN_SUSPECTED


@dataclass
class ZeroReport:
    zeros: list[ZeroRecord]
    count: int  # sign-change zeros only; even-suspected dips are listed, not counted
    bound: int | None
    bound_satisfied: bool | None
    u_max: float
    warnings: list[str] = field(default_factory=list)

    def locations_u(self) -> list[float]:
        return [z.u for z in self.zeros if z.multiplicity == ODD_SIMPLE]

    def locations_h(self) -> list[float]:
        return [z.h for z in self.zeros if z.multiplicity == ODD_SIMPLE]

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "bound": self.bound,
            "bound_satisfied": self.bound_satisfied,
            "u_max": self.u_max,
            "zeros": [
                {
                    "u": z.u,
                    "h": z.h,
                    "bracket_width": z.bracket_width,
                    "multiplicity": z.multiplicity,
                }
                for z in self.zeros
            ],
            "warnings": self.warnings,
        }


def theoretical_bound(n: int, mode: str) -> int:
    """Maximal zero count detectable at first order for degree-n perturbations."""
    check_mode(mode)
    if n < 1:
        raise ValueError("the degree bound starts at n = 1")
    if n == 1:
        return 4 if mode == FOUR_ZONE else 3
    return 2 * n + 5 * ((n - 1) // 2) + 4


def _scan_grid(u_max: float, initial: int) -> np.ndarray:
    grid = np.linspace(0.0, u_max, initial + 1)[1:]
    # geometric tail toward u = 0: realized configurations cluster there
    lo = grid[0]
    tail = lo * np.geomspace(1e-6, 1.0, 64, endpoint=False)
    return np.concatenate([tail, grid])


def _bisect(f, a: float, b: float, fa: float, tol: float) -> tuple[float, float]:
    while b - a > tol * max(1.0, abs(a)):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m, 0.0
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b), b - a


def count_zeros(
    uf: UForm,
    u_max: float = 10.0,
    tol: float = 1e-10,
    initial: int = 4096,
    max_depth: int = 8,
) -> ZeroReport:
    """Bracket and refine the positive zeros of M(u) on (0, u_max].

    The scan grid is refined fourfold (up to max_depth levels) around every
    sign change, so clusters separate down to roughly u_max/initial/4^depth.
    Dips of |M| below tol * (global scale) without a sign change are recorded
    as suspected even-multiplicity zeros.  Raises ZeroResolutionError when two
    brackets remain adjacent at the finest level.
    """
    if u_max <= 0 or tol <= 0:
        raise ValueError("u_max and tol must be positive")
    f = uf.evaluate
    grid = _scan_grid(u_max, initial)
    vals = np.asarray(f(grid))
    # a node landing exactly on a zero: re-sample just beside it
    hit = vals == 0.0
    if hit.any() and not hit.all():
        vals = vals.copy()
        vals[hit] = np.asarray(f(grid[hit] * (1.0 + 1e-13)))
    scale = float(np.max(np.abs(vals))) or 1.0

    warnings: list[str] = []
    pf = uf.p_float()
    if float(np.max(np.abs(pf))) <= 1e-14 * max(1.0, float(np.max(np.abs(uf.qc_float())))):
        # u*P dominates the W term for large u; without it the tail is unbounded
        warnings.append("polynomial part is ~0; tail beyond u_max not controlled")

    # split every sign-change interval x4, recursively, collecting fine brackets
    def refine(a, b, fa, fb, depth):
        if depth >= max_depth:
            return [(a, b, fa)]
        xs = np.linspace(a, b, 5)
        ys = np.asarray(f(xs[1:4]))
        pts = [(a, fa), (xs[1], ys[0]), (xs[2], ys[1]), (xs[3], ys[2]), (b, fb)]
        out = []
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if y0 * y1 < 0.0:
                out.extend(refine(x0, x1, y0, y1, depth + 1))
        return out

    brackets = []
    for k in range(len(grid) - 1):
        v0, v1 = vals[k], vals[k + 1]
        if v0 * v1 < 0.0:
            brackets.extend(refine(grid[k], grid[k + 1], v0, v1, 0))

    brackets.sort()
    finest = u_max / initial / 4**max_depth
    for (a0, b0, _), (a1, b1, _) in zip(brackets, brackets[1:]):
        if a1 - b0 <= 2.0 * finest:
            raise ZeroResolutionError((a0, b1))

    records = []
    for a, b, fa in brackets:
        u_star, width = _bisect(lambda x: float(f(x)), float(a), float(b), float(fa), tol)
        records.append(
            ZeroRecord(
                u=float(u_star),
                h=float(u_star * u_star * (1.0 + u_star * u_star)),
                bracket_width=float(width),
                multiplicity=ODD_SIMPLE,
            )
        )

    # near-tangential dips: interior |M| minima below tol*scale, no sign change
    absv = np.abs(vals)
    for k in range(1, len(grid) - 1):
        if absv[k] < tol * scale and absv[k] <= absv[k - 1] and absv[k] <= absv[k + 1]:
            if (vals[k - 1] > 0) == (vals[k + 1] > 0) and vals[k] != 0.0:
                u_star = float(grid[k])
                if any(abs(r.u - u_star) < 2 * (grid[k + 1] - grid[k]) for r in records):
                    continue
                records.append(
                    ZeroRecord(
                        u=u_star,
                        h=u_star * u_star * (1.0 + u_star * u_star),
                        bracket_width=float(grid[k + 1] - grid[k - 1]),
                        multiplicity=EVEN_SUSPECTED,
                    )
                )

    records.sort(key=lambda r: r.u)
    count = sum(1 for r in records if r.multiplicity == ODD_SIMPLE)
    bound = theoretical_bound(uf.n, uf.mode) if uf.n >= 1 else None
    return ZeroReport(
        zeros=records,
        count=count,
        bound=bound,
        bound_satisfied=None if bound is None else count <= bound,
        u_max=u_max,
        warnings=warnings,
    )


def dense_scan_count(uf: UForm, u_max: float = 10.0, points: int = 10**6) -> int:
    """Brute-force sign-change count on a uniform grid; certification oracle."""
    u = np.linspace(0.0, u_max, points + 1)[1:]
    vals = np.asarray(uf.evaluate(u))
    signs = np.sign(vals)
    nz = signs != 0
    s = signs[nz]
    return int(np.sum(s[:-1] * s[1:] < 0))


# free perturbation coefficients of the degree-1 realization, in the order
# matching the target vectors (lambda1, mu2, lambda3, mu4, mu5) resp.
# (tau0, tau1, tau2, tau4)
FREE_COEFFS = {
    FOUR_ZONE: ((2, "b", 0, 1), (2, "b", 0, 0), (1, "a", 0, 0), (2, "a", 1, 0), (1, "b", 0, 1)),
    TWO_ZONE_UPPER: ((4, "b", 0, 1), (1, "b", 0, 1), (1, "a", 1, 0), (1, "b", 0, 0)),
}

_TARGET_KEYS = {
    FOUR_ZONE: ("lambda1", "mu2", "lambda3", "mu4", "mu5"),
    TWO_ZONE_UPPER: ("tau0", "tau1", "tau2", "tau4"),
}


def lambda_coeffs(spec: PerturbationSpec) -> dict[str, float]:
    """Low-order series data of M(u) for a degree-1 spec.

    Four-zone: M(u) = lambda4 u^4 + lambda3 u^3 + lambda2 u^2 + lambda1 u
    + lambda0 (u^4+u^2) W(u), plus the Taylor-mixed mu2 = lambda2 + pi/4
    lambda0, mu4 = lambda4 + pi/4 lambda0, mu5 = -lambda0/3 so that
    M(u) = mu5 u^5 + mu4 u^4 + lambda3 u^3 + mu2 u^2 + lambda1 u + o(u^5).

    Two-zone: M(u) = u(tau0 + tau1 (u + u^3) + tau2 u^2 + tau4 u^4 + o(u^4)).
    """
    if spec.n != 1:
        raise ValueError("lambda_coeffs is defined for degree n = 1 only")
    uf = u_form(canonical_form(spec))
    p = [float(c) for c in uf.p_float()] + [0.0] * 4
    qc0 = float(uf.qc_float()[0])
    if spec.mode == FOUR_ZONE:
        lam0 = qc0
        out = {
            "lambda0": lam0,
            "lambda1": p[0],
            "lambda2": p[1],
            "lambda3": p[2],
            "lambda4": p[3],
        }
        out["mu2"] = out["lambda2"] + math.pi / 4.0 * lam0
        out["mu4"] = out["lambda4"] + math.pi / 4.0 * lam0
        out["mu5"] = -lam0 / 3.0
        return out
    return {
        "tau0": p[0],
        "tau1": p[1] + math.pi / 4.0 * qc0,
        "tau2": p[2],
        "tau4": -qc0 / 3.0,
    }


def realization_matrix(mode: str) -> np.ndarray:
    """Jacobian of the realization targets w.r.t. the free coefficients.

    The map is linear, so the matrix columns are lambda_coeffs of unit specs.
    """
    if mode == TWO_ZONE_LOWER:
        mode = TWO_ZONE_UPPER
    free = FREE_COEFFS[mode]
    keys = _TARGET_KEYS[mode]
    cols = []
    for key in free:
        spec = PerturbationSpec(1, mode, {key: Fraction(1)})
        lam = lambda_coeffs(spec)
        cols.append([lam[k] for k in keys])
    return np.array(cols).T


def _target_series(targets: list[float], mode: str) -> np.ndarray:
    """Series coefficients whose zero set contains the targets.

    Four-zone: monic quartic through the four targets, scaled so the largest
    series coefficient is 1.  Two-zone: quartic with equal u^3 and u^1
    coefficients (the tau1 tie), which forces one extra root off (0, inf).
    """
    e = np.poly(targets)  # (1, -e1, e2, -e3, [e4]) descending
    if mode == FOUR_ZONE:
        coeffs = {"mu5": e[0], "mu4": e[1], "lambda3": e[2], "mu2": e[3], "lambda1": e[4]}
        order = ("lambda1", "mu2", "lambda3", "mu4", "mu5")
    else:
        e1, e2, e3 = -e[1], e[2], -e[3]
        if abs(1.0 - e2) < 1e-12:
            raise RealizationError("degenerate targets: e2 = 1 breaks the tau1 tie")
        r = (e3 - e1) / (1.0 - e2)
        coeffs = {
            "tau4": 1.0,
            "tau1": -(e1 + r),
            "tau2": e2 + r * e1,
            "tau0": r * e3,
        }
        order = ("tau0", "tau1", "tau2", "tau4")
    scale = max(abs(v) for v in coeffs.values())
    return np.array([coeffs[k] / scale for k in order])


@dataclass(frozen=True)
class RealizationResult:
    spec: PerturbationSpec
    targets: tuple[float, ...]  # targets actually realized (possibly rescaled)
    report: ZeroReport
    attempts: int


def realize_max_zeros(
    targets,
    mode: str,
    u_cap: float = 0.5,
    max_retries: int = 6,
    rel_tol: float = 0.10,
) -> RealizationResult:
    """Construct a degree-1 spec whose M has simple zeros near the targets.

    Solves the (invertible, determinant 8*pi/3 in magnitude) linear map from
    the free coefficients onto the low-order series, then certifies the full
    M with count_zeros.  The truncation error scales like u^7, so targets too
    far from the origin shift the realized zeros; on a failed certification
    all targets are halved and the construction repeats, up to max_retries.
    """
    check_mode(mode)
    targets = sorted(float(t) for t in targets)
    need = 4 if mode == FOUR_ZONE else 3
    if len(targets) != need:
        raise ValueError(f"{mode} realization needs exactly {need} targets")
    if len(set(targets)) != need or targets[0] <= 0:
        raise ValueError("targets must be distinct and positive")
    if targets[-1] > u_cap:
        raise ValueError(f"targets must lie in (0, {u_cap}]")

    matrix = realization_matrix(mode)
    solve_mode = TWO_ZONE_UPPER if mode == TWO_ZONE_LOWER else mode
    last_report = None
    current = list(targets)
    for attempt in range(1, max_retries + 2):
        series = _target_series(current, solve_mode)
        free_vals = np.linalg.solve(matrix, series)
        coeffs = {key: Fraction(float(v)) for key, v in zip(FREE_COEFFS[solve_mode], free_vals)}
        spec = PerturbationSpec(1, solve_mode, coeffs)
        if mode == TWO_ZONE_LOWER:
            spec = spec.reflected()
        report = count_zeros(u_form(canonical_form(spec)))
        last_report = report
        locations = report.locations_u()
        if report.count == need and all(
            abs(u - t) <= rel_tol * t for u, t in zip(locations, current)
        ):
            return RealizationResult(
                spec=spec, targets=tuple(current), report=report, attempts=attempt
            )
        if attempt <= max_retries:
            current = [0.5 * t for t in current]
    raise RealizationError(
        f"could not realize {need} zeros after {max_retries} rescalings", last_report
    )
