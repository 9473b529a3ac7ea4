"""Command-line front end: pwmel <subcommand>.

Grids go to CSV, structured results to JSON, scalars to stdout; exit status
is 0 on success and 1 with a diagnostic on any module error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from .geometry import MODES, u_of_h
from .melnikov import (
    PerturbationSpec,
    canonical_form,
    melnikov_canonical,
    melnikov_direct,
    u_form,
)
from .identities import run_identity_suite
from .simulator import IntegrationError, SimConfig, cross_validate, find_limit_cycles, return_map
from .specfile import SpecFileError, load_spec, save_spec, spec_to_dict
from .zeros import (
    RealizationError,
    ZeroResolutionError,
    count_zeros,
    realize_max_zeros,
    theoretical_bound,
)


def _parse_grid(text: str, log: bool) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be LO:HI:N, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    n = int(parts[2])
    if n < 2 or not (0 < lo < hi):
        raise ValueError(f"grid needs 0 < LO < HI and N >= 2, got {text!r}")
    if log:
        ratio = hi / lo
        return [lo * ratio ** (k / (n - 1)) for k in range(n)]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def _parse_range(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"range must be LO:HI, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    if not (0 < lo < hi):
        raise ValueError(f"range needs 0 < LO < HI, got {text!r}")
    return lo, hi


def _emit_json(doc, out: str | None) -> None:
    text = json.dumps(doc, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _eval_methods(spec: PerturbationSpec, h: float, method: str) -> dict:
    row: dict[str, float] = {"h": h}
    uf = None
    if method in ("canonical", "both"):
        uf = u_form(canonical_form(spec))
    if method in ("direct", "both"):
        row["M_direct"] = melnikov_direct(spec, h)
    if uf is not None:
        row["M_canonical"] = melnikov_canonical(uf, h)
    if method == "both":
        row["difference"] = row["M_direct"] - row["M_canonical"]
    return row


def _cmd_eval(args) -> int:
    spec = load_spec(args.spec)
    if (args.h is None) == (args.h_grid is None):
        raise ValueError("exactly one of --h and --h-grid is required")
    if args.h is not None:
        row = _eval_methods(spec, args.h, args.method)
        for key, val in row.items():
            print(f"{key} = {val!r}")
        return 0
    grid = _parse_grid(args.h_grid, args.log)
    rows = [_eval_methods(spec, h, args.method) for h in grid]
    fieldnames = list(rows[0].keys())
    out_fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out_fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) for k, v in row.items()})
    finally:
        if args.out:
            out_fh.close()
    return 0


def _cmd_structure(args) -> int:
    spec = load_spec(args.spec)
    cf = canonical_form(spec)
    uf = u_form(cf)
    doc = {
        "mode": cf.mode,
        "n": cf.n,
        "canonical": {
            "alpha_h": cf.alpha.coeff_strings(),
            "beta_h": cf.beta.coeff_strings(),
            "gamma_h": cf.gamma.coeff_strings(),
            "delta_h": cf.delta.coeff_strings(),
            "phi_u": cf.phi.coeff_strings(),
            "degrees": cf.degrees(),
            "degree_bounds": cf.degree_bounds(),
            "bounds_satisfied": cf.bounds_satisfied(),
        },
        "u_form": {
            # P coefficients are [rational, rational*pi] string pairs
            "P_u": uf.P.coeff_strings(),
            "Qc_v": uf.Qc.coeff_strings(),
        },
    }
    _emit_json(doc, args.out)
    return 0


def _cmd_zeros(args) -> int:
    spec = load_spec(args.spec)
    report = count_zeros(u_form(canonical_form(spec)), u_max=args.u_max, tol=args.tol)
    _emit_json(report.to_dict(), args.out)
    return 0


def _cmd_bound(args) -> int:
    print(theoretical_bound(args.n, args.mode))
    return 0


def _cmd_realize(args) -> int:
    targets = [float(t) for t in args.targets.split(",")]
    result = realize_max_zeros(targets, args.mode)
    if args.out:
        save_spec(result.spec, args.out)
    else:
        print(json.dumps(spec_to_dict(result.spec), indent=2))
    print(
        f"realized {result.report.count} zeros after {result.attempts} attempt(s) "
        f"at u = {[round(z, 8) for z in result.report.locations_u()]} "
        f"(targets {list(result.targets)})",
        file=sys.stderr,
    )
    return 0


def _cmd_simulate(args) -> int:
    spec = load_spec(args.spec)
    cfg = SimConfig(eps=args.eps)
    sample = return_map(spec, cfg, args.h)
    print(f"h_in  = {sample.h_in!r}")
    print(f"h_out = {sample.h_out!r}")
    print(f"displacement = {sample.displacement!r}")
    print(f"return time  = {sample.time!r}")
    print("crossings:")
    for curve, (x, y) in sample.crossings:
        print(f"  {curve} at ({x!r}, {y!r})")
    return 0


def _cmd_cycles(args) -> int:
    spec = load_spec(args.spec)
    h_lo, h_hi = _parse_range(args.h_range)
    cfg = SimConfig(eps=args.eps)
    cycles = find_limit_cycles(spec, cfg, h_lo, h_hi)
    doc = {
        "eps": args.eps,
        "h_range": [h_lo, h_hi],
        "count": len(cycles),
        "cycles": [{"h": h, "stability": s} for h, s in cycles],
    }
    _emit_json(doc, args.out)
    return 0


def _cmd_verify(args) -> int:
    spec = load_spec(args.spec)
    eps_list = [float(e) for e in args.eps_list.split(",")]
    report = cross_validate(spec, eps_list)
    _emit_json(report, args.out)
    return 0


def _cmd_identities(args) -> int:
    failures = 0
    for r in run_identity_suite(args.seed):
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name}: max err {r.max_err:.3e} (tol {r.tol:g})")
        failures += not r.passed
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pwmel",
        description="Melnikov toolkit for planar centers with parabolic switching curves",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate M(h) at a point or over a grid")
    p.add_argument("--spec", required=True)
    p.add_argument("--h", type=float)
    p.add_argument("--h-grid", dest="h_grid")
    p.add_argument("--log", action="store_true", help="geometric grid spacing")
    p.add_argument("--method", choices=("direct", "canonical", "both"), required=True)
    p.add_argument("--out", help="CSV output path (grids)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("structure", help="emit the canonical and reduced forms")
    p.add_argument("--spec", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_structure)

    p = sub.add_parser("zeros", help="bracket the positive zeros of M")
    p.add_argument("--spec", required=True)
    p.add_argument("--u-max", dest="u_max", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_zeros)

    p = sub.add_parser("bound", help="theoretical zero-count ceiling")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=MODES, required=True)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("realize", help="construct a maximal zero configuration")
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--targets", required=True, help="comma-separated zero locations in u")
    p.add_argument("--out", help="write the realized spec JSON here")
    p.set_defaults(func=_cmd_realize)

    p = sub.add_parser("simulate", help="one return-map sample with crossing trace")
    p.add_argument("--spec", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("cycles", help="limit cycles of the perturbed flow")
    p.add_argument("--spec", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--h-range", dest="h_range", required=True, help="LO:HI")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_cycles)

    p = sub.add_parser("verify", help="cross-validate simulated cycles against M zeros")
    p.add_argument("--spec", required=True)
    p.add_argument("--eps-list", dest="eps_list", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("identities", help="run the numerical identity suite")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_identities)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        SpecFileError,
        RealizationError,
        ZeroResolutionError,
        IntegrationError,
        ValueError,
        OSError,
    ) as exc:
        print(f"pwmel {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
