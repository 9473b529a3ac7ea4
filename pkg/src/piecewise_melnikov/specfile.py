"""JSON spec files for perturbation coefficients.

Schema:

    {
      "n": 1,
      "mode": "four-zone",
      "zones": {
        "1": {"a": [[0, 0, 0.25]], "b": [[0, 1, 1.18]]},
        "2": {"b": [[0, 1, "3/4"]]}
      }
    }

Coefficient entries are [i, j, value] with value a JSON number or an exact
rational string like "3/4".  Missing coefficients are zero; unknown keys are
rejected.  Numbers written by spec_to_dict round-trip bit-for-bit (repr of a
double is exact).
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .melnikov import ZONES_FOR_MODE, PerturbationSpec


class SpecFileError(Exception):
    """Malformed spec file; message carries the offending key or location."""


def _parse_value(v, where: str) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise SpecFileError(f"{where}: coefficient value must be a number or rational string")
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecFileError(f"{where}: bad coefficient value {v!r} ({exc})") from exc


def spec_from_dict(doc: dict) -> PerturbationSpec:
    if not isinstance(doc, dict):
        raise SpecFileError("top level must be a JSON object")
    unknown = set(doc) - {"n", "mode", "zones"}
    if unknown:
        raise SpecFileError(f"unknown top-level keys: {sorted(unknown)}")
    for key in ("n", "mode", "zones"):
        if key not in doc:
            raise SpecFileError(f"missing required key {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise SpecFileError(f"'n' must be a nonnegative integer, got {n!r}")
    mode = doc["mode"]
    if mode not in ZONES_FOR_MODE:
        raise SpecFileError(f"'mode' must be one of {sorted(ZONES_FOR_MODE)}, got {mode!r}")
    zones = doc["zones"]
    if not isinstance(zones, dict):
        raise SpecFileError("'zones' must be an object keyed by zone id")
    allowed = {str(z) for z in ZONES_FOR_MODE[mode]}
    coeffs = {}
    for zone_key, tables in zones.items():
        if zone_key not in allowed:
            raise SpecFileError(
                f"zone {zone_key!r} not valid for mode {mode} (allowed: {sorted(allowed)})"
            )
        if not isinstance(tables, dict):
            raise SpecFileError(f"zone {zone_key!r}: expected an object with 'a'/'b' tables")
        bad = set(tables) - {"a", "b"}
        if bad:
            raise SpecFileError(f"zone {zone_key!r}: unknown table keys {sorted(bad)}")
        for table, entries in tables.items():
            if not isinstance(entries, list):
                raise SpecFileError(f"zone {zone_key!r} table {table!r}: expected a list")
            for idx, entry in enumerate(entries):
                where = f"zone {zone_key} table {table} entry {idx}"
                if not (isinstance(entry, list) and len(entry) == 3):
                    raise SpecFileError(f"{where}: expected [i, j, value]")
                i, j, v = entry
                if not all(isinstance(k, int) and not isinstance(k, bool) for k in (i, j)):
                    raise SpecFileError(f"{where}: indices must be integers")
                if i < 0 or j < 0 or i + j > n:
                    raise SpecFileError(f"{where}: index ({i},{j}) outside triangle i+j <= {n}")
                key = (int(zone_key), table, i, j)
                if key in coeffs:
                    raise SpecFileError(f"{where}: duplicate coefficient")
                coeffs[key] = _parse_value(v, where)
    return PerturbationSpec(n, mode, coeffs)


def spec_to_dict(spec: PerturbationSpec) -> dict:
    zones: dict[str, dict] = {}
    for (zone, table, i, j), v in sorted(spec.coeffs.items()):
        entry = zones.setdefault(str(zone), {}).setdefault(table, [])
        # dyadic rationals are exactly floats; anything else stays exact text
        as_float = float(v)
        entry.append([i, j, as_float if Fraction(as_float) == v else str(v)])
    return {"n": spec.n, "mode": spec.mode, "zones": zones}


def load_spec(path: str | Path) -> PerturbationSpec:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        return spec_from_dict(doc)
    except SpecFileError as exc:
        raise SpecFileError(f"{path}: {exc}") from exc


def save_spec(spec: PerturbationSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec), indent=2) + "\n")
