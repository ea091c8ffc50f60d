"""JSON and CSV formats.  Rationals are written as "p/q" strings (or "p")."""

from __future__ import annotations

import csv
import io as _io
import json
from fractions import Fraction
from typing import Any

from .fan import Fan
from .klyachko import Filtration, KlyachkoBundle, VSValuation, build_bundle
from .linalg import Subspace, rat_str
from .plfunc import PLFunction, Polytope
from .tropical import LinearConfiguration, TropPoint


class FormatError(ValueError):
    """Input that cannot be parsed into the expected structure."""


def parse_rat(x) -> Fraction:
    if isinstance(x, bool):
        raise FormatError(f"not a rational number: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"not a rational number: {x!r}") from None
    raise FormatError(f"not a rational number: {x!r}")


def level_out(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else rat_str(x)


def vec_out(v) -> list:
    return [rat_str(x) for x in v]


def int_vec_out(v) -> list:
    out = []
    for x in v:
        x = Fraction(x)
        out.append(int(x) if x.denominator == 1 else rat_str(x))
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ---- fan ------------------------------------------------------------------

def fan_to_json(f: Fan) -> dict:
    return {"rank": f.rank, "rays": [list(r) for r in f.rays],
            "maximal_cones": [list(c) for c in f.maximal_cones]}


def fan_from_json(d: dict) -> Fan:
    try:
        rays = [tuple(int(x) for x in r) for r in d["rays"]]
        cones = [tuple(int(i) for i in c) for c in d["maximal_cones"]]
        n = int(d.get("rank", len(rays[0]) if rays else 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad fan: {exc}") from None
    if any(len(r) != n for r in rays):
        raise FormatError("ray of the wrong length")
    return Fan(rays, cones)


# ---- bundle ---------------------------------------------------------------

def filtration_to_json(f: Filtration) -> list:
    return [{"level": level_out(l), "basis": [vec_out(b) for b in s.basis]} for l, s in f.steps]


def filtration_from_json(r: int, entries) -> Filtration:
    try:
        pairs = [(parse_rat(e["level"]), [[parse_rat(x) for x in b] for b in e["basis"]]) for e in entries]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad filtration entry: {exc}") from None
    if any(len(b) != r for _, basis in pairs for b in basis):
        raise FormatError("basis vector of the wrong length")
    if not pairs:
        raise FormatError("empty filtration")
    return Filtration.from_entries(r, pairs)


def bundle_to_json(b: KlyachkoBundle) -> dict:
    return {"fan": fan_to_json(b.fan), "rank": b.rank,
            "filtrations": {str(i): filtration_to_json(f) for i, f in enumerate(b.filtrations)}}


def bundle_data_from_json(d: dict) -> tuple[Fan, list[Filtration]]:
    """Parse without the compatibility check (format errors only)."""
    try:
        fan = fan_from_json(d["fan"])
        r = int(d["rank"])
        raw = d["filtrations"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad bundle: {exc}") from None
    if isinstance(raw, list):
        raw = {str(i): e for i, e in enumerate(raw)}
    filts = []
    for i in range(len(fan.rays)):
        entries = raw.get(str(i))
        if entries is None:
            raise FormatError(f"no filtration for ray {i}")
        try:
            filts.append(filtration_from_json(r, entries))
        except FormatError:
            raise
        except ValueError as exc:
            raise FormatError(f"ray {i}: {exc}") from None
    return fan, filts


def bundle_from_json(d: dict) -> KlyachkoBundle:
    fan, filts = bundle_data_from_json(d)
    return build_bundle(fan, filts)


def valuation_to_json(v: VSValuation) -> dict:
    return {"flag": [[vec_out(b) for b in s.basis] for s in v.flag],
            "values": [level_out(a) for a in v.values]}


# ---- PL functions and polytopes ------------------------------------------

def pl_to_json(phi: PLFunction) -> dict:
    return {"fan": fan_to_json(phi.fan), "values_on_rays": [rat_str(x) for x in phi.values_on_rays],
            "linear_parts": [vec_out(u) for u in phi.linear_parts]}


def pl_from_json(d: dict) -> PLFunction:
    try:
        fan = fan_from_json(d["fan"])
        if "linear_parts" in d:
            parts = [[parse_rat(x) for x in u] for u in d["linear_parts"]]
            phi = PLFunction(fan, parts)
            if "values_on_rays" in d:
                vals = [parse_rat(x) for x in d["values_on_rays"]]
                if list(phi.values_on_rays) != vals:
                    raise FormatError("values_on_rays disagree with linear_parts")
            return phi
        return PLFunction.from_ray_values(fan, [parse_rat(x) for x in d["values_on_rays"]])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad PL function: {exc}") from None


def polytope_to_json(p: Polytope) -> dict:
    return {"inequalities": [{"normal": vec_out(a), "bound": rat_str(b)} for a, b in p.inequalities],
            "vertices": [vec_out(v) for v in p.vertices]}


# ---- tropical ---------------------------------------------------------------

def config_to_json(cfg: LinearConfiguration) -> dict:
    return {"vectors": [vec_out(b) for b in cfg.vectors]}


def config_from_json(d: dict) -> LinearConfiguration:
    try:
        if "vectors" in d:
            return LinearConfiguration([[parse_rat(x) for x in b] for b in d["vectors"]])
        return LinearConfiguration.from_matrix([[parse_rat(x) for x in row] for row in d["matrix"]])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad configuration: {exc}") from None


def point_to_json(pt: TropPoint) -> dict:
    return {"functions": [pl_to_json(f) for f in pt]}


def point_from_json(d: dict) -> TropPoint:
    try:
        return TropPoint([pl_from_json(f) for f in d["functions"]])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad tropical point: {exc}") from None


def diagram_to_csv(matrix) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in matrix:
        w.writerow(row)
    return buf.getvalue()


def diagram_from_csv(text: str) -> list[list[int]]:
    rows = []
    for row in csv.reader(_io.StringIO(text)):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            rows.append([int(c) for c in row])
        except ValueError:
            raise FormatError(f"non-integer diagram entry in row {row}") from None
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise FormatError("ragged diagram matrix")
    return rows


def load_json(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from None
