"""Command-line interface.

Exit status: 0 on success, 2 on a domain error (the data is not a bundle,
not a tropical point, ...), 1 on I/O or format errors.  Errors are printed
as JSON objects with an "error" field.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import io as kio
from .examples import example_tangent_pn
from .fan import FanError
from .klyachko import IncompatibleFiltrations, curve_splitting, is_equivariantly_split, phi_eval, pl_valuation
from .parliament import (GenericityError, generic_ground_set, h0_weight_dim_direct, h0_weight_dim_matroid,
                         klyachko_arrangement, parliament, parliament_box, _box_points)
from .plfunc import PLError
from .positivity import PositivityError, positivity_report
from .tropical import (NotATropicalPoint, bundle_from_diagram, circuit_witness, diagram, reconstruct_valuation,
                       trop_membership)


class UsageError(Exception):
    pass


def thread_count() -> int:
    raw = os.environ.get("KLYTOR_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"KLYTOR_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("KLYTOR_THREADS must be at least 1")
    return n


def _ordered_map(fn, items):
    """Map in a bounded thread pool; results keep the input order."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _parse_vector(text: str) -> tuple:
    try:
        return tuple(kio.parse_rat(x) for x in text.split(","))
    except kio.FormatError as exc:
        raise UsageError(str(exc)) from None


def _load_bundle(path):
    return kio.bundle_from_json(kio.load_json(path))


def _emit(args, text: str):
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---- subcommands ------------------------------------------------------------

def cmd_validate(args):
    b = _load_bundle(args.bundle)
    return {"valid": True, "rank": b.rank, "integral": b.is_integral,
            "cones": [{"cone": cs.cone, "rays": list(cs.rays),
                       "lines": [{"generator": kio.vec_out(g), "character": kio.int_vec_out(u)} for g, u in cs]}
                      for cs in b.compat]}


def cmd_example(args):
    if args.tangent_pn is None:
        raise UsageError("example needs --tangent-pn N")
    if args.tangent_pn < 1:
        raise UsageError("--tangent-pn needs N >= 1")
    return kio.bundle_to_json(example_tangent_pn(args.tangent_pn))


def cmd_phi_eval(args):
    b = _load_bundle(args.bundle)
    x = _parse_vector(args.point)
    if len(x) != b.fan.rank:
        raise UsageError("point has the wrong dimension")
    return {"point": kio.vec_out(x), "valuation": kio.valuation_to_json(phi_eval(b, x))}


def cmd_pl_val(args):
    b = _load_bundle(args.bundle)
    e = _parse_vector(args.vector)
    if len(e) != b.rank:
        raise UsageError("vector has the wrong dimension")
    return kio.pl_to_json(pl_valuation(b, e))


def cmd_split(args):
    b = _load_bundle(args.bundle)
    frame = is_equivariantly_split(b)
    return {"split": frame is not None,
            "frame": None if frame is None else [kio.vec_out(g) for g in frame.generators]}


def cmd_curve_split(args):
    b = _load_bundle(args.bundle)
    walls = [tau for tau, _ in b.fan.walls()]
    if args.wall:
        want = frozenset(int(i) for i in args.wall.split(","))
        if want not in walls:
            raise UsageError(f"{sorted(want)} is not a wall of the fan")
        walls = [want]
    out = []
    for tau in sorted(walls, key=sorted):
        pairs = curve_splitting(b, tau)
        out.append({"wall": sorted(tau),
                    "splitting": [{"u": kio.int_vec_out(p.u), "u_prime": kio.int_vec_out(p.u_prime),
                                   "degree": kio.level_out(p.degree)} for p in pairs],
                    "degrees": sorted(kio.level_out(p.degree) for p in pairs)})
    return {"walls": out}


def cmd_positivity(args):
    return positivity_report(_load_bundle(args.bundle)).as_dict()


def _weight_table(b, realization, entries):
    points = _box_points(parliament_box(b, entries))

    def one(u):
        d = h0_weight_dim_direct(b, u)
        m = h0_weight_dim_matroid(b, u, realization, entries)
        if d != m:
            raise AssertionError(f"weight {u}: direct {d} but matroid {m}")
        return u, d

    return [(u, d) for u, d in _ordered_map(one, points) if d]


def _setup_parliament(b, seed):
    realization = generic_ground_set(klyachko_arrangement(b), seed)
    entries = parliament(b, realization=realization)
    return realization, entries


def cmd_parliament(args):
    b = _load_bundle(args.bundle)
    realization, entries = _setup_parliament(b, args.seed)
    arr = realization.arrangement
    table = _weight_table(b, realization, entries)
    return {
        "seed": args.seed,
        "arrangement": [[kio.vec_out(v) for v in s.basis] for s in arr],
        "ground": [{"index": en.index, "vector": kio.vec_out(en.vector), "source": en.source,
                    "values_on_rays": {str(i): kio.level_out(en.pl(v)) for i, v in enumerate(b.fan.rays)},
                    "pl": kio.pl_to_json(en.pl),
                    "polytope": kio.polytope_to_json(en.polytope)} for en in entries],
        "weights": [{"character": list(u), "dim": d} for u, d in table],
        "total": sum(d for _, d in table),
    }


def cmd_h0(args):
    b = _load_bundle(args.bundle)
    if not b.fan.is_complete():
        raise PositivityError("global sections are computed for complete fans only")
    realization, entries = _setup_parliament(b, args.seed)
    table = _weight_table(b, realization, entries)
    return {"weights": [{"character": list(u), "dim": d} for u, d in table],
            "total": sum(d for _, d in table)}


def cmd_trop_check(args):
    pt = kio.point_from_json(kio.load_json(args.point))
    cfg = kio.config_from_json(kio.load_json(args.config))
    member = trop_membership(pt, cfg)
    out = {"member": member}
    if not member:
        found = circuit_witness(pt, cfg)
        if found is None:
            try:
                reconstruct_valuation(pt, cfg)
            except NotATropicalPoint as exc:
                found = (exc.witness, exc.circuit)
        x, circ = found
        out["witness"] = {"point": None if x is None else kio.vec_out(x),
                          "circuit": None if circ is None else
                          {"support": list(circ.support), "coefficients": kio.vec_out(circ.coefficients)},
                          "values": None if x is None or circ is None else
                          [kio.level_out(pt[i](x)) for i in circ.support]}
    return out


def cmd_trop_reconstruct(args):
    pt = kio.point_from_json(kio.load_json(args.point))
    cfg = kio.config_from_json(kio.load_json(args.config))
    fan = kio.fan_from_json(kio.load_json(args.fan)) if args.fan else None
    return kio.bundle_to_json(reconstruct_valuation(pt, cfg, fan))


def cmd_trop_diagram(args):
    cfg = kio.config_from_json(kio.load_json(args.spanning))
    if args.bundle:
        src = _load_bundle(args.bundle)
        fan = None
    elif args.point:
        src = kio.point_from_json(kio.load_json(args.point))
        fan = kio.fan_from_json(kio.load_json(args.fan)) if args.fan else None
    else:
        raise UsageError("diagram needs --bundle or --point")
    return kio.diagram_to_csv(diagram(src, cfg, fan))


def cmd_trop_from_diagram(args):
    cfg = kio.config_from_json(kio.load_json(args.ideal))
    fan = kio.fan_from_json(kio.load_json(args.fan))
    with open(args.matrix, encoding="utf-8") as fh:
        matrix = kio.diagram_from_csv(fh.read())
    return kio.bundle_to_json(bundle_from_diagram(cfg, fan, matrix))


# ---- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="klytor", description="Toric vector bundles from Klyachko data.")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized choices (default 0)")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help_text, bundle=True):
        sp = sub.add_parser(name, help=help_text)
        if bundle:
            sp.add_argument("--bundle", required=True, help="bundle JSON file")
        sp.add_argument("--out", help="write the result here instead of stdout")
        sp.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        sp.set_defaults(func=fn)
        return sp

    cmd("validate", cmd_validate, "check compatibility and print the per-cone frames")
    sp = cmd("example", cmd_example, "emit a fixture bundle", bundle=False)
    sp.add_argument("--tangent-pn", type=int, metavar="N", help="tangent bundle of P^N")
    sp = cmd("phi-eval", cmd_phi_eval, "evaluate the PL map into valuations at a point")
    sp.add_argument("--point", required=True, help="comma-separated rationals")
    sp = cmd("pl-val", cmd_pl_val, "PL valuation of a vector")
    sp.add_argument("--vector", required=True, help="comma-separated rationals")
    cmd("split", cmd_split, "decide equivariant splitting")
    sp = cmd("curve-split", cmd_curve_split, "splitting types on the invariant curves")
    sp.add_argument("--wall", help="comma-separated ray indices of one wall")
    cmd("positivity", cmd_positivity, "nef / ample / globally generated report")
    cmd("parliament", cmd_parliament, "matroid, parliament of polytopes and weight table")
    cmd("h0", cmd_h0, "dimensions of weight spaces of global sections")

    trop = sub.add_parser("trop", help="tropical points over PL functions")
    tsub = trop.add_subparsers(dest="trop_command", required=True)

    def tcmd(name, fn, help_text):
        sp = tsub.add_parser(name, help=help_text)
        sp.add_argument("--out")
        sp.set_defaults(func=fn)
        return sp

    sp = tcmd("check", cmd_trop_check, "membership test with witness")
    sp.add_argument("--point", required=True)
    sp.add_argument("--config", required=True)
    sp = tcmd("reconstruct", cmd_trop_reconstruct, "bundle from a tropical point")
    sp.add_argument("--point", required=True)
    sp.add_argument("--config", required=True)
    sp.add_argument("--fan", help="preferred fan for the result")
    sp = tcmd("diagram", cmd_trop_diagram, "diagram matrix as CSV")
    sp.add_argument("--spanning", required=True, help="configuration JSON")
    sp.add_argument("--bundle")
    sp.add_argument("--point")
    sp.add_argument("--fan")
    sp = tcmd("from-diagram", cmd_trop_from_diagram, "bundle from ideal, fan and diagram")
    sp.add_argument("--ideal", required=True, help="configuration JSON")
    sp.add_argument("--fan", required=True)
    sp.add_argument("--matrix", required=True, help="diagram CSV")

    # top-level alias
    sp = sub.add_parser("diagram", help="same as 'trop diagram'")
    sp.add_argument("--out")
    sp.add_argument("--spanning", required=True)
    sp.add_argument("--bundle")
    sp.add_argument("--point")
    sp.add_argument("--fan")
    sp.set_defaults(func=cmd_trop_diagram)
    return p


def _error(kind: str, message: str, **extra) -> str:
    return kio.dumps({"error": kind, "message": message, **extra})


DOMAIN_ERRORS = (IncompatibleFiltrations, NotATropicalPoint, PositivityError, FanError, PLError,
                 GenericityError)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        result = args.func(args)
        text = result if isinstance(result, str) else kio.dumps(result)
        _emit(args, text)
        return 0
    except IncompatibleFiltrations as exc:
        sys.stdout.write(_error("IncompatibleFiltrations", str(exc), cone=exc.cone_index,
                                rays=list(exc.cone_rays), reason=exc.reason))
        return 2
    except NotATropicalPoint as exc:
        sys.stdout.write(_error("NotATropicalPoint", str(exc),
                                witness=None if exc.witness is None else kio.vec_out(exc.witness),
                                circuit=None if exc.circuit is None else list(exc.circuit.support)))
        return 2
    except (kio.FormatError, OSError, UsageError) as exc:
        sys.stdout.write(_error(type(exc).__name__, str(exc)))
        return 1
    except DOMAIN_ERRORS as exc:
        sys.stdout.write(_error(type(exc).__name__, str(exc)))
        return 2
    except ValueError as exc:
        sys.stdout.write(_error("DomainError", str(exc)))
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
