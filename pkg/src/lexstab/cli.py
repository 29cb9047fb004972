"""Command-line front end: validate presets, compute filtrations and splits,
scan parameter grids, and run the property suites.

Exit codes: 0 success, 1 domain failure (audit fail, precondition violated,
unvalidated preset, out-of-range level), 2 input error (bad file or flags).
All reports are canonical JSON (sorted keys) so identical inputs give
byte-identical output; the human-readable table on stderr is a rendering
of the same data, never a separate computation.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import product

from . import fixtures
from .category import CategoryError, ObjectHandle
from .charge import ChargeError, format_rational, format_vector, parse_rational
from .lex import (
    LevelOutOfRangeError,
    lex_filtration,
    sigma_t_quadratic_audit,
    tilted_charge,
    tilted_positivity_audit,
    torsion_split,
    virtual_class,
)
from .p1 import P1Backend, SplitSheaf, sheaf_from_json
from .quiver import (
    DimensionBoundExceededError,
    QuiverBackend,
    QuiverRep,
    UnvalidatedPresetError,
    preset_from_json,
    rep_from_json,
)


class InputError(Exception):
    """Malformed file or flag combination; maps to exit code 2."""


def parse_t(text: str):
    try:
        return tuple(parse_rational(x) for x in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad t-vector {text!r}: {exc}")


def parse_cutoff(text: str):
    from .charge import Slope

    try:
        return tuple(Slope(parse_rational(x)) for x in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad cutoff {text!r}: {exc}")


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}")


def resolve_preset(spec: str, force_unvalidated: bool):
    if spec in fixtures.PRESETS:
        return fixtures.PRESETS[spec]
    data = load_json(spec)
    try:
        preset = preset_from_json(data)
    except (KeyError, ValueError) as exc:
        raise InputError(f"bad preset file {spec}: {exc}")
    validated = preset.validate()
    if not validated.validated and force_unvalidated:
        return preset  # engines will be constructed with the override flag
    return validated


def load_object(path: str, args):
    """Infer the backend from the file shape and return (backend, handle)."""
    data = load_json(path)
    if "line_degrees" in data:
        try:
            sheaf, z = sheaf_from_json(data)
        except (KeyError, ValueError) as exc:
            raise InputError(f"bad sheaf file {path}: {exc}")
        backend = P1Backend(z)
        return backend, backend.handle(sheaf)
    if "dims" in data:
        if not args.preset:
            raise InputError("quiver objects require --preset")
        try:
            rep = rep_from_json(data)
        except (KeyError, ValueError) as exc:
            raise InputError(f"bad representation file {path}: {exc}")
        preset = resolve_preset(args.preset, args.force_unvalidated)
        backend = QuiverBackend(
            rep.quiver, rep.p, preset, force_unvalidated=args.force_unvalidated
        )
        return backend, backend.handle(rep)
    raise InputError(f"cannot infer backend from the shape of {path}")


def describe(handle: ObjectHandle) -> dict:
    key = handle.key
    if isinstance(key, QuiverRep):
        return {"kind": "quiver", "dims": list(key.dims)}
    if isinstance(key, SplitSheaf):
        return {
            "kind": "sheaf",
            "line_degrees": list(key.line_degrees),
            "torsion": [{"pt": pt, "len": length} for pt, length in key.torsion],
        }
    return {"kind": "unknown"}


def provenance(backend, args, **extra) -> dict:
    out = {
        "backend": backend.name,
        "preset": getattr(getattr(backend, "preset", None), "name", None),
    }
    out.update(extra)
    return out


def emit(report: dict, out_path, table_lines) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for line in table_lines:
        print(line, file=sys.stderr)


# -- commands --------------------------------------------------------------


def cmd_validate(args) -> int:
    data = load_json(args.preset_file)
    try:
        preset = preset_from_json(data)
    except (KeyError, ValueError) as exc:
        raise InputError(f"bad preset file: {exc}")
    verdict, offending = preset.audit()
    report = {
        "command": "validate",
        "preset": preset.name,
        "r": preset.r,
        "ok": verdict.ok,
        "clause": verdict.clause,
        "index": verdict.index,
        "offending_dims": list(offending),
    }
    status = "PASS" if verdict.ok else f"FAIL ({verdict.clause} at d={list(offending)})"
    emit(report, args.out, [f"preset {preset.name}: {status}"])
    return 0 if verdict.ok else 1


def _factor_rows(factors, vectors):
    rows = []
    for factor, vec in zip(factors, vectors):
        rows.append(
            {
                "object": describe(factor),
                "charge": factor.charge.to_json(),
                "vector": format_vector(vec),
            }
        )
    return rows


def cmd_hn(args) -> int:
    backend, handle = load_object(args.object_file, args)
    t = parse_t(args.t)
    filt = lex_filtration(backend, handle, 1, t)
    report = {
        "command": "hn",
        **provenance(backend, args, t=[format_rational(x) for x in t[:1]]),
        "object": describe(handle),
        "factors": _factor_rows(filt.factors, filt.vectors),
    }
    table = [
        f"factor {i}: {row['object']}  slope={row['vector'][0]}"
        for i, row in enumerate(report["factors"])
    ]
    emit(report, args.out, table)
    return 0


def cmd_lex(args) -> int:
    backend, handle = load_object(args.object_file, args)
    t = parse_t(args.t)
    filt = lex_filtration(backend, handle, args.level, t)
    report = {
        "command": "lex",
        **provenance(
            backend, args,
            level=args.level,
            t=[format_rational(x) for x in t[: args.level]],
        ),
        "object": describe(handle),
        "factors": _factor_rows(filt.factors, filt.vectors),
    }
    table = [
        f"factor {i}: {row['object']}  vector=({', '.join(row['vector'])})"
        for i, row in enumerate(report["factors"])
    ]
    emit(report, args.out, table)
    return 0


def cmd_split(args) -> int:
    backend, handle = load_object(args.object_file, args)
    t = parse_t(args.t)
    cutoff = parse_cutoff(args.cutoff)
    split = torsion_split(backend, handle, cutoff, t)
    v = virtual_class(split)
    report = {
        "command": "split",
        **provenance(
            backend, args,
            t=[format_rational(x) for x in t],
            cutoff=[str(s) for s in cutoff],
        ),
        "object": describe(handle),
        "T": describe(split.T),
        "F": describe(split.F),
        "hom_T_F_zero": split.hom_zero,
        "virtual_class": v.to_json(),
    }
    if len(t) >= v.r + 1:
        report["tilted_positivity"] = tilted_positivity_audit(split, t).to_json()
        report["tilted_charge"] = tilted_charge(v, t[0], t[-1]).to_json()
    table = [
        f"T = {report['T']}",
        f"F = {report['F']}",
        f"Hom(T,F)=0: {split.hom_zero}",
    ]
    emit(report, args.out, table)
    return 0


def _signature(filt) -> str:
    """Factor sequence plus the finite/infinite pattern of each vector.

    Slope values themselves vary continuously with t; a wall is a change in
    which factors appear and how they are ordered, not a numeric drift.
    """
    sig = [
        {
            "object": describe(factor),
            "pattern": ["inf" if s.is_infinite else "finite" for s in vec],
        }
        for factor, vec in zip(filt.factors, filt.vectors)
    ]
    return json.dumps(sig, sort_keys=True)


def parse_grid(text: str, level: int):
    axes = []
    for part in text.split(";"):
        axes.append([parse_rational(x) for x in part.split(",")])
    if len(axes) != level:
        raise InputError(f"grid has {len(axes)} axes but level is {level}")
    return [tuple(cell) for cell in product(*axes)]


def cmd_scan(args) -> int:
    backend, handle = load_object(args.object_file, args)
    try:
        grid = parse_grid(args.grid, args.level)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad grid {args.grid!r}: {exc}")

    def cell_signature(t):
        return _signature(lex_filtration(backend, handle, args.level, t))

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            signatures = list(pool.map(cell_signature, grid))
    else:
        signatures = [cell_signature(t) for t in grid]
    walls = [
        {
            "between": [
                [format_rational(x) for x in grid[i]],
                [format_rational(x) for x in grid[i + 1]],
            ]
        }
        for i in range(len(grid) - 1)
        if signatures[i] != signatures[i + 1]
    ]
    report = {
        "command": "scan",
        **provenance(backend, args, level=args.level),
        "object": describe(handle),
        "cells": [
            {"t": [format_rational(x) for x in t], "signature": sig}
            for t, sig in zip(grid, signatures)
        ],
        "walls": walls,
    }
    table = [f"cells: {len(grid)}  walls: {len(walls)}"]
    emit(report, args.out, table)
    return 0


def cmd_suite(args) -> int:
    from .suite import run_suite

    report = run_suite(seed=args.seed, count=args.count, threads=args.threads)
    report["command"] = "suite"
    table = [
        f"{prop['name']}: {'PASS' if prop['ok'] else 'FAIL'} ({prop['checked']} checks)"
        for prop in report["properties"]
    ]
    emit(report, args.out, table)
    return 0 if report["ok"] else 1


def cmd_audit(args) -> int:
    backend, handle = load_object(args.object_file, args)
    t = parse_t(args.t)
    verdict = sigma_t_quadratic_audit(backend, handle, t[0])
    report = {
        "command": "audit",
        **provenance(backend, args, t=[format_rational(t[0])]),
        "object": describe(handle),
        "quadratic": verdict.to_json(),
    }
    emit(report, args.out, [f"b1*a0 - b0*a1 = {report['quadratic']['value']}"])
    return 0


# -- driver ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexstab",
        description="stability filtrations, torsion pairs and positivity audits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_object=True):
        if with_object:
            p.add_argument("object_file", help="object JSON (backend inferred)")
            p.add_argument("--preset", help="preset name or JSON file (quiver only)")
            p.add_argument(
                "--force-unvalidated", action="store_true",
                help="allow presets that failed the positivity audit",
            )
        p.add_argument("--out", help="write the JSON report to this file")

    p = sub.add_parser("validate", help="audit a charge preset")
    p.add_argument("preset_file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("hn", help="level-1 filtration")
    common(p)
    p.add_argument("--t", default="1", help="t-parameters, comma separated")
    p.set_defaults(func=cmd_hn)

    p = sub.add_parser("lex", help="lexicographic filtration")
    common(p)
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--t", default="1,1")
    p.set_defaults(func=cmd_lex)

    p = sub.add_parser("split", help="torsion pair from a phase-vector cutoff")
    common(p)
    p.add_argument("--cutoff", default="0,0", help="finite slope cutoff, comma separated")
    p.add_argument("--t", default="1,1")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("scan", help="filtration signatures over a t-grid")
    common(p)
    p.add_argument("--grid", required=True, help="axis values, e.g. '1/2,1,2;1'")
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("audit", help="quadratic-form report for a Z_t-semistable object")
    common(p)
    p.add_argument("--t", default="1")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("suite", help="run the cross-module property suites")
    common(p, with_object=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_suite)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (
        CategoryError,
        ChargeError,
        LevelOutOfRangeError,
        UnvalidatedPresetError,
        DimensionBoundExceededError,
        AssertionError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
