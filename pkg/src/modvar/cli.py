"""Command-line interface.

Exit codes: 0 success / all checks passed, 1 a verification or lab check
failed, 2 malformed input, 3 resource refusal (cell limit or enumeration
budget).  With ``--json`` the output is canonical (sorted keys, fixed
separators), so identical inputs, seed and config give byte-identical
bytes on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraSpec, build_algebra, projective_module
from .ar import E_invariant, g_vector, g_vector_hom_ext, tau
from .errors import InputError, ResourceLimitError
from .exactla import DEFAULT_PRIME, Field
from .generic import (DEFAULT_SAMPLES, InvariantMap, brute_force_generic,
                      load_scenario, run_scenario)
from .homology import (DEFAULT_CELL_LIMIT, dump_debug, ext_dim, ext_dim_bar,
                       euler_truncated, euler_truncated_bar, hom_dim,
                       hom_omega, syzygy)
from .rep import check_relations, load_module, rep_to_json

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3


class CheckFailed(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    field: Field
    seed: int
    samples: int
    cell_limit: int
    json_output: bool


def _emit_json(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--field-prime", type=int, default=DEFAULT_PRIME,
                   help="prime modulus of the working field")
    p.add_argument("--rational", action="store_true",
                   help="compute over the rationals instead of F_p")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--cell-limit", type=int, default=DEFAULT_CELL_LIMIT)
    p.add_argument("--json", action="store_true", dest="json_output")


def _config(args: argparse.Namespace) -> RunConfig:
    field = Field.rational() if args.rational else Field.prime(args.field_prime)
    if args.samples < 1:
        raise InputError("--samples must be at least 1")
    return RunConfig(field, args.seed, args.samples, args.cell_limit, args.json_output)


def _load_algebra(path: str, field: Field):
    spec = AlgebraSpec.load(path)
    return spec, build_algebra(spec, field)


def _load_checked_module(A, field: Field, path: str):
    M = load_module(field, A.spec.quiver, path)
    report = check_relations(A, M)
    if not report.ok:
        raise InputError(f"{path}: module violates the algebra "
                         f"(failed relations {list(report.failed_relations)}, "
                         f"nilpotent={report.jl_nilpotent})")
    return M


# -- subcommands ------------------------------------------------------------


def cmd_algebra_info(args: argparse.Namespace) -> int:
    cfg = _config(args)
    spec, A = _load_algebra(args.spec, cfg.field)
    n = A.n_vertices
    projs = [projective_module(A, i) for i in range(n)]
    cartan = [[hom_dim(A, projs[i], projs[j]) for j in range(n)] for i in range(n)]
    basis_strs = [f"e{p.src}" if len(p) == 0 else "*".join(p.names) for p in A.basis]
    payload = {
        "command": "algebra-info",
        "dim": A.dim,
        "basis": basis_strs,
        "projective_dims": [p.total_dim for p in projs],
        "hom_projective_table": cartan,
        "truncation": spec.trunc,
        "vertices": n,
    }
    if cfg.json_output:
        _emit_json(payload)
    else:
        print(f"dimension        {A.dim}")
        print(f"vertices         {n}")
        print(f"basis            {', '.join(basis_strs)}")
        print(f"projective dims  {payload['projective_dims']}")
        print("hom(P(i),P(j)) table:")
        for row in cartan:
            print("  " + " ".join(f"{x:3d}" for x in row))
    return EXIT_OK


_UNARY = {"gvec", "tau", "syzygy"}
_NEEDS_INDEX = {"ext": "i", "eta": "t", "syzygy": "j", "homomega": "j"}


def cmd_invariant(args: argparse.Namespace) -> int:
    cfg = _config(args)
    spec, A = _load_algebra(args.algebra, cfg.field)
    name = args.name
    idx_flag = _NEEDS_INDEX.get(name)
    if idx_flag and getattr(args, idx_flag) is None:
        raise InputError(f"invariant {name!r} needs --{idx_flag}")
    want = 1 if name in _UNARY else 2
    if len(args.modules) != want:
        raise InputError(f"invariant {name!r} takes {want} module file(s)")
    mods = [_load_checked_module(A, cfg.field, p) for p in args.modules]
    payload: dict = {"command": "invariant", "name": name}

    if name == "hom":
        value = hom_dim(A, mods[0], mods[1])
        if args.oracle == "bar":
            other = ext_dim_bar(A, mods[0], mods[1], 0, cfg.cell_limit)
            payload["bar_value"] = other
            if other != value:
                raise CheckFailed(f"hom mismatch: resolution {value}, bar {other}")
        payload["value"] = value
    elif name == "ext":
        value = ext_dim(A, mods[0], mods[1], args.i)
        payload["i"] = args.i
        if args.oracle == "bar":
            other = ext_dim_bar(A, mods[0], mods[1], args.i, cfg.cell_limit)
            payload["bar_value"] = other
            if other != value:
                raise CheckFailed(f"ext^{args.i} mismatch: resolution {value}, bar {other}")
        payload["value"] = value
    elif name == "eta":
        value = euler_truncated(A, mods[0], mods[1], args.t)
        payload["t"] = args.t
        if args.oracle == "bar":
            other = euler_truncated_bar(A, mods[0], mods[1], args.t, cfg.cell_limit)
            payload["bar_value"] = other
            if other != value:
                raise CheckFailed(f"eta_{args.t} mismatch: resolution {value}, bar {other}")
        payload["value"] = value
    elif name == "gvec":
        g = g_vector(A, mods[0])
        payload["value"] = [int(x) for x in g]
        if args.both_routes:
            g2 = g_vector_hom_ext(A, mods[0])
            payload["hom_ext_value"] = [int(x) for x in g2]
            if list(g) != list(g2):
                raise CheckFailed(f"g-vector mismatch: {list(g)} vs {list(g2)}")
    elif name == "einv":
        value = E_invariant(A, mods[0], mods[1], "tau")
        payload["value"] = value
        if args.both_routes:
            other = E_invariant(A, mods[0], mods[1], "expansion")
            payload["expansion_value"] = other
            if other != value:
                raise CheckFailed(f"E-invariant mismatch: tau {value}, expansion {other}")
    elif name == "tau":
        payload["value"] = rep_to_json(tau(A, mods[0]))
    elif name == "syzygy":
        payload["j"] = args.j
        payload["value"] = rep_to_json(syzygy(A, mods[0], args.j))
    elif name == "homomega":
        payload["j"] = args.j
        payload["value"] = hom_omega(A, mods[0], mods[1], args.j)
    else:
        raise InputError(f"unknown invariant {name!r}")

    if args.dump:
        second = mods[1] if len(mods) > 1 else None
        with open(args.dump, "w") as fh:
            json.dump(dump_debug(A, mods[0], second, cell_limit=cfg.cell_limit),
                      fh, sort_keys=True)
        payload["dump"] = args.dump

    if cfg.json_output:
        _emit_json(payload)
    else:
        val = payload["value"]
        if name == "gvec":
            print(" ".join(str(x) for x in val))
        elif name in ("tau", "syzygy"):
            print(json.dumps(val, sort_keys=True))
        else:
            print(val)
        for extra in ("bar_value", "expansion_value", "hom_ext_value"):
            if extra in payload:
                print(f"{extra}: {payload[extra]}")
    return EXIT_OK


def cmd_lab(args: argparse.Namespace) -> int:
    cfg = _config(args)
    sc = load_scenario(args.scenario)
    report = run_scenario(sc, cfg.field)
    if cfg.json_output:
        _emit_json({"command": "lab", "scenario": sc.name, **report.to_json()})
    else:
        print(f"scenario {sc.name}")
        print(report.render())
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_brute(args: argparse.Namespace) -> int:
    cfg = _config(args)
    spec, A = _load_algebra(args.algebra, cfg.field)
    dims = [int(x) for x in args.dims.split(",")]
    maps = []
    for token in args.maps.split(","):
        token = token.strip()
        if ":" in token:
            kind, idx = token.split(":", 1)
            arity = 1 if kind in ("end", "g") else 2
            maps.append(InvariantMap(kind, int(idx), arity))
        else:
            arity = 1 if token in ("end", "g") else 2
            maps.append(InvariantMap(token, arity=arity))
    table = brute_force_generic(A, dims, args.q, maps, budget=args.budget)
    if cfg.json_output:
        _emit_json({"command": "brute", **table.to_json()})
    else:
        print(f"points over F_{table.q} at dims {list(table.dims)}: {table.n_points}")
        for label, res in sorted(table.results.items()):
            hist = " ".join(f"{v}:{c}" for v, c in sorted(res["histogram"].items()))
            print(f"{label:<16} min={res['min']} max={res['max']}  histogram {hist}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modvar",
        description="homological invariants of quiver-algebra modules and "
                    "semicontinuity experiments on module varieties")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra-info", help="dimensions and tables of an algebra spec")
    p.add_argument("spec")
    _add_common(p)
    p.set_defaults(func=cmd_algebra_info)

    p = sub.add_parser("invariant", help="compute one invariant of module file(s)")
    p.add_argument("name", choices=["hom", "ext", "eta", "gvec", "tau", "einv",
                                    "syzygy", "homomega"])
    p.add_argument("modules", nargs="+", metavar="MODULE.json")
    p.add_argument("--algebra", required=True)
    p.add_argument("--i", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--j", type=int, default=None)
    p.add_argument("--oracle", choices=["bar"], default=None,
                   help="cross-check against the bar-resolution route")
    p.add_argument("--both-routes", action="store_true",
                   help="for gvec/einv: compute and compare both routes")
    p.add_argument("--dump", default=None, metavar="PATH",
                   help="write a JSON debug dump of resolutions and bar slices")
    _add_common(p)
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("lab", help="run a semicontinuity scenario file")
    p.add_argument("scenario")
    _add_common(p)
    p.set_defaults(func=cmd_lab)

    p = sub.add_parser("brute", help="exhaustive small-field generic-value oracle")
    p.add_argument("--algebra", required=True)
    p.add_argument("--dims", required=True, help="comma-separated dimension vector")
    p.add_argument("--q", type=int, required=True, help="small prime field size")
    p.add_argument("--maps", required=True,
                   help="comma-separated kinds, e.g. hom,end,ext:1")
    p.add_argument("--budget", type=int, default=10_000_000)
    _add_common(p)
    p.set_defaults(func=cmd_brute)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
