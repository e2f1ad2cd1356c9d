"""Command-line interface.

Exit codes: 0 = success / checks passed, 1 = checks failed, 2 = input or
usage error. Machine output keeps full 17-significant-digit precision and
is byte-deterministic for identical inputs and flags; --human switches the
curvature report to 6-digit tables.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io as mio
from .curvature import all_face_curvatures
from .duality import christoffel_dual, is_koenigs
from .errors import MeshCurvError, NotConical
from .generators import (
    Ellipse,
    billiard_trajectory,
    catenoid_pair,
    cmc_rotational_pair,
    delaunay_pair,
    pseudosphere_pair,
    roll_to_line,
)
from .meshes import (
    Mesh,
    ParallelPair,
    canonical_gauss_conical,
    check_parallel,
    default_tol,
    face_planarity,
    is_circular,
    offset,
)


def _fmt(x: float) -> str:
    return format(float(x), mio.FLOAT_FORMAT)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meshcurv",
        description="Curvature of polyhedral surfaces from parallel meshes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curvature", help="per-face/per-edge curvature report")
    p.add_argument("pair", help="pair file (JSON)")
    p.add_argument("--out", help="write the report JSON here")
    p.add_argument("--human", action="store_true", help="6-digit tables on stdout")
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("check", help="validate a mesh or pair property")
    p.add_argument("path", help="mesh file (.obj/.off) or pair file (.json)")
    p.add_argument(
        "--kind",
        required=True,
        choices=["parallel", "circular", "conical", "koenigs", "planar"],
    )
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("dual", help="construct the dual mesh")
    p.add_argument("mesh", help="planar-quad mesh file")
    p.add_argument("--seed-edge", type=int, default=0)
    p.add_argument("--seed-scale", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", help="write the dual mesh here (.obj/.off)")

    p = sub.add_parser("offset", help="offset a pair by t")
    p.add_argument("pair", help="pair file (JSON)")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--out", help="write the offset pair here (JSON)")

    p = sub.add_parser("classify-offset", help="offset types of a pair")
    p.add_argument("pair", help="pair file (JSON)")
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("gen", help="generate a test surface pair")
    gen = p.add_subparsers(dest="surface", required=True)

    g = gen.add_parser("catenoid")
    g.add_argument("--samples", type=int, default=30)
    g.add_argument("--hmin", type=float, default=-0.8)
    g.add_argument("--hmax", type=float, default=0.8)
    g.add_argument("--r0", type=float, default=1.0)
    g.add_argument("--alpha", type=float, default=float(np.pi / 12))
    g.add_argument("--copies", type=int, default=12)
    g.add_argument("--out", required=True)

    g = gen.add_parser("pseudosphere")
    g.add_argument("--k", type=float, default=1.0)
    g.add_argument("--samples", type=int, default=20)
    g.add_argument("--hmin", type=float, default=0.8)
    g.add_argument("--hmax", type=float, default=0.0)
    g.add_argument("--r0", type=float, default=1.0)
    g.add_argument("--alpha", type=float, default=float(np.pi / 12))
    g.add_argument("--copies", type=int, default=12)
    g.add_argument("--out", required=True)

    g = gen.add_parser("cmc-rot")
    g.add_argument("--h0", type=float, default=0.25)
    g.add_argument("--samples", type=int, default=20)
    g.add_argument("--hmin", type=float, default=-0.6)
    g.add_argument("--hmax", type=float, default=0.6)
    g.add_argument("--r0", type=float, default=3.0)
    g.add_argument("--alpha", type=float, default=float(np.pi / 12))
    g.add_argument("--copies", type=int, default=12)
    g.add_argument("--out", required=True)

    g = gen.add_parser("delaunay-billiard")
    g.add_argument("--a", type=float, required=True)
    g.add_argument("--b", type=float, required=True)
    g.add_argument("--aprime", type=float, required=True)
    g.add_argument("--n", type=int, default=24, help="billiard segments")
    g.add_argument("--alpha", type=float, required=True, help="half rotation step")
    g.add_argument("--copies", type=int, default=None)
    g.add_argument("--start", type=float, default=0.3)
    g.add_argument("--out", required=True)
    g.add_argument("--out-companion", help="pair file for the companion surface")
    return parser


def _cmd_curvature(args) -> int:
    pair, _meta = mio.parse_pair(args.pair)
    report = mio.curvature_report(pair, tol=args.tol)
    if args.out:
        mio.write_report(report, args.out)
    if args.human:
        sys.stdout.write(mio.human_tables(report))
    else:
        sys.stdout.write(mio.dumps(report) + "\n")
    return 1 if report["summary"]["undefined_faces"] else 0


def _cmd_check(args) -> int:
    kind = args.kind
    if kind == "parallel":
        pair, _ = mio.parse_pair(args.path)
        rep = check_parallel(pair.m, pair.s, args.tol)
        print(f"parallel: {'pass' if rep.passed else 'fail'} "
              f"max_residual {_fmt(rep.max_residual)} worst_edge {rep.worst_edge}")
        return 0 if rep.passed else 1
    mesh = mio.parse_mesh(args.path)
    tol = args.tol if args.tol is not None else default_tol(mesh)
    if kind == "planar":
        planes = face_planarity(mesh, tol)
        worst = max((p.residual for p in planes), default=0.0)
        ok = worst <= tol
        print(f"planar: {'pass' if ok else 'fail'} max_residual {_fmt(worst)}")
        return 0 if ok else 1
    if kind == "circular":
        try:
            circles = is_circular(mesh, tol)
        except MeshCurvError as exc:
            print(f"circular: fail ({exc})")
            return 1
        ok = all(c.passed for c in circles)
        worst = max((c.residual for c in circles), default=0.0)
        print(f"circular: {'pass' if ok else 'fail'} max_residual {_fmt(worst)}")
        return 0 if ok else 1
    if kind == "conical":
        try:
            canonical_gauss_conical(mesh, tol=args.tol if args.tol is not None else 1e-9)
        except NotConical as exc:
            print(f"conical: fail ({exc})")
            return 1
        print("conical: pass")
        return 0
    if kind == "koenigs":
        ok, residual = is_koenigs(mesh, tol=args.tol if args.tol is not None else 1e-9)
        print(f"koenigs: {'pass' if ok else 'fail'} residual {_fmt(residual)}")
        return 0 if ok else 1
    raise AssertionError(kind)


def _cmd_dual(args) -> int:
    mesh = mio.parse_mesh(args.mesh)
    solve = christoffel_dual(mesh, seed=(args.seed_edge, args.seed_scale))
    if args.out:
        mio.write_mesh(solve.dual, args.out)
    ok = solve.closure_residual <= args.tol
    print(f"dual: {'pass' if ok else 'fail'} closure_residual "
          f"{_fmt(solve.closure_residual)} seed_edge {solve.seed_edge} "
          f"seed_scale {_fmt(solve.seed_scale)}")
    return 0 if ok else 1


def _cmd_offset(args) -> int:
    pair, meta = mio.parse_pair(args.pair)
    shifted = offset(pair, args.t)
    if args.out:
        meta = dict(meta)
        meta["offset_t"] = args.t
        mio.write_pair(shifted, pair.s, args.out, metadata=meta)
    print(f"offset: t {_fmt(args.t)} vertices {len(shifted.positions)}")
    return 0


def _cmd_classify(args) -> int:
    pair, _ = mio.parse_pair(args.pair)
    from .meshes import classify_offset_type

    rep = classify_offset_type(pair, tol=args.tol)
    worst = {
        "vertex": float(np.max(rep.vertex_residuals, initial=0.0)),
        "edge": float(np.max(rep.edge_residuals, initial=0.0)),
        "face": float(np.max(rep.face_residuals, initial=0.0)),
    }
    print("classes: " + " ".join(rep.labels))
    for name in ("vertex", "edge", "face"):
        print(f"{name}_max_residual {_fmt(worst[name])}")
    return 0


def _cmd_gen(args) -> int:
    meta = {"generator": args.surface}
    if args.surface == "catenoid":
        pair = catenoid_pair(args.samples, (args.hmin, args.hmax), args.alpha,
                             args.copies, args.r0)
    elif args.surface == "pseudosphere":
        pair = pseudosphere_pair(args.k, args.samples, (args.hmin, args.hmax),
                                 args.alpha, args.copies, args.r0)
        meta["K"] = args.k
    elif args.surface == "cmc-rot":
        pair = cmc_rotational_pair(args.h0, args.samples, (args.hmin, args.hmax),
                                   args.alpha, args.copies, args.r0)
        meta["H0"] = args.h0
    elif args.surface == "delaunay-billiard":
        ellipse = Ellipse(args.a, args.b)
        traj = billiard_trajectory(ellipse, "confocal", a_prime=args.aprime,
                                   start=args.start, n=args.n)
        traces = roll_to_line(traj)
        copies = args.copies
        if copies is None:
            ratio = np.pi / args.alpha
            copies = int(round(ratio))
            if abs(ratio - copies) > 1e-9:
                copies = 1
        dp = delaunay_pair(traces, args.alpha, copies)
        meta.update({"l": traces.l, "H": 1.0 / traces.l})
        if traces.d is not None:
            meta["d"] = traces.d
        mio.write_pair(dp.pair_m.m, dp.pair_m.s, args.out, metadata=meta)
        if args.out_companion:
            mio.write_pair(dp.pair_mt.m, dp.pair_mt.s, args.out_companion,
                           metadata=meta)
        print(f"delaunay-billiard: l {_fmt(traces.l)} faces "
              f"{len(dp.pair_m.combinatorics.faces)} -> {args.out}")
        return 0
    else:  # pragma: no cover - argparse restricts choices
        raise AssertionError(args.surface)
    mio.write_pair(pair.m, pair.s, args.out, metadata=meta)
    print(f"{args.surface}: faces {len(pair.combinatorics.faces)} -> {args.out}")
    return 0


_COMMANDS = {
    "curvature": _cmd_curvature,
    "check": _cmd_check,
    "dual": _cmd_dual,
    "offset": _cmd_offset,
    "classify-offset": _cmd_classify,
    "gen": _cmd_gen,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; normalize --help to 0
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (MeshCurvError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())
