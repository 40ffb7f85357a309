"""Command-line interface: construct, verify, tour, embed, sweep, bound."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .arrays import Params, verify_array
from .constructors import BuildRequest, Infeasible, Open, construct
from .fileio import ArrayFormatError, array_to_dict, dumps_array, read_array
from .groups import CayleyInvalid, NoSubgroup, group_from_text, signed_label, subgroup_of_order
from .skeletons import tile_catalog, FamilyBoundViolation
from .sweep import feasible_tuples, rows_to_csv, run_sweep
from .tiles import expected_zero_bound, tile_bound
from .topology import (
    NotFound,
    SearchTooLarge,
    build_biembedding,
    compatible_orderings,
    embedding_report,
    random_knight,
    solve_knight,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INFEASIBLE = 2
EXIT_OPEN = 3
EXIT_USAGE = 64
EXIT_PARSE = 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 by default
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _emit(args: argparse.Namespace, doc: dict, text: str) -> None:
    if args.json:
        print(json.dumps(doc, sort_keys=True))
    else:
        print(text)


def _grid_text(A) -> str:
    G = A.group
    rows = []
    for row in A.grid():
        rows.append(" ".join(f"{'.' if x is None else signed_label(G, x):>4}" for x in row))
    return "\n".join(rows)


def cmd_construct(args: argparse.Namespace) -> int:
    try:
        G = group_from_text(args.group)
        J = subgroup_of_order(G, args.t)
    except (ValueError, CayleyInvalid, NoSubgroup, OSError) as exc:
        raise UsageError(str(exc)) from exc
    h = args.h if args.h is not None else args.n
    k = args.k if args.k is not None else args.m
    params = Params(args.m, args.n, h, k, args.lam, args.t, G.v)
    req = BuildRequest(G, J, params, args.seed)
    try:
        res = construct(req)
    except Infeasible as exc:
        _emit(args, {"status": "infeasible", "reasons": list(exc.reasons)},
              "infeasible:\n" + "\n".join(f"  - {r}" for r in exc.reasons))
        return EXIT_INFEASIBLE
    except Open as exc:
        _emit(args, {"status": "open", "reason": str(exc)}, f"open: {exc}")
        return EXIT_OPEN
    if args.dump_plan and res.plan is not None:
        Path(args.dump_plan).write_text(json.dumps(res.plan.as_dict(), sort_keys=True, indent=1) + "\n")
    if args.out:
        Path(args.out).write_text(dumps_array(res.array, J, params))
    doc = {
        "status": "built",
        "construction": res.construction,
        "seed": res.seed_used,
        "array": array_to_dict(res.array, J, params),
        "report": res.report.as_dict(),
    }
    _emit(args, doc, f"built via {res.construction}\n{_grid_text(res.array)}")
    return EXIT_OK


def _load(path: str):
    try:
        return read_array(path)
    except (ArrayFormatError, ValueError, OSError) as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        return None


def cmd_verify(args: argparse.Namespace) -> int:
    loaded = _load(args.file)
    if loaded is None:
        return EXIT_PARSE
    A, J, params, _ = loaded
    report = verify_array(A, J, params)
    text = "ok" if report.ok else "FAIL\n" + "\n".join(f"  {k} {w}" for k, w in report.failures)
    _emit(args, report.as_dict(), text)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_tour(args: argparse.Namespace) -> int:
    loaded = _load(args.file)
    if loaded is None:
        return EXIT_PARSE
    A = loaded[0]
    try:
        o = solve_knight(A, limit=args.limit)
        exhausted = o is None
    except SearchTooLarge:
        o = random_knight(A, args.budget, args.seed)
        exhausted = False
    if o is None:
        _emit(args, {"status": "none" if exhausted else "budget_exhausted"},
              "no solution" if exhausted else "search budget exhausted")
        return EXIT_FAIL if exhausted else EXIT_OPEN
    doc = {"status": "found", "orientation": o.as_dict(), "cycle_length": len(A.entries)}
    _emit(args, doc, f"rows {list(o.rows)}\ncols {list(o.cols)}")
    return EXIT_OK


def cmd_embed(args: argparse.Namespace) -> int:
    loaded = _load(args.file)
    if loaded is None:
        return EXIT_PARSE
    A, J, params, G = loaded
    if not verify_array(A, J, params).ok:
        print("array does not verify", file=sys.stderr)
        return EXIT_FAIL
    if not G.abelian:
        raise UsageError("embeddings are only traced over abelian groups")
    try:
        pair = compatible_orderings(A, budget=args.budget, seed=args.seed)
    except NotFound:
        _emit(args, {"status": "budget_exhausted"}, "no compatible orderings within budget")
        return EXIT_OPEN
    rep = embedding_report(build_biembedding(A, J, params.lam, pair))
    text = (f"genus {rep['genus']}  V={rep['vertices']} E={rep['edges']} F={rep['faces']}\n"
            f"row faces {rep['row_face_lengths']}\ncol faces {rep['col_face_lengths']}")
    _emit(args, rep, text)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    groups = [g.strip() for g in args.groups.split(",") if g.strip()]
    t_values = [int(x) for x in args.t.split(",")] if args.t else None
    tuples = []
    for g in groups:
        try:
            found = feasible_tuples(g, args.max_nk, t_values)
        except (ValueError, NoSubgroup) as exc:
            raise UsageError(str(exc)) from exc
        if args.totally_filled:
            found = [t for t in found if t.h == t.n and t.k == t.m]
        tuples.extend(found)
    rows = run_sweep(tuples, args.seed, args.workers)
    text = rows_to_csv(rows, timing=args.timing)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    bad = [r for r in rows if r.outcome == "built" and not r.verified]
    return EXIT_FAIL if bad else EXIT_OK


def cmd_bound(args: argparse.Namespace) -> int:
    if args.family:
        if args.b is None:
            raise UsageError("--family needs --b")
        m = args.m or 64
        n = args.n or 64
        try:
            tile = tile_catalog(args.family, args.b, (1, 1), m, n)
        except (FamilyBoundViolation, ValueError) as exc:
            raise UsageError(str(exc)) from exc
        rep = tile_bound(tile)
    else:
        if None in (args.m, args.n, args.lam):
            raise UsageError("need --m, --n and --lambda (or --family and --b)")
        h = args.h if args.h is not None else args.n
        k = args.k if args.k is not None else args.m
        rep = expected_zero_bound(args.m, args.n, h, k, args.lam)
    doc = {"rows": str(rep.ex_rows), "cols": str(rep.ex_cols), "total": str(rep.total), "feasible": rep.feasible}
    _emit(args, doc, f"E(X)={rep.ex_rows}  E(Y)={rep.ex_cols}  total={rep.total}  "
                     f"{'< 1' if rep.feasible else '>= 1 (inconclusive)'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    def global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
        # flags are accepted before or after the subcommand; subparsers must not
        # overwrite a value given before it
        kw = {"default": argparse.SUPPRESS} if suppress else {}
        parser.add_argument("--seed", type=int, **(kw or {"default": 0}))
        parser.add_argument("--json", action="store_true", help="machine-readable output", **kw)
        parser.add_argument("--dump-plan", metavar="PATH", help="write the tile plan (tiling builds only)",
                            **(kw or {"default": None}))

    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, suppress=True)
    p = _Parser(prog="heffter", description=__doc__)
    global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", parents=[common], help="build an array")
    c.add_argument("--group", required=True, help="z:7, prod:3x2, e2:2 or cayley:<file>")
    c.add_argument("--t", type=int, default=1)
    c.add_argument("--lambda", dest="lam", type=int, required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--h", type=int, help="cells per row (default n)")
    c.add_argument("--k", type=int, help="cells per column (default m)")
    c.add_argument("--out", help="write the array JSON here")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", parents=[common], help="check an array file")
    v.add_argument("file")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tour", parents=[common], help="solve the knight tour for an array file")
    t.add_argument("file")
    t.add_argument("--limit", type=int, default=30, help="exhaustive search up to m+n")
    t.add_argument("--budget", type=int, default=20_000, help="random orientations beyond the limit")
    t.set_defaults(func=cmd_tour)

    e = sub.add_parser("embed", parents=[common], help="trace the biembedding of an array file")
    e.add_argument("file")
    e.add_argument("--budget", type=int, default=20_000)
    e.set_defaults(func=cmd_embed)

    s = sub.add_parser("sweep", parents=[common], help="construct every feasible tuple and write CSV")
    s.add_argument("--groups", required=True, help="comma-separated group specs")
    s.add_argument("--t", help="comma-separated subgroup orders (default: all divisors)")
    s.add_argument("--max-nk", type=int, default=120)
    s.add_argument("--totally-filled", action="store_true")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--timing", action="store_true", help="add a wall-time column")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bound", parents=[common], help="expected zero-sum count bounds")
    b.add_argument("--m", type=int)
    b.add_argument("--n", type=int)
    b.add_argument("--h", type=int)
    b.add_argument("--k", type=int)
    b.add_argument("--lambda", dest="lam", type=int)
    b.add_argument("--family")
    b.add_argument("--b", type=int)
    b.set_defaults(func=cmd_bound)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"heffter: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
