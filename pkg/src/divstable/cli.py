"""Command-line interface: ``divstable {solve,check,gen,compare,enumerate}``.

Exit codes: 0 success or stable, 1 usage or parse error, 2 invalid instance,
3 assignment not stable, 4 solver disagreement or internal invariant
violation.  Diagnostics go to standard error, one JSON object per line.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .bipartite import solve_bipartite
from .general import solve_general
from .hypergraph import solve_hypergraph
from .model import (
    AssignmentError,
    InstanceError,
    InvariantViolation,
    format_scalar,
    parse_assignment,
    to_scalar,
    validate_instance,
)
from .stability import check_stability
from .tooling import GenSpec, compare_many, enumerate_stable_grid, generate, reference_solve_float

EXIT_OK, EXIT_USAGE, EXIT_INSTANCE, EXIT_UNSTABLE, EXIT_INTERNAL = 0, 1, 2, 3, 4


class _Exit(Exception):
    def __init__(self, code: int, message: str, **extra):
        super().__init__(message)
        self.code = code
        self.extra = extra


def _diag(level: str, message: str, **extra) -> None:
    sys.stderr.write(json.dumps({"level": level, "message": message, **extra}) + "\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Exit(EXIT_USAGE, message)


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _Exit(EXIT_USAGE, f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise _Exit(EXIT_USAGE, f"{path} is not valid JSON: {exc}") from None


def _read_instance(path: str):
    raw = _read_json(path)
    try:
        return validate_instance(raw)
    except InstanceError as exc:
        raise _Exit(EXIT_INSTANCE, f"invalid instance {path}", violations=exc.violations) from None


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _scalar(text: str) -> Fraction:
    try:
        return to_scalar(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _cmd_solve(args) -> int:
    inst = _read_instance(args.instance)
    if args.mode == "float":
        if inst.kind != "bipartite":
            raise _Exit(EXIT_USAGE, "float mode is available for bipartite instances only")
        if not args.tol > 0:
            raise _Exit(EXIT_USAGE, "--tol must be positive")
        res = reference_solve_float(inst, args.tol, args.max_iter)
        _write(args.output, _dump(res.to_document(inst)))
        if not res.converged:
            _diag("error", "float iterations did not converge", iterations=res.iterations)
            return EXIT_INTERNAL
        return EXIT_OK

    trace_doc = None
    if inst.kind == "bipartite":
        want = args.trace or args.trace_out is not None
        x, tr = solve_bipartite(inst, trace=want, debug=args.debug)
        if want:
            trace_doc = tr.to_document()
    elif inst.kind == "graph":
        x = solve_general(inst)
    else:
        x = solve_hypergraph(inst, pivot_seed=args.pivot_seed)
    _write(args.output, x.dumps(inst))
    if trace_doc is not None:
        if args.trace_out:
            _write(args.trace_out, _dump(trace_doc))
        else:
            _diag("info", "trace", trace=trace_doc)
    return EXIT_OK


def _cmd_check(args) -> int:
    inst = _read_instance(args.instance)
    raw = _read_json(args.assignment)
    try:
        x = parse_assignment(inst, raw)
    except AssignmentError as exc:
        raise _Exit(EXIT_USAGE, f"invalid assignment: {exc}") from None
    sha = raw.get("instance_sha256")
    if sha is not None and sha != inst.sha256():
        _diag("warning", "assignment was produced for a different instance",
              expected=inst.sha256(), found=sha)
    report = check_stability(inst, x)
    _write(args.output, _dump(report.to_document()))
    if not report.stable:
        _diag("error", "assignment is not stable",
              blocking_edges=[e for e, _ in report.blocking_edges],
              irrational_vertices=report.irrational_vertices)
        return EXIT_UNSTABLE
    return EXIT_OK


def _spec(args, seed: int) -> GenSpec:
    return GenSpec(
        kind=args.kind, firms=args.firms, workers=args.workers, vertices=args.vertices,
        density=args.density, cap_min=args.cap_min, cap_max=args.cap_max,
        quota_min=args.quota_min, quota_max=args.quota_max, denominator=args.denominator,
        seed=seed, max_arity=args.max_arity, edges=args.edges,
    )


def _generate(args, seed: int):
    try:
        return generate(_spec(args, seed))
    except ValueError as exc:
        raise _Exit(EXIT_USAGE, str(exc)) from None


def _cmd_gen(args) -> int:
    _write(args.output, _generate(args, args.seed).dumps())
    return EXIT_OK


def _cmd_compare(args) -> int:
    if args.random is None and not args.instances:
        raise _Exit(EXIT_USAGE, "give instance files or --random N")
    instances = [_read_instance(p) for p in args.instances]
    if args.random is not None:
        instances += [_generate(args, args.seed + i) for i in range(args.random)]
    reports = compare_many(instances, jobs=args.jobs)
    _write(args.output, "".join(json.dumps(r, sort_keys=True) + "\n" for r in reports))
    bad = [r for r in reports if r["verdict"] != "AGREE"]
    for r in bad:
        inst = next(i for i in instances if i.sha256() == r["instance_sha256"])
        _diag("error", "solvers disagree", instance=inst.to_document(), report=r)
    return EXIT_INTERNAL if bad else EXIT_OK


def _cmd_enumerate(args) -> int:
    inst = _read_instance(args.instance)
    if args.step <= 0:
        raise _Exit(EXIT_USAGE, "--step must be positive")
    try:
        found = enumerate_stable_grid(inst, args.step)
    except ValueError as exc:
        raise _Exit(EXIT_USAGE, str(exc)) from None
    doc = {
        "step": format_scalar(args.step),
        "count": len(found),
        "assignments": [x.to_document(inst)["values"] for x in found],
    }
    _write(args.output, _dump(doc))
    if len(found) > 1:
        _diag("error", "more than one stable grid point", count=len(found))
        return EXIT_INTERNAL
    return EXIT_OK


def _gen_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("generator")
    g.add_argument("--kind", choices=("bipartite", "graph", "hypergraph"), default="bipartite")
    g.add_argument("--firms", type=int, default=3)
    g.add_argument("--workers", type=int, default=3)
    g.add_argument("--vertices", type=int, default=4, help="vertex count for graph/hypergraph")
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--cap-min", type=_scalar, default=Fraction(0))
    g.add_argument("--cap-max", type=_scalar, default=Fraction(5))
    g.add_argument("--quota-min", type=_scalar, default=Fraction(0))
    g.add_argument("--quota-max", type=_scalar, default=Fraction(8))
    g.add_argument("--denominator", type=int, default=4)
    g.add_argument("--max-arity", type=int, default=3)
    g.add_argument("--edges", type=int, default=None, help="hyperedge count")
    g.add_argument("--seed", type=int, default=0)
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="divstable", description="Diversifying stable-assignment solvers.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("instance")
    s.add_argument("-o", "--output")
    s.add_argument("--mode", choices=("exact", "float"), default="exact")
    s.add_argument("--tol", type=float, default=1e-12, help="float mode only")
    s.add_argument("--max-iter", type=int, default=10**6, help="float mode only")
    s.add_argument("--trace", action="store_true", help="emit the bipartite iteration trace")
    s.add_argument("--trace-out", help="write the trace here instead of standard error")
    s.add_argument("--pivot-seed", type=int, help="random pivot tie-break (hypergraph)")
    s.add_argument("--debug", action="store_true", help="run per-iteration invariant checks")
    s.set_defaults(func=_cmd_solve)

    c = sub.add_parser("check", help="check an assignment for stability")
    c.add_argument("instance")
    c.add_argument("assignment")
    c.add_argument("-o", "--output")
    c.set_defaults(func=_cmd_check)

    g = sub.add_parser("gen", help="generate a random instance", parents=[_gen_options()])
    g.add_argument("-o", "--output")
    g.set_defaults(func=_cmd_gen)

    p = sub.add_parser("compare", help="cross-check all applicable solvers",
                       parents=[_gen_options()])
    p.add_argument("instances", nargs="*")
    p.add_argument("--random", type=int, metavar="N",
                   help="also compare N generated instances (seeds --seed, --seed+1, ...)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_compare)

    e = sub.add_parser("enumerate", help="brute-force stable grid points (at most 4 edges)")
    e.add_argument("instance")
    e.add_argument("--step", type=_scalar, required=True)
    e.add_argument("-o", "--output")
    e.set_defaults(func=_cmd_enumerate)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _Exit as exc:
        _diag("error", str(exc), exit_code=exc.code, **exc.extra)
        return exc.code
    except InvariantViolation as exc:
        _diag("error", f"internal invariant violated: {exc}", exit_code=EXIT_INTERNAL)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
