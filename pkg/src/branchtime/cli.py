"""``branchtime`` command line: build, solve, graph and check structure spec files.

Exit codes: 0 valid / well posed, 1 input error, 2 consistency failure,
3 blow-up.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass

from . import order
from .cauchy import CauchyProblem, Condition, ConsistencyReport, SolverConfig, Status, solve, write_csv
from .exprdsl import ExprSyntaxError, parse
from .graph import fmt_real, to_dot
from .timeline import Horizon, StructureError, TemporalStructure, load_spec, locate, validate

EXIT_OK, EXIT_INPUT, EXIT_INCONSISTENT, EXIT_BLOWUP = 0, 1, 2, 3

_IC = re.compile(r"^\s*\[(?P<path>[\d,\s]*)\]\s*@(?P<t>[^=]+)=(?P<x>.+)$")


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunManifest:
    """Everything a ``solve`` run needs, resolved before any integration starts."""

    spec_path: str
    expression: str
    structure: TemporalStructure
    problem: CauchyProblem
    config: SolverConfig
    out: str | None
    report: str | None


def parse_ic(text: str) -> tuple[list[int], float, float]:
    """``"[1,2]@0.5=3"`` -> ``([1, 2], 0.5, 3.0)``."""
    m = _IC.match(text)
    if m is None:
        raise InputError(f"bad initial condition {text!r}; expected PATH@T=VALUE, e.g. []@-1=1")
    raw = m.group("path").strip()
    try:
        path = [int(k) for k in raw.split(",")] if raw else []
        return path, float(m.group("t")), float(m.group("x"))
    except ValueError:
        raise InputError(f"bad initial condition {text!r}") from None


def _horizon(text: str | None) -> Horizon | None:
    if text is None:
        return None
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"--horizon expects LO,HI, got {text!r}") from None
    return Horizon(lo, hi)


def _structure(args) -> TemporalStructure:
    try:
        return load_spec(args.spec, _horizon(args.horizon))
    except OSError as exc:
        raise InputError(f"{args.spec}: {exc.strerror}") from None
    except StructureError as exc:
        raise InputError(f"{args.spec}: {exc}") from None


def _bool(v: bool) -> str:
    return "true" if v else "false"


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_build(args) -> int:
    s = _structure(args)
    report = validate(s)
    print(f"segments: {len(s.segments)}")
    print(f"nodes: {len(s.nodes)}")
    print(f"identifications: {len(s.identifications)}")
    print(f"chronology-violating: {_bool(report.chronology_violating)}")
    print(f"valid: {_bool(report.ok)}")
    for problem in report.problems:
        print(f"problem: {problem}")
    return EXIT_OK if report.ok else EXIT_INPUT


def manifest(args) -> RunManifest:
    s = _structure(args)
    try:
        expr = parse(args.f)
    except ExprSyntaxError as exc:
        raise InputError(f"--f {args.f!r}: {exc}") from None
    if not args.ic:
        raise InputError("at least one --ic PATH@T=VALUE is required")
    conditions = []
    for text in args.ic:
        path, t, x = parse_ic(text)
        try:
            conditions.append(Condition(locate(s, path, t), x))
        except StructureError as exc:
            raise InputError(f"--ic {text!r}: {exc}") from None
    try:
        cfg = SolverConfig(step=args.step, tol_abs=args.tol_abs, tol_rel=args.tol_rel)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    problem = CauchyProblem(expr, tuple(conditions))
    try:
        problem.check(s)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return RunManifest(args.spec, args.f, s, problem, cfg, args.out, args.report)


def cmd_solve(args) -> int:
    run = manifest(args)
    result = solve(run.structure, run.problem, run.config)
    if isinstance(result, ConsistencyReport):
        _emit(result.to_text(), run.report)
        return EXIT_BLOWUP if result.status is Status.BLOWUP else EXIT_INCONSISTENT
    if run.out is None:
        write_csv(result, sys.stdout)
    else:
        with open(run.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(result, fh)
    if run.report is not None:
        _emit(result.report.to_text(), run.report)
    return EXIT_OK


def cmd_graph(args) -> int:
    _emit(to_dot(_structure(args)), args.dot)
    return EXIT_OK


def _point(p) -> str:
    return f"{p.segment}@{fmt_real(p.t)}"


def cmd_check(args) -> int:
    s = _structure(args)
    if args.mccabe:
        try:
            s = order.mccabe_quotient(s)
        except StructureError as exc:
            raise InputError(str(exc)) from None
    rel = order.chron_relation_report(s)
    pairs = order.hausdorff_pairs(s)
    print(f"is_preorder: {_bool(rel.is_preorder)}")
    print(f"is_partial_order: {_bool(rel.is_partial_order)}")
    if rel.witness_pair is not None:
        print(f"witness_pair: {_point(rel.witness_pair[0])} {_point(rel.witness_pair[1])}")
    print(f"chronology_violating: {_bool(rel.chronology_violating)}")
    print(f"hausdorff_pairs: {len(pairs)}")
    print(f"is_hausdorff: {_bool(not pairs)}")
    if s.identifications:
        print("mccabe_is_hausdorff: unsupported")
    else:
        print(f"mccabe_is_hausdorff: {_bool(order.is_hausdorff(order.mccabe_quotient(s)))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="branchtime", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def with_spec(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("spec", help="structure spec file (JSON)")
        p.add_argument("--horizon", metavar="LO,HI", help="override the spec file's time window")
        return p

    p = with_spec("build", "build and validate a structure")
    p.set_defaults(func=cmd_build)

    p = with_spec("solve", "solve x' = f(x) on a structure")
    p.add_argument("--f", required=True, help="right-hand side, e.g. 'x*(1 - x)'")
    p.add_argument("--ic", action="append", default=[], metavar="PATH@T=VALUE",
                   help="initial condition, repeatable; [] is the root chain")
    p.add_argument("--step", type=float, default=SolverConfig.step)
    p.add_argument("--tol-abs", "--tol", dest="tol_abs", type=float, default=SolverConfig.tol_abs)
    p.add_argument("--tol-rel", dest="tol_rel", type=float, default=SolverConfig.tol_rel)
    p.add_argument("--out", help="trajectory CSV (default: stdout)")
    p.add_argument("--report", help="consistency report file (default: stdout)")
    p.set_defaults(func=cmd_solve)

    p = with_spec("graph", "export the oriented graph as DOT")
    p.add_argument("--dot", help="output path (default: stdout)")
    p.set_defaults(func=cmd_graph)

    p = with_spec("check", "order and separation diagnostics")
    p.add_argument("--mccabe", action="store_true", help="check the McCabe quotient instead")
    p.set_defaults(func=cmd_check)
    return parser


# values such as "-1,1" or "-x" would otherwise be mistaken for options
_VALUED = ("--horizon", "--f", "--ic")


def _attach_values(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _VALUED and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_values(argv))
    try:
        return args.func(args)
    except (InputError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
