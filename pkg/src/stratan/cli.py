"""Command-line interface: ``stratan analyze|compare|reach``.

Exit status: 0 when the analysis converged, 2 when the divergence bound was
hit, 1 on input or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import domains as dom
from .engine import (METHODS, AnalysisConfig, ConfigError, InvariantMap, analyze,
                     check_postfixpoint)
from .frontend import FrontendError, Program, parse_file
from .linear import parse_constraint
from .numfmt import ENV_VAR
from .oracle import OracleConfig, check_soundness, reach

EXIT_OK, EXIT_INPUT, EXIT_DIVERGED = 0, 1, 2


def _constraint_lines(v) -> list[str]:
    if v.is_empty():
        return ["0 >= 1"]
    return [str(c) for c in v.constraints()]


def render_text(imap: InvariantMap, show_strata: bool = False, show_trace: bool = False) -> str:
    p = imap.program
    out = []
    if show_strata and imap.strata is not None:
        out.append(imap.strata.dump())
    head = (f"method: {imap.method}  domain: {imap.domain}  "
            f"converged: {'yes' if imap.converged else 'no'}  iterations: {imap.iterations}")
    out.append(head)
    if show_trace:
        out.append("trace:")
        for t in imap.trace:
            where = f"{t.stratum} " if t.stratum else ""
            out.append(f"  {where}n{t.node} {t.op} {t.step}: {dom.show(t.value)}")
            if t.parts is not None:
                out.extend("    " + line for line in t.parts.dump().splitlines())
    if imap.divergence is not None:
        d = imap.divergence
        out.append(f"divergence: {d.summary()}")
        for k, row in enumerate(d.growth):
            out.append(f"  {k}: " + "; ".join(f"{s} {v}" for s, v in row.items()))
    out.append("invariants:")
    for n in p.nodes:
        v = imap.values[n]
        mark = " *" if n in imap.points else ""
        out.append(f"{p.node_label(n)}{mark}: {dom.show(v)}")
        out.extend("    " + line for line in _constraint_lines(v))
    return "\n".join(out)


def render_json(imap: InvariantMap, timing: bool = False, trace: bool = False) -> str:
    p = imap.program
    doc = {
        "program": p.name,
        "method": imap.method,
        "domain": imap.domain,
        "converged": imap.converged,
        "iterations": imap.iterations,
        "variables": list(imap.dims),
        "nodes": [
            {
                "id": n,
                "label": p.node_label(n),
                "widening_point": n in imap.points,
                "invariant": dom.show(imap.values[n]),
                "constraints": _constraint_lines(imap.values[n]),
            }
            for n in p.nodes
        ],
    }
    if imap.strata is not None:
        doc["strata"] = [list(s.vars) for s in imap.strata.strata]
    if imap.divergence is not None:
        d = imap.divergence
        doc["divergence"] = {"node": d.node, "iterations": d.iterations,
                             "stratum": d.stratum, "growth": d.growth}
    if trace:
        doc["trace"] = [
            {"stratum": t.stratum, "node": t.node, "step": t.step, "op": t.op,
             "constraints": _constraint_lines(t.value),
             "components": None if t.parts is None else
             {s.id: _constraint_lines(v) for s, v in t.parts.items()}}
            for t in imap.trace
        ]
    if timing:
        doc["wall_time"] = imap.wall_time
    return json.dumps(doc, indent=2)


def classify(a, b) -> str:
    """How ``b`` compares with ``a``: stronger (strictly smaller), weaker, equal, incomparable."""
    a, b = dom.to_polyhedron(a), dom.to_polyhedron(b)
    ab, ba = a.includes(b), b.includes(a)
    if ab and ba:
        return "equal"
    if ab:
        return "stronger"
    if ba:
        return "weaker"
    return "incomparable"


def compare(first: InvariantMap, second: InvariantMap) -> dict[int, str]:
    if first.program.nodes != second.program.nodes:
        raise ValueError("invariant maps are over different programs")
    return {n: classify(first.values[n], second.values[n]) for n in first.program.nodes}


def _add_analysis_options(ap: argparse.ArgumentParser, suffix: str = ""):
    ap.add_argument(f"--method{suffix}", choices=METHODS, default="strata-v2")
    ap.add_argument(f"--domain{suffix}", choices=sorted(dom.DOMAINS), default="polyhedra")


def _add_common(ap: argparse.ArgumentParser):
    ap.add_argument("--delay", type=int, default=1, help="joins before the first widening")
    ap.add_argument("--narrowing", type=int, default=2, help="maximum narrowing rounds")
    ap.add_argument("--max-iterations", type=int, default=100,
                    help="widening steps per node before reporting divergence")
    ap.add_argument("--threshold", action="append", default=[], metavar="CONSTRAINT",
                    help="widening threshold such as 'i <= 5' (repeatable)")
    ap.add_argument("--widen-everywhere", action="store_true",
                    help="widen at every node instead of loop body entries")
    ap.add_argument("--control-deps", action="store_true",
                    help="include control dependences when building strata")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="stratan",
        description=f"Stratified polyhedral analysis of while programs. "
                    f"Set {ENV_VAR}=decimal to print rationals as decimals.")
    sub = ap.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="compute invariants for every program point")
    an.add_argument("file")
    _add_analysis_options(an)
    _add_common(an)
    an.add_argument("--dump-strata", action="store_true")
    an.add_argument("--trace", action="store_true", help="print every widening-point iterate")
    an.add_argument("--json", action="store_true")
    an.add_argument("--timing", action="store_true", help="include wall time in JSON output")
    an.add_argument("--check-oracle", action="store_true",
                    help="compare against brute-force reachable states")
    an.add_argument("--oracle-range", type=int, nargs=2, default=(-8, 8), metavar=("LO", "HI"))
    an.add_argument("--oracle-cap", type=int, default=100_000)

    cp = sub.add_parser("compare", help="per-node precision of two configurations")
    cp.add_argument("file")
    cp.add_argument("--method-a", choices=METHODS, default="classic")
    cp.add_argument("--domain-a", choices=sorted(dom.DOMAINS), default="polyhedra")
    cp.add_argument("--method-b", choices=METHODS, default="strata-v2")
    cp.add_argument("--domain-b", choices=sorted(dom.DOMAINS), default="polyhedra")
    _add_common(cp)

    rc = sub.add_parser("reach", help="enumerate reachable states with bounded nondeterminism")
    rc.add_argument("file")
    rc.add_argument("--oracle-range", type=int, nargs=2, default=(-8, 8), metavar=("LO", "HI"))
    rc.add_argument("--oracle-cap", type=int, default=100_000)
    rc.add_argument("--csv", action="store_true", help="print states as CSV")
    return ap


def _config(args, method: str, domain: str) -> AnalysisConfig:
    return AnalysisConfig(method=method, domain=domain, widening_delay=args.delay,
                          narrowing_steps=args.narrowing, max_iterations=args.max_iterations,
                          thresholds=tuple(parse_constraint(t) for t in args.threshold),
                          control_deps=args.control_deps, widen_everywhere=args.widen_everywhere)


def _load(path: str) -> Program:
    return parse_file(path)


def _cmd_analyze(args, out) -> int:
    prog = _load(args.file)
    cfg = _config(args, args.method, args.domain)
    imap = analyze(prog, cfg)
    if args.json:
        print(render_json(imap, timing=args.timing, trace=args.trace), file=out)
    else:
        print(render_text(imap, args.dump_strata, args.trace), file=out)
    status = EXIT_OK if imap.converged else EXIT_DIVERGED
    if args.check_oracle and imap.converged:
        lo, hi = args.oracle_range
        rep = check_soundness(prog, imap, OracleConfig((lo, hi), cap=args.oracle_cap))
        inductive = check_postfixpoint(prog, imap)
        note = " (state cap reached, check incomplete)" if rep.truncated else ""
        print(f"oracle: {rep.checked} states, {len(rep.violations)} violations{note}; "
              f"inductive: {'yes' if inductive else 'no'}", file=out)
        for node, store in rep.violations:
            print(f"  violation at n{node}: {store}", file=out)
        if rep.violations or not inductive:
            status = EXIT_INPUT
    return status


def _cmd_compare(args, out) -> int:
    prog = _load(args.file)
    a = analyze(prog, _config(args, args.method_a, args.domain_a))
    b = analyze(prog, _config(args, args.method_b, args.domain_b))
    print(f"A = {a.method}/{a.domain}, B = {b.method}/{b.domain}; B relative to A:", file=out)
    for n, verdict in compare(a, b).items():
        print(f"  {prog.node_label(n)}: {verdict}", file=out)
    return EXIT_OK if a.converged and b.converged else EXIT_DIVERGED


def _cmd_reach(args, out) -> int:
    prog = _load(args.file)
    lo, hi = args.oracle_range
    r = reach(prog, OracleConfig((lo, hi), cap=args.oracle_cap))
    if args.csv:
        out.write(r.to_csv())
    else:
        for n in prog.nodes:
            print(f"{prog.node_label(n)}: {len(r.at(n))} states", file=out)
        if r.truncated:
            print("state cap reached; result is partial", file=out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    handler = {"analyze": _cmd_analyze, "compare": _cmd_compare, "reach": _cmd_reach}[args.command]
    try:
        return handler(args, out)
    except FrontendError as e:
        print(f"{args.file}:{e}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
