"""Command-line interface.

Subcommands: ``transform`` (apply a rule file to an XML document),
``query`` (solve a goal against a rule file, optionally binding ``Doc`` to
a parsed document), ``roundtrip`` (parse/serialize/parse fidelity check),
``metrics`` (size metrics from a source file or raw counts), and ``check``
(static lint of a rule file).

Exit codes: 0 success, 1 no solution (including roundtrip divergence),
2 input error (parse/validation/degenerate counts), 3 internal error or
resource limit.  The solver step limit defaults to the ``TERMXFORM_DEPTH``
environment variable when set; the ``--depth-limit`` flag wins over both.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .logic_engine import (
    _BUILTINS,
    DEFAULT_STEP_LIMIT,
    Program,
    ResourceLimitError,
    Solver,
    SolverOptions,
)
from .metrics import (
    HalsteadCounts,
    halstead,
    load_classification_config,
    render_report,
    report_csv,
    tokenize_classify,
)
from .rule_language import parse_program, parse_query
from .template_engine import TransformOptions, transform_file
from .term_core import (
    Atom,
    Compound,
    Term,
    deref,
    list_items,
    render_term,
    term_equal,
)
from .transform_prelude import load_prelude
from .xml_io import parse_document, serialize_document

__all__ = ["main"]

PRELUDE_ONLY = "prelude-only"

_CONTROL_NAMES = {",", ";", "!", "true", "fail", "false", "not", "findall", "call"}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        # Covers rule/XML parse errors, validation errors, degenerate
        # counts, and missing files: all input problems.
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print("internal error: %s" % exc, file=sys.stderr)
        return 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="termxform",
        description="Rule-based XML transformation over logic terms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    transform = sub.add_parser("transform", help="apply a rule file to an XML document")
    transform.add_argument("--rules", required=True, help="rule file (.tx) or 'prelude-only'")
    transform.add_argument("--in", dest="input", required=True, help="input XML document")
    transform.add_argument("--out", dest="output", help="output file (stdout when omitted)")
    transform.add_argument("--all", action="store_true", help="emit every solution, numbered")
    transform.add_argument("--no-wrap", action="store_true", help="emit fragments, no synthetic root")
    transform.add_argument("--keep-ws", action="store_true", help="keep whitespace-only text nodes")
    transform.add_argument("--pretty", action="store_true", help="indent the output")
    transform.add_argument(
        "--default-text", choices=("drop", "copy"), default="drop",
        help="what unmatched text nodes contribute",
    )
    _solver_flags(transform)
    transform.set_defaults(func=_cmd_transform)

    query = sub.add_parser("query", help="solve a goal against a rule file")
    query.add_argument("--rules", required=True, help="rule file (.tx) or 'prelude-only'")
    query.add_argument("--in", dest="input", help="XML document bound to the variable Doc")
    query.add_argument("--max", type=int, default=1, help="maximum solutions to print")
    query.add_argument("goal", help="goal text, e.g. \"gcd(24,30,C)\"")
    _solver_flags(query)
    query.set_defaults(func=_cmd_query)

    roundtrip = sub.add_parser("roundtrip", help="check parse/serialize fidelity of a document")
    roundtrip.add_argument("--in", dest="input", required=True, help="XML document")
    roundtrip.set_defaults(func=_cmd_roundtrip)

    metrics = sub.add_parser("metrics", help="size metrics for a rule source or raw counts")
    source = metrics.add_mutually_exclusive_group(required=True)
    source.add_argument("--src", help="rule file to measure")
    source.add_argument("--counts", help="raw counts 'eta1,eta2,N1,N2'")
    metrics.add_argument("--csv", action="store_true", help="CSV output")
    metrics.add_argument("--config", help="classification config file (key=value lines)")
    metrics.add_argument("--label", help="row label (defaults to the file name)")
    metrics.set_defaults(func=_cmd_metrics)

    check = sub.add_parser("check", help="lint a rule file")
    check.add_argument("--rules", required=True, help="rule file (.tx)")
    check.set_defaults(func=_cmd_check)

    return parser


def _solver_flags(command: argparse.ArgumentParser) -> None:
    command.add_argument("--depth-limit", type=int, help="solver step limit")
    command.add_argument("--occurs-check", action="store_true", help="unify with occurs check")


def _resolve_depth(flag: Optional[int]) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("TERMXFORM_DEPTH")
    if env is not None:
        return int(env)
    return DEFAULT_STEP_LIMIT


def _load_rules(spec: str) -> Optional[Program]:
    if spec == PRELUDE_ONLY:
        return None
    return parse_program(Path(spec).read_text(encoding="utf-8"))


def _cmd_transform(args: argparse.Namespace) -> int:
    options = TransformOptions(
        all_solutions=args.all,
        no_wrap=args.no_wrap,
        keep_ws=args.keep_ws,
        pretty=args.pretty,
        unmatched_text=args.default_text,
        depth_limit=_resolve_depth(args.depth_limit),
        occurs_check=args.occurs_check,
    )
    rules_path = None if args.rules == PRELUDE_ONLY else args.rules
    report = transform_file(args.input, rules_path, args.output, options)
    if report.status != "ok":
        print("no solution", file=sys.stderr)
        return 1
    if args.output is None:
        for text in report.documents:
            print(text)
    print(
        "%d solution(s); parse %.3fs, solve %.3fs, serialize %.3fs"
        % (
            report.solutions,
            report.timings.get("parse", 0.0),
            report.timings.get("solve", 0.0),
            report.timings.get("serialize", 0.0),
        ),
        file=sys.stderr,
    )
    return 0


def _cmd_query(args: argparse.Namespace) -> int:
    user = _load_rules(args.rules)
    program = load_prelude(user)
    query = parse_query(args.goal, program.operators)
    solver = Solver(
        program,
        SolverOptions(
            occurs_check=args.occurs_check,
            depth_limit=_resolve_depth(args.depth_limit),
        ),
    )
    doc_bound = False
    if args.input is not None:
        doc = parse_document(Path(args.input).read_text(encoding="utf-8"))
        if "Doc" in query.variables:
            solver.unify(query.variables["Doc"], doc)
            doc_bound = True
    solutions = 0
    for _ in solver.solve(query.goal):
        solutions += 1
        print("YES.")
        for name, var in query.variables.items():
            if doc_bound and name == "Doc":
                continue
            print("%s/%s" % (name, render_term(var, quoted=True)))
        if solutions >= args.max:
            break
    if solutions == 0:
        print("NO")
        return 1
    return 0


def _cmd_roundtrip(args: argparse.Namespace) -> int:
    first = parse_document(Path(args.input).read_text(encoding="utf-8"))
    second = parse_document(serialize_document(first))
    if term_equal(first, second):
        print("roundtrip OK")
        return 0
    path = _divergence_path(first, second)
    print("roundtrip diverged at path %s" % path, file=sys.stderr)
    return 1


def _divergence_path(a: Term, b: Term) -> list[int]:
    """Child-index path to the first structural difference."""
    a = deref(a)
    b = deref(b)
    if term_equal(a, b):
        return []
    if (
        isinstance(a, Compound)
        and isinstance(b, Compound)
        and a.name == "element"
        and b.name == "element"
        and len(a.args) == 3
        and len(b.args) == 3
    ):
        kids_a = list_items(deref(a.args[2])) or []
        kids_b = list_items(deref(b.args[2])) or []
        for index, (child_a, child_b) in enumerate(zip(kids_a, kids_b)):
            if not term_equal(child_a, child_b):
                return [index] + _divergence_path(child_a, child_b)
        if len(kids_a) != len(kids_b):
            return [min(len(kids_a), len(kids_b))]
    return []


def _cmd_metrics(args: argparse.Namespace) -> int:
    if args.counts is not None:
        parts = [p.strip() for p in args.counts.split(",")]
        if len(parts) != 4:
            raise ValueError("--counts expects four comma-separated integers")
        eta1, eta2, n1, n2 = (int(p) for p in parts)
        counts = HalsteadCounts(eta1, eta2, n1, n2)
        label = args.label or "counts"
    else:
        config = load_classification_config(args.config) if args.config else None
        counts = tokenize_classify(Path(args.src).read_text(encoding="utf-8"), config)
        label = args.label or Path(args.src).name
    report = halstead(counts)
    if args.csv:
        print(report_csv([(label, report)]), end="")
    else:
        print(render_report(report))
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    user = parse_program(Path(args.rules).read_text(encoding="utf-8"))
    combined = load_prelude(user)
    warnings: list[str] = []

    defined = set(combined.clauses)
    for (name, arity) in user.order:
        for clause in user.clauses[(name, arity)]:
            for goal_name, goal_arity in _referenced_goals(clause.body):
                if goal_name in _CONTROL_NAMES:
                    continue
                if (goal_name, goal_arity) in defined or (goal_name, goal_arity) in _BUILTINS:
                    continue
                warnings.append(
                    "warning: unknown predicate %s/%d referenced in %s/%d"
                    % (goal_name, goal_arity, name, arity)
                )

    for clause in user.clauses.get(("template", 2), []):
        head = clause.head
        if isinstance(head, Compound) and len(head.args) == 2:
            pattern = deref(head.args[0])
            if isinstance(pattern, (Atom, int, float)):
                warnings.append(
                    "warning: template head %s can never match a document node"
                    % render_term(pattern)
                )

    for line in dict.fromkeys(warnings):
        print(line)
    return 0


def _referenced_goals(body: Term) -> list[tuple[str, int]]:
    """Callable (name, arity) pairs reachable through control constructs."""
    found: list[tuple[str, int]] = []
    stack = [body]
    while stack:
        goal = deref(stack.pop())
        if isinstance(goal, Atom):
            found.append((goal.name, 0))
            continue
        if not isinstance(goal, Compound):
            continue
        if goal.name in (",", ";") and len(goal.args) == 2:
            stack.extend(goal.args)
        elif goal.name == "not" and len(goal.args) == 1:
            stack.append(goal.args[0])
        elif goal.name == "findall" and len(goal.args) == 3:
            stack.append(goal.args[1])
        elif goal.name == "call" and len(goal.args) >= 1:
            target = deref(goal.args[0])
            if isinstance(target, Atom):
                found.append((target.name, len(goal.args) - 1))
            elif isinstance(target, Compound):
                found.append((target.name, len(target.args) + len(goal.args) - 1))
        else:
            found.append((goal.name, len(goal.args)))
    return found


if __name__ == "__main__":
    sys.exit(main())
