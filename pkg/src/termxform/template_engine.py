"""Rule-driven document traversal and whole-file transformation.

Traversal walks a document in pre-order.  Processing instructions and
comments contribute nothing; a node matched by a ``template/2`` clause
contributes that clause's result list (the textually first matching clause
commits); an unmatched element recurses into its children, concatenating
their results; unmatched text contributes nothing by default (or itself
with the ``copy`` policy).

Whole-file transformation works in one of two modes: if the rule program
defines ``go/2``, the goal ``go(Doc, Result)`` is solved against the parsed
input document; otherwise template traversal runs.  Result lists are
wrapped for serialization: a singleton is emitted directly, anything else
inside a synthetic ``result`` root (``no_wrap`` emits a fragment stream).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .logic_engine import Clause, Program, Solver, SolverOptions
from .rule_language import parse_program
from .term_core import (
    Atom,
    Compound,
    Term,
    copy_term,
    deref,
    fresh_var,
    list_items,
    mk_list,
    render_term,
)
from .transform_prelude import load_prelude
from .xml_io import parse_document, serialize_document, serialize_fragment

__all__ = [
    "TemplateError",
    "TraversalOptions",
    "TransformOptions",
    "TransformReport",
    "traverse",
    "traverse_elements",
    "transform_file",
]


class TemplateError(ValueError):
    """A template clause violated the traversal contract."""


@dataclass
class TraversalOptions:
    """Traversal knobs: what to do with text no template matched."""

    unmatched_text: str = "drop"  # or "copy"


@dataclass
class TransformOptions:
    """Options for whole-file transformation (CLI flags map 1:1)."""

    all_solutions: bool = False
    no_wrap: bool = False
    keep_ws: bool = False
    pretty: bool = False
    unmatched_text: str = "drop"
    depth_limit: Optional[int] = None
    occurs_check: bool = False


@dataclass
class TransformReport:
    """Outcome of one whole-file transformation."""

    status: str  # "ok" or "no_solution"
    solutions: int
    outputs: list[str] = field(default_factory=list)
    documents: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)


def traverse(node: Term, program: Program, opts: Optional[TraversalOptions] = None) -> list[Term]:
    """Collect the result nodes of a pre-order traversal rooted at *node*.

    *program* should already include the built-in rule set when template
    bodies rely on it.
    """
    solver = Solver(program)
    return _traverse(node, solver, opts or TraversalOptions())


def traverse_elements(
    nodes: list[Term], program: Program, opts: Optional[TraversalOptions] = None
) -> list[Term]:
    """Traverse each entry of a node list, concatenating the results."""
    solver = Solver(program)
    options = opts or TraversalOptions()
    return _traverse_items(nodes, solver, options)


def _traverse(node: Term, solver: Solver, opts: TraversalOptions) -> list[Term]:
    node = deref(node)
    if not isinstance(node, Compound):
        return []
    if node.name in ("pi", "comment") and len(node.args) == 1:
        return []
    matched = _match_template(node, solver)
    if matched is not None:
        clause, result = matched
        items = list_items(result)
        if items is None:
            raise TemplateError(
                "template %s produced %s, which is not a result list"
                % (render_term(clause.head), render_term(result))
            )
        return items
    if node.name == "element" and len(node.args) == 3:
        children = list_items(deref(node.args[2])) or []
        return _traverse_items(children, solver, opts)
    if node.name == "text" and len(node.args) == 1:
        return [node] if opts.unmatched_text == "copy" else []
    return []


def _traverse_items(nodes: list[Term], solver: Solver, opts: TraversalOptions) -> list[Term]:
    results: list[Term] = []
    for entry in nodes:
        entry = deref(entry)
        if not isinstance(entry, Compound) or entry.name == ".":
            continue
        results.extend(_traverse(entry, solver, opts))
    return results


def _match_template(node: Term, solver: Solver) -> Optional[tuple[Clause, Term]]:
    """The first template clause with a solution for *node*, plus its result."""
    clauses = solver.program.get("template", 2) or []
    for clause in clauses:
        mapping: dict[int, Term] = {}
        head = copy_term(clause.head, mapping)
        body = copy_term(clause.body, mapping)
        out = fresh_var("Result")
        probe = Compound("template", (node, out))
        mark = len(solver.trail)
        if solver.unify(head, probe):
            for _ in solver.solve(body):
                result = copy_term(out)
                solver.undo_to(mark)
                return clause, result
        solver.undo_to(mark)
    return None


# ---------------------------------------------------------------------------
# Whole-file transformation


def transform_file(
    input_path: str,
    rules_path: Optional[str],
    output_path: Optional[str] = None,
    options: Optional[TransformOptions] = None,
) -> TransformReport:
    """Transform *input_path* with the rules in *rules_path*.

    With no *output_path* the serialized results are only returned in the
    report; otherwise they are written to disk (``all_solutions`` numbers
    them ``base.1.xml``, ``base.2.xml``, ...).  Nothing is written when no
    solution exists.
    """
    options = options or TransformOptions()
    timings: dict[str, float] = {}

    started = time.perf_counter()
    doc = parse_document(Path(input_path).read_text(encoding="utf-8"), keep_ws=options.keep_ws)
    user: Optional[Program] = None
    if rules_path is not None:
        user = parse_program(Path(rules_path).read_text(encoding="utf-8"))
    program = load_prelude(user)
    timings["parse"] = time.perf_counter() - started

    solver_options = SolverOptions(occurs_check=options.occurs_check)
    if options.depth_limit is not None:
        solver_options.depth_limit = options.depth_limit
    solver = Solver(program, solver_options)

    started = time.perf_counter()
    result_sets: list[list[Term]] = []
    if user is not None and user.get("go", 2) is not None:
        result_var = fresh_var("Result")
        goal = Compound("go", (doc, result_var))
        for _ in solver.solve(goal):
            solution = copy_term(result_var)
            items = list_items(solution)
            result_sets.append(items if items is not None else [solution])
            if not options.all_solutions:
                break
    else:
        results = _traverse(doc, solver, TraversalOptions(options.unmatched_text))
        if results:
            result_sets.append(results)
    timings["solve"] = time.perf_counter() - started

    if not result_sets:
        timings["serialize"] = 0.0
        return TransformReport("no_solution", 0, timings=timings)

    started = time.perf_counter()
    documents = [_serialize_results(items, options) for items in result_sets]
    timings["serialize"] = time.perf_counter() - started

    outputs: list[str] = []
    if output_path is not None:
        base = Path(output_path)
        for index, text in enumerate(documents, start=1):
            target = base
            if options.all_solutions:
                target = base.with_name("%s.%d%s" % (base.stem, index, base.suffix))
            target.write_text(text + ("" if text.endswith("\n") else "\n"), encoding="utf-8")
            outputs.append(str(target))
    return TransformReport("ok", len(result_sets), outputs, documents, timings)


def _serialize_results(items: list[Term], options: TransformOptions) -> str:
    if options.no_wrap:
        return serialize_fragment(items)
    if len(items) == 1:
        node = deref(items[0])
        if isinstance(node, Compound) and node.name == "element" and len(node.args) == 3:
            return serialize_document(node, pretty=options.pretty)
        return serialize_fragment(items)
    wrapped = Compound("element", (Atom("result"), Atom("[]"), mk_list(items)))
    return serialize_document(wrapped, pretty=options.pretty)
