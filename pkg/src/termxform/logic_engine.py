"""SLD resolution engine with unification, backtracking, and cut.

The solver enumerates solutions depth-first over an ordered clause store:
clauses are tried in program order, conjunctions left to right, and bindings
are undone chronologically (a trail) on backtracking.  Control constructs are
``,`` ``;`` ``!`` ``not/1`` ``findall/3`` and ``call/N``; the cut commits to
the choices made since the activation of the clause it occurs in.  A step
counter turns runaway programs into a :class:`ResourceLimitError` instead of
a hang.

Native predicates cover the term inspection, list, and arithmetic catalog
(``append/3`` is fully nondeterministic, ``delete/3`` removes all unifying
occurrences without binding), and ``is/2`` evaluates both numeric operators
and the string/node functor family (``cat``, ``substring``, ``translate``,
``plus`` over single-text elements, ...).  Evaluation errors make the goal
fail with a diagnostic warning rather than raising.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence, TextIO

from .term_core import (
    CONS,
    EMPTY_LIST,
    TRUE,
    Atom,
    Compound,
    Term,
    Var,
    copy_term,
    deref,
    fresh_var,
    is_list,
    list_parts,
    mk_list,
    render_term,
    split_attr,
    term_equal,
)

__all__ = [
    "Clause",
    "Program",
    "SolverOptions",
    "Solver",
    "ResourceLimitError",
    "EvalError",
    "DEFAULT_STEP_LIMIT",
]

DEFAULT_STEP_LIMIT = 1_000_000

_MIN_RECURSION_LIMIT = 100_000


class ResourceLimitError(RuntimeError):
    """The step budget was exhausted before the query finished."""


class EvalError(Exception):
    """Internal: arithmetic/functor evaluation failed (goal will fail)."""


class Clause:
    """One stored rule: a head term and a body term (``true`` for facts)."""

    __slots__ = ("head", "body")

    def __init__(self, head: Term, body: Term = TRUE) -> None:
        self.head = head
        self.body = body

    def __repr__(self) -> str:
        if isinstance(self.body, Atom) and self.body.name == "true":
            return "%s." % render_term(self.head)
        return "%s:-%s." % (render_term(self.head), render_term(self.body))


def _functor_key(t: Term) -> Optional[tuple[str, int]]:
    t = deref(t)
    if isinstance(t, Atom):
        return (t.name, 0)
    if isinstance(t, Compound):
        return (t.name, len(t.args))
    return None


class Program:
    """Ordered clause store keyed by (functor, arity).

    Clause order is semantic: earlier clauses have priority. ``operators``
    carries the operator table the source was read with (opaque here).
    """

    def __init__(self, operators: object = None) -> None:
        self.clauses: dict[tuple[str, int], list[Clause]] = {}
        self.order: list[tuple[str, int]] = []
        self.operators = operators

    def add(self, head: Term, body: Term = TRUE) -> None:
        key = _functor_key(head)
        if key is None:
            raise ValueError("clause head must be an atom or compound: %s" % render_term(head))
        if key not in self.clauses:
            self.clauses[key] = []
            self.order.append(key)
        self.clauses[key].append(Clause(head, body))

    def get(self, name: str, arity: int) -> Optional[list[Clause]]:
        return self.clauses.get((name, arity))

    def defines(self, name: str, arity: int) -> bool:
        return (name, arity) in self.clauses

    def extend(self, other: "Program") -> None:
        """Append *other*'s clauses after this program's (order preserved)."""
        for key in other.order:
            for clause in other.clauses[key]:
                if key not in self.clauses:
                    self.clauses[key] = []
                    self.order.append(key)
                self.clauses[key].append(clause)

    def copy(self) -> "Program":
        dup = Program(self.operators)
        dup.order = list(self.order)
        dup.clauses = {key: list(cls) for key, cls in self.clauses.items()}
        return dup


@dataclass
class SolverOptions:
    """Knobs for one solver instance."""

    occurs_check: bool = False
    depth_limit: Optional[int] = DEFAULT_STEP_LIMIT
    trace: bool = False
    diagnostics: Optional[TextIO] = None  # default: sys.stderr at use time


_BUILTINS: dict[tuple[str, Optional[int]], Callable] = {}


def _builtin(name: str, arity: Optional[int]):
    def register(fn):
        _BUILTINS[(name, arity)] = fn
        return fn

    return register


def _ascii_upper(s: str) -> str:
    return "".join(chr(ord(c) - 32) if "a" <= c <= "z" else c for c in s)


def _ascii_lower(s: str) -> str:
    return "".join(chr(ord(c) + 32) if "A" <= c <= "Z" else c for c in s)


class Solver:
    """Runs queries against a :class:`Program` under :class:`SolverOptions`.

    ``solve`` is a generator yielding once per solution; bindings live in the
    query's variables while the generator is suspended, so capture (render or
    copy) anything you need *before* advancing or abandoning it.
    """

    def __init__(self, program: Program, options: Optional[SolverOptions] = None) -> None:
        self.program = program
        self.options = options or SolverOptions()
        self.trail: list[Var] = []
        self.steps = 0
        self._warned: set[str] = set()
        if sys.getrecursionlimit() < _MIN_RECURSION_LIMIT:
            sys.setrecursionlimit(_MIN_RECURSION_LIMIT)

    # -- diagnostics --------------------------------------------------------

    def _diag(self) -> TextIO:
        return self.options.diagnostics or sys.stderr

    def warn(self, message: str) -> None:
        if message not in self._warned:
            self._warned.add(message)
            self._diag().write("warning: %s\n" % message)

    def write_out(self, text: str) -> None:
        self._diag().write(text)

    # -- bindings -----------------------------------------------------------

    def bind(self, var: Var, value: Term) -> None:
        var.ref = value
        self.trail.append(var)

    def undo_to(self, mark: int) -> None:
        trail = self.trail
        while len(trail) > mark:
            trail.pop().ref = None

    def _occurs(self, var: Var, t: Term) -> bool:
        stack = [t]
        while stack:
            node = deref(stack.pop())
            if node is var:
                return True
            if isinstance(node, Compound):
                stack.extend(node.args)
        return False

    def unify(self, a: Term, b: Term) -> bool:
        """Destructively unify; returns success. Caller undoes via the trail."""
        occurs_check = self.options.occurs_check
        stack = [(a, b)]
        while stack:
            x, y = stack.pop()
            x = deref(x)
            y = deref(y)
            if x is y:
                continue
            if isinstance(x, Var):
                if occurs_check and self._occurs(x, y):
                    return False
                self.bind(x, y)
            elif isinstance(y, Var):
                if occurs_check and self._occurs(y, x):
                    return False
                self.bind(y, x)
            elif isinstance(x, Atom):
                if not (isinstance(y, Atom) and y.name == x.name):
                    return False
            elif isinstance(x, (int, float)):
                if type(x) is not type(y) or x != y:
                    return False
            elif isinstance(x, Compound):
                if (
                    not isinstance(y, Compound)
                    or y.name != x.name
                    or len(y.args) != len(x.args)
                ):
                    return False
                stack.extend(zip(x.args, y.args))
            else:  # pragma: no cover - defensive
                return False
        return True

    # -- solving ------------------------------------------------------------

    def solve(self, goal: Term) -> Iterator[None]:
        """Enumerate solutions of *goal* (yields once per solution)."""
        yield from self._solve(goal, [False])

    def solve_once(self, goal: Term) -> bool:
        """True iff *goal* has at least one solution; bindings are undone."""
        mark = len(self.trail)
        for _ in self.solve(goal):
            self.undo_to(mark)
            return True
        self.undo_to(mark)
        return False

    def _step(self) -> None:
        self.steps += 1
        limit = self.options.depth_limit
        if limit is not None and self.steps > limit:
            raise ResourceLimitError("step limit of %d resolution steps exceeded" % limit)

    def _solve(self, goal: Term, barrier: list) -> Iterator[None]:
        mark = len(self.trail)
        try:
            self._step()
            goal = deref(goal)
            if isinstance(goal, Var):
                self.warn("unbound variable called as a goal")
                return
            if isinstance(goal, (int, float)):
                self.warn("number called as a goal: %s" % render_term(goal))
                return
            if isinstance(goal, Atom):
                name, args = goal.name, ()
            else:
                name, args = goal.name, goal.args
            arity = len(args)

            if self.options.trace:
                self._diag().write("trace: call %s\n" % render_term(goal))

            # Control constructs (cut-transparent where required).
            if name == "," and arity == 2:
                for _ in self._solve(args[0], barrier):
                    yield from self._solve(args[1], barrier)
                    if barrier[0]:
                        break
                return
            if name == ";" and arity == 2:
                branch_mark = len(self.trail)
                yield from self._solve(args[0], barrier)
                self.undo_to(branch_mark)
                if barrier[0]:
                    return
                yield from self._solve(args[1], barrier)
                return
            if name == "!" and arity == 0:
                yield
                barrier[0] = True
                return
            if name == "true" and arity == 0:
                yield
                return
            if (name == "fail" or name == "false") and arity == 0:
                return
            if name == "not" and arity == 1:
                sub_mark = len(self.trail)
                succeeded = False
                for _ in self._solve(args[0], [False]):
                    succeeded = True
                    break
                self.undo_to(sub_mark)
                if not succeeded:
                    yield
                return
            if name == "findall" and arity == 3:
                yield from self._findall(args[0], args[1], args[2])
                return
            if name == "call" and arity >= 1:
                target = self._call_goal(args[0], args[1:])
                if target is not None:
                    yield from self._solve(target, [False])
                return

            native = _BUILTINS.get((name, arity))
            if native is not None:
                yield from native(self, args)
                return

            clauses = self.program.get(name, arity)
            if clauses is None:
                self.warn("unknown predicate %s/%d (goal fails)" % (name, arity))
                return
            clause_barrier = [False]
            for clause in clauses:
                clause_mark = len(self.trail)
                mapping: dict[int, Var] = {}
                head = copy_term(clause.head, mapping)
                if self.unify(head, goal):
                    body = copy_term(clause.body, mapping)
                    yield from self._solve(body, clause_barrier)
                self.undo_to(clause_mark)
                if clause_barrier[0]:
                    return
        finally:
            self.undo_to(mark)

    def _call_goal(self, target: Term, extra: Sequence[Term]) -> Optional[Term]:
        target = deref(target)
        if isinstance(target, Atom):
            if not extra:
                return target
            return Compound(target.name, tuple(extra))
        if isinstance(target, Compound):
            if not extra:
                return target
            return Compound(target.name, target.args + tuple(extra))
        self.warn("call/N target is not callable: %s" % render_term(target))
        return None

    def _findall(self, template: Term, goal: Term, collected: Term) -> Iterator[None]:
        results: list[Term] = []
        sub_mark = len(self.trail)
        for _ in self._solve(goal, [False]):
            results.append(copy_term(template, {}))
        self.undo_to(sub_mark)
        if self.unify(collected, mk_list(results)):
            yield

    # -- arithmetic / functor evaluation -------------------------------------

    def eval_is(self, expr: Term) -> Term:
        """Evaluate an ``is``-expression to an int, float, or atom.

        Raises :class:`EvalError` on type errors, unbound operands, unknown
        functors, or out-of-range string indexes.
        """
        expr = deref(expr)
        if isinstance(expr, (int, float)):
            return expr
        if isinstance(expr, Atom):
            return expr
        if isinstance(expr, Var):
            raise EvalError("unbound variable in evaluable expression")
        assert isinstance(expr, Compound)
        name, args = expr.name, expr.args
        arity = len(args)
        if name == CONS and arity == 2:
            return expr  # list literal (consumed structurally by cat)

        if name in ("+", "-", "*", "/", "mod") and arity == 2:
            left = self._eval_number(args[0])
            right = self._eval_number(args[1])
            if name == "+":
                return left + right
            if name == "-":
                return left - right
            if name == "*":
                return left * right
            if name == "/":
                if right == 0:
                    raise EvalError("division by zero")
                return left / right
            if not (isinstance(left, int) and isinstance(right, int)):
                raise EvalError("mod requires integers")
            if right == 0:
                raise EvalError("mod by zero")
            return left % right

        if name == "cat" and 2 <= arity <= 8:
            return Atom("".join(self._stringify(a) for a in args))
        if name == "string" and arity == 1:
            value = self.eval_is(args[0])
            if isinstance(value, Atom):
                return value
            if isinstance(value, (int, float)):
                return Atom(self._num_text(value))
            raise EvalError("string/1 expects a number or atom")
        if name == "substring" and arity == 3:
            text = self._eval_text(args[0])
            start = self._eval_int(args[1])
            length = self._eval_int(args[2])
            if start < 1 or length < 0 or start - 1 + length > len(text):
                raise EvalError(
                    "substring out of range: start=%d len=%d on %r" % (start, length, text)
                )
            return Atom(text[start - 1 : start - 1 + length])
        if name == "substring_after" and arity == 2:
            text = self._eval_text(args[0])
            sep = self._eval_text(args[1])
            index = text.find(sep) if sep else 0
            return Atom(text[index + len(sep) :] if index >= 0 else "")
        if name == "substring_before" and arity == 2:
            text = self._eval_text(args[0])
            sep = self._eval_text(args[1])
            index = text.find(sep) if sep else -1
            return Atom(text[:index] if index >= 0 else "")
        if name == "translate" and arity == 3:
            text = self._eval_text(args[0])
            source = self._eval_text(args[1])
            target = self._eval_text(args[2])
            mapping: dict[str, Optional[str]] = {}
            for position, ch in enumerate(source):
                if ch not in mapping:
                    mapping[ch] = target[position] if position < len(target) else None
            out: list[str] = []
            for ch in text:
                if ch in mapping:
                    if mapping[ch] is not None:
                        out.append(mapping[ch])  # type: ignore[arg-type]
                else:
                    out.append(ch)
            return Atom("".join(out))
        if name in ("plus", "minus", "mult", "div") and arity == 2:
            left = self._node_number(args[0])
            right = self._node_number(args[1])
            if name == "plus":
                return left + right
            if name == "minus":
                return left - right
            if name == "mult":
                return left * right
            if right == 0:
                raise EvalError("division by zero")
            return left / right

        raise EvalError("unknown evaluable functor %s/%d" % (name, arity))

    def _eval_number(self, t: Term):
        value = self.eval_is(t)
        if isinstance(value, (int, float)):
            return value
        raise EvalError("expected a number, got %s" % render_term(value))

    def _eval_int(self, t: Term) -> int:
        value = self.eval_is(t)
        if isinstance(value, int):
            return value
        raise EvalError("expected an integer, got %s" % render_term(value))

    def _eval_text(self, t: Term) -> str:
        value = self.eval_is(t)
        if isinstance(value, Atom):
            return value.name
        if isinstance(value, (int, float)):
            return self._num_text(value)
        raise EvalError("expected an atom, got %s" % render_term(value))

    @staticmethod
    def _num_text(value) -> str:
        return repr(value) if isinstance(value, float) else str(value)

    def _stringify(self, t: Term) -> str:
        t = deref(t)
        if isinstance(t, Atom):
            return "" if t.name == "[]" else t.name
        if isinstance(t, (int, float)):
            return self._num_text(t)
        if isinstance(t, Compound) and t.name == CONS and len(t.args) == 2:
            items, tail = list_parts(t)
            if not (isinstance(tail, Atom) and tail.name == "[]"):
                raise EvalError("cat cannot flatten an improper list")
            return "".join(self._stringify(item) for item in items)
        value = self.eval_is(t)
        if isinstance(value, (int, float)):
            return self._num_text(value)
        if isinstance(value, Atom):
            return value.name
        raise EvalError("cat cannot stringify %s" % render_term(t))

    def _node_number(self, t: Term):
        t = deref(t)
        if isinstance(t, (int, float)):
            return t
        if isinstance(t, Compound) and t.name == "element" and len(t.args) == 3:
            children = list_parts(t.args[2])[0]
            if len(children) == 1:
                child = deref(children[0])
                if isinstance(child, Compound) and child.name == "text" and len(child.args) == 1:
                    content = deref(child.args[0])
                    if isinstance(content, Atom):
                        text = content.name.strip()
                        try:
                            return int(text)
                        except ValueError:
                            try:
                                return float(text)
                            except ValueError:
                                raise EvalError("text content is not a number: %r" % text)
        raise EvalError(
            "expected a number or an element with a single numeric text child, got %s"
            % render_term(t)
        )


# ---------------------------------------------------------------------------
# Native predicates


@_builtin("=", 2)
def _bi_unify(solver: Solver, args) -> Iterator[None]:
    if solver.unify(args[0], args[1]):
        yield


@_builtin("\\=", 2)
def _bi_not_unify(solver: Solver, args) -> Iterator[None]:
    mark = len(solver.trail)
    unified = solver.unify(args[0], args[1])
    solver.undo_to(mark)
    if not unified:
        yield


@_builtin("==", 2)
def _bi_identical(solver: Solver, args) -> Iterator[None]:
    if term_equal(args[0], args[1]):
        yield


@_builtin("\\==", 2)
def _bi_not_identical(solver: Solver, args) -> Iterator[None]:
    if not term_equal(args[0], args[1]):
        yield


def _type_test(predicate):
    def test(solver: Solver, args) -> Iterator[None]:
        if predicate(deref(args[0])):
            yield

    return test


_BUILTINS[("var", 1)] = _type_test(lambda t: isinstance(t, Var))
_BUILTINS[("nonvar", 1)] = _type_test(lambda t: not isinstance(t, Var))
_BUILTINS[("atom", 1)] = _type_test(lambda t: isinstance(t, Atom))
_BUILTINS[("number", 1)] = _type_test(lambda t: isinstance(t, (int, float)))
_BUILTINS[("integer", 1)] = _type_test(lambda t: isinstance(t, int))
_BUILTINS[("float", 1)] = _type_test(lambda t: isinstance(t, float))
_BUILTINS[("compound", 1)] = _type_test(lambda t: isinstance(t, Compound))
_BUILTINS[("atomic", 1)] = _type_test(lambda t: isinstance(t, (Atom, int, float)))
_BUILTINS[("list", 1)] = _type_test(is_list)
_BUILTINS[("isnumber", 1)] = _type_test(lambda t: isinstance(t, (int, float)))
_BUILTINS[("fnumber", 1)] = _type_test(lambda t: isinstance(t, float))
_BUILTINS[("inumber", 1)] = _type_test(lambda t: isinstance(t, int))


@_builtin("ground", 1)
def _bi_ground(solver: Solver, args) -> Iterator[None]:
    stack = [args[0]]
    while stack:
        node = deref(stack.pop())
        if isinstance(node, Var):
            return
        if isinstance(node, Compound):
            stack.extend(node.args)
    yield


@_builtin("is", 2)
def _bi_is(solver: Solver, args) -> Iterator[None]:
    try:
        value = solver.eval_is(args[1])
    except EvalError as exc:
        solver.warn("is/2: %s" % exc)
        return
    if solver.unify(args[0], value):
        yield


def _comparison(op):
    def compare(solver: Solver, args) -> Iterator[None]:
        try:
            left = solver._eval_number(args[0])
            right = solver._eval_number(args[1])
        except EvalError as exc:
            solver.warn("numeric comparison: %s" % exc)
            return
        if op(left, right):
            yield

    return compare


_BUILTINS[("<", 2)] = _comparison(lambda a, b: a < b)
_BUILTINS[(">", 2)] = _comparison(lambda a, b: a > b)
_BUILTINS[("=<", 2)] = _comparison(lambda a, b: a <= b)
_BUILTINS[(">=", 2)] = _comparison(lambda a, b: a >= b)


@_builtin("atom_codes", 2)
def _bi_atom_codes(solver: Solver, args) -> Iterator[None]:
    a = deref(args[0])
    if isinstance(a, Atom):
        codes = mk_list([ord(c) for c in a.name])
        if solver.unify(args[1], codes):
            yield
        return
    if isinstance(a, (int, float)):
        codes = mk_list([ord(c) for c in Solver._num_text(a)])
        if solver.unify(args[1], codes):
            yield
        return
    items = None
    if is_list(args[1]):
        items = list_parts(args[1])[0]
    if items is None:
        solver.warn("atom_codes/2 needs a bound atom or a proper code list")
        return
    chars = []
    for item in items:
        item = deref(item)
        if not isinstance(item, int) or not (0 <= item <= 0x10FFFF):
            solver.warn("atom_codes/2: invalid character code %s" % render_term(item))
            return
        chars.append(chr(item))
    if solver.unify(args[0], Atom("".join(chars))):
        yield


@_builtin("append", 3)
def _bi_append(solver: Solver, args) -> Iterator[None]:
    yield from _append(solver, args[0], args[1], args[2])


def _append(solver: Solver, a: Term, b: Term, c: Term) -> Iterator[None]:
    a_items, a_tail = list_parts(a)
    if isinstance(a_tail, Atom) and a_tail.name == "[]":
        # First argument proper: single solution c = a ++ b.
        if solver.unify(c, mk_list(a_items, deref(b))):
            yield
        return
    if isinstance(deref(a), Var):
        c_items, c_tail = list_parts(c)
        if isinstance(c_tail, Atom) and c_tail.name == "[]":
            # Enumerate the |c|+1 splits, sharing the suffix spine.
            spine: list[Term] = [deref(c)]
            node = deref(c)
            while isinstance(node, Compound) and node.name == CONS:
                node = deref(node.args[1])
                spine.append(node)
            for i in range(len(c_items) + 1):
                mark = len(solver.trail)
                if solver.unify(a, mk_list(c_items[:i])) and solver.unify(b, spine[i]):
                    yield
                solver.undo_to(mark)
            return
    # General relational fallback (partial lists on both sides).
    mark = len(solver.trail)
    if solver.unify(a, EMPTY_LIST) and solver.unify(b, c):
        yield
    solver.undo_to(mark)
    head, tail_a, tail_c = fresh_var("H"), fresh_var("T"), fresh_var("T")
    mark = len(solver.trail)
    if solver.unify(a, Compound(CONS, (head, tail_a))) and solver.unify(
        c, Compound(CONS, (head, tail_c))
    ):
        yield from _append(solver, tail_a, b, tail_c)
    solver.undo_to(mark)


@_builtin("member", 2)
def _bi_member(solver: Solver, args) -> Iterator[None]:
    x, lst = args[0], args[1]
    while True:
        lst = deref(lst)
        if isinstance(lst, Compound) and lst.name == CONS and len(lst.args) == 2:
            mark = len(solver.trail)
            if solver.unify(x, lst.args[0]):
                yield
            solver.undo_to(mark)
            lst = lst.args[1]
        elif isinstance(lst, Var):
            # Extend a partial list: [x|_], [_,x|_], ...
            solver._step()
            mark = len(solver.trail)
            tail = fresh_var("_")
            solver.bind(lst, Compound(CONS, (x, tail)))
            yield
            solver.undo_to(mark)
            skipped = fresh_var("_")
            tail = fresh_var("_")
            solver.bind(lst, Compound(CONS, (skipped, tail)))
            lst = tail
        else:
            return


@_builtin("length", 2)
def _bi_length(solver: Solver, args) -> Iterator[None]:
    items, tail = list_parts(args[0])
    n = deref(args[1])
    if isinstance(tail, Atom) and tail.name == "[]":
        if solver.unify(args[1], len(items)):
            yield
        return
    if not isinstance(tail, Var):
        return
    if isinstance(n, int):
        missing = n - len(items)
        if missing < 0:
            return
        if solver.unify(tail, mk_list([fresh_var("_") for _ in range(missing)])):
            yield
        return
    if isinstance(n, Var):
        k = len(items)
        while True:
            solver._step()
            mark = len(solver.trail)
            extension = mk_list([fresh_var("_") for _ in range(k - len(items))])
            if solver.unify(tail, extension) and solver.unify(n, k):
                yield
            solver.undo_to(mark)
            k += 1
    solver.warn("length/2 needs a proper list or an integer length")


@_builtin("reverse", 2)
def _bi_reverse(solver: Solver, args) -> Iterator[None]:
    items, tail = list_parts(args[0])
    if isinstance(tail, Atom) and tail.name == "[]":
        if solver.unify(args[1], mk_list(list(reversed(items)))):
            yield
        return
    items, tail = list_parts(args[1])
    if isinstance(tail, Atom) and tail.name == "[]":
        if solver.unify(args[0], mk_list(list(reversed(items)))):
            yield
        return
    solver.warn("reverse/2 needs at least one proper list")


@_builtin("delete", 3)
def _bi_delete(solver: Solver, args) -> Iterator[None]:
    pattern, source, result = args
    items, tail = list_parts(source)
    if not (isinstance(tail, Atom) and tail.name == "[]"):
        solver.warn("delete/3 needs a proper list")
        return
    kept: list[Term] = []
    for item in items:
        mark = len(solver.trail)
        matched = solver.unify(pattern, item)
        solver.undo_to(mark)
        if not matched:
            kept.append(item)
    if solver.unify(result, mk_list(kept)):
        yield


@_builtin("write", 1)
def _bi_write(solver: Solver, args) -> Iterator[None]:
    solver.write_out(render_term(deref(args[0]), quoted=False))
    yield


@_builtin("canon", 2)
def _bi_canon(solver: Solver, args) -> Iterator[None]:
    items, tail = list_parts(args[0])
    if not (isinstance(tail, Atom) and tail.name == "[]"):
        solver.warn("canon/2 needs a proper attribute list")
        return
    keyed = []
    for item in items:
        attr = split_attr(item)
        if attr is None:
            solver.warn("canon/2: malformed attribute entry %s" % render_term(item))
            return
        keyed.append((attr[0], item))
    keyed.sort(key=lambda pair: pair[0])  # stable: equal ids keep order
    if solver.unify(args[1], mk_list([item for _, item in keyed])):
        yield


@_builtin("upcase", 2)
def _bi_upcase(solver: Solver, args) -> Iterator[None]:
    word = deref(args[1])
    if not isinstance(word, Atom):
        solver.warn("upcase/2 is one-directional: second argument must be a bound atom")
        return
    if solver.unify(args[0], Atom(_ascii_upper(word.name))):
        yield


def _atom_pair(solver: Solver, args) -> Optional[tuple[str, str]]:
    first = deref(args[0])
    second = deref(args[1])
    if isinstance(first, Atom) and isinstance(second, Atom):
        return first.name, second.name
    return None


def _case_order_key(s: str, upper_rank: int) -> tuple:
    return (_ascii_lower(s), tuple(upper_rank if "A" <= c <= "Z" else 1 - upper_rank for c in s))


@_builtin("upper_first", 2)
def _bi_upper_first(solver: Solver, args) -> Iterator[None]:
    pair = _atom_pair(solver, args)
    if pair and _case_order_key(pair[0], 0) <= _case_order_key(pair[1], 0):
        yield


@_builtin("lower_first", 2)
def _bi_lower_first(solver: Solver, args) -> Iterator[None]:
    pair = _atom_pair(solver, args)
    if pair and _case_order_key(pair[0], 1) <= _case_order_key(pair[1], 1):
        yield


def _class_key(s: str, upper_class_first: bool) -> tuple:
    is_upper = bool(s) and "A" <= s[0] <= "Z"
    rank = 0 if is_upper == upper_class_first else 1
    return (rank, s)


@_builtin("first_upper", 2)
def _bi_first_upper(solver: Solver, args) -> Iterator[None]:
    pair = _atom_pair(solver, args)
    if pair and _class_key(pair[0], True) <= _class_key(pair[1], True):
        yield


@_builtin("first_lower", 2)
def _bi_first_lower(solver: Solver, args) -> Iterator[None]:
    pair = _atom_pair(solver, args)
    if pair and _class_key(pair[0], False) <= _class_key(pair[1], False):
        yield


@_builtin("contains", 2)
def _bi_contains(solver: Solver, args) -> Iterator[None]:
    pair = _atom_pair(solver, args)
    if pair and pair[1] in pair[0]:
        yield


@_builtin("starts_with", 2)
def _bi_starts_with(solver: Solver, args) -> Iterator[None]:
    pair = _atom_pair(solver, args)
    if pair and pair[0].startswith(pair[1]):
        yield
