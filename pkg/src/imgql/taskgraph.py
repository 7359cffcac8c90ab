"""Macro expansion into a hash-consed task graph.

Macros are expanded call-by-name. Because every operator is pure, binding a
parameter to the node id of its argument is the same as substituting the
argument text and hash-consing afterwards, and it avoids re-walking the
argument once per use.

Only what an output (``save``/``print``) needs ever becomes a task: ``let``
and ``load`` bindings are expanded on first use.
"""

from __future__ import annotations

import contextlib
import heapq
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import frontend as fe
from .errors import ExpandError, SpecError

NUM, BOOL, U16 = "num", "bool", "u16"

# name -> (opcode, argument types, result type)
BUILTINS = {
    "near": ("near", (BOOL,), BOOL),
    "reach": ("reach", (BOOL, BOOL), BOOL),
    "intensity": ("intensity", (U16,), U16),
    "volume": ("volume", (BOOL,), NUM),
}
INFIX = {
    "&": ("and", (BOOL, BOOL), BOOL),
    "|": ("or", (BOOL, BOOL), BOOL),
    "+": ("+", (NUM, NUM), NUM),
    "-": ("-", (NUM, NUM), NUM),
    "*": ("*", (NUM, NUM), NUM),
    "/": ("/", (NUM, NUM), NUM),
    **{op: (op, (U16, NUM), BOOL) for op in (">.", ">=.", "<.", "<=.", "=.")},
}
PREFIX = {
    "!": ("not", (BOOL,), BOOL),
    "-": ("neg", (NUM,), NUM),
}
OUTPUT_OPCODES = ("save", "print")


def accepts(expected, actual):
    # U16 images are read as `pixel != 0` wherever a boolean image is expected
    return expected == actual or (expected == BOOL and actual == U16)


@dataclass(frozen=True)
class Task:
    opcode: str
    payload: object = None
    deps: tuple = ()


@dataclass
class TaskGraph:
    tasks: list = field(default_factory=list)
    types: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    _index: dict = field(default_factory=dict, repr=False)

    def add(self, task, type_):
        key = (task.opcode, task.payload, task.deps)
        node = self._index.get(key)
        if node is None:
            assert all(0 <= d < len(self.tasks) for d in task.deps)
            node = len(self.tasks)
            self.tasks.append(task)
            self.types.append(type_)
            self._index[key] = node
            if task.opcode in OUTPUT_OPCODES:
                self.outputs.append(node)
        return node

    def __len__(self):
        return len(self.tasks)

    def __getitem__(self, node):
        return self.tasks[node]

    def count(self, opcode):
        return sum(1 for t in self.tasks if t.opcode == opcode)

    def dependents(self):
        out = [[] for _ in self.tasks]
        for i, t in enumerate(self.tasks):
            for d in t.deps:
                out[d].append(i)
        return out

    def dump(self):
        """One line per node: ``id opcode payload deps``."""
        lines = []
        for i, t in enumerate(self.tasks):
            if t.payload is None:
                payload = "-"
            elif isinstance(t.payload, float):
                payload = fe._fmt_number(t.payload)
            else:
                payload = fe._fmt_string(str(t.payload))
            deps = ",".join(map(str, t.deps)) or "-"
            lines.append(f"{i} {t.opcode} {payload} {deps}")
        return "\n".join(lines) + ("\n" if lines else "")


def toposort(graph):
    """Kahn's algorithm, always releasing the smallest ready id first."""
    indeg = [len(set(t.deps)) for t in graph.tasks]
    users = [[] for _ in graph.tasks]
    for i, t in enumerate(graph.tasks):
        for d in set(t.deps):
            users[d].append(i)
    ready = [i for i, n in enumerate(indeg) if n == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for u in users[i]:
            indeg[u] -= 1
            if indeg[u] == 0:
                heapq.heappush(ready, u)
    return order


@contextlib.contextmanager
def deep_recursion(limit=50_000):
    """Deeply nested formulas recurse once per nesting level."""
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, limit))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def file_resolver(path, importer):
    """Resolve ``import "path"`` relative to the importing file."""
    base = Path(importer).parent if importer else Path.cwd()
    full = (base / path).resolve()
    try:
        return full.read_text(encoding="utf-8"), str(full)
    except FileNotFoundError:
        raise ExpandError(f"import file not found: {path}") from None


@dataclass
class _Binding:
    kind: str  # "let" or "load"
    decl: object
    source: str | None
    node: int | None = None


class _Expander:
    def __init__(self, resolver):
        self.graph = TaskGraph()
        self.resolver = resolver
        self.names = {}
        self.imported = set()

    def error(self, message, node, source):
        pos = getattr(node, "pos", None) or (None, None)
        raise ExpandError(message, pos[0], pos[1], source)

    # static checks done at definition time, so unused lets are checked too

    def check_body(self, decl, source):
        params = set(decl.params)

        def visit(e):
            if isinstance(e, fe.NumLit):
                return
            if isinstance(e, fe.Ident):
                if e.name in params:
                    return
                if e.name == decl.name:
                    self.error(f"{e.name!r} is used inside its own definition "
                               "(let bindings are not recursive)", e, source)
                b = self.names.get(e.name)
                if b is None and e.name not in BUILTINS:
                    self.error(f"unbound identifier {e.name!r}", e, source)
                arity = len(BUILTINS[e.name][1]) if b is None else self.arity(b)
                if arity:
                    self.error(f"{e.name!r} expects {arity} argument(s), got 0", e, source)
                return
            if isinstance(e, fe.Apply):
                if e.fn in params:
                    self.error(f"parameter {e.fn!r} cannot be applied", e, source)
                if e.fn == decl.name:
                    self.error(f"{e.fn!r} is used inside its own definition "
                               "(let bindings are not recursive)", e, source)
                b = self.names.get(e.fn)
                if b is None and e.fn not in BUILTINS:
                    self.error(f"unbound identifier {e.fn!r}", e, source)
                arity = len(BUILTINS[e.fn][1]) if b is None else self.arity(b)
                if arity != len(e.args):
                    self.error(f"{e.fn!r} expects {arity} argument(s), got {len(e.args)}", e, source)
                for a in e.args:
                    visit(a)
                return
            if isinstance(e, fe.InfixApply):
                visit(e.lhs)
                visit(e.rhs)
            elif isinstance(e, fe.PrefixApply):
                visit(e.arg)
            elif isinstance(e, fe.Paren):
                visit(e.expr)

        visit(decl.body)

    @staticmethod
    def arity(b):
        return len(b.decl.params) if b.kind == "let" else 0

    def bind(self, name, binding, node):
        if name in BUILTINS:
            self.error(f"{name!r} is a built-in and cannot be redefined", node, binding.source)
        if name in self.names:
            other = self.names[name]
            where = f" in {other.source}" if other.source else ""
            self.error(f"duplicate definition of {name!r} (already defined{where})",
                       node, binding.source)
        self.names[name] = binding

    # expansion

    def run(self, commands, source):
        for cmd in commands:
            if isinstance(cmd, fe.LetDecl):
                self.check_body(cmd, source)
                self.bind(cmd.name, _Binding("let", cmd, source), cmd)
            elif isinstance(cmd, fe.Load):
                self.bind(cmd.name, _Binding("load", cmd, source), cmd)
            elif isinstance(cmd, fe.Save):
                node, t = self.expr(cmd.expr, {}, source)
                if t == NUM:
                    self.error("save needs an image; use print for numbers", cmd.expr, source)
                self.graph.add(Task("save", self.path(cmd.path, source), (node,)), None)
            elif isinstance(cmd, fe.Print):
                node, t = self.expr(cmd.expr, {}, source)
                if t != NUM:
                    self.error("print needs a number", cmd.expr, source)
                self.graph.add(Task("print", cmd.label, (node,)), None)
            elif isinstance(cmd, fe.Import):
                text, key = self.resolver(cmd.path, source)
                if key in self.imported:
                    continue
                self.imported.add(key)
                self.run(fe.parse_text(text, key), key)

    @staticmethod
    def path(path, source):
        if source is None:
            return path
        return os.path.join(os.path.dirname(source), path)

    def builtin(self, spec, args, e, source, name):
        opcode, arg_types, result = spec
        if len(args) != len(arg_types):
            self.error(f"{name!r} expects {len(arg_types)} argument(s), got {len(args)}", e, source)
        deps = []
        for (node, t), want, a in zip(args, arg_types, getattr(e, "args", None) or [None] * len(args)):
            if not accepts(want, t):
                self.error(f"{name!r} expects {want} argument, got {t}", a or e, source)
            deps.append(node)
        return self.graph.add(Task(opcode, None, tuple(deps)), result), result

    def expr(self, e, env, source):
        if isinstance(e, fe.NumLit):
            return self.graph.add(Task("const", float(e.value)), NUM), NUM
        if isinstance(e, fe.Paren):
            return self.expr(e.expr, env, source)
        if isinstance(e, fe.Ident):
            if e.name in env:
                return env[e.name]
            return self.call(e.name, [], e, source)
        if isinstance(e, fe.Apply):
            if e.fn in env:
                self.error(f"parameter {e.fn!r} cannot be applied", e, source)
            args = [self.expr(a, env, source) for a in e.args]
            return self.call(e.fn, args, e, source)
        if isinstance(e, fe.InfixApply):
            args = [self.expr(e.lhs, env, source), self.expr(e.rhs, env, source)]
            opcode, arg_types, result = INFIX[e.op]
            for (_, t), want, sub in zip(args, arg_types, (e.lhs, e.rhs)):
                if not accepts(want, t):
                    self.error(f"operator {e.op!r} expects {want} operand, got {t}", sub, source)
            return self.graph.add(Task(opcode, None, (args[0][0], args[1][0])), result), result
        if isinstance(e, fe.PrefixApply):
            node, t = self.expr(e.arg, env, source)
            opcode, (want,), result = PREFIX[e.op]
            if not accepts(want, t):
                self.error(f"operator {e.op!r} expects {want} operand, got {t}", e.arg, source)
            return self.graph.add(Task(opcode, None, (node,)), result), result
        raise TypeError(f"not an expression: {e!r}")

    def call(self, name, args, e, source):
        b = self.names.get(name)
        if b is None:
            if name in BUILTINS:
                return self.builtin(BUILTINS[name], args, e, source, name)
            self.error(f"unbound identifier {name!r}", e, source)
        if b.kind == "load":
            if args:
                self.error(f"{name!r} is an image, not a function", e, source)
            if b.node is None:
                b.node = self.graph.add(Task("load", self.path(b.decl.path, b.source)), U16)
            return b.node, U16
        decl = b.decl
        if len(args) != len(decl.params):
            self.error(f"{name!r} expects {len(decl.params)} argument(s), got {len(args)}", e, source)
        if not decl.params:
            if b.node is None:
                b.node = self.expr(decl.body, {}, b.source)
            return b.node
        return self.expr(decl.body, dict(zip(decl.params, args)), b.source)


def expand(program, resolver=file_resolver, source=None):
    """Expand a parsed program into a :class:`TaskGraph`."""
    ex = _Expander(resolver)
    if source is not None:
        ex.imported.add(str(Path(source).resolve()))
    with deep_recursion():
        ex.run(program, source)
    return ex.graph


def compile_text(text, source=None, resolver=file_resolver, stdlib=None):
    """Parse and expand ``text``; ``stdlib`` (text or path) is spliced in first."""
    with deep_recursion():
        program = fe.parse_text(text, source)
        if stdlib is not None:
            program = [fe.Import(str(stdlib))] + program
        return expand(program, resolver, source)


__all__ = [
    "Task", "TaskGraph", "expand", "toposort", "compile_text", "file_resolver",
    "BUILTINS", "SpecError",
]
