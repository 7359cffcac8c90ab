"""Lexer, parser and pretty-printer for imgql specifications.

A specification is a sequence of commands::

    load img = "flair.png"
    let hI = intensity(img) >. 62258
    let f(x, y) = near(x) & y
    save "out.png" f(hI, hI)
    print "vol" volume(hI)
    import "other.imgql"

Newlines carry no meaning; a command ends where the next keyword starts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .errors import LexError, ParseError

KEYWORDS = frozenset({"let", "load", "save", "print", "import"})

# Longest alternatives first so `>=.` wins over `>.` and `=.` over `=`.
OPERATORS = (">=.", "<=.", ">.", "<.", "=.", "!", "&", "|", "+", "-", "*", "/")
PUNCTUATION = ("(", ")", ",", "=")

# Binding power of infix operators; larger binds tighter.
INFIX_PRECEDENCE = {
    "|": 1,
    "&": 2,
    ">.": 3, ">=.": 3, "<.": 3, "<=.": 3, "=.": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5,
}
PREFIX_OPERATORS = ("!", "-")
PREFIX_PRECEDENCE = 6

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<id>[A-Za-z][A-Za-z0-9_]*)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<op>>=\.|<=\.|>\.|<\.|=\.|[!&|+\-*/])
  | (?P<punct>[(),=])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str  # kw, id, num, str, op, punct
    value: object
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def __str__(self):
        if self.kind in ("op", "punct"):
            return f"`{self.value}`"
        return f"{self.kind}:{self.value!r}"


def _unescape(body, line, col):
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            if nxt not in _ESCAPES:
                raise LexError(f"unknown escape \\{nxt}", line, col + i + 1)
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def tokenize(text, source=None):
    """Split ``text`` into tokens. Comments and whitespace are dropped."""
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise LexError(f"unexpected character {text[pos]!r}", line, col, source)
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "num":
            tokens.append(Token("num", float(lexeme), line, col))
        elif kind == "id":
            tokens.append(Token("kw" if lexeme in KEYWORDS else "id", lexeme, line, col))
        elif kind == "str":
            tokens.append(Token("str", _unescape(lexeme[1:-1], line, col), line, col))
        elif kind in ("op", "punct"):
            tokens.append(Token(kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = pos + lexeme.rindex("\n") + 1
        pos = m.end()
    return tokens


# ---------------------------------------------------------------- AST


@dataclass(frozen=True)
class NumLit:
    value: float
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Ident:
    name: str
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Apply:
    fn: str
    args: tuple
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class InfixApply:
    op: str
    lhs: "Expr"
    rhs: "Expr"
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PrefixApply:
    op: str
    arg: "Expr"
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Paren:
    expr: "Expr"
    pos: tuple = field(default=None, compare=False, repr=False)


Expr = Union[NumLit, Ident, Apply, InfixApply, PrefixApply, Paren]


@dataclass(frozen=True)
class LetDecl:
    name: str
    params: tuple
    body: Expr
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Load:
    name: str
    path: str
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Save:
    path: str
    expr: Expr
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Print:
    label: str
    expr: Expr
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Import:
    path: str
    pos: tuple = field(default=None, compare=False, repr=False)


Command = Union[LetDecl, Load, Save, Print, Import]


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, tokens, source):
        self.tokens = tokens
        self.i = 0
        self.source = source

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def error(self, message, tok=None):
        tok = tok if tok is not None else self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line, col = (last.line, last.col) if last else (1, 1)
            raise ParseError(f"{message} (got end of input)", line, col, self.source)
        raise ParseError(f"{message} (got {tok})", tok.line, tok.col, self.source)

    def next(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, kind, value=None):
        tok = self.peek()
        if tok is None or tok.kind != kind or (value is not None and tok.value != value):
            what = f"`{value}`" if value is not None else kind
            self.error(f"expected {what}")
        self.i += 1
        return tok

    def at(self, kind, value=None):
        tok = self.peek()
        return tok is not None and tok.kind == kind and (value is None or tok.value == value)

    # commands

    def program(self):
        commands = []
        defined = {}
        while self.peek() is not None:
            cmd = self.command()
            if isinstance(cmd, (LetDecl, Load)):
                if cmd.name in defined:
                    line, col = cmd.pos
                    raise ParseError(
                        f"duplicate definition of {cmd.name!r} "
                        f"(first defined at line {defined[cmd.name][0]})",
                        line, col, self.source,
                    )
                defined[cmd.name] = cmd.pos
            commands.append(cmd)
        return commands

    def command(self):
        tok = self.peek()
        if tok.kind != "kw":
            self.error("expected a command (let, load, save, print, import)")
        self.i += 1
        pos = (tok.line, tok.col)
        if tok.value == "let":
            name = self.expect("id").value
            params = []
            if self.at("punct", "("):
                self.next()
                while True:
                    ptok = self.expect("id")
                    if ptok.value in params:
                        raise ParseError(f"duplicate parameter {ptok.value!r}",
                                         ptok.line, ptok.col, self.source)
                    params.append(ptok.value)
                    if self.at("punct", ","):
                        self.next()
                        continue
                    self.expect("punct", ")")
                    break
            self.expect("punct", "=")
            return LetDecl(name, tuple(params), self.expr(), pos)
        if tok.value == "load":
            name = self.expect("id").value
            self.expect("punct", "=")
            return Load(name, self._path(), pos)
        if tok.value == "save":
            return Save(self._path(), self.expr(), pos)
        if tok.value == "print":
            label = self.expect("str").value
            return Print(label, self.expr(), pos)
        return Import(self._path(), pos)

    def _path(self):
        tok = self.expect("str")
        if not tok.value:
            self.error("empty path", tok)
        return tok.value

    # expressions: precedence climbing

    def expr(self, min_prec=1):
        lhs = self.unary()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "op" or tok.value not in INFIX_PRECEDENCE:
                return lhs
            prec = INFIX_PRECEDENCE[tok.value]
            if prec < min_prec:
                return lhs
            self.i += 1
            rhs = self.expr(prec + 1)
            lhs = InfixApply(tok.value, lhs, rhs, (tok.line, tok.col))

    def unary(self):
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.value in PREFIX_OPERATORS:
            self.i += 1
            return PrefixApply(tok.value, self.unary(), (tok.line, tok.col))
        return self.atom()

    def atom(self):
        tok = self.next()
        pos = (tok.line, tok.col)
        if tok.kind == "num":
            return NumLit(tok.value, pos)
        if tok.kind == "id":
            if self.at("punct", "("):
                self.next()
                args = [self.expr()]
                while self.at("punct", ","):
                    self.next()
                    args.append(self.expr())
                self.expect("punct", ")")
                return Apply(tok.value, tuple(args), pos)
            return Ident(tok.value, pos)
        if tok.kind == "punct" and tok.value == "(":
            inner = self.expr()
            self.expect("punct", ")")
            return Paren(inner, pos)
        self.i -= 1
        self.error("expected an expression")


def parse(tokens, source=None):
    """Parse a token list (from :func:`tokenize`) into a list of commands."""
    return _Parser(list(tokens), source).program()


def parse_text(text, source=None):
    return parse(tokenize(text, source), source)


# ---------------------------------------------------------------- printer


def _fmt_number(x):
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def _fmt_string(s):
    out = s.replace("\\", "\\\\").replace('"', '\\"')
    return '"' + out.replace("\n", "\\n").replace("\t", "\\t") + '"'


def format_expr(e):
    """Render an expression. Parentheses appear only where the AST has ``Paren``."""
    if isinstance(e, NumLit):
        return _fmt_number(e.value)
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, Apply):
        return f"{e.fn}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, InfixApply):
        return f"{format_expr(e.lhs)} {e.op} {format_expr(e.rhs)}"
    if isinstance(e, PrefixApply):
        return f"{e.op}{format_expr(e.arg)}"
    if isinstance(e, Paren):
        return f"({format_expr(e.expr)})"
    raise TypeError(f"not an expression: {e!r}")


def format_command(c):
    if isinstance(c, LetDecl):
        params = f"({', '.join(c.params)})" if c.params else ""
        return f"let {c.name}{params} = {format_expr(c.body)}"
    if isinstance(c, Load):
        return f"load {c.name} = {_fmt_string(c.path)}"
    if isinstance(c, Save):
        return f"save {_fmt_string(c.path)} {format_expr(c.expr)}"
    if isinstance(c, Print):
        return f"print {_fmt_string(c.label)} {format_expr(c.expr)}"
    if isinstance(c, Import):
        return f"import {_fmt_string(c.path)}"
    raise TypeError(f"not a command: {c!r}")


def format_program(commands):
    return "".join(format_command(c) + "\n" for c in commands)
