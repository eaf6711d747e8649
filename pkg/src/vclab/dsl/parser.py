"""Recursive-descent parser for the formula language.

Grammar (ASCII; ``#`` starts a comment that runs to the end of the line)::

    file     = { decl } formula
    decl     = ("param" | "data") ident { "," ident } ";"
             | "level" LEVEL ";"
             | "name" ident ";"
    formula  = implies [ "iff" formula ]
    implies  = disj [ "implies" implies ]
    disj     = conj { "or" conj }
    conj     = unary { "and" unary }
    unary    = "not" unary
             | ("exists" | "forall") ident { "," ident } "." formula
             | "true" | "false"
             | comparison
             | "(" formula ")"
    comparison = expr relop expr { relop expr }        relop = "<" | "<=" | "=" | ">" | ">="
    expr     = term { ("+" | "-") term }
    term     = factor { ("*" | "/") factor }
    factor   = ("-" | "+") factor | power
    power    = primary [ "^" factor ]
    primary  = number | ident | ident "(" expr { "," expr } ")" | "(" expr ")"

A quantifier body extends as far to the right as possible.  A chained
comparison ``a < b <= c`` means ``a < b and b <= c``.  Every ``/`` adds an
implicit guard that its denominator is non-zero (an atom whose value is
undefined is false); the parser records a warning for each.
"""

import re
import warnings
from dataclasses import dataclass, field
from typing import Tuple

from .ast import (And, BinOp, Call, Compare, Const, Iff, Implies, Neg, Not, Num, Or, Pow, Quant, Var,
                  free_vars, pretty, walk)
from .signature import FUNCTIONS, LEVELS, REAL_POWER_LEVEL, admits

KEYWORDS = {"and", "or", "not", "implies", "iff", "exists", "forall", "true", "false"}
DECL_WORDS = {"param", "data", "level", "name"}
RELOPS = ("<=", ">=", "<", ">", "=")

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<num>(?:\d+\.\d+|\d+|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|[<>=+\-*/^(),.;])
""", re.VERBOSE)


class DslError(ValueError):
    def __init__(self, message, pos=None, source=None):
        self.pos = pos
        if pos is not None and source is not None:
            line = source.count("\n", 0, pos) + 1
            col = pos - (source.rfind("\n", 0, pos) + 1) + 1
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)


class DslSyntaxError(DslError):
    pass


class DslSignatureError(DslError):
    pass


class DslScopeError(DslError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(src):
    out = []
    i = 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if m is None:
            raise DslSyntaxError(f"unexpected character {src[i]!r}", i, src)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), i))
        i = m.end()
    out.append(Token("eof", "", len(src)))
    return out


@dataclass(frozen=True)
class Formula:
    root: object
    params: Tuple[str, ...]
    data: Tuple[str, ...]
    level: str
    name: str = "formula"
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    def pretty(self):
        return pretty(self.root)

    def source(self):
        """Declarations plus the printed formula; parses back to the same formula."""
        lines = [f"name {self.name};"]
        if self.params:
            lines.append("param " + ", ".join(self.params) + ";")
        if self.data:
            lines.append("data " + ", ".join(self.data) + ";")
        lines.append(f"level {self.level};")
        lines.append(self.pretty())
        return "\n".join(lines) + "\n"


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    # token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def at(self, *texts):
        t = self.tok
        return t.kind in ("op", "ident") and t.text in texts

    def take(self, text=None, kind=None):
        t = self.tok
        if text is not None and t.text != text:
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        if kind is not None and t.kind != kind:
            self.error(f"expected {kind}, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    def error(self, msg, pos=None):
        raise DslSyntaxError(msg, self.tok.pos if pos is None else pos, self.src)

    def ident(self):
        t = self.take(kind="ident")
        if t.text in KEYWORDS:
            self.error(f"keyword {t.text!r} used as a name", t.pos)
        return t.text

    # declarations
    def declarations(self):
        params, data, level, name = [], [], None, None
        while self.tok.kind == "ident" and self.tok.text in DECL_WORDS and self._decl_ahead():
            word = self.take().text
            if word in ("param", "data"):
                names = [self.ident()]
                while self.at(","):
                    self.take(",")
                    names.append(self.ident())
                (params if word == "param" else data).extend(names)
            elif word == "level":
                t = self.take(kind="ident")
                if t.text not in LEVELS:
                    self.error(f"unknown level {t.text!r}; expected one of {', '.join(LEVELS)}", t.pos)
                level = t.text
            else:
                name = self.take(kind="ident").text
            self.take(";")
        return params, data, level, name

    def _decl_ahead(self):
        nxt = self.toks[self.i + 1]
        return nxt.kind == "ident"

    # formulas
    def formula(self):
        left = self.implies()
        if self.at("iff"):
            self.take()
            return Iff(left, self.formula())
        return left

    def implies(self):
        left = self.disj()
        if self.at("implies"):
            self.take()
            return Implies(left, self.implies())
        return left

    def disj(self):
        left = self.conj()
        while self.at("or"):
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.at("and"):
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        t = self.tok
        if t.kind == "ident" and t.text == "not":
            self.take()
            return Not(self.unary())
        if t.kind == "ident" and t.text in ("exists", "forall"):
            self.take()
            names = [self.ident()]
            while self.at(","):
                self.take(",")
                names.append(self.ident())
            self.take(".")
            return Quant(t.text, tuple(names), self.formula())
        if t.kind == "ident" and t.text in ("true", "false"):
            self.take()
            return Const(t.text == "true")
        if self.at("("):
            save = self.i
            try:
                return self.comparison()
            except DslSyntaxError:
                self.i = save
            self.take("(")
            inner = self.formula()
            self.take(")")
            return inner
        return self.comparison()

    def comparison(self):
        left = self.expr()
        if not self.at(*RELOPS):
            self.error(f"expected a comparison, found {self.tok.text or 'end of input'!r}")
        atoms = []
        while self.at(*RELOPS):
            op = self.take().text
            right = self.expr()
            atoms.append(Compare(op, left, right))
            left = right
        out = atoms[0]
        for a in atoms[1:]:
            out = And(out, a)
        return out

    # terms
    def expr(self):
        left = self.term()
        while self.at("+", "-"):
            op = self.take().text
            left = BinOp(op, left, self.term())
        return left

    def term(self):
        left = self.factor()
        while self.at("*", "/"):
            op = self.take().text
            left = BinOp(op, left, self.factor())
        return left

    def factor(self):
        if self.at("-"):
            self.take()
            return Neg(self.factor())
        if self.at("+"):
            self.take()
            return self.factor()
        return self.power()

    def power(self):
        base = self.primary()
        if self.at("^"):
            self.take()
            return Pow(base, self.factor())
        return base

    def primary(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            return Num(float(t.text))
        if t.kind == "ident":
            name = self.ident()
            if self.at("("):
                self.take("(")
                args = [self.expr()]
                while self.at(","):
                    self.take(",")
                    args.append(self.expr())
                self.take(")")
                return _CallAt(name, tuple(args), t.pos)
            return Var(name)
        if self.at("("):
            self.take("(")
            e = self.expr()
            self.take(")")
            return e
        self.error(f"unexpected {t.text or 'end of input'!r}")


class _CallAt(Call):
    """Call node remembering its source position until validation."""

    def __init__(self, fn, args, pos):
        super().__init__(fn, args)
        object.__setattr__(self, "_pos", pos)


def _strip(node):
    """Replace position-carrying nodes by plain ones."""
    if isinstance(node, Call):
        return Call(node.fn, tuple(_strip(a) for a in node.args))
    if isinstance(node, (Num, Var, Const)):
        return node
    if isinstance(node, (Neg, Not)):
        return type(node)(_strip(node.arg))
    if isinstance(node, (BinOp, Compare)):
        return type(node)(node.op, _strip(node.left), _strip(node.right))
    if isinstance(node, (And, Or, Implies, Iff)):
        return type(node)(_strip(node.left), _strip(node.right))
    if isinstance(node, Pow):
        return Pow(_strip(node.base), _strip(node.exp))
    if isinstance(node, Quant):
        return Quant(node.kind, node.vars, _strip(node.body))
    raise TypeError(node)


def _is_integer_literal(node):
    if isinstance(node, Neg):
        return _is_integer_literal(node.arg)
    return isinstance(node, Num) and float(node.value).is_integer()


def required_level(root):
    """Minimal signature level admitting every symbol in the tree."""
    need = "R_alg"
    for node in walk(root):
        lvl = None
        if isinstance(node, Call):
            lvl = FUNCTIONS[node.fn][1]
        elif isinstance(node, Pow) and not _is_integer_literal(node.exp):
            lvl = REAL_POWER_LEVEL
        if lvl is not None and LEVELS.index(lvl) > LEVELS.index(need):
            need = lvl
    return need


def _validate(root, params, data, level, src):
    msgs = []
    for node in walk(root):
        pos = getattr(node, "_pos", None)
        if isinstance(node, Call):
            if node.fn not in FUNCTIONS:
                raise DslSignatureError(f"unknown function symbol {node.fn!r}", pos, src)
            arity, lvl = FUNCTIONS[node.fn]
            if len(node.args) != arity:
                raise DslSignatureError(f"{node.fn} takes {arity} argument(s), got {len(node.args)}", pos, src)
            if not admits(level, lvl):
                raise DslSignatureError(f"{node.fn} requires {lvl}", pos, src)
        elif isinstance(node, Pow) and not _is_integer_literal(node.exp):
            if not admits(level, REAL_POWER_LEVEL):
                raise DslSignatureError(f"non-integer exponent in {pretty(_strip(node))} requires {REAL_POWER_LEVEL}",
                                        None, src)
        elif isinstance(node, Quant):
            for v in node.vars:
                if v in params:
                    raise DslScopeError(f"quantified parameter {v!r}: parameters must stay free", None, src)
        elif isinstance(node, BinOp) and node.op == "/":
            msgs.append(f"division guard: {pretty(_strip(node.right))} != 0")
    overlap = set(params) & set(data)
    if overlap:
        raise DslScopeError(f"variables declared both param and data: {sorted(overlap)}")
    undeclared = free_vars(root) - set(params) - set(data)
    if undeclared:
        raise DslScopeError(f"undeclared variable(s): {', '.join(sorted(undeclared))}")
    return msgs


def parse(source, params=(), data=(), level=None, name=None) -> Formula:
    """Parse a formula file or bare formula text.

    Declarations in the text are merged with the keyword arguments; the
    keyword ``level`` overrides the file's level.  The default level is R_alg.
    """
    p = _Parser(source)
    dparams, ddata, dlevel, dname = p.declarations()
    root = p.formula()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r} after the formula")
    params = tuple(dict.fromkeys(list(dparams) + list(params)))
    data = tuple(dict.fromkeys(list(ddata) + list(data)))
    level = level or dlevel or "R_alg"
    if level not in LEVELS:
        raise DslError(f"unknown level {level!r}; expected one of {', '.join(LEVELS)}")
    msgs = _validate(root, params, data, level, source)
    for m in msgs:
        warnings.warn(m, stacklevel=2)
    return Formula(_strip(root), params, data, level, name or dname or "formula", tuple(msgs))


def parse_file(path, level=None) -> Formula:
    from pathlib import Path
    path = Path(path)
    src = path.read_text(encoding="utf-8")
    f = parse(src, level=level)
    if f.name == "formula":
        f = Formula(f.root, f.params, f.data, f.level, path.stem, f.warnings)
    return f
