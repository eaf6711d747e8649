"""Formula syntax trees and a fully parenthesised printer.

Terms: ``Num``, ``Var``, ``Neg``, ``BinOp`` (+ - * /), ``Pow``, ``Call``.
Formulas: ``Const``, ``Compare``, ``Not``, ``And``, ``Or``, ``Implies``,
``Iff``, ``Quant``.  Chained comparisons are split into conjunctions by the
parser, so the printer's output re-parses to an identical tree.
"""

from dataclasses import dataclass
from typing import Tuple


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: object


@dataclass(frozen=True)
class Call:
    fn: str
    args: Tuple


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Compare:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Iff:
    left: object
    right: object


@dataclass(frozen=True)
class Quant:
    kind: str  # "exists" | "forall"
    vars: Tuple[str, ...]
    body: object


TERMS = (Num, Var, Neg, BinOp, Pow, Call)
_CONNECTIVES = {And: "and", Or: "or", Implies: "implies", Iff: "iff"}


def _num(v):
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def pretty(node) -> str:
    if isinstance(node, Num):
        return _num(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{pretty(node.arg)})"
    if isinstance(node, BinOp):
        return f"({pretty(node.left)} {node.op} {pretty(node.right)})"
    if isinstance(node, Pow):
        return f"({pretty(node.base)} ^ {pretty(node.exp)})"
    if isinstance(node, Call):
        return f"{node.fn}(" + ", ".join(pretty(a) for a in node.args) + ")"
    if isinstance(node, Const):
        return "true" if node.value else "false"
    if isinstance(node, Compare):
        return f"({pretty(node.left)} {node.op} {pretty(node.right)})"
    if isinstance(node, Not):
        return f"(not {pretty(node.arg)})"
    if type(node) in _CONNECTIVES:
        return f"({pretty(node.left)} {_CONNECTIVES[type(node)]} {pretty(node.right)})"
    if isinstance(node, Quant):
        return f"({node.kind} {', '.join(node.vars)} . {pretty(node.body)})"
    raise TypeError(f"not a formula node: {node!r}")


def children(node):
    if isinstance(node, (Num, Var, Const)):
        return ()
    if isinstance(node, (Neg, Not)):
        return (node.arg,)
    if isinstance(node, (BinOp, Compare, And, Or, Implies, Iff)):
        return (node.left, node.right)
    if isinstance(node, Pow):
        return (node.base, node.exp)
    if isinstance(node, Call):
        return tuple(node.args)
    if isinstance(node, Quant):
        return (node.body,)
    raise TypeError(f"not a formula node: {node!r}")


def walk(node):
    yield node
    for c in children(node):
        yield from walk(c)


def free_vars(node, bound=frozenset()):
    if isinstance(node, Var):
        return set() if node.name in bound else {node.name}
    if isinstance(node, Quant):
        return free_vars(node.body, bound | set(node.vars))
    out = set()
    for c in children(node):
        out |= free_vars(c, bound)
    return out
