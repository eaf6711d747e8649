"""Approximate truth of a formula at given data and parameter values.

Evaluation is vectorised over a batch of cases.  Partial operations (division
by zero, ``ln`` or ``sqrt`` of a negative, real powers of a negative base)
give NaN, and an atom with a NaN side is false.  ``=`` holds within a relative
tolerance ``eq_tol``.

Quantifiers range over a bounded box.  For ``exists`` the evaluator first
tries witnesses read off equality atoms that isolate a bound variable
(``v = e``, ``exp(v) = e``, ``ln(v) = e``, either side), enumerating all such
candidates; a variable with no usable equation is searched on a uniform grid
over the box.  ``forall`` is checked on the grid only.  This is an
approximation and is meant for cross-checking formulas against built-in
membership predicates, not for deciding truth in general.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from ..core import ContractViolation
from ..families import normal_cdf
from .ast import (And, BinOp, Call, Compare, Const, Iff, Implies, Neg, Not, Num, Or, Pow, Quant, Var,
                  free_vars, walk)
from .parser import Formula


@dataclass(frozen=True)
class QuantifierBox:
    lo: float = -10.0
    hi: float = 10.0
    resolution: int = 2001

    def grid(self):
        return np.linspace(self.lo, self.hi, self.resolution)


def _restricted(fn):
    def g(x):
        return np.where(np.abs(x) <= 1, fn(np.clip(x, -1, 1)), 0.0)
    return g


def _erf(x):
    from scipy.special import erf
    return erf(x)


_FUNCS = {
    "sqrt": lambda x: np.sqrt(np.where(x >= 0, x, np.nan)),
    "abs": np.abs,
    "min": np.minimum,
    "max": np.maximum,
    "exp": np.exp,
    "ln": lambda x: np.log(np.where(x > 0, x, np.nan)),
    "log": lambda x: np.log(np.where(x > 0, x, np.nan)),
    "sin_restricted": _restricted(np.sin),
    "cos_restricted": _restricted(np.cos),
    "atan_restricted": _restricted(np.arctan),
    "Phi": normal_cdf,
    "erf": _erf,
}


def _pow(base, ex, integer):
    if integer:
        return np.power(base, ex)
    return np.where(base > 0, np.power(np.abs(base), ex), np.where((base == 0) & (ex > 0), 0.0, np.nan))


def eval_term(node, env):
    with np.errstate(all="ignore"):
        if isinstance(node, Num):
            return np.float64(node.value)
        if isinstance(node, Var):
            return env[node.name]
        if isinstance(node, Neg):
            return -eval_term(node.arg, env)
        if isinstance(node, BinOp):
            a, b = eval_term(node.left, env), eval_term(node.right, env)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            return np.where(b != 0, a / np.where(b != 0, b, 1.0), np.nan)
        if isinstance(node, Pow):
            ex = node.exp
            integer = isinstance(ex, Num) and float(ex.value).is_integer() or (
                isinstance(ex, Neg) and isinstance(ex.arg, Num) and float(ex.arg.value).is_integer())
            return _pow(eval_term(node.base, env), eval_term(ex, env), integer)
        if isinstance(node, Call):
            return _FUNCS[node.fn](*(eval_term(a, env) for a in node.args))
    raise TypeError(f"not a term: {node!r}")


def _compare(op, a, b, eq_tol):
    ok = np.isfinite(a) & np.isfinite(b)
    with np.errstate(invalid="ignore"):
        if op == "<":
            r = a < b
        elif op == "<=":
            r = a <= b
        elif op == ">":
            r = a > b
        elif op == ">=":
            r = a >= b
        else:
            r = np.abs(a - b) <= eq_tol * np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return ok & r


# ---------------------------------------------------------------------------
# witnesses for existential blocks

def _isolating(eq, v):
    """Candidate value expression for ``v`` from the equality ``eq``, or None."""
    for lhs, rhs in ((eq.left, eq.right), (eq.right, eq.left)):
        if v in free_vars(rhs):
            continue
        if isinstance(lhs, Var) and lhs.name == v:
            return ("id", rhs)
        if isinstance(lhs, Call) and len(lhs.args) == 1 and isinstance(lhs.args[0], Var) and lhs.args[0].name == v:
            if lhs.fn == "exp":
                return ("ln", rhs)
            if lhs.fn in ("ln", "log"):
                return ("exp", rhs)
    return None


def _positive_equalities(node, negated=False):
    """Equality atoms that occur under an even number of negations (outside nested quantifiers)."""
    if isinstance(node, Compare):
        if node.op == "=" and not negated:
            yield node
    elif isinstance(node, Not):
        yield from _positive_equalities(node.arg, not negated)
    elif isinstance(node, (And, Or)):
        yield from _positive_equalities(node.left, negated)
        yield from _positive_equalities(node.right, negated)
    elif isinstance(node, Implies):
        yield from _positive_equalities(node.left, not negated)
        yield from _positive_equalities(node.right, negated)


def _flatten_exists(q):
    vars_, body = list(q.vars), q.body
    while isinstance(body, Quant) and body.kind == "exists":
        vars_.extend(body.vars)
        body = body.body
    return vars_, body


class _Evaluator:
    def __init__(self, box: QuantifierBox, eq_tol: float, batch: int):
        self.box = box
        self.eq_tol = eq_tol
        self.batch = batch

    def truth(self, node, env):
        if isinstance(node, Const):
            return np.full(self.batch, node.value)
        if isinstance(node, Compare):
            a = np.broadcast_to(eval_term(node.left, env), (self.batch,))
            b = np.broadcast_to(eval_term(node.right, env), (self.batch,))
            return _compare(node.op, a, b, self.eq_tol)
        if isinstance(node, Not):
            return ~self.truth(node.arg, env)
        if isinstance(node, And):
            return self.truth(node.left, env) & self.truth(node.right, env)
        if isinstance(node, Or):
            return self.truth(node.left, env) | self.truth(node.right, env)
        if isinstance(node, Implies):
            return ~self.truth(node.left, env) | self.truth(node.right, env)
        if isinstance(node, Iff):
            return self.truth(node.left, env) == self.truth(node.right, env)
        if isinstance(node, Quant):
            if node.kind == "exists":
                vars_, body = _flatten_exists(node)
                return self.exists(vars_, body, env)
            out = np.ones(self.batch, dtype=bool)
            for combo in itertools.product(self.box.grid(), repeat=len(node.vars)):
                e = dict(env)
                e.update({v: np.full(self.batch, val) for v, val in zip(node.vars, combo)})
                out &= self.truth(node.body, e)
            return out
        raise TypeError(f"not a formula: {node!r}")

    def exists(self, vars_, body, env):
        if not vars_:
            return self.truth(body, env)
        eqs = list(_positive_equalities(body))
        known = set(env)
        for v in vars_:
            cands = []
            for eq in eqs:
                iso = _isolating(eq, v)
                if iso is not None and free_vars(iso[1]) <= known:
                    cands.append(iso)
            if cands:
                rest = [w for w in vars_ if w != v]
                out = np.zeros(self.batch, dtype=bool)
                for how, expr in cands:
                    val = np.broadcast_to(eval_term(expr, env), (self.batch,)).astype(float)
                    with np.errstate(all="ignore"):
                        if how == "ln":
                            val = np.log(np.where(val > 0, val, np.nan))
                        elif how == "exp":
                            val = np.exp(val)
                    e = dict(env)
                    e[v] = val
                    out |= self.exists(rest, body, e)
                return out
        v, rest = vars_[0], vars_[1:]
        out = np.zeros(self.batch, dtype=bool)
        for val in self.box.grid():
            e = dict(env)
            e[v] = np.full(self.batch, val)
            out |= self.exists(rest, body, e)
        return out


def has_quantifiers(f: Formula):
    return any(isinstance(n, Quant) for n in walk(f.root))


def eval_formula(f: Formula, data, params, box: QuantifierBox = None, eq_tol: float = 1e-9):
    """Truth values for a batch of cases.

    ``data`` is (batch, len(f.data)) or one point; ``params`` is
    (batch, len(f.params)) or one vector (broadcast over the batch).
    """
    if has_quantifiers(f) and box is None:
        raise ContractViolation("formula has quantifiers: a bounded quantifier box is required")
    box = box or QuantifierBox()
    X = np.atleast_2d(np.asarray(data, dtype=float))
    P = np.atleast_2d(np.asarray(params, dtype=float)) if len(f.params) else np.zeros((1, 0))
    if X.shape[1] != len(f.data):
        raise ContractViolation(f"expected {len(f.data)} data coordinates, got {X.shape[1]}")
    if P.shape[1] != len(f.params):
        raise ContractViolation(f"expected {len(f.params)} parameters, got {P.shape[1]}")
    batch = max(len(X), len(P))
    if len(X) not in (1, batch) or len(P) not in (1, batch):
        raise ContractViolation("data and parameter batches must have equal length or length 1")
    env = {name: np.broadcast_to(X[:, j], (batch,)) for j, name in enumerate(f.data)}
    env.update({name: np.broadcast_to(P[:, j], (batch,)) for j, name in enumerate(f.params)})
    out = _Evaluator(box, eq_tol, batch).truth(f.root, env)
    return out if batch > 1 or np.ndim(data) > 1 else bool(out[0])
