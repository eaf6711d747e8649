"""Shipped formula files and their built-in family twins."""

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from ..families import link_tail_constants, make_family
from .parser import parse, parse_file


def link_formula_source(k: int, d: int) -> str:
    """Subgraph formula of ``eta_k(x^T beta)`` with tail constants as free parameters."""
    a = [f"a{i}" for i in range(1, k + 1)]
    b = [f"b{i}" for i in range(1, k + 1)]
    beta = [f"beta{j}" for j in range(1, d + 1)]
    data = [f"x{j}" for j in range(1, d + 1)]
    params = a + b + ["c1", "ck", "B1", "Bk"] + beta
    u = " + ".join(f"{bj}*{xj}" for bj, xj in zip(beta, data))
    pieces = [f"(u <= a1 and w = B1*exp(c1*(u - a1)))"]
    for i in range(1, k):
        pieces.append(f"(a{i} < u and u <= a{i + 1} and w = b{i} + (b{i + 1} - b{i})*(u - a{i})/(a{i + 1} - a{i}))")
    pieces.append(f"(a{k} < u and w = 1 - Bk*exp(-ck*(u - a{k})))")
    body = "\n    or ".join(pieces)
    return (f"# subgraph of the piecewise link eta_{k} composed with x^T beta, d' = {d}\n"
            f"name eta{k}_subgraph;\n"
            f"param {', '.join(params)};\n"
            f"data {', '.join(data)}, t;\n"
            f"level R_exp;\n\n"
            f"exists u, w . (u = {u})\n"
            f"  and ({body})\n"
            f"  and ((0 <= t and t <= w) or (0 > t and t > w))\n")


def _link_params(k):
    def to_formula(P):
        P = np.atleast_2d(P)
        out = []
        for p in P:
            a, b, beta = p[:k], p[k:2 * k], p[2 * k:]
            B1, c1, Bk, ck = link_tail_constants(a, b)
            out.append(np.concatenate([a, b, [c1, ck, B1, Bk], beta]))
        return np.array(out)
    return to_formula


def _identity(P):
    return np.atleast_2d(P)


@dataclass(frozen=True)
class Twin:
    filename: str
    descriptor: dict
    expected_d: int
    to_formula_params: Callable = _identity


TWINS = {
    "semispace": Twin("semispace.fml", {"family": "halfplane", "fixed": {"variant": "all"}}, 3),
    "xlambda": Twin("xlambda.fml", {"family": "xlambda", "fixed": {}}, 1),
    "tlambda_subgraph": Twin("tlambda_subgraph.fml", {"family": "tlambda", "fixed": {}}, 1),
    "eta3_subgraph": Twin("eta3_subgraph.fml", {"family": "piecewise_link", "fixed": {"k": 3, "d": 2}}, 12,
                          _link_params(3)),
    "gaussian_link": Twin("gaussian_link.fml", {"family": "gaussian_link", "fixed": {"d": 2}}, 4),
}


def formulas_dir() -> Path:
    return Path(str(resources.files("vclab") / "formulas"))


def shipped_path(name: str) -> Path:
    return formulas_dir() / TWINS[name].filename


def load_twin(name: str):
    """(formula, family, twin) for a shipped formula name."""
    tw = TWINS[name]
    return parse_file(shipped_path(name)), make_family(tw.descriptor), tw


def resolve_formula(path_or_name, level=None):
    """Parse a formula file path, or a shipped formula by name."""
    p = Path(str(path_or_name))
    if p.exists():
        return parse_file(p, level=level)
    stem = p.stem
    if stem in TWINS:
        return parse_file(shipped_path(stem), level=level)
    raise FileNotFoundError(f"no formula file {path_or_name!r} and no shipped formula of that name")


def parse_text(src, **kw):
    return parse(src, **kw)
