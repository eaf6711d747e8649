"""First-order formula language, parameter-count certificates and approximate evaluation."""

from .ast import pretty
from .certify import Certificate, certify
from .evaluate import QuantifierBox, eval_formula
from .parser import DslError, DslScopeError, DslSignatureError, DslSyntaxError, Formula, parse, parse_file
from .signature import LEVELS, symbols
from .twins import TWINS, link_formula_source, load_twin, resolve_formula

__all__ = ["Certificate", "certify", "QuantifierBox", "eval_formula", "DslError", "DslScopeError",
           "DslSignatureError", "DslSyntaxError", "Formula", "parse", "parse_file", "LEVELS", "symbols",
           "TWINS", "link_formula_source", "load_twin", "resolve_formula", "pretty"]
