"""Shatter functions, VC-density and metric entropy of parametric and definable families."""

from .core import ContractViolation, PointSet, Trace, TraceSet, collect_traces, trace
from .families import make_family
from .intervals import IntervalUnion
from .seeding import derive_rng, resolve_seed

__version__ = "0.1.0"

__all__ = ["ContractViolation", "PointSet", "Trace", "TraceSet", "collect_traces", "trace", "make_family",
           "IntervalUnion", "derive_rng", "resolve_seed", "__version__"]
