"""Point sets, traces and the trace primitive shared by every engine.

A *trace* is the subset of a fixed, indexed point set picked out by one member
of a family, stored as a Python ``int`` whose bit ``i`` is set iff point ``i``
belongs to the set.  Bulk computations go through :func:`pack_rows`, which
packs boolean membership matrices into rows of ``uint64`` words (one word for
``n <= 64``, ``ceil(n / 64)`` words beyond that) so that deduplication is a
single ``np.unique`` call.

Subgraph conventions.  For a function ``f`` the default subgraph rule is the
classical one,

    (x, t) in subgraph(f)  iff  0 <= t <= f(x)  or  0 > t > f(x),

so ``(x, 0)`` lies in the subgraph exactly when ``f(x) >= 0``.  The
Box-Cox family ``T_lambda`` uses the closed rule
``0 <= t <= f(x) or 0 >= t >= f(x)`` instead (see :mod:`vclab.families`); its
dual sets are computed for that rule in :mod:`vclab.dual_interval`.

The empty trace is counted like any other realized trace.
"""

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

SUBGRAPH_RULES = ("r7", "closed")


class ContractViolation(ValueError):
    """Arguments violate an operation's preconditions."""


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise ContractViolation("points must be a list of equal-length vectors")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def __getitem__(self, i):
        return self.points[i]

    def prefix(self, k: int) -> "PointSet":
        return PointSet(self.points[:k])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{j}" for j in range(self.dim)])
            for row in self.points:
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path) -> "PointSet":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], rows[1:]
        if header != [f"x{j}" for j in range(len(header))]:
            raise ContractViolation(f"bad PointSet header {header!r}")
        return cls(np.array([[float(v) for v in r] for r in body], dtype=float).reshape(-1, len(header)))


@dataclass(frozen=True)
class Trace:
    bits: int
    n: int

    @classmethod
    def from_bools(cls, flags) -> "Trace":
        flags = np.asarray(flags, dtype=bool)
        return cls(int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little"), len(flags))

    @classmethod
    def from_string(cls, s: str) -> "Trace":
        if set(s) - {"0", "1"}:
            raise ContractViolation(f"trace string must be 0/1, got {s!r}")
        return cls(sum(1 << i for i, ch in enumerate(s) if ch == "1"), len(s))

    def to_string(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.n))

    def members(self):
        return [i for i in range(self.n) if (self.bits >> i) & 1]

    def __str__(self):
        return self.to_string()


@dataclass(frozen=True)
class TraceSet:
    traces: frozenset
    n: int

    def __len__(self):
        return len(self.traces)

    def __iter__(self):
        for b in sorted(self.traces):
            yield Trace(b, self.n)

    def __contains__(self, item):
        if isinstance(item, Trace):
            return item.n == self.n and item.bits in self.traces
        if isinstance(item, str):
            return Trace.from_string(item).bits in self.traces
        return int(item) in self.traces

    def strings(self):
        return sorted(t.to_string() for t in self)

    def union(self, other: "TraceSet") -> "TraceSet":
        if other.n != self.n:
            raise ContractViolation("trace sets over different point counts")
        return TraceSet(self.traces | other.traces, self.n)

    @classmethod
    def empty(cls, n: int) -> "TraceSet":
        return cls(frozenset(), n)

    @classmethod
    def from_rows(cls, rows: np.ndarray, n: int) -> "TraceSet":
        rows = np.ascontiguousarray(rows, dtype="<u8")
        if rows.ndim == 1:
            rows = rows[:, None]
        return cls(frozenset(int.from_bytes(r.tobytes(), "little") for r in rows), n)


def n_words(n: int) -> int:
    return max(1, (n + 63) // 64)


def pack_rows(member: np.ndarray) -> np.ndarray:
    """Pack a (P, n) boolean matrix into (P, ceil(n/64)) little-endian uint64 words."""
    member = np.asarray(member, dtype=bool)
    p, n = member.shape
    w = n_words(n)
    packed = np.packbits(member, axis=1, bitorder="little")
    out = np.zeros((p, w * 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view("<u8")


def unique_rows(words: np.ndarray) -> np.ndarray:
    if words.shape[1] == 1:
        return np.unique(words[:, 0])[:, None]
    return np.unique(words, axis=0)


def subgraph_member(values, t, rule: str = "r7"):
    """Vectorised subgraph test for function values ``f(x)`` against heights ``t``."""
    values = np.asarray(values, dtype=float)
    t = np.asarray(t, dtype=float)
    upper = (0.0 <= t) & (t <= values)
    if rule == "r7":
        return upper | ((0.0 > t) & (t > values))
    if rule == "closed":
        return upper | ((0.0 >= t) & (t >= values))
    raise ContractViolation(f"unknown subgraph rule {rule!r}")


@dataclass(frozen=True, eq=False)
class FamilyHandle:
    """A parametric family of sets in R^point_dim.

    ``member_batch(P, X)`` maps a (p, param_dim) parameter matrix and an
    (n, point_dim) point matrix to a (p, n) boolean matrix.  Function classes
    also carry ``evaluator_batch(P, X)`` on the input coordinates (all but the
    last point coordinate, which is the subgraph height ``t``).
    """

    name: str
    kind: str
    param_dim: int
    point_dim: int
    member_batch: Callable
    evaluator_batch: Optional[Callable] = None
    subgraph_rule: str = "r7"
    param_box: Optional[np.ndarray] = None
    param_check: Optional[Callable] = None
    density_bound: Optional[int] = None
    sample_params: Optional[Callable] = None
    sample_points: Optional[Callable] = None
    exact_params: Optional[Callable] = None
    vc_search_complete: bool = False
    descriptor: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def input_dim(self) -> int:
        return self.point_dim - 1

    @property
    def is_function_class(self) -> bool:
        return self.evaluator_batch is not None

    def check_params(self, params) -> np.ndarray:
        p = np.asarray(params, dtype=float)
        if p.ndim == 1:
            p = p[None, :]
        if p.ndim != 2 or p.shape[1] != self.param_dim:
            raise ContractViolation(
                f"{self.name}: expected parameter vectors of length {self.param_dim}, got shape {np.shape(params)}")
        if not np.all(np.isfinite(p)):
            raise ContractViolation(f"{self.name}: non-finite parameters")
        if self.param_box is not None:
            lo, hi = self.param_box[:, 0], self.param_box[:, 1]
            if np.any(p < lo) or np.any(p > hi):
                raise ContractViolation(f"{self.name}: parameters outside the parameter domain")
        if self.param_check is not None:
            ok = np.asarray(self.param_check(p), dtype=bool)
            if not np.all(ok):
                bad = p[~ok][0]
                raise ContractViolation(f"{self.name}: invalid parameters {bad.tolist()}")
        return p

    def check_points(self, points) -> np.ndarray:
        x = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=float)
        if x.ndim == 1:
            x = x[:, None] if self.point_dim == 1 else x[None, :]
        if x.shape[1] != self.point_dim:
            raise ContractViolation(
                f"{self.name}: points must have dimension {self.point_dim}, got {x.shape[1]}")
        return x

    def membership(self, params, point) -> bool:
        p = self.check_params(params)
        x = self.check_points(np.asarray(point, dtype=float).reshape(1, -1))
        return bool(self.member_batch(p, x)[0, 0])

    def evaluate(self, params, x) -> np.ndarray:
        if self.evaluator_batch is None:
            raise ContractViolation(f"{self.name} is not a function class")
        p = self.check_params(params)
        xs = np.asarray(x, dtype=float)
        if xs.ndim <= 1:
            xs = xs.reshape(-1, self.input_dim)
        return self.evaluator_batch(p, xs)[0]


def trace(family: FamilyHandle, params, pts: PointSet) -> Trace:
    p = family.check_params(params)
    if len(p) != 1:
        raise ContractViolation("trace takes a single parameter vector")
    x = family.check_points(pts)
    if len(x) == 0:
        raise ContractViolation("empty point set")
    return Trace.from_bools(family.member_batch(p, x)[0])


def collect_traces(family: FamilyHandle, param_list, pts: PointSet, chunk: int = 4096) -> TraceSet:
    x = family.check_points(pts)
    n = len(x)
    if param_list is None or len(param_list) == 0:
        return TraceSet.empty(n)
    p = family.check_params(param_list)
    rows = [unique_rows(pack_rows(family.member_batch(p[i:i + chunk], x)))
            for i in range(0, len(p), chunk)]
    return TraceSet.from_rows(unique_rows(np.concatenate(rows)), n)


def trace_rows(family: FamilyHandle, param_list, pts, chunk: int = 4096) -> np.ndarray:
    """Like :func:`collect_traces` but returns the deduplicated packed rows."""
    x = family.check_points(pts)
    p = family.check_params(param_list)
    rows = [unique_rows(pack_rows(family.member_batch(p[i:i + chunk], x)))
            for i in range(0, len(p), chunk)]
    return unique_rows(np.concatenate(rows))
