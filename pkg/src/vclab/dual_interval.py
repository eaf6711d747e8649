"""Dual sets of the Box-Cox subgraphs and exact trace counting on the lambda line.

For a point ``(x, t)`` with ``x > 0`` the dual set

    T_dual(x, t) = {lam != 0 : (x, t) in S_lam}

is one of eight shapes decided by the signs of ``x - 1``, ``t`` and
``t - ln x``, because ``h(lam) = (x**lam - 1) / lam`` is strictly increasing
in ``lam`` with ``h(0) = ln x`` by continuity:

=====  ===================  =====================================
case   condition            dual set
=====  ===================  =====================================
0      x > 1, t >= ln x     [c, inf)
1      x > 1, 0 < t < ln x  [c, 0) U (0, inf)
2      x > 1, t = 0         R \\ {0}
3      x > 1, t < 0         empty
4      x < 1, t > 0         empty
5      x < 1, t = 0         R \\ {0}
6      x < 1, ln x < t < 0  (-inf, 0) U (0, d]
7      x < 1, t <= ln x     (-inf, d]
8      x = 1                R \\ {0} if t = 0, else empty
=====  ===================  =====================================

``c`` and ``d`` solve ``h(lam) = t`` and are found by bisection.  Roots
within ``1e-10`` of zero are snapped so that the set excludes ``lam = 0``
(e.g. ``[c, inf)`` becomes ``(0, inf)``); the unsnapped root is kept in
:class:`DualCaseResult`.

Walking ``lam`` across the real line, a trace changes only at the finite
endpoints of the dual sets, so sampling every endpoint, every midpoint
between consecutive endpoints and two far sentinels visits every atom of
the boolean algebra they generate.  Constant dual sets (empty or R minus 0)
are kept in the count; they cannot add traces.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import ContractViolation, PointSet, TraceSet, pack_rows, unique_rows
from .intervals import INF, IntervalUnion

CASE_LABELS = (
    "x>1,t>=ln(x)",
    "x>1,0<t<ln(x)",
    "x>1,t=0",
    "x>1,t<0",
    "x<1,t>0",
    "x<1,t=0",
    "x<1,ln(x)<t<0",
    "x<1,t<=ln(x)",
    "x=1",
)
SNAP = 1e-10
_MAX_BISECT = 1100


def box_cox_h(lam, logx):
    """``(exp(lam * logx) - 1) / lam`` with the continuous value ``logx`` at ``lam = 0``."""
    lam = np.asarray(lam, dtype=float)
    logx = np.asarray(logx, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        z = lam * logx
        safe = np.where(z == 0, 1.0, z)
        return np.where(z == 0, logx, logx * (np.expm1(safe) / safe))


def classify(x, t):
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    logx = np.log(x)
    case = np.full(x.shape, 8, dtype=np.int64)
    gt, lt = x > 1, x < 1
    case[gt & (t >= logx)] = 0
    case[gt & (t > 0) & (t < logx)] = 1
    case[gt & (t == 0)] = 2
    case[gt & (t < 0)] = 3
    case[lt & (t > 0)] = 4
    case[lt & (t == 0)] = 5
    case[lt & (t < 0) & (t > logx)] = 6
    case[lt & (t <= logx)] = 7
    return case


def _bisect(logx, t, lo, hi, want_low):
    """Shrink brackets of ``h(lam) = t`` to adjacent doubles.

    Keeps ``h(lo) < t <= h(hi)`` when ``want_low`` is False (returns the
    smallest ``lam`` with ``h >= t``) and ``h(lo) <= t < h(hi)`` otherwise
    (returns the largest ``lam`` with ``h <= t``).
    """
    lo, hi = lo.copy(), hi.copy()
    active = np.ones(lo.shape, dtype=bool)
    for _ in range(_MAX_BISECT):
        if not active.any():
            break
        a = np.flatnonzero(active)
        mid = lo[a] + (hi[a] - lo[a]) / 2
        hm = box_cox_h(mid, logx[a])
        go_up = np.where(want_low[a], hm <= t[a], hm < t[a])
        lo[a] = np.where(go_up, mid, lo[a])
        hi[a] = np.where(go_up, hi[a], mid)
        nxt = lo[a] + (hi[a] - lo[a]) / 2
        done = (nxt == lo[a]) | (nxt == hi[a])
        active[a[done]] = False
    return np.where(want_low, lo, hi)


def solve_roots(x, t, case):
    """Finite root of ``h(lam) = t`` for the cases that have one (NaN elsewhere)."""
    logx = np.log(np.asarray(x, dtype=float))
    t = np.asarray(t, dtype=float)
    root = np.full(logx.shape, np.nan)
    for cs, positive, want_low in ((0, True, False), (1, False, False), (6, True, True), (7, False, True)):
        sel = np.flatnonzero(case == cs)
        if not len(sel):
            continue
        lx, tt = logx[sel], t[sel]
        exact = tt == lx
        far = np.full(len(sel), 1.0 if positive else -1.0)
        # grow the far end until it brackets the root
        for _ in range(1100):
            hf = box_cox_h(far, lx)
            if want_low:
                bad = (hf <= tt) if positive else (hf > tt)
            else:
                bad = (hf < tt) if positive else (hf >= tt)
            bad &= ~exact
            if not bad.any():
                break
            far[bad] *= 2
        zero = np.zeros(len(sel))
        lo, hi = (zero, far) if positive else (far, zero)
        r = _bisect(lx, tt, lo, hi, np.full(len(sel), want_low))
        root[sel] = np.where(exact, 0.0, r)
    return root


def _interval_arrays(case, root):
    """Per-point dual sets as padded arrays of at most two intervals."""
    n = len(case)
    lo = np.ones((n, 2))
    hi = np.zeros((n, 2))  # lo > hi encodes an empty slot
    lc = np.zeros((n, 2), dtype=bool)
    hc = np.zeros((n, 2), dtype=bool)
    snapped = np.where(np.abs(root) <= SNAP, 0.0, root)

    def put(mask, slot, a, b, ac, bc):
        lo[mask, slot] = np.broadcast_to(a, (n,))[mask]
        hi[mask, slot] = np.broadcast_to(b, (n,))[mask]
        lc[mask, slot], hc[mask, slot] = ac, bc

    full = (case == 2) | (case == 5)
    put(full, 0, -INF, 0.0, False, False)
    put(full, 1, 0.0, INF, False, False)
    # case 0: [c, inf), or (0, inf) after snapping
    m = case == 0
    put(m & (snapped > 0), 0, snapped, INF, True, False)
    put(m & (snapped == 0), 0, 0.0, INF, False, False)
    # case 1: [c, 0) U (0, inf)
    m = case == 1
    put(m & (snapped < 0), 0, snapped, 0.0, True, False)
    put(m, 1, 0.0, INF, False, False)
    # case 6: (-inf, 0) U (0, d]
    m = case == 6
    put(m, 0, -INF, 0.0, False, False)
    put(m & (snapped > 0), 1, 0.0, snapped, False, True)
    # case 7: (-inf, d], or (-inf, 0) after snapping
    m = case == 7
    put(m & (snapped < 0), 0, -INF, snapped, False, True)
    put(m & (snapped == 0), 0, -INF, 0.0, False, False)
    return lo, hi, lc, hc


@dataclass(frozen=True)
class DualCaseResult:
    case_id: int
    union: IntervalUnion
    c_or_d: Optional[float] = None

    @property
    def label(self):
        return CASE_LABELS[self.case_id]


@dataclass(frozen=True)
class DualBatch:
    """Dual sets of many points at once (vectorised form of :func:`tdual`)."""

    x: np.ndarray
    t: np.ndarray
    case: np.ndarray
    root: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    lc: np.ndarray
    hc: np.ndarray

    def __len__(self):
        return len(self.case)

    def contains(self, lam):
        """(len(lam), n) membership of each lambda in each dual set."""
        v = np.asarray(lam, dtype=float)[:, None, None]
        above = np.where(self.lc, v >= self.lo, v > self.lo)
        below = np.where(self.hc, v <= self.hi, v < self.hi)
        return np.any(above & below, axis=2)

    def union(self, i) -> IntervalUnion:
        ivs = [(self.lo[i, s], self.hi[i, s], self.lc[i, s], self.hc[i, s]) for s in range(2)
               if self.lo[i, s] <= self.hi[i, s]]
        return IntervalUnion(tuple(ivs))

    def result(self, i) -> DualCaseResult:
        r = self.root[i]
        return DualCaseResult(int(self.case[i]), self.union(i), None if np.isnan(r) else float(r))

    def subset(self, idx):
        return DualBatch(*(getattr(self, f)[idx] for f in ("x", "t", "case", "root", "lo", "hi", "lc", "hc")))


def tdual_batch(x, t) -> DualBatch:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if x.shape != t.shape:
        raise ContractViolation("x and t must have the same shape")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(t))):
        raise ContractViolation("non-finite input to tdual")
    if np.any(x <= 0):
        raise ContractViolation("tdual needs x > 0")
    case = classify(x, t)
    root = solve_roots(x, t, case)
    lo, hi, lc, hc = _interval_arrays(case, root)
    deg = case == 8
    if deg.any():
        z = deg & (t == 0)
        lo[z, 0], hi[z, 0], lo[z, 1], hi[z, 1] = -INF, 0.0, 0.0, INF
    return DualBatch(x, t, case, root, lo, hi, lc, hc)


def tdual(x: float, t: float) -> DualCaseResult:
    return tdual_batch([x], [t]).result(0)


def _sample_lambdas(endpoints):
    """Every finite endpoint, midpoints between consecutive breakpoints, sentinels; never 0."""
    bp = np.unique(np.concatenate([np.asarray(endpoints, dtype=float), [0.0]]))
    bp = bp[np.isfinite(bp)]
    big = float(np.max(np.abs(bp))) + 1.0
    mids = bp[:-1] + (bp[1:] - bp[:-1]) / 2
    lam = np.concatenate([bp, mids, [-big, big]])
    return lam[lam != 0]


def _batch_atom_rows(batch: DualBatch):
    ends = np.concatenate([batch.lo.ravel(), batch.hi.ravel()])
    lam = _sample_lambdas(ends[np.isfinite(ends)])
    return unique_rows(pack_rows(batch.contains(lam)))


def atom_traces(unions) -> TraceSet:
    """Traces realised as lambda sweeps R \\ {0}, for a list of dual sets.

    Accepts a list of :class:`IntervalUnion` (any number of pieces) or a
    :class:`DualBatch`.
    """
    if isinstance(unions, DualBatch):
        if len(unions) < 1:
            raise ContractViolation("atom_traces needs at least one set")
        return TraceSet.from_rows(_batch_atom_rows(unions), len(unions))
    unions = list(unions)
    if not unions:
        raise ContractViolation("atom_traces needs at least one set")
    ends = [e for u in unions for e in u.endpoints()]
    lam = _sample_lambdas(ends)
    member = np.column_stack([u.contains(lam) for u in unions])
    return TraceSet.from_rows(unique_rows(pack_rows(member)), len(unions))


@dataclass(frozen=True)
class Lemma1Result:
    n: int
    count: int
    bound: int
    bound_ok: bool
    cases: dict

    def to_record(self):
        return {"n": self.n, "count": self.count, "bound": self.bound, "bound_ok": self.bound_ok,
                "cases": self.cases}


def _as_xt(pts):
    arr = pts.points if isinstance(pts, PointSet) else np.asarray(pts, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ContractViolation("Lemma 1 points are (x, t) pairs")
    return arr[:, 0], arr[:, 1]


def _histogram(case):
    counts = np.bincount(case, minlength=len(CASE_LABELS))
    return {CASE_LABELS[i]: int(c) for i, c in enumerate(counts) if c}


def lemma1_check(pts) -> Lemma1Result:
    x, t = _as_xt(pts)
    batch = tdual_batch(x, t)
    count = len(_batch_atom_rows(batch))
    n = len(x)
    return Lemma1Result(n, count, n + 1, count <= n + 1, _histogram(batch.case))


def lemma1_counts(point_sets):
    """Trace counts for many point sets with one vectorised root solve."""
    arrays = [_as_xt(p) for p in point_sets]
    sizes = [len(x) for x, _ in arrays]
    batch = tdual_batch(np.concatenate([x for x, _ in arrays]), np.concatenate([t for _, t in arrays]))
    out = []
    start = 0
    for n in sizes:
        sub = batch.subset(slice(start, start + n))
        out.append(len(_batch_atom_rows(sub)))
        start += n
    return out, batch


def max_intervals(batch: DualBatch) -> int:
    return int(np.max(np.sum(batch.lo <= batch.hi, axis=1))) if len(batch) else 0
