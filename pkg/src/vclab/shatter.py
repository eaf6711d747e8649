"""Shatter functions, VC-dimension, dual shatter counts and Sauer-Shelah bounds.

Trace sets are exact whenever the family has a finite enumerator that meets
every trace on a given point set:

* ``tlambda``: the dual sweep of :mod:`vclab.dual_interval`;
* ``shifted_union``: an XOR sweep over the shift breakpoints ``p_i - e``;
* anything with ``exact_params`` (half-planes, finite powersets, constants,
  unions of such): membership of the enumerated parameters.

Otherwise traces come from random parameter search and every reported value
is a lower bound (``method = "sampled"``).  Sampling point sets can only ever
give lower bounds on the supremum over point sets.

Profiles draw each point set once at the largest ``n`` and use its prefixes,
so ``delta_hat`` is non-decreasing in ``n``.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .core import ContractViolation, FamilyHandle, PointSet, TraceSet, pack_rows, trace_rows, unique_rows
from .dual_interval import _batch_atom_rows, tdual_batch
from .seeding import derive_rng

DEFAULT_PARAM_BUDGET = 20_000


def parallel_map(fn, items, jobs=1):
    """Ordered map; threads only, so results never depend on ``jobs``."""
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# exact trace enumeration

def shifted_union_sweep(J, points):
    """Packed traces of ``{x + J : x real}`` on ``points`` by a sweep over x.

    Point ``p`` lies in ``x + J`` iff ``x`` lies in ``p - piece`` for some
    piece of ``J``; each such x-interval toggles bit ``p`` on at its left end
    and off at its right end.  Pieces of ``J`` are disjoint, so toggles never
    overlap on one bit and XOR accumulation gives the open-cell traces; the
    trace at a breakpoint itself adds closed starts and keeps closed ends.
    """
    p = np.asarray(points, dtype=float).ravel()
    n = len(p)
    W = max(1, (n + 63) // 64)
    if not J.intervals:
        return np.zeros((1, W), dtype="<u8")
    lo, hi, lc, hc = (np.array(c) for c in zip(*J.intervals))
    idx = np.repeat(np.arange(n), len(lo))
    start = (p[:, None] - hi[None, :]).ravel()
    end = (p[:, None] - lo[None, :]).ravel()
    start_closed = np.tile(hc, n)
    end_closed = np.tile(lc, n)
    vals = np.concatenate([start, end])
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    bit = np.concatenate([idx, idx])[order]
    is_start = np.concatenate([np.ones(len(start), bool), np.zeros(len(end), bool)])[order]
    closed = np.concatenate([start_closed, end_closed])[order]
    group = np.concatenate([[0], np.cumsum(vals[1:] != vals[:-1])])
    G = int(group[-1]) + 1
    word = bit // 64
    one = np.left_shift(np.uint64(1), (bit % 64).astype(np.uint64))

    def xor_masks(sel):
        out = np.zeros((G, W), dtype=np.uint64)
        np.bitwise_xor.at(out, (group[sel], word[sel]), one[sel])
        return out

    toggles = xor_masks(np.ones(len(vals), bool))
    at_point = xor_masks((is_start & closed) | (~is_start & ~closed))
    after = np.bitwise_xor.accumulate(toggles, axis=0)
    before = np.vstack([np.zeros((1, W), np.uint64), after[:-1]])
    rows = np.vstack([np.zeros((1, W), np.uint64), after, before ^ at_point]).astype("<u8")
    return unique_rows(rows)


def exact_trace_rows(family: FamilyHandle, X) -> Optional[np.ndarray]:
    """Packed distinct traces of the family on ``X`` if an exact enumerator exists."""
    X = family.check_points(X)
    if family.kind == "tlambda":
        if np.any(X[:, 0] <= 0):
            return None
        return _batch_atom_rows(tdual_batch(X[:, 0], X[:, 1]))
    if family.kind == "shifted_union":
        return shifted_union_sweep(family.info["J"], X[:, 0])
    if family.kind == "union":
        parts = [exact_trace_rows(f, X) for f in family.info["members"]]
        if any(p is None for p in parts):
            return None
        return unique_rows(np.concatenate(parts))
    if family.exact_params is not None:
        return trace_rows(family, family.exact_params(X), X)
    return None


def has_exact(family: FamilyHandle) -> bool:
    if family.kind in ("tlambda", "shifted_union"):
        return True
    if family.kind == "union":
        return all(has_exact(f) for f in family.info["members"])
    return family.exact_params is not None


def prefix_mask(k: int, words: int) -> np.ndarray:
    """Word mask selecting bits 0..k-1."""
    k = int(k)
    out = np.zeros(words, dtype="<u8")
    for w in range(words):
        b = min(64, max(0, k - 64 * w))
        out[w] = (1 << b) - 1
    return out


def prefix_trace_counts(rows: np.ndarray, ks) -> List[int]:
    """Number of distinct traces on each prefix of the point set.

    Traces on the first k points are the projections of ``rows``; classes of
    equal projections are refined one bit at a time.
    """
    ks = [int(k) for k in ks]
    want = set(ks)
    ids = np.zeros(len(rows), dtype=np.int64)
    counts = {0: 1}
    for j in range(max(ks)):
        bit = ((rows[:, j // 64] >> np.uint64(j % 64)) & np.uint64(1)).astype(np.int64)
        _, ids = np.unique(ids * 2 + bit, return_inverse=True)
        ids = ids.ravel()
        if j + 1 in want:
            counts[j + 1] = int(ids.max()) + 1
    return [counts[k] for k in ks]


def sampled_trace_rows(family: FamilyHandle, X, params) -> np.ndarray:
    return trace_rows(family, params, X)


def family_traces(family: FamilyHandle, pts, params=None) -> TraceSet:
    """Exact trace set if available, else traces of the supplied parameter sample."""
    X = family.check_points(pts)
    rows = exact_trace_rows(family, X)
    if rows is None:
        if params is None:
            raise ContractViolation(f"{family.name} has no exact enumerator; supply parameters")
        rows = sampled_trace_rows(family, X, params)
    return TraceSet.from_rows(rows, len(X))


# ---------------------------------------------------------------------------
# shatter profiles

@dataclass
class ShatterEntry:
    n: int
    delta_hat: int
    method: str
    point_sets_tried: int
    params_tried: int
    best_set: int = 0

    def __post_init__(self):
        if self.delta_hat > 2 ** self.n:
            raise ContractViolation("delta_hat exceeds 2^n")


@dataclass
class ShatterProfile:
    family: str
    entries: List[ShatterEntry] = field(default_factory=list)
    seed: Optional[int] = None
    budget: Optional[int] = None
    fitted_density: Optional[tuple] = None
    witnesses: dict = field(default_factory=dict)

    def delta(self):
        return {e.n: e.delta_hat for e in self.entries}

    def csv_rows(self):
        return [(e.n, e.delta_hat, e.method) for e in self.entries]

    def to_json(self):
        d = {"family": self.family, "seed": self.seed, "budget": self.budget,
             "entries": [asdict(e) for e in self.entries],
             "fitted_density": self.fitted_density}
        return json.dumps(d, indent=2, sort_keys=True)


def _check_budget(budget):
    if budget is None or int(budget) <= 0:
        raise ContractViolation("parameter search budget must be positive")
    return int(budget)


def _count(family, X, params):
    rows = exact_trace_rows(family, X)
    if rows is not None:
        return len(rows), "exact"
    return len(sampled_trace_rows(family, X, params)), "sampled"


def estimate_delta(family: FamilyHandle, n: int, seed: int, point_sets: int = 20,
                   param_budget: int = DEFAULT_PARAM_BUDGET, points=None, jobs: int = 1) -> ShatterEntry:
    """Lower bound on Delta(n): max trace count over sampled (or given) point sets."""
    prof = shatter_profile(family, [n], seed, point_sets=point_sets, param_budget=param_budget,
                           points=points, jobs=jobs)
    return prof.entries[0]


def shatter_profile(family: FamilyHandle, n_grid, seed: int, point_sets: int = 20,
                    param_budget: int = DEFAULT_PARAM_BUDGET, points=None, jobs: int = 1) -> ShatterProfile:
    """Delta_hat(n) on a grid of n, from nested point sets.

    ``points`` may be a list of (n_max, point_dim) arrays to use instead of
    sampled sets.
    """
    budget = _check_budget(param_budget)
    n_grid = sorted(int(n) for n in n_grid)
    if not n_grid or n_grid[0] < 1:
        raise ContractViolation("n must be >= 1")
    n_max = n_grid[-1]
    if points is None:
        sets = [family.check_points(family.sample_points(derive_rng(seed, "points", family.name, j), n_max))
                for j in range(point_sets)]
    else:
        sets = [family.check_points(p) for p in points]
        if any(len(s) < n_max for s in sets):
            raise ContractViolation("supplied point sets are smaller than the largest n")
    exact = has_exact(family)
    params = None if exact else family.sample_params(derive_rng(seed, "params", family.name), budget)

    def one(X):
        rows = exact_trace_rows(family, X) if exact else sampled_trace_rows(family, X, params)
        return prefix_trace_counts(rows, n_grid)

    counts = np.array(parallel_map(one, sets, jobs))  # (sets, grid)
    method = "exact" if exact else "sampled"
    entries = []
    witnesses = {}
    for g, n in enumerate(n_grid):
        best = int(np.argmax(counts[:, g]))
        entries.append(ShatterEntry(n, int(counts[best, g]), method, len(sets), 0 if exact else budget, best))
        witnesses[n] = sets[best][:n]
    return ShatterProfile(family.name, entries, seed, budget, None, witnesses)


def fit_density(profile: ShatterProfile):
    """(exponent, constant, r2) of ``log delta_hat ~ exponent * log n + log constant``.

    The smallest quarter of the n values is dropped before fitting.
    """
    ent = sorted(profile.entries, key=lambda e: e.n)
    if len(ent) < 4:
        raise ContractViolation("fit_density needs at least 4 entries")
    if ent[-1].n < 10 * ent[0].n:
        raise ContractViolation("fit_density needs n spanning at least one decade")
    ent = ent[len(ent) // 4:]
    n = np.array([e.n for e in ent], dtype=float)
    dv = np.array([e.delta_hat for e in ent], dtype=float)
    if np.all(dv == dv[0]):
        res = (0.0, float(dv[0]), 1.0)
    else:
        lx, ly = np.log(n), np.log(dv)
        slope, icpt = np.polyfit(lx, ly, 1)
        pred = slope * lx + icpt
        ss_tot = float(np.sum((ly - ly.mean()) ** 2))
        r2 = 1.0 - float(np.sum((ly - pred) ** 2)) / ss_tot if ss_tot > 0 else 1.0
        res = (float(slope), float(np.exp(icpt)), r2)
    profile.fitted_density = res
    return res


# ---------------------------------------------------------------------------
# VC-dimension

@dataclass
class VcDimResult:
    dim: int
    witness: Optional[PointSet]
    method: str
    lower_bound: bool
    at_budget: bool = False

    @property
    def label(self):
        return f">={self.dim}" if (self.at_budget or self.lower_bound) else str(self.dim)

    def verify(self, family, params=None):
        if self.witness is None:
            return self.dim == 0
        return len(family_traces(family, self.witness, params)) == 2 ** self.dim


def _witness_candidates(family, m):
    cands = []
    if family.kind in ("finite_powerset", "shifted_union"):
        anchors = np.asarray(family.info["anchors"])
        if m <= len(anchors):
            cands.append(anchors[:m, None])
    if family.kind == "union":
        for f in family.info["members"]:
            cands.extend(_witness_candidates(f, m))
    return cands


def vc_dim(family: FamilyHandle, budget_dim: int, seed: int, tries: int = 200,
           param_budget: int = DEFAULT_PARAM_BUDGET) -> VcDimResult:
    """Largest m <= budget_dim with a shattered witness found.

    Shattering is hereditary, so the search stops at the first m with no
    witness.  The result is labelled exact only when traces are exact and
    the family's configuration search is known to be complete.
    """
    if budget_dim > 20:
        raise ContractViolation("budget_dim must be <= 20")
    exact = has_exact(family)
    params = None if exact else family.sample_params(derive_rng(seed, "vc-params", family.name), param_budget)
    best, witness = 0, None
    for m in range(1, budget_dim + 1):
        found = None
        cands = _witness_candidates(family, m)
        rng = derive_rng(seed, "vc-points", family.name, m)
        for j in range(len(cands) + tries):
            X = cands[j] if j < len(cands) else family.sample_points(rng, m)
            X = family.check_points(X)
            if _count(family, X, params)[0] == 2 ** m:
                found = X
                break
        if found is None:
            break
        best, witness = m, PointSet(found)
    complete = exact and family.vc_search_complete
    return VcDimResult(best, witness, "exact" if exact else "sampled", not complete,
                       at_budget=best == budget_dim)


# ---------------------------------------------------------------------------
# dual shatter function

def dual_shatter(family: FamilyHandle, seed: int, m: Optional[int] = None, params=None, probes=None,
                 probe_budget: int = 20_000) -> int:
    """Lower bound on the number of atoms of m family members, by probing points.

    Each distinct membership vector of a probe point across the m members
    witnesses one atom.
    """
    if params is None:
        if m is None or m < 1:
            raise ContractViolation("dual_shatter needs m >= 1 or explicit parameters")
        params = family.sample_params(derive_rng(seed, "dual-params", family.name, m), m)
    P = family.check_params(params)
    if probes is None:
        probes = family.sample_points(derive_rng(seed, "dual-probes", family.name, len(P)), probe_budget)
    X = family.check_points(probes)
    member = family.member_batch(P, X).T  # (probes, m)
    return len(unique_rows(pack_rows(member)))


# ---------------------------------------------------------------------------
# Sauer-Shelah and unions

def sauer_bound(n: int, v: int) -> int:
    """sum_{j<=v} C(n, j) in exact integer arithmetic (equals 2^n once v >= n)."""
    if n < 0 or v < 0:
        raise ContractViolation("sauer_bound needs n, v >= 0")
    return sum(math.comb(n, j) for j in range(v + 1))


def union_bound_check(profiles, union_profile: ShatterProfile) -> bool:
    """Union's delta_hat(n) <= sum of the components' delta_hat(n) at every n."""
    grid = [e.n for e in union_profile.entries]
    comps = []
    for p in profiles:
        if [e.n for e in p.entries] != grid:
            raise ContractViolation("profiles have mismatched n grids")
        comps.append(p.delta())
    ud = union_profile.delta()
    return all(ud[n] <= sum(c[n] for c in comps) for n in grid)
