"""Independent brute-force oracles used to cross-check the exact engines.

None of these share code paths with the engines they check: the lambda-grid
oracle finds breakpoints with ``scipy.optimize.brentq`` and tests membership
directly on the subgraph inequality, the half-plane oracle decides each of
the ``2**n`` subsets by linear programming, and the cover oracle enumerates
centre subsets.  All are exponential or grid-bound and meant for n <= 12.
"""

from itertools import combinations

import numpy as np
from scipy import optimize

from .core import pack_rows, unique_rows
from .families import s_lambda_member, tlambda_values


def _h_minus_t(lam, x, t):
    return float(tlambda_values(lam, x)) - t


def lambda_breakpoints(x, t):
    """All lambda != 0 where the membership of (x, t) in S_lambda can flip."""
    roots = []
    for xi, ti in zip(np.asarray(x, float), np.asarray(t, float)):
        if xi == 1.0:
            continue
        for sign in (-1.0, 1.0):
            inner, outer = sign * 1e-9, sign * 1.0
            f_in = _h_minus_t(inner, xi, ti)
            while _h_minus_t(outer, xi, ti) * f_in > 0 and abs(outer) < 1e15:
                outer *= 2
            f_out = _h_minus_t(outer, xi, ti)
            if f_in == 0:
                roots.append(inner)
            elif f_in * f_out < 0:
                lo, hi = sorted((inner, outer))
                roots.append(optimize.brentq(_h_minus_t, lo, hi, args=(xi, ti), xtol=1e-15, rtol=1e-15))
    return np.array(sorted(roots))


def dense_lambda_rows(x, t, grid_size=10**6, chunk=200_000):
    """Distinct membership rows of the points over a dense lambda grid plus breakpoints."""
    x = np.asarray(x, float)
    t = np.asarray(t, float)
    br = lambda_breakpoints(x, t)
    span = (np.max(np.abs(br)) if len(br) else 1.0) * 1.5 + 1.0
    grid = np.linspace(-span, span, grid_size)
    extra = np.concatenate([br, np.nextafter(br, np.inf), np.nextafter(br, -np.inf)])
    lam = np.unique(np.concatenate([grid, extra, [-1e-9, 1e-9]]))
    lam = lam[lam != 0]
    rows = []
    for i in range(0, len(lam), chunk):
        ll = lam[i:i + chunk, None]
        member = s_lambda_member(ll, x[None, :], t[None, :])
        rows.append(unique_rows(pack_rows(member)))
    return unique_rows(np.concatenate(rows))


def dense_lambda_count(x, t, grid_size=10**6):
    return len(dense_lambda_rows(x, t, grid_size))


def halfplane_realizable(X, subset_mask, variant="all"):
    """Is there a half-plane ``a*x + b*y + c < 0`` of the variant cutting exactly this subset?"""
    X = np.asarray(X, float)
    n = len(X)
    inside = np.array([(subset_mask >> i) & 1 for i in range(n)], dtype=bool)
    rows = np.column_stack([X, np.ones(n)])
    A_ub = np.concatenate([rows[inside], -rows[~inside]])
    b_ub = np.concatenate([-np.ones(inside.sum()), np.zeros((~inside).sum())])
    if variant == "upper":
        A_ub = np.vstack([A_ub, [0.0, 1.0, 0.0]])
        b_ub = np.append(b_ub, -1.0)
    elif variant == "lower":
        A_ub = np.vstack([A_ub, [0.0, -1.0, 0.0]])
        b_ub = np.append(b_ub, -1.0)
    res = optimize.linprog(np.zeros(3), A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * 3, method="highs")
    return res.status == 0


def halfplane_trace_count(X, variant="all"):
    n = len(X)
    return sum(halfplane_realizable(X, s, variant) for s in range(2 ** n))


def shifted_union_rows(J, anchors_or_points):
    """Traces of ``{x + J}`` on the points, from shifts at every breakpoint and between them."""
    p = np.asarray(anchors_or_points, float)
    ends = np.array(J.endpoints())
    br = np.unique((p[:, None] - ends[None, :]).ravel())
    mids = (br[:-1] + br[1:]) / 2
    shifts = np.concatenate([br, mids, [br[0] - 1.0, br[-1] + 1.0]])
    member = np.column_stack([J.contains(pi - shifts) for pi in p])
    return unique_rows(pack_rows(member))


def min_cover_bruteforce(D, eps):
    """Smallest number of sample-centred open eps-balls covering all samples."""
    D = np.asarray(D, float)
    m = len(D)
    full = (1 << m) - 1
    masks = [sum(1 << j for j in range(m) if D[i, j] < eps) for i in range(m)]
    for k in range(1, m + 1):
        for combo in combinations(range(m), k):
            acc = 0
            for i in combo:
                acc |= masks[i]
            if acc == full:
                return k
    return m


def powerset_union_vc_bruteforce(anchor_lists):
    """VC-dimension of a union of finite-powerset families, by direct subset search."""
    ground = sorted({a for lst in anchor_lists for a in lst})
    sets = {frozenset(s) for lst in anchor_lists for r in range(len(lst) + 1) for s in combinations(lst, r)}
    best = 0
    for r in range(1, len(ground) + 1):
        found = False
        for cand in combinations(ground, r):
            c = frozenset(cand)
            if len({c & s for s in sets}) == 2 ** r:
                found = True
                break
        if not found:
            break
        best = r
    return best
