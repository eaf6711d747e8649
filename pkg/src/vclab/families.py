"""Built-in parametric families.

Every constructor returns an immutable :class:`~vclab.core.FamilyHandle`.
Families are normally built from a JSON-style descriptor::

    make_family({"family": "piecewise_link", "fixed": {"k": 3, "d": 2}})

Descriptor names and their ``fixed`` fields:

=================  ===========================================  =============
family             fixed fields                                 density bound
=================  ===========================================  =============
tlambda            (none)                                       1
xlambda            (none)                                       1
halfplane          variant: upper | lower | all (default all)   3
finite_powerset    k, anchors (optional, default evenly spaced)  0
shifted_union      N, anchors (optional)                        1
piecewise_link     k, d                                         2k + 2 + d
gaussian_link      d                                            d + 2
harmonic2d         m, coefficients (optional), det_min          6
monotone_step      G, alpha (optional)                          (none)
constant           value                                        0
union              members: list of descriptors                 max of members
=================  ===========================================  =============

Parameter sampling boxes are a measurement choice only; no family needs a
bounded parameter space for its density bound.
"""

import numpy as np
from scipy import special

from .core import ContractViolation, FamilyHandle, subgraph_member
from .intervals import IntervalUnion

MAX_SHIFTED_N = 20


# ---------------------------------------------------------------------------
# Box-Cox family T_lambda(x) = (x^lambda - 1) / lambda

def tlambda_values(lam, x):
    """``(x**lam - 1) / lam`` with broadcasting, computed as ``ln x * expm1(z) / z`` with ``z = lam ln x``.

    ``x = 0`` gives ``-1/lam`` for ``lam > 0`` and is rejected for ``lam < 0``.
    """
    lam, x = np.broadcast_arrays(np.asarray(lam, dtype=float), np.asarray(x, dtype=float))
    if np.any(lam == 0):
        raise ContractViolation("lambda = 0 is outside the parameter domain")
    if np.any(x < 0):
        raise ContractViolation("T_lambda is defined for x >= 0 only")
    if np.any((x == 0) & (lam < 0)):
        raise ContractViolation("T_lambda(0) is undefined for lambda < 0")
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        logx = np.log(x)
        z = lam * logx
        # ln x * expm1(z)/z stays accurate when lam is tiny or subnormal and z underflows to 0
        ratio = np.where(z == 0, 1.0, np.expm1(z) / np.where(z == 0, 1.0, z))
        return np.where(x == 0, -1.0 / lam, logx * ratio)


def s_lambda_member(lam, x, t):
    """Membership of ``(x, t)`` in ``S_lam = {0 <= t <= T_lam(x) or 0 >= t >= T_lam(x)}``."""
    return subgraph_member(tlambda_values(lam, x), t, rule="closed")


def _loguniform(rng, lo, hi, size):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size))


def tlambda_family(lam_box=(-3.0, 3.0)):
    def member(P, X):
        return s_lambda_member(P[:, :1], X[None, :, 0], X[None, :, 1])

    def evaluator(P, X):
        return tlambda_values(P[:, :1], X[None, :, 0])

    def sample_params(rng, size):
        lam = rng.uniform(lam_box[0], lam_box[1], size)
        lam[lam == 0] = lam_box[1]
        return lam[:, None]

    def sample_points(rng, n):
        return np.column_stack([_loguniform(rng, 0.1, 10.0, n), rng.uniform(-3.0, 3.0, n)])

    return FamilyHandle(
        name="tlambda", kind="tlambda", param_dim=1, point_dim=2,
        member_batch=member, evaluator_batch=evaluator, subgraph_rule="closed",
        param_check=lambda P: P[:, 0] != 0, density_bound=1,
        sample_params=sample_params, sample_points=sample_points,
        vc_search_complete=True, descriptor={"family": "tlambda", "fixed": {}},
        info={"lam_box": lam_box})


def xlambda_member(lam, x):
    """``X_lam = {x >= 0 : 0 <= T_lam(x)}``; ``x = 0`` with ``lam < 0`` is not a member."""
    lam, x = np.broadcast_arrays(np.asarray(lam, dtype=float), np.asarray(x, dtype=float))
    out = np.zeros(lam.shape, dtype=bool)
    ok = (x > 0) | ((x == 0) & (lam > 0))
    out[ok] = tlambda_values(lam[ok], x[ok]) >= 0
    return out


def xlambda_family():
    def member(P, X):
        return xlambda_member(P[:, :1], X[None, :, 0])

    def sample_params(rng, size):
        lam = rng.uniform(-3.0, 3.0, size)
        lam[lam == 0] = 3.0
        return lam[:, None]

    return FamilyHandle(
        name="xlambda", kind="xlambda", param_dim=1, point_dim=1, member_batch=member,
        param_check=lambda P: P[:, 0] != 0, density_bound=1,
        sample_params=sample_params,
        sample_points=lambda rng, n: _loguniform(rng, 0.1, 10.0, n)[:, None],
        descriptor={"family": "xlambda", "fixed": {}})


# ---------------------------------------------------------------------------
# Half-planes a*x + b*y + c < 0

HALFPLANE_VARIANTS = ("upper", "lower", "all")


def _halfplane_check(variant):
    if variant == "upper":
        return lambda P: P[:, 1] < 0
    if variant == "lower":
        return lambda P: P[:, 1] > 0
    return None


def halfplane_candidates(X, variant="all"):
    """Parameters realising every trace of half-planes of ``variant`` on ``X``.

    Each pair of distinct points spans a line; small rotations about the
    pair's midpoint and small tilted translations of that line, in both
    orientations, separate the pair in all four ways without moving any other
    point across.  Sentinel half-planes add the empty and the full trace.
    """
    X = np.asarray(X, dtype=float)
    n = len(X)
    span = float(np.max(np.abs(X))) + 1.0 if n else 1.0
    sentinels = np.array([[0.0, -1.0, 2 * span], [0.0, -1.0, -2 * span],
                          [0.0, 1.0, 2 * span], [0.0, 1.0, -2 * span],
                          [1.0, 0.0, 2 * span], [-1.0, 0.0, 2 * span]])
    cands = [sentinels]
    if n >= 2:
        i, j = np.triu_indices(n, 1)
        d = X[j] - X[i]
        keep = np.any(d != 0, axis=1)
        i, j, d = i[keep], j[keep], d[keep]
        if len(d):
            mid = (X[i] + X[j]) / 2
            w = np.column_stack([-d[:, 1], d[:, 0]])
            g = w @ X.T - np.sum(w * mid, axis=1)[:, None]
            dn = np.linalg.norm(d, axis=1)
            R = np.max(np.linalg.norm(X[None, :, :] - mid[:, None, :], axis=2), axis=1)
            tol = 1e-9 * dn * (R + 1.0)
            off = np.where(np.abs(g) > tol[:, None], np.abs(g), np.inf)
            gmin = np.min(off, axis=1)
            gmin = np.where(np.isfinite(gmin), gmin, dn * R)
            theta = gmin / (4 * dn * R)
            rho = theta * dn ** 2 / 2
            for s_theta in (1.0, -1.0):
                wt = w + (s_theta * theta)[:, None] * d
                ct = -np.sum(wt * mid, axis=1)
                for shift in (0.0, rho / 2, -rho / 2, rho + gmin / 4, -(rho + gmin / 4)):
                    base = np.column_stack([wt, ct + shift])
                    cands.append(base)
                    cands.append(-base)
    # nearly vertical lines between x-consecutive points, tilted both ways; the
    # pair lines above may only reach these traces through a vertical line
    xs = np.unique(X[:, 0]) if n else np.zeros(0)
    if len(xs) >= 2:
        cuts = (xs[:-1] + xs[1:]) / 2
        delta = float(np.min(np.diff(xs))) / (4 * (float(np.max(np.abs(X[:, 1]))) + 1.0))
        for sa in (1.0, -1.0):
            for sb in (1.0, -1.0):
                cands.append(np.column_stack([np.full(len(cuts), sa), np.full(len(cuts), sb * delta),
                                              -sa * cuts]))
    P = np.concatenate(cands)
    check = _halfplane_check(variant)
    if check is not None:
        P = P[check(P)]
    return P


def halfplane_family(variant="all"):
    if variant not in HALFPLANE_VARIANTS:
        raise ContractViolation(f"half-plane variant must be one of {HALFPLANE_VARIANTS}")

    def member(P, X):
        return P[:, :2] @ X.T + P[:, 2:3] < 0

    def sample_params(rng, size):
        P = np.column_stack([rng.uniform(-1, 1, size), rng.uniform(-1, 1, size), rng.uniform(-1.5, 1.5, size)])
        if variant == "upper":
            P[:, 1] = -np.abs(P[:, 1]) - 1e-9
        elif variant == "lower":
            P[:, 1] = np.abs(P[:, 1]) + 1e-9
        return P

    return FamilyHandle(
        name=f"halfplane_{variant}", kind="halfplane", param_dim=3, point_dim=2,
        member_batch=member, param_check=_halfplane_check(variant), density_bound=3,
        sample_params=sample_params,
        sample_points=lambda rng, n: rng.uniform(-1, 1, (n, 2)),
        exact_params=lambda X: halfplane_candidates(X, variant),
        vc_search_complete=True,
        descriptor={"family": "halfplane", "fixed": {"variant": variant}},
        info={"variant": variant})


# ---------------------------------------------------------------------------
# All subsets of k fixed points

def _default_anchors(k):
    return np.arange(1, k + 1) / (k + 1)


def finite_powerset_family(k, anchors=None):
    k = int(k)
    if k < 1:
        raise ContractViolation("finite powerset needs k >= 1")
    anchors = _default_anchors(k) if anchors is None else np.asarray(anchors, dtype=float)
    if anchors.shape != (k,) or len(np.unique(anchors)) != k:
        raise ContractViolation("finite powerset needs k distinct anchors")
    anchors = anchors.copy()
    anchors.setflags(write=False)

    def member(P, X):
        idx = P[:, 0].astype(np.int64)
        bits = (idx[:, None] >> np.arange(k)) & 1
        hit = (X[None, :, 0] == anchors[:, None]).astype(np.int64)
        return (bits @ hit) > 0

    def check(P):
        s = P[:, 0]
        return (s == np.floor(s)) & (s >= 0) & (s < 2 ** k)

    def sample_points(rng, n):
        m = min(n, k)
        chosen = rng.permutation(anchors)[:m]
        rest = rng.uniform(0, 1, n - m)
        return np.concatenate([chosen, rest])[:, None]

    return FamilyHandle(
        name=f"finite_powerset_k{k}", kind="finite_powerset", param_dim=1, point_dim=1,
        member_batch=member, param_check=check, density_bound=0,
        sample_params=lambda rng, size: rng.integers(0, 2 ** k, size)[:, None].astype(float),
        sample_points=sample_points,
        exact_params=lambda X: np.arange(2 ** k, dtype=float)[:, None],
        vc_search_complete=True,
        descriptor={"family": "finite_powerset", "fixed": {"k": k, "anchors": anchors.tolist()}},
        info={"k": k, "anchors": anchors})


# ---------------------------------------------------------------------------
# One-parameter shifts of a union of blocks

def subset_mask_members(anchors, s):
    return [a for j, a in enumerate(anchors) if (s >> j) & 1]


def shifted_union_construct(N, anchors=None):
    """Blocks ``I_s`` and their union ``J``.

    The block for subset bit-mask ``s`` (bit ``j`` selects anchor ``j``) is the
    union of closed radius-``r`` intervals around the selected anchors,
    ``r = min-gap / 4`` with the gaps to 0 and 1 included, and is placed in the
    unit window ``(s + 1, s + 2)``.  Shifting ``J`` by ``-(s + 1)`` therefore
    cuts exactly subset ``s`` out of the anchors.
    """
    N = int(N)
    if N < 1:
        raise ContractViolation("shifted union needs N >= 1")
    if N > MAX_SHIFTED_N:
        raise ContractViolation(f"N = {N} exceeds the 2^N block budget (N <= {MAX_SHIFTED_N})")
    anchors = _default_anchors(N) if anchors is None else np.asarray(anchors, dtype=float)
    if anchors.shape != (N,):
        raise ContractViolation(f"expected {N} anchors")
    if not (np.all(np.diff(anchors) > 0) and anchors[0] > 0 and anchors[-1] < 1):
        raise ContractViolation("anchors must be strictly increasing inside (0, 1)")
    gaps = np.diff(np.concatenate([[0.0], anchors, [1.0]]))
    r = float(np.min(gaps)) / 4
    blocks = []
    pieces = []
    for s in range(2 ** N):
        ivs = tuple((a - r, a + r, True, True) for a in subset_mask_members(anchors, s))
        blocks.append(IntervalUnion(ivs))
        pieces.extend((lo + s + 1, hi + s + 1, True, True) for lo, hi, _, _ in ivs)
    return anchors, r, blocks, IntervalUnion(tuple(pieces))


def shifted_union_family(N, anchors=None):
    anchors, r, blocks, J = shifted_union_construct(N, anchors)
    anchors.setflags(write=False)
    width = 2 ** int(N) + 2

    def member(P, X):
        return J.contains_sorted(X[None, :, 0] - P[:, :1])

    def sample_points(rng, n):
        return rng.uniform(0, 1, n)[:, None]

    return FamilyHandle(
        name=f"shifted_union_N{N}", kind="shifted_union", param_dim=1, point_dim=1,
        member_batch=member, density_bound=1,
        sample_params=lambda rng, size: rng.uniform(-width, 1.0, size)[:, None],
        sample_points=sample_points,
        descriptor={"family": "shifted_union", "fixed": {"N": int(N), "anchors": anchors.tolist()}},
        info={"N": int(N), "anchors": anchors, "radius": r, "blocks": blocks, "J": J})


# ---------------------------------------------------------------------------
# Piecewise-linear link with exponential tails, composed with x^t beta

def link_tail_constants(a, b):
    """(B1, c1, Bk, ck) matching value and slope of the tails at a[0] and a[-1]."""
    B1 = b[0]
    c1 = (b[1] - b[0]) / ((a[1] - a[0]) * b[0])
    Bk = 1 - b[-1]
    ck = (b[-1] - b[-2]) / ((a[-1] - a[-2]) * (1 - b[-1]))
    return B1, c1, Bk, ck


def _link_ok(a, b):
    return bool(np.all(np.diff(a) > 0) and np.all(np.diff(b) > 0) and b[0] > 0 and b[-1] < 1)


def link_values(a, b, u):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 2 or a.shape != b.shape:
        raise ContractViolation("link needs k >= 2 knots with matching a and b")
    if not _link_ok(a, b):
        raise ContractViolation("link knots must satisfy a1 < ... < ak and 0 < b1 < ... < bk < 1")
    u = np.asarray(u, dtype=float)
    B1, c1, Bk, ck = link_tail_constants(a, b)
    out = np.interp(u, a, b)
    lo = u < a[0]
    hi = u > a[-1]
    out = np.where(lo, B1 * np.exp(c1 * np.minimum(u - a[0], 0.0)), out)
    out = np.where(hi, 1 - Bk * np.exp(-ck * np.maximum(u - a[-1], 0.0)), out)
    return out


def eval_link(family: FamilyHandle, params, u):
    if family.kind != "piecewise_link":
        raise ContractViolation("eval_link needs a piecewise_link family")
    k = family.info["k"]
    p = np.asarray(params, dtype=float)
    return link_values(p[:k], p[k:2 * k], u)


def piecewise_link_family(k, d):
    k, d = int(k), int(d)
    if k < 2 or d < 1:
        raise ContractViolation("piecewise link needs k >= 2 and d >= 1")

    def check(P):
        return np.array([_link_ok(p[:k], p[k:2 * k]) for p in P], dtype=bool)

    def evaluator(P, X):
        out = np.empty((len(P), len(X)))
        for r, p in enumerate(P):
            out[r] = link_values(p[:k], p[k:2 * k], X @ p[2 * k:])
        return out

    def member(P, X):
        return subgraph_member(evaluator(P, X[:, :d]), X[None, :, d])

    def sample_params(rng, size):
        a = np.sort(rng.uniform(-3, 3, (size, k)), axis=1)
        b = np.sort(rng.uniform(0, 1, (size, k)), axis=1)
        beta = rng.uniform(-2, 2, (size, d))
        return np.column_stack([a, b, beta])

    def sample_points(rng, n):
        return np.column_stack([rng.uniform(-1, 1, (n, d)), rng.uniform(-0.25, 1.25, n)])

    return FamilyHandle(
        name=f"piecewise_link_k{k}_d{d}", kind="piecewise_link", param_dim=2 * k + d, point_dim=d + 1,
        member_batch=member, evaluator_batch=evaluator, param_check=check,
        density_bound=2 * k + 2 + d, sample_params=sample_params, sample_points=sample_points,
        descriptor={"family": "piecewise_link", "fixed": {"k": k, "d": d}},
        info={"k": k, "d": d})


# ---------------------------------------------------------------------------
# Gaussian CDF link

def normal_cdf(z):
    """Standard normal CDF as ``erfc(-z / sqrt 2) / 2`` (relative error ~1e-15)."""
    return 0.5 * special.erfc(-np.asarray(z, dtype=float) / np.sqrt(2.0))


def gaussian_link_family(d):
    d = int(d)
    if d < 1:
        raise ContractViolation("gaussian link needs d >= 1")

    def evaluator(P, X):
        z = (X @ P[:, 2:].T - P[:, 0]) / P[:, 1]
        return normal_cdf(z).T

    def member(P, X):
        return subgraph_member(evaluator(P, X[:, :d]), X[None, :, d])

    def sample_params(rng, size):
        return np.column_stack([rng.uniform(-2, 2, size), rng.uniform(0.1, 2, size),
                                rng.uniform(-2, 2, (size, d))])

    def sample_points(rng, n):
        return np.column_stack([rng.uniform(-1, 1, (n, d)), rng.uniform(-0.25, 1.25, n)])

    return FamilyHandle(
        name=f"gaussian_link_d{d}", kind="gaussian_link", param_dim=d + 2, point_dim=d + 1,
        member_batch=member, evaluator_batch=evaluator, param_check=lambda P: P[:, 1] > 0,
        density_bound=d + 2, sample_params=sample_params, sample_points=sample_points,
        descriptor={"family": "gaussian_link", "fixed": {"d": d}}, info={"d": d})


# ---------------------------------------------------------------------------
# Angular harmonics composed with x -> A(x - c)/|A(x - c)| in the plane

def _default_harmonic_coefficients(m):
    coef = [0.0]
    for j in range(1, m + 1):
        coef += [1.0 / j, 0.5 / j]
    return coef


def harmonic_values(coef, theta):
    coef = np.asarray(coef, dtype=float)
    m = (len(coef) - 1) // 2
    out = np.full(np.shape(theta), coef[0])
    for j in range(1, m + 1):
        out = out + coef[2 * j - 1] * np.cos(j * theta) + coef[2 * j] * np.sin(j * theta)
    return out


def harmonic2d_family(m, coefficients=None, det_min=1e-12):
    m = int(m)
    if m < 0:
        raise ContractViolation("harmonic degree must be >= 0")
    coef = _default_harmonic_coefficients(m) if coefficients is None else [float(c) for c in coefficients]
    if len(coef) != 2 * m + 1:
        raise ContractViolation(f"degree {m} needs {2 * m + 1} coefficients")
    if not det_min > 0:
        raise ContractViolation("the A-domain must exclude singular matrices (det_min > 0)")
    coef = np.array(coef)
    C = float(np.sum(np.abs(coef))) + 1.0

    def check(P):
        return np.abs(P[:, 0] * P[:, 3] - P[:, 1] * P[:, 2]) >= det_min

    def evaluator(P, X):
        dx = X[None, :, 0] - P[:, 4:5]
        dy = X[None, :, 1] - P[:, 5:6]
        ux = P[:, 0:1] * dx + P[:, 1:2] * dy
        uy = P[:, 2:3] * dx + P[:, 3:4] * dy
        at_c = (dx == 0) & (dy == 0)
        return np.where(at_c, -C, harmonic_values(coef, np.arctan2(uy, ux)))

    def member(P, X):
        return subgraph_member(evaluator(P, X[:, :2]), X[None, :, 2])

    def sample_params(rng, size):
        out = np.empty((0, 6))
        while len(out) < size:
            A = rng.uniform(-2, 2, (2 * size, 4))
            A = A[np.abs(A[:, 0] * A[:, 3] - A[:, 1] * A[:, 2]) >= max(0.1, det_min)]
            c = rng.uniform(-1, 1, (len(A), 2))
            out = np.concatenate([out, np.column_stack([A, c])])
        return out[:size]

    def sample_points(rng, n):
        return np.column_stack([rng.uniform(-1, 1, (n, 2)), rng.uniform(-C, C, n)])

    return FamilyHandle(
        name=f"harmonic2d_m{m}", kind="harmonic2d", param_dim=6, point_dim=3,
        member_batch=member, evaluator_batch=evaluator, param_check=check, density_bound=6,
        sample_params=sample_params, sample_points=sample_points,
        descriptor={"family": "harmonic2d", "fixed": {"m": m, "coefficients": coef.tolist(), "det_min": det_min}},
        info={"m": m, "coefficients": coef, "C": C})


# ---------------------------------------------------------------------------
# Monotone step functions on a grid (no finite density bound as G grows)

def monotone_step_family(G, alpha=0.2):
    G = int(G)
    if G < 1:
        raise ContractViolation("monotone step family needs G >= 1")
    grid = np.arange(G) / G

    def check(P):
        return np.all(np.diff(P, axis=1) >= 0, axis=1) & np.all((P >= 0) & (P <= 1), axis=1)

    def evaluator(P, X):
        idx = np.clip(np.searchsorted(grid, X[:, 0], side="right") - 1, 0, G - 1)
        return P[:, idx]

    def member(P, X):
        return subgraph_member(evaluator(P, X[:, :1]), X[None, :, 1])

    def sample_params(rng, size):
        # Dirichlet increments: small alpha gives few, large jumps at random places
        inc = rng.dirichlet(np.full(G + 1, alpha), size)
        return np.clip(np.cumsum(inc, axis=1)[:, :G], 0.0, 1.0)

    return FamilyHandle(
        name=f"monotone_step_G{G}", kind="monotone_step", param_dim=G, point_dim=2,
        member_batch=member, evaluator_batch=evaluator, param_check=check, density_bound=None,
        sample_params=sample_params,
        sample_points=lambda rng, n: np.column_stack([rng.uniform(0, 1, n), rng.uniform(-0.25, 1.25, n)]),
        descriptor={"family": "monotone_step", "fixed": {"G": G, "alpha": alpha}}, info={"G": G})


def constant_family(value=0.5, input_dim=1):
    value = float(value)

    def evaluator(P, X):
        return np.full((len(P), len(X)), value)

    def member(P, X):
        return subgraph_member(evaluator(P, X), X[None, :, input_dim])

    return FamilyHandle(
        name="constant", kind="constant", param_dim=0, point_dim=input_dim + 1,
        member_batch=member, evaluator_batch=evaluator, density_bound=0,
        sample_params=lambda rng, size: np.zeros((size, 0)),
        sample_points=lambda rng, n: rng.uniform(0, 1, (n, input_dim + 1)),
        exact_params=lambda X: np.zeros((1, 0)),
        descriptor={"family": "constant", "fixed": {"value": value, "input_dim": input_dim}},
        info={"value": value})


# ---------------------------------------------------------------------------
# Finite unions of families over the same point space

def union_family(members, name=None):
    members = list(members)
    if not members:
        raise ContractViolation("union of no families")
    dims = {f.point_dim for f in members}
    if len(dims) != 1:
        raise ContractViolation("union members must share a point space")
    width = max(f.param_dim for f in members)

    def split(P):
        idx = P[:, 0].astype(int)
        return idx, P[:, 1:]

    def member(P, X):
        idx, rest = split(P)
        out = np.zeros((len(P), len(X)), dtype=bool)
        for j, f in enumerate(members):
            sel = idx == j
            if np.any(sel):
                out[sel] = f.member_batch(rest[sel][:, :f.param_dim], X)
        return out

    def check(P):
        idx, rest = split(P)
        ok = (P[:, 0] == np.floor(P[:, 0])) & (idx >= 0) & (idx < len(members))
        for j, f in enumerate(members):
            sel = ok & (idx == j)
            if np.any(sel):
                sub = rest[sel][:, :f.param_dim]
                good = np.ones(len(sub), dtype=bool)
                if f.param_check is not None:
                    good &= np.asarray(f.param_check(sub), dtype=bool)
                ok[np.flatnonzero(sel)[~good]] = False
        return ok

    def pad(j, P):
        out = np.zeros((len(P), width + 1))
        out[:, 0] = j
        out[:, 1:1 + P.shape[1]] = P
        return out

    def sample_params(rng, size):
        which = rng.integers(0, len(members), size)
        out = np.zeros((size, width + 1))
        for j, f in enumerate(members):
            sel = which == j
            out[sel] = pad(j, f.sample_params(rng, int(sel.sum())))
        return out

    exact = None
    if all(f.exact_params is not None for f in members):
        def exact(X):
            return np.concatenate([pad(j, f.exact_params(X)) for j, f in enumerate(members)])

    bounds = [f.density_bound for f in members]
    return FamilyHandle(
        name=name or "union(" + ",".join(f.name for f in members) + ")", kind="union",
        param_dim=width + 1, point_dim=members[0].point_dim, member_batch=member, param_check=check,
        density_bound=None if None in bounds else max(bounds),
        sample_params=sample_params, sample_points=members[0].sample_points, exact_params=exact,
        vc_search_complete=all(f.vc_search_complete for f in members),
        descriptor={"family": "union", "fixed": {"members": [f.descriptor for f in members]}},
        info={"members": members})


# ---------------------------------------------------------------------------

def make_family(spec):
    """Build a family from a descriptor ``{"family": name, "fixed": {...}}``."""
    if isinstance(spec, str):
        spec = {"family": spec, "fixed": {}}
    name = spec.get("family")
    fixed = dict(spec.get("fixed") or {})
    try:
        if name == "tlambda":
            return tlambda_family()
        if name == "xlambda":
            return xlambda_family()
        if name == "halfplane":
            return halfplane_family(fixed.get("variant", "all"))
        if name == "finite_powerset":
            return finite_powerset_family(fixed["k"], fixed.get("anchors"))
        if name == "shifted_union":
            return shifted_union_family(fixed["N"], fixed.get("anchors"))
        if name == "piecewise_link":
            return piecewise_link_family(fixed["k"], fixed.get("d", 1))
        if name == "gaussian_link":
            return gaussian_link_family(fixed.get("d", 1))
        if name == "harmonic2d":
            return harmonic2d_family(fixed.get("m", 1), fixed.get("coefficients"), fixed.get("det_min", 1e-12))
        if name == "monotone_step":
            return monotone_step_family(fixed["G"], fixed.get("alpha", 0.2))
        if name == "constant":
            return constant_family(fixed.get("value", 0.5), fixed.get("input_dim", 1))
        if name == "union":
            return union_family([make_family(m) for m in fixed["members"]])
    except KeyError as exc:
        raise ContractViolation(f"family {name!r} is missing fixed field {exc.args[0]!r}") from None
    raise ContractViolation(f"unknown family {name!r}")


FAMILY_NAMES = ("tlambda", "xlambda", "halfplane", "finite_powerset", "shifted_union", "piecewise_link",
                "gaussian_link", "harmonic2d", "monotone_step", "constant", "union")
