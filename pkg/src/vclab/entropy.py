"""Empirical L^p covering and packing numbers and exponent fits.

Covering numbers are measured on a finite parameter sample, so they are
lower bounds for the class.  A comparison against a certificate bound can
therefore expose an implementation error but never confirms the theorem.

Cover conventions: balls are open (``D < eps``) and centred at sample
functions.  ``n_cover`` is the smaller of a greedy set cover and a maximal
greedy packing (a maximal ``eps``-separated set is itself a cover), and
``n_pack_lower`` is the size of that maximal ``eps``-separated set, so the
sandwich ``n_pack(2 eps) <= n_cover(eps) <= n_pack(eps)`` holds on every
curve.
"""

import json
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.spatial.distance import cdist

from .core import ContractViolation, FamilyHandle

DEFAULT_EPS_RANGE = (0.02, 0.3)
DEFAULT_EPS_POINTS = 12
EXP_FORM_V = np.linspace(1.0, 3.0, 41)
# radii where a cover needs more than this fraction of the sampled functions
# measure the sample size rather than the class, and are left out of fits
SATURATION_FRACTION = 0.5


@dataclass(frozen=True)
class EmpiricalMeasure:
    support: np.ndarray

    def __post_init__(self):
        s = np.array(self.support, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
        if len(s) == 0:
            raise ContractViolation("empirical measure needs at least one point")
        s.setflags(write=False)
        object.__setattr__(self, "support", s)

    @property
    def weights(self):
        return np.full(len(self.support), 1.0 / len(self.support))

    def __len__(self):
        return len(self.support)


def function_values(family: FamilyHandle, params, Q: EmpiricalMeasure):
    if not family.is_function_class:
        raise ContractViolation(f"{family.name} has no evaluator")
    P = family.check_params(params)
    if Q.support.shape[1] != family.input_dim:
        raise ContractViolation("measure support has the wrong dimension")
    return family.evaluator_batch(P, Q.support)


def lp_norm(values, p):
    return float(np.mean(np.abs(values) ** p) ** (1.0 / p))


def pairwise_dist(family: FamilyHandle, params, Q: EmpiricalMeasure, p: int = 1):
    """``D[i, j] = (mean_k |f_i(x_k) - f_j(x_k)|^p)^(1/p)``."""
    F = function_values(family, params, Q)
    return distances_from_values(F, p)


def distances_from_values(F, p):
    if p not in (1, 2):
        raise ContractViolation("p must be 1 or 2")
    n = F.shape[1]
    if p == 1:
        return cdist(F, F, "cityblock") / n
    return cdist(F, F, "euclidean") / np.sqrt(n)


def greedy_cover(D, eps) -> int:
    """Greedy set cover of the samples by open eps-balls centred at uncovered samples.

    Each step takes the uncovered sample whose ball contains the most
    uncovered samples (lowest index on ties).
    """
    A = np.asarray(D) < eps
    m = len(A)
    uncovered = np.ones(m, dtype=bool)
    gain = A.sum(axis=1).astype(np.int64)
    count = 0
    while uncovered.any():
        cand = np.flatnonzero(uncovered)
        c = cand[np.argmax(gain[cand])]
        newly = A[c] & uncovered
        uncovered &= ~newly
        gain -= A[:, newly].sum(axis=1)
        count += 1
    return count


def greedy_packing(D, eps) -> int:
    """Size of a maximal eps-separated subset (pairwise ``D >= eps``), built in index order."""
    D = np.asarray(D)
    m = len(D)
    free = np.ones(m, dtype=bool)
    count = 0
    for i in range(m):
        if free[i]:
            count += 1
            free &= D[i] >= eps
    return count


def covering_number(D, eps) -> int:
    return min(greedy_cover(D, eps), greedy_packing(D, eps))


@dataclass
class EntropyEntry:
    epsilon: float
    n_cover: int
    n_pack_lower: int
    eps_abs: float


@dataclass
class EntropyCurve:
    entries: List[EntropyEntry]
    norm: int
    envelope_norm: float
    n_functions: int
    family: str = ""
    info: dict = field(default_factory=dict)

    def eps(self):
        return np.array([e.epsilon for e in self.entries])

    def n_cover(self):
        return np.array([e.n_cover for e in self.entries])

    def csv_rows(self):
        return [(e.epsilon, e.n_cover, e.n_pack_lower) for e in self.entries]

    def check_sandwich(self):
        """``n_pack(2 eps) <= n_cover(eps) <= n_pack(eps)`` wherever 2 eps is on the grid."""
        by_eps = {round(e.epsilon, 12): e for e in self.entries}
        for e in self.entries:
            if e.n_cover > e.n_pack_lower:
                return False
            two = by_eps.get(round(2 * e.epsilon, 12))
            if two is not None and two.n_pack_lower > e.n_cover:
                return False
        return True


def eps_grid(lo=DEFAULT_EPS_RANGE[0], hi=DEFAULT_EPS_RANGE[1], k=DEFAULT_EPS_POINTS):
    return np.geomspace(lo, hi, k)


def envelope_norm(F, p):
    """``||F||_{p,Q}`` for the pointwise envelope ``F = max_i |f_i|``."""
    return lp_norm(np.max(np.abs(F), axis=0), p)


def entropy_curve_from_values(F, eps_rel, p=1, family="") -> EntropyCurve:
    env = envelope_norm(F, p)
    if env == 0:
        env = 1.0
    D = distances_from_values(F, p)
    eps_rel = np.sort(np.asarray(eps_rel, dtype=float))
    entries = []
    for e in eps_rel:
        a = e * env
        cov, pack = greedy_cover(D, a), greedy_packing(D, a)
        entries.append(EntropyEntry(float(e), min(cov, pack), pack, float(a)))
    return EntropyCurve(entries, p, env, len(F), family)


def entropy_curve(family: FamilyHandle, params, Q: EmpiricalMeasure, eps_rel=None, p=1) -> EntropyCurve:
    """Covering numbers at radii ``eps * ||F||_{p,Q}`` for relative radii ``eps``."""
    F = function_values(family, params, Q)
    return entropy_curve_from_values(F, eps_grid() if eps_rel is None else eps_rel, p, family.name)


def max_over_measures(curves) -> EntropyCurve:
    """Pointwise maximum of curves on the same relative grid (a finite stand-in for sup over Q)."""
    curves = list(curves)
    grid = [e.epsilon for e in curves[0].entries]
    if any([e.epsilon for e in c.entries] != grid for c in curves):
        raise ContractViolation("curves have different epsilon grids")
    entries = [EntropyEntry(eps, max(c.entries[i].n_cover for c in curves),
                            max(c.entries[i].n_pack_lower for c in curves), curves[0].entries[i].eps_abs)
               for i, eps in enumerate(grid)]
    return EntropyCurve(entries, curves[0].norm, max(c.envelope_norm for c in curves),
                        curves[0].n_functions, curves[0].family, {"measures": len(curves)})


# ---------------------------------------------------------------------------
# fits

@dataclass
class CoverFit:
    B_hat: float
    A_hat: float
    r2: float
    rss_loglog: float
    K1: float
    K2: float
    v: float
    rss_exp: float
    n_points: int

    @property
    def better(self):
        return "exp" if self.rss_exp < self.rss_loglog else "loglog"

    def to_dict(self):
        d = dict(self.__dict__)
        d["better"] = self.better
        return d


def _linfit(x, y):
    X = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    rss = float(np.sum((y - X @ coef) ** 2))
    return float(coef[0]), float(coef[1]), rss


def fit_cover_exponent(curve: EntropyCurve, fit_range=DEFAULT_EPS_RANGE, max_fraction: Optional[float] = None
                       ) -> CoverFit:
    """Fit ``N ~ A (1/eps)^B`` and ``N ~ K1 exp(K2 eps^-v)`` on the fit range.

    Both fits are least squares in ``log N``.  The exponential form scans
    ``v`` over ``[1, 3]``.  ``max_fraction`` drops radii where the cover uses
    more than that fraction of the sampled functions (sample saturation).
    """
    eps, N = curve.eps(), curve.n_cover().astype(float)
    lo, hi = fit_range
    keep = (eps >= lo * (1 - 1e-12)) & (eps <= hi * (1 + 1e-12))
    if max_fraction is not None:
        keep &= N <= max_fraction * curve.n_functions
    eps, N = eps[keep], N[keep]
    if len(eps) < 3:
        raise ContractViolation("fewer fit points than the exponential form has parameters")
    ly = np.log(N)
    B, logA, rss_ll = _linfit(np.log(1 / eps), ly)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - rss_ll / ss_tot if ss_tot > 0 else 1.0
    best = None
    for v in EXP_FORM_V:
        K2, logK1, rss = _linfit(eps ** (-v), ly)
        if best is None or rss < best[3]:
            best = (logK1, K2, v, rss)
    logK1, K2, v, rss_exp = best
    return CoverFit(B, float(np.exp(logA)), r2, rss_ll, float(np.exp(logK1)), K2, float(v), rss_exp, len(eps))


@dataclass
class CertificateReport:
    family: str
    d: int
    eta: float
    A_hat: float
    B_hat: float
    exponent: float
    violations: list
    note: str = ("Covering numbers are measured on a finite parameter sample and lower-bound the class; "
                 "a violation indicates an implementation error, and no violation proves nothing.")

    @property
    def verdict(self):
        return "VIOLATION" if self.violations else "OK"

    def to_dict(self):
        d = dict(self.__dict__)
        d["verdict"] = self.verdict
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def certificate_compare(curve: EntropyCurve, cert, fit: Optional[CoverFit] = None, eta: float = 0.5,
                        fit_range=DEFAULT_EPS_RANGE) -> CertificateReport:
    """Flag radii where ``N(eps) > A_hat (1/eps)^(d + eta)``, ``A_hat`` from the free log-log fit.

    ``cert`` is a :class:`vclab.dsl.Certificate` or a plain integer ``d``.
    """
    d = int(getattr(cert, "d", cert))
    fit = fit or fit_cover_exponent(curve, fit_range)
    viol = []
    lo, hi = fit_range
    for e in curve.entries:
        if lo * (1 - 1e-12) <= e.epsilon <= hi * (1 + 1e-12):
            bound = fit.A_hat * (1.0 / e.epsilon) ** (d + eta)
            if e.n_cover > bound:
                viol.append({"epsilon": e.epsilon, "n_cover": e.n_cover, "bound": bound})
    return CertificateReport(curve.family, d, eta, fit.A_hat, fit.B_hat, d + eta, viol)
