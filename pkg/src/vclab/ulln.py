"""Monte-Carlo uniform law of large numbers and its rate.

For each sample size ``n`` and replication, draw ``n`` points from the data
law and record ``sup_f |P_n f - P f|`` over a finite parameter grid.  The
reference means ``P f`` are closed forms where available (Box-Cox under
uniform and log-normal laws), one-dimensional quadrature of an exact inner
antiderivative for the piecewise link with two covariates, and a recorded
Monte-Carlo estimate otherwise.
"""

import itertools
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate

from .core import ContractViolation, FamilyHandle
from .families import link_tail_constants
from .seeding import derive_rng
from .shatter import parallel_map

BOUNDED_KINDS = ("piecewise_link", "gaussian_link", "harmonic2d", "constant", "monotone_step")


@dataclass(frozen=True)
class DataLaw:
    """``uniform`` on a box (``low``, ``high`` per coordinate) or 1-D ``lognormal`` (mu, sigma)."""

    kind: str
    low: tuple = (0.5,)
    high: tuple = (2.0,)
    mu: float = 0.0
    sigma: float = 1.0

    @property
    def dim(self):
        return len(self.low) if self.kind == "uniform" else 1

    def sample(self, rng, n):
        if self.kind == "uniform":
            return rng.uniform(self.low, self.high, (n, self.dim))
        if self.kind == "lognormal":
            return rng.lognormal(self.mu, self.sigma, (n, 1))
        raise ContractViolation(f"unknown data law {self.kind!r}")

    def bounded_support(self):
        return self.kind == "uniform"

    def to_dict(self):
        return dict(self.__dict__)


# ---------------------------------------------------------------------------
# reference means

def tlambda_uniform_mean(lam, a, b):
    """``P T_lam`` for ``x ~ uniform(a, b)``; the ``lam = -1`` case uses logs."""
    lam = np.asarray(lam, dtype=float)
    out = np.empty(lam.shape)
    m1 = lam == -1
    out[m1] = 1.0 - (np.log(b) - np.log(a)) / (b - a)
    o = ~m1
    l = lam[o]
    out[o] = ((b ** (l + 1) - a ** (l + 1)) / ((l + 1) * (b - a)) - 1.0) / l
    return out


def tlambda_lognormal_mean(lam, mu, sigma):
    lam = np.asarray(lam, dtype=float)
    return np.expm1(lam * mu + lam ** 2 * sigma ** 2 / 2) / lam


def tlambda_quad_mean(lam, a, b):
    from .families import tlambda_values
    return integrate.quad(lambda x: float(tlambda_values(lam, x)), a, b, epsabs=1e-13, epsrel=1e-13)[0] / (b - a)


def link_antiderivative(a, b, u):
    """``H`` with ``H' = eta`` and ``H(-inf) = 0`` for the piecewise link with knots (a, b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    u = np.asarray(u, dtype=float)
    B1, c1, Bk, ck = link_tail_constants(a, b)
    H1 = B1 / c1
    seg = np.concatenate([[0.0], np.cumsum(np.diff(a) * (b[:-1] + b[1:]) / 2)])
    Hk = H1 + seg[-1]
    out = np.empty(u.shape)
    left = u < a[0]
    right = u > a[-1]
    mid = ~(left | right)
    out[left] = B1 / c1 * np.exp(c1 * (u[left] - a[0]))
    um = u[mid]
    i = np.clip(np.searchsorted(a, um, side="right") - 1, 0, len(a) - 2)
    eta = np.interp(um, a, b)
    out[mid] = H1 + seg[i] + (um - a[i]) * (b[i] + eta) / 2
    ur = u[right] - a[-1]
    out[right] = Hk + ur - Bk / ck * (-np.expm1(-ck * ur))
    return out


def link_uniform2_mean(params, k, low=(-1.0, -1.0), high=(1.0, 1.0)):
    """``E eta(x^T beta)`` for x uniform on a 2-D box, inner integral exact, outer by quad."""
    a, b, beta = params[:k], params[k:2 * k], params[2 * k:]
    (l1, l2), (h1, h2) = low, high
    b1, b2 = beta
    from .families import link_values

    if abs(b2) < 1e-9:
        def g(x1):
            return float(link_values(a, b, b1 * x1 + b2 * (l2 + h2) / 2))
    else:
        def g(x1):
            lo, hi = sorted((b1 * x1 + b2 * l2, b1 * x1 + b2 * h2))
            H = link_antiderivative(a, b, np.array([lo, hi]))
            return float((H[1] - H[0]) / (hi - lo))

    pts = []
    if abs(b1) > 1e-12:
        for ai in a:
            for off in (b2 * l2, b2 * h2):
                x = (ai - off) / b1
                if l1 < x < h1:
                    pts.append(x)
    val = integrate.quad(g, l1, h1, points=sorted(set(pts)) or None, epsabs=1e-11, epsrel=1e-10, limit=200)[0]
    return val / (h1 - l1)


def mc_mean(family, params, law, seed, samples=10 ** 7, chunk=200_000):
    """Reference Monte-Carlo means and their standard errors."""
    P = family.check_params(params)
    rng = derive_rng(seed, "ulln-reference", family.name)
    s1 = np.zeros(len(P))
    s2 = np.zeros(len(P))
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        F = family.evaluator_batch(P, law.sample(rng, m))
        s1 += F.sum(axis=1)
        s2 += (F ** 2).sum(axis=1)
        done += m
    mean = s1 / samples
    se = np.sqrt(np.maximum(s2 / samples - mean ** 2, 0.0) / samples)
    return mean, se


def reference_means(family: FamilyHandle, params, law: DataLaw, seed=0, mc_samples=10 ** 7):
    """(means, method, standard errors or None)."""
    P = family.check_params(params)
    if family.kind == "tlambda" and law.kind == "uniform":
        return tlambda_uniform_mean(P[:, 0], law.low[0], law.high[0]), "closed_form", None
    if family.kind == "tlambda" and law.kind == "lognormal":
        return tlambda_lognormal_mean(P[:, 0], law.mu, law.sigma), "closed_form", None
    if family.kind == "constant":
        return np.full(len(P), family.info["value"]), "closed_form", None
    if family.kind == "piecewise_link" and law.kind == "uniform" and law.dim == 2:
        k = family.info["k"]
        return np.array([link_uniform2_mean(p, k, law.low, law.high) for p in P]), "quadrature", None
    mean, se = mc_mean(family, P, law, seed, mc_samples)
    return mean, "monte_carlo", se


# ---------------------------------------------------------------------------
# parameter grids

def tlambda_grid(step=0.01, lo=-2.0, hi=2.0):
    """Lambda grid ``lo, lo + step, ..., hi`` without 0; halving ``step`` nests the grid."""
    m = int(round((hi - lo) / step))
    lam = lo + (hi - lo) * np.arange(m + 1) / m
    return lam[np.abs(lam) > step / 4][:, None]


def link_param_grid(k, angles, knots=(-1.5, 0.0, 1.5), levels=(0.2, 0.5, 0.8), radii=(0.5, 1.5)):
    """Piecewise-link parameters for d' = 2: knot and level subsets times a polar beta grid.

    Doubling ``angles`` nests the grid, and the empirical mean is smooth in the
    angle, so the sup converges quickly under refinement.
    """
    if len(knots) < k or len(levels) < k:
        raise ContractViolation("need at least k knot values and k levels")
    th = 2 * np.pi * np.arange(angles) / angles
    rows = []
    for a in itertools.combinations(knots, k):
        for b in itertools.combinations(levels, k):
            for r in radii:
                for t in th:
                    rows.append(list(a) + list(b) + [r * np.cos(t), r * np.sin(t)])
    return np.array(rows)


# ---------------------------------------------------------------------------
# runs

def check_envelope(family: FamilyHandle, params, law: DataLaw, probes=20_000, seed=0):
    """Reject (family, law) pairs whose evaluator is unbounded on the law's support."""
    if not family.is_function_class:
        raise ContractViolation(f"{family.name} has no evaluator")
    if family.kind in BOUNDED_KINDS:
        return True
    if family.kind == "tlambda":
        P = family.check_params(params)
        if not law.bounded_support():
            raise ContractViolation("T_lambda has no bounded envelope on an unbounded support")
        if law.low[0] <= 0 and np.any(P[:, 0] < 0):
            raise ContractViolation("T_lambda with lambda < 0 is unbounded near x = 0")
        return True
    if not law.bounded_support():
        raise ContractViolation(f"cannot certify a bounded envelope for {family.name} on this law")
    X = law.sample(derive_rng(seed, "envelope"), probes)
    F = family.evaluator_batch(family.check_params(params), X)
    if not np.all(np.isfinite(F)):
        raise ContractViolation("evaluator is not finite on the support")
    return True


@dataclass
class UllnRun:
    family: str
    params: np.ndarray
    law: DataLaw
    n_grid: list
    reps: int
    seed: int
    sup_dev: np.ndarray  # (len(n_grid), reps)
    ref_method: str = ""
    ref_se: Optional[float] = None
    info: dict = field(default_factory=dict)

    def medians(self):
        return np.median(self.sup_dev, axis=1)

    def csv_rows(self):
        return [(n, r, float(self.sup_dev[i, r])) for i, n in enumerate(self.n_grid) for r in range(self.reps)]


def sup_deviation(F_means, ref):
    return float(np.max(np.abs(F_means - ref)))


def empirical_means(family, P, X, chunk=64):
    out = np.empty(len(P))
    for i in range(0, len(P), chunk):
        out[i:i + chunk] = family.evaluator_batch(P[i:i + chunk], X).mean(axis=1)
    return out


def run_ulln(family: FamilyHandle, params, law: DataLaw, n_grid, reps: int, seed: int, ref=None,
             jobs: int = 1) -> UllnRun:
    """sup over the parameter grid of ``|P_n f - P f|`` for every (n, rep) cell.

    Cell (n, r) draws from its own stream ``derive_rng(seed, "ulln", name, n, r)``,
    so results do not depend on ``jobs``.
    """
    P = family.check_params(params)
    check_envelope(family, P, law)
    n_grid = [int(n) for n in n_grid]
    if reps < 1 or not n_grid or min(n_grid) < 1:
        raise ContractViolation("need reps >= 1 and sample sizes >= 1")
    if ref is None:
        ref, method, se = reference_means(family, P, law, seed)
    else:
        method, se = "supplied", None

    def cell(nr):
        n, r = nr
        X = law.sample(derive_rng(seed, "ulln", family.name, n, r), n)
        return sup_deviation(empirical_means(family, P, X), ref)

    cells = [(n, r) for n in n_grid for r in range(reps)]
    sup = np.array(parallel_map(cell, cells, jobs)).reshape(len(n_grid), reps)
    return UllnRun(family.name, P, law, n_grid, reps, seed, sup, method,
                   None if se is None else float(np.max(se)), {"ref": ref})


def grid_refinement_change(family, coarse, fine, law, n, reps, seed):
    """Relative change of the median sup deviation when the parameter grid is refined.

    ``coarse`` must be a subset of ``fine``; per replication the fine sup is
    never below the coarse one.
    """
    rc = run_ulln(family, coarse, law, [n], reps, seed)
    rf = run_ulln(family, fine, law, [n], reps, seed)
    monotone = bool(np.all(rf.sup_dev >= rc.sup_dev - 1e-15))
    mc, mf = float(np.median(rc.sup_dev)), float(np.median(rf.sup_dev))
    return (mf - mc) / mf if mf > 0 else 0.0, monotone


def adaptive_grid(family, make_grid, start, law, n=1000, reps=50, seed=0, tol=0.02, max_doublings=5):
    """Refine ``make_grid(level)`` until ``make_grid(2 * level)`` changes the median sup by < ``tol``.

    Returns (grid, level, history) where history holds (level, change, monotone).
    """
    level = start
    history = []
    for _ in range(max_doublings + 1):
        coarse, fine = make_grid(level), make_grid(2 * level)
        change, mono = grid_refinement_change(family, coarse, fine, law, n, reps, seed)
        history.append((level, change, mono))
        if abs(change) < tol:
            return coarse, level, history
        level *= 2
    raise ContractViolation(f"parameter grid did not settle within {max_doublings} doublings")


@dataclass
class RateFit:
    alpha: Optional[float]
    C: Optional[float]
    r2: Optional[float]
    ratios: list
    max_ratio: list
    ratio_nonincreasing: bool
    ratio_slope: Optional[float] = None
    degenerate: bool = False

    def to_dict(self):
        return dict(self.__dict__)


def fit_rate(run: UllnRun) -> RateFit:
    """Fit ``median sup_dev ~ C n^-alpha``; report ``sup_dev / (log n / sqrt n)``."""
    n = np.asarray(run.n_grid, dtype=float)
    if len(n) < 5:
        raise ContractViolation("fit_rate needs at least 5 sample sizes")
    if n.max() < 100 * n.min():
        raise ContractViolation("fit_rate needs sample sizes spanning two decades")
    med = run.medians()
    scale = np.log(n) / np.sqrt(n)
    ratios = (med / scale).tolist()
    max_ratio = (run.sup_dev.max(axis=1) / scale).tolist()
    nonincr = bool(np.all(np.diff(ratios) <= 0))
    if np.any(med <= 0):
        return RateFit(None, None, None, ratios, max_ratio, nonincr, None, degenerate=True)
    # least-squares trend of log ratio against log n, a noise-tolerant companion to the strict check
    rslope = float(np.polyfit(np.log(n), np.log(ratios), 1)[0])
    slope, icpt = np.polyfit(np.log(n), np.log(med), 1)
    pred = slope * np.log(n) + icpt
    ly = np.log(med)
    ss = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1 - float(np.sum((ly - pred) ** 2)) / ss if ss > 0 else 1.0
    return RateFit(float(-slope), float(np.exp(icpt)), r2, ratios, max_ratio, nonincr, rslope)


def quantile_trend(run: UllnRun, q=0.9):
    """q-quantile of sup_dev at the largest n is below that at the smallest n."""
    qs = np.quantile(run.sup_dev, q, axis=1)
    return bool(qs[-1] < qs[0]), qs.tolist()


def summary_json(run: UllnRun, fit: RateFit) -> str:
    return json.dumps({"family": run.family, "law": run.law.to_dict(), "n_grid": run.n_grid, "reps": run.reps,
                       "seed": run.seed, "reference": run.ref_method, "reference_se": run.ref_se,
                       "fit": fit.to_dict()}, indent=2, sort_keys=True)
