import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vclab.core import ContractViolation, subgraph_member
from vclab.families import (eval_link, finite_powerset_family, gaussian_link_family, harmonic2d_family,
                            halfplane_candidates, halfplane_family, link_tail_constants, link_values,
                            make_family, monotone_step_family, normal_cdf, piecewise_link_family,
                            s_lambda_member, shifted_union_construct, shifted_union_family, tlambda_family,
                            tlambda_values, union_family, xlambda_member)
from vclab.oracles import halfplane_trace_count, shifted_union_rows
from vclab.shatter import exact_trace_rows, shifted_union_sweep

FUNCTION_FAMILIES = [
    tlambda_family(),
    piecewise_link_family(3, 2),
    gaussian_link_family(2),
    harmonic2d_family(1),
    monotone_step_family(20),
    make_family({"family": "constant", "fixed": {"value": -0.3}}),
]


def test_make_family_bounds():
    t = make_family("tlambda")
    assert (t.param_dim, t.density_bound) == (1, 1)
    link = make_family({"family": "piecewise_link", "fixed": {"k": 3, "d": 2}})
    assert (link.param_dim, link.density_bound) == (8, 10)
    h = make_family({"family": "harmonic2d", "fixed": {"m": 1}})
    assert (h.param_dim, h.density_bound) == (6, 6)


def test_make_family_errors():
    with pytest.raises(ContractViolation, match="unknown family"):
        make_family("nope")
    with pytest.raises(ContractViolation, match="missing fixed field"):
        make_family({"family": "finite_powerset", "fixed": {}})


# --- T_lambda

@given(st.floats(-3, 3).filter(lambda v: abs(v) > 1e-3), st.floats(0.05, 20))
def test_tlambda_matches_power_formula(lam, x):
    assert tlambda_values(lam, x) == pytest.approx((x ** lam - 1) / lam, rel=1e-9, abs=1e-12)


def test_tlambda_edges():
    assert tlambda_values(2.0, 0.0) == -0.5
    assert tlambda_values(5e-324, 3.0) == pytest.approx(np.log(3.0), rel=1e-15)
    assert tlambda_values(-1e-300, 0.5) == pytest.approx(np.log(0.5), rel=1e-15)
    with pytest.raises(ContractViolation):
        tlambda_values(-1.0, 0.0)
    with pytest.raises(ContractViolation):
        tlambda_values(0.0, 2.0)
    with pytest.raises(ContractViolation):
        tlambda_values(1.0, -1.0)


def test_tlambda_derivative_positive():
    # dh/dlam > 0 for x != 1, including at lam = 0 where it equals (ln x)^2 / 2
    lam = np.linspace(-3, 3, 601)
    lam = lam[np.abs(lam) > 1e-6]
    for x in (0.1, 0.5, 2.0, 10.0):
        h = 1e-6
        d = (tlambda_values(lam + h, x) - tlambda_values(lam - h, x)) / (2 * h)
        assert np.all(d > 0)
        d0 = (tlambda_values(h, x) - tlambda_values(-h, x)) / (2 * h)
        assert d0 == pytest.approx(np.log(x) ** 2 / 2, rel=1e-5)


def test_s_lambda_uses_closed_rule_at_zero_height():
    assert s_lambda_member(1.0, 0.5, 0.0)  # T = -0.5 < 0 but t = 0 is in the closed subgraph
    assert not s_lambda_member(1.0, 0.5, -0.6)


def test_xlambda_example():
    assert xlambda_member(1.0, 2.0)
    assert not xlambda_member(1.0, 0.5)


# --- subgraph agreement for every function class

@pytest.mark.parametrize("fam", FUNCTION_FAMILIES, ids=lambda f: f.name)
def test_subgraph_membership_agrees_with_inequalities(fam, rng):
    P = fam.sample_params(rng, 100)
    X = fam.sample_points(rng, 100)
    F = fam.evaluator_batch(P, X[:, :fam.input_dim])
    t = X[:, -1]
    got = fam.member_batch(P, X)
    if fam.subgraph_rule == "closed":
        want = ((0 <= t) & (t <= F)) | ((0 >= t) & (t >= F))
    else:
        want = ((0 <= t) & (t <= F)) | ((0 > t) & (t > F))
    assert np.array_equal(got, want)
    # (x, f(x)) belongs for f(x) > 0, and for f(x) < 0 only under the closed rule;
    # points beyond f(x) on its side never do
    f0 = fam.evaluator_batch(P[:1], X[:, :fam.input_dim])[0]
    on = fam.member_batch(P[:1], np.column_stack([X[:, :fam.input_dim], f0]))[0]
    assert np.all(on[f0 > 0])
    if fam.subgraph_rule == "closed":
        assert np.all(on[f0 < 0])
    else:
        assert not np.any(on[f0 < 0])
    beyond = fam.member_batch(P[:1], np.column_stack([X[:, :fam.input_dim], 1.5 * f0 + np.sign(f0)]))[0]
    assert not np.any(beyond[f0 != 0])


# --- half-planes

def test_halfplane_all_is_union_of_variants(rng):
    fam = halfplane_family("all")
    P = fam.sample_params(rng, 500)
    X = rng.uniform(-1, 1, (30, 2))
    m = fam.member_batch(P, X)
    up = P[:, 1] < 0
    assert np.array_equal(m[up], halfplane_family("upper").member_batch(P[up], X))
    assert np.array_equal(m[~up], halfplane_family("lower").member_batch(P[~up], X))


@pytest.mark.parametrize("variant", ["upper", "lower", "all"])
def test_halfplane_candidates_match_lp_oracle(variant, rng):
    fam = halfplane_family(variant)
    for _ in range(4):
        X = rng.uniform(-1, 1, (7, 2))
        assert len(exact_trace_rows(fam, X)) == halfplane_trace_count(X, variant)


def test_halfplane_candidates_respect_variant(rng):
    X = rng.uniform(-1, 1, (6, 2))
    assert np.all(halfplane_candidates(X, "upper")[:, 1] < 0)
    assert np.all(halfplane_candidates(X, "lower")[:, 1] > 0)


# --- finite powerset

def test_powerset_member_set_is_the_subset():
    fam = finite_powerset_family(3, anchors=[0.1, 0.2, 0.3])
    X = np.array([[0.1], [0.2], [0.3], [0.15]])
    assert fam.member_batch(np.array([[5.0]]), X)[0].tolist() == [True, False, True, False]


# --- shifted union

def test_shifted_union_single_anchor():
    anchors, r, blocks, J = shifted_union_construct(1, [0.5])
    assert len(blocks) == 2
    assert J.shift(-2).contains([0.5])[0]
    assert not J.shift(-1).contains([0.5])[0]


@pytest.mark.parametrize("N", [1, 2, 3, 5])
def test_shifted_union_shift_k_realises_subset_k(N):
    anchors, r, blocks, J = shifted_union_construct(N)
    for s in range(2 ** N):
        got = J.shift(-(s + 1)).contains(anchors)
        assert got.tolist() == [bool((s >> j) & 1) for j in range(N)]


def test_shifted_union_blocks_disjoint():
    anchors, r, blocks, J = shifted_union_construct(4)
    pieces = [(lo + s + 1, hi + s + 1) for s, b in enumerate(blocks) for lo, hi, _, _ in b.intervals]
    pieces.sort()
    assert all(a[1] < b[0] for a, b in zip(pieces, pieces[1:]))
    assert all(s + 1 < lo and hi < s + 2 for s, b in enumerate(blocks) for lo, hi, _, _ in
               [(lo + s + 1, hi + s + 1, 0, 0) for lo, hi, _, _ in b.intervals])


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_shifted_union_sweep_matches_oracle(N, rng):
    # random points have distinct breakpoints almost surely; anchors alone are checked
    # separately since mixing them with random points adds no structure but rounding
    fam = shifted_union_family(N)
    for X in [rng.uniform(0, 1, 10) for _ in range(5)] + [fam.info["anchors"]]:
        a = shifted_union_sweep(fam.info["J"], X)
        b = shifted_union_rows(fam.info["J"], X)
        assert sorted(map(tuple, a.tolist())) == sorted(map(tuple, b.tolist()))


# --- piecewise link

def test_eval_link_examples():
    fam = piecewise_link_family(2, 1)
    p = [0.0, 1.0, 0.25, 0.75, 1.0]
    assert eval_link(fam, p, 0.5) == pytest.approx(0.5)
    assert eval_link(fam, p, 0.0) == pytest.approx(0.25)
    assert eval_link(fam, p, -1.0) == pytest.approx(0.25 * np.exp(-2.0))
    assert eval_link(fam, p, -1.0) == pytest.approx(0.03383, abs=1e-5)


def test_link_tail_constants_closed_form():
    B1, c1, Bk, ck = link_tail_constants([0.0, 1.0, 3.0], [0.2, 0.5, 0.9])
    assert (B1, Bk) == (0.2, pytest.approx(0.1))
    assert c1 == pytest.approx(0.3 / 0.2)
    assert ck == pytest.approx(0.4 / (2 * 0.1))


@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3, unique=True),
       st.lists(st.floats(0.01, 0.99), min_size=3, max_size=3, unique=True))
def test_link_is_c1_at_boundary_knots(a, b):
    a, b = np.sort(a), np.sort(b)
    if np.min(np.diff(a)) < 1e-2 or np.min(np.diff(b)) < 1e-3:
        return
    h = 1e-7
    for knot in (a[0], a[-1]):
        # second-order one-sided differences; the exponential tails can be steep (rate ~ 1e3)
        left = link_values(a, b, [knot - 2 * h, knot - h, knot])
        right = link_values(a, b, [knot, knot + h, knot + 2 * h])
        dl = (left[0] - 4 * left[1] + 3 * left[2]) / (2 * h)
        dr = (-3 * right[0] + 4 * right[1] - right[2]) / (2 * h)
        assert dl == pytest.approx(dr, rel=1e-4)
        assert link_values(a, b, [knot - 1e-13])[0] == pytest.approx(link_values(a, b, [knot])[0], rel=1e-9)
    u = np.linspace(-5, 5, 2001)
    v = link_values(a, b, u)
    assert np.all(np.diff(v) >= 0) and np.all((v >= 0) & (v <= 1))
    # the tails reach 0 and 1 only by underflow or by a gap below an ulp
    B1, c1, Bk, ck = link_tail_constants(a, b)
    assert np.all(v[B1 * np.exp(np.minimum(c1 * (u - a[0]), 0)) > 1e-300] > 0)
    assert np.all(v[Bk * np.exp(-ck * (u - a[-1])) > 1e-15] < 1)
    assert np.allclose(link_values(a, b, a), b)


def test_link_rejects_bad_knots():
    with pytest.raises(ContractViolation):
        link_values([1.0, 0.0], [0.2, 0.5], 0.0)
    with pytest.raises(ContractViolation):
        link_values([0.0, 1.0], [0.5, 1.0], 0.0)


# --- Gaussian link, harmonic, monotone

def test_normal_cdf_accuracy():
    from scipy.stats import norm
    z = np.linspace(-8, 8, 161)
    assert np.allclose(normal_cdf(z), norm.cdf(z), rtol=1e-12, atol=0)


def test_gaussian_link_increasing_along_beta(rng):
    fam = gaussian_link_family(2)
    P = fam.sample_params(rng, 20)
    s = np.linspace(-1, 1, 50)
    for p in P:
        beta = p[2:]
        X = s[:, None] * beta[None, :] / np.dot(beta, beta)
        v = fam.evaluator_batch(p[None], X)[0]
        assert np.all(np.diff(v) > 0) and np.all((v > 0) & (v < 1))


def test_harmonic_envelope_bounded(rng):
    fam = harmonic2d_family(1)
    P = fam.sample_params(rng, 200)
    X = np.concatenate([rng.uniform(-1, 1, (300, 2)), P[:5, 4:6]])
    F = fam.evaluator_batch(P, X)
    C = fam.info["C"]
    assert np.all(np.abs(F) <= C)
    assert fam.evaluator_batch(P[:1], P[:1, 4:6])[0, 0] == -C


def test_harmonic_rejects_singular_matrix():
    fam = harmonic2d_family(1)
    with pytest.raises(ContractViolation):
        fam.check_params([[1, 2, 2, 4, 0, 0]])


def test_monotone_step_params_monotone(rng):
    fam = monotone_step_family(30)
    P = fam.sample_params(rng, 50)
    assert np.all(np.diff(P, axis=1) >= 0) and np.all((P >= 0) & (P <= 1))


def test_union_family_members_and_checks(rng):
    up, lo = halfplane_family("upper"), halfplane_family("lower")
    un = union_family([up, lo])
    P = un.sample_params(rng, 100)
    un.check_params(P)
    with pytest.raises(ContractViolation):
        un.check_params([[0, 1.0, 1.0, 0.0]])  # upper needs b < 0
    with pytest.raises(ContractViolation):
        union_family([up, finite_powerset_family(2)])


def test_constant_family_values():
    fam = make_family({"family": "constant", "fixed": {"value": 0.25, "input_dim": 2}})
    F = fam.evaluator_batch(np.zeros((3, fam.param_dim)), np.zeros((4, 2)))
    assert np.all(F == 0.25)
    assert subgraph_member(F, 0.1).all()
