import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vclab.core import ContractViolation, PointSet, collect_traces, pack_rows, unique_rows
from vclab.families import (finite_powerset_family, halfplane_family, shifted_union_family, tlambda_family,
                            union_family)
from vclab.oracles import dense_lambda_count, halfplane_trace_count, powerset_union_vc_bruteforce, shifted_union_rows
from vclab.shatter import (ShatterEntry, ShatterProfile, dual_shatter, estimate_delta, exact_trace_rows,
                           fit_density, prefix_trace_counts, sauer_bound, shatter_profile, union_bound_check, vc_dim)

GRID = [8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256]


def test_powerset_delta_is_two_to_k():
    assert estimate_delta(finite_powerset_family(3), 10, seed=1, point_sets=5).delta_hat == 8


def test_halfplanes_shatter_three_points():
    fam = halfplane_family("all")
    e = estimate_delta(fam, 3, seed=1, points=[[[0, 0], [1, 0], [0, 1]]])
    assert (e.delta_hat, e.method) == (8, "exact")


def test_tlambda_delta_at_most_n_plus_one():
    prof = shatter_profile(tlambda_family(), [1, 2, 5, 20, 60], seed=3, point_sets=10)
    assert all(e.delta_hat <= e.n + 1 for e in prof.entries)


def test_budget_must_be_positive():
    with pytest.raises(ContractViolation):
        estimate_delta(halfplane_family("all"), 4, seed=0, param_budget=0)


def test_entry_rejects_impossible_count():
    with pytest.raises(ContractViolation):
        ShatterEntry(3, 9, "exact", 1, 0)


def test_sauer_examples():
    assert sauer_bound(5, 2) == 16
    assert sauer_bound(10, 2) == 56 == (10 ** 2 - 10) // 2 + 10 + 1
    assert sauer_bound(4, 4) == 16
    assert sauer_bound(200, 100) > 2 ** 64  # stays exact past 64 bits
    with pytest.raises(ContractViolation):
        sauer_bound(-1, 2)


@given(st.integers(0, 60), st.integers(0, 60))
def test_sauer_matches_binomial_sum(n, v):
    assert sauer_bound(n, v) == sum(math.comb(n, j) for j in range(min(n, v) + 1))


def test_vc_dim_examples():
    assert vc_dim(halfplane_family("upper"), 5, seed=0).label == "2"
    assert vc_dim(halfplane_family("all"), 5, seed=0).label == "3"
    r = vc_dim(finite_powerset_family(4), 6, seed=0)
    assert r.label == "4" and r.verify(finite_powerset_family(4))
    fam = shifted_union_family(6)
    r = vc_dim(fam, 6, seed=0)
    assert r.dim == 6 and r.label == ">=6"
    assert np.allclose(r.witness.points[:, 0], fam.info["anchors"])


def test_vc_dim_budget_limit():
    with pytest.raises(ContractViolation):
        vc_dim(halfplane_family("all"), 21, seed=0)


def test_union_bound_examples():
    up, lo, al = (halfplane_family(v) for v in ("upper", "lower", "all"))
    un = union_family([up, lo], name="halfplane_union")
    grid = [2, 4, 6, 10]
    profs = [shatter_profile(f, grid, seed=5, point_sets=4) for f in (up, lo, un)]
    assert union_bound_check(profs[:2], profs[2])
    assert profs[2].delta()[10] <= 10 ** 2 + 10 + 2
    pa = shatter_profile(al, grid, seed=5, point_sets=4)
    assert union_bound_check([pa], pa)
    with pytest.raises(ContractViolation):
        union_bound_check([shatter_profile(up, [2, 4], seed=5, point_sets=2)], profs[2])


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_powerset_union_vc_growth(k):
    anchors = [[float(i)] for i in range(k)]
    fams = [finite_powerset_family(1, anchors=a) for a in anchors]
    un = union_family(fams, name=f"powerset_union_{k}")
    got = vc_dim(un, 6, seed=0, tries=50).dim
    assert got == powerset_union_vc_bruteforce(anchors)
    assert got <= math.log2(k) + 1


def test_dual_shatter_examples(rng):
    fam = halfplane_family("all")
    P = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])  # x < 0 and y < 0
    assert dual_shatter(fam, seed=0, params=P) == 4
    assert dual_shatter(fam, seed=0, params=P[:1]) <= 2
    with pytest.raises(ContractViolation):
        dual_shatter(fam, seed=0)


def test_tlambda_dual_dimension_below_five(rng):
    fam = tlambda_family()
    for _ in range(5):
        lam = rng.uniform(-3, 3, (5, 1))
        assert dual_shatter(fam, seed=0, params=lam, probe_budget=20_000) < 2 ** 5


def test_fit_density_examples():
    k3 = shatter_profile(finite_powerset_family(3), GRID, seed=2, point_sets=3)
    assert abs(fit_density(k3)[0]) <= 0.05
    tl = shatter_profile(tlambda_family(), GRID, seed=2, point_sets=3)
    assert fit_density(tl)[0] <= 1.1
    # the shifted union grows near 2^n until n ~ 32, so it is fitted on every integer n
    su = shatter_profile(shifted_union_family(8), range(8, 257), seed=2, point_sets=2)
    assert fit_density(su)[0] <= 1.2


def test_fit_density_degenerate_and_errors():
    prof = ShatterProfile("c", [ShatterEntry(n, 4, "exact", 1, 0) for n in (4, 8, 16, 64)])
    assert fit_density(prof) == (0.0, 4.0, 1.0)
    with pytest.raises(ContractViolation):
        fit_density(ShatterProfile("c", prof.entries[:3]))


@settings(max_examples=25)
@given(st.integers(1, 130), st.integers(1, 40), st.integers(0, 2 ** 32 - 1))
def test_prefix_counts_match_direct_projection(n, m, s):
    r = np.random.default_rng(s)
    member = r.random((m, n)) < 0.5
    rows = unique_rows(pack_rows(member))
    ks = sorted({1, max(1, n // 3), n})
    got = prefix_trace_counts(rows, ks)
    want = [len(unique_rows(pack_rows(member[:, :k]))) for k in ks]
    assert got == want


def test_exact_halfplanes_equal_lp_oracle(rng):
    for variant in ("all", "upper", "lower"):
        fam = halfplane_family(variant)
        X = rng.normal(size=(8, 2))
        assert len(exact_trace_rows(fam, X)) == halfplane_trace_count(X, variant)


def test_exact_shifted_union_equals_oracle(rng):
    fam = shifted_union_family(5)
    X = rng.uniform(0, 1, (12, 1))
    assert len(exact_trace_rows(fam, X)) == len(shifted_union_rows(fam.info["J"], X[:, 0]))


def test_exact_tlambda_equals_dense_oracle(rng):
    fam = tlambda_family()
    X = fam.sample_points(rng, 12)
    assert len(exact_trace_rows(fam, X)) == dense_lambda_count(X[:, 0], X[:, 1], grid_size=200_000)


def test_exact_at_least_sampled(rng):
    fam = halfplane_family("all")
    X = rng.normal(size=(10, 2))
    sampled = collect_traces(fam, fam.sample_params(rng, 5000), PointSet(X))
    assert len(sampled) <= len(exact_trace_rows(fam, X))


def test_profile_is_deterministic_across_jobs():
    fam = halfplane_family("all")
    a = shatter_profile(fam, [4, 8, 16], seed=9, point_sets=4, jobs=1)
    b = shatter_profile(fam, [4, 8, 16], seed=9, point_sets=4, jobs=2)
    assert a.delta() == b.delta() and a.to_json() == b.to_json()
