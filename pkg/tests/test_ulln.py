import numpy as np
import pytest

from vclab.core import ContractViolation
from vclab.families import constant_family, piecewise_link_family, tlambda_family
from vclab.ulln import (DataLaw, UllnRun, adaptive_grid, check_envelope, fit_rate, grid_refinement_change,
                        link_param_grid, link_uniform2_mean, mc_mean, quantile_trend, reference_means, run_ulln,
                        summary_json, tlambda_grid, tlambda_lognormal_mean, tlambda_quad_mean,
                        tlambda_uniform_mean)

U = DataLaw("uniform", (0.5,), (2.0,))
U2 = DataLaw("uniform", (-1.0, -1.0), (1.0, 1.0))
N_GRID = [100, 316, 1000, 3162, 10000]


def test_constant_family_has_zero_deviation():
    run = run_ulln(constant_family(0.25), np.zeros((1, 0)), U, [10, 100], reps=3, seed=0)
    assert np.all(run.sup_dev == 0)
    # 0.3 is not dyadic, so its running mean may land an ulp away
    run = run_ulln(constant_family(0.3), np.zeros((1, 0)), U, [10, 100], reps=3, seed=0)
    assert np.all(run.sup_dev <= 1e-15)


def test_tlambda_closed_form_matches_quadrature():
    lam = np.array([-2.0, -1.0, -0.5, -1e-6, 1e-6, 0.3, 1.0, 2.0])
    quad = [tlambda_quad_mean(v, 0.5, 2.0) for v in lam]
    assert np.allclose(tlambda_uniform_mean(lam, 0.5, 2.0), quad, rtol=0, atol=1e-8)


def test_tlambda_lognormal_mean_matches_mc():
    law = DataLaw("lognormal", mu=0.0, sigma=0.5)
    fam = tlambda_family()
    lam = np.array([[-1.0], [0.5], [1.5]])
    mc, se = mc_mean(fam, lam, law, seed=1, samples=400_000)
    assert np.all(np.abs(tlambda_lognormal_mean(lam[:, 0], 0.0, 0.5) - mc) <= 5 * se)


def test_link_mean_matches_mc(rng):
    fam = piecewise_link_family(2, 2)
    P = fam.sample_params(rng, 4)
    exact = np.array([link_uniform2_mean(p, 2) for p in P])
    mc, se = mc_mean(fam, P, U2, seed=2, samples=400_000)
    assert np.all(np.abs(exact - mc) <= 5 * se + 1e-12)


def test_reference_prefers_closed_forms(rng):
    ref, method, _ = reference_means(tlambda_family(), [[0.5]], U)
    assert method == "closed_form" and ref[0] == pytest.approx(tlambda_uniform_mean(0.5, 0.5, 2.0))


def test_envelope_rejections():
    fam = tlambda_family()
    with pytest.raises(ContractViolation):
        check_envelope(fam, [[0.5]], DataLaw("lognormal"))
    with pytest.raises(ContractViolation):
        check_envelope(fam, [[-0.5]], DataLaw("uniform", (0.0,), (1.0,)))
    assert check_envelope(fam, [[-0.5]], U)
    with pytest.raises(ContractViolation):
        run_ulln(fam, [[0.5]], DataLaw("lognormal"), [10], reps=1, seed=0)


def test_run_validation():
    with pytest.raises(ContractViolation):
        run_ulln(tlambda_family(), [[0.5]], U, [10], reps=0, seed=0)


def test_single_function_rate_is_root_n():
    run = run_ulln(tlambda_family(), [[1.0]], U, N_GRID, reps=40, seed=3)
    fit = fit_rate(run)
    assert fit.alpha == pytest.approx(0.5, abs=0.1)
    assert quantile_trend(run)[0]


def test_fit_rate_requirements():
    run = UllnRun("x", np.zeros((1, 1)), U, [10, 20, 30, 40, 50], 1, 0, np.ones((5, 1)))
    with pytest.raises(ContractViolation):
        fit_rate(run)
    flat = UllnRun("x", np.zeros((1, 1)), U, N_GRID, 1, 0, np.zeros((5, 1)))
    assert fit_rate(flat).degenerate


def test_refinement_never_lowers_sup():
    change, mono = grid_refinement_change(tlambda_family(), tlambda_grid(0.1), tlambda_grid(0.05), U, 200, 10, 0)
    assert mono and change >= 0


def test_grids_nest():
    coarse, fine = tlambda_grid(0.02), tlambda_grid(0.01)
    assert not np.any(coarse == 0) and len(fine) == 400
    assert np.all(np.isin(np.round(coarse, 12), np.round(fine, 12)))
    a, b = link_param_grid(2, 8), link_param_grid(2, 16)
    assert a.shape[1] == b.shape[1] == 6
    assert {tuple(np.round(r, 12)) for r in a} <= {tuple(np.round(r, 12)) for r in b}
    piecewise_link_family(2, 2).check_params(b)


def test_adaptive_grid_settles():
    grid, level, hist = adaptive_grid(tlambda_family(), lambda m: tlambda_grid(4.0 / m), 100, U, n=300, reps=10)
    assert len(grid) == len(tlambda_grid(4.0 / level))
    assert abs(hist[-1][1]) < 0.02 and all(h[2] for h in hist)


def test_results_do_not_depend_on_jobs():
    fam = tlambda_family()
    a = run_ulln(fam, tlambda_grid(0.1), U, [50, 200], reps=4, seed=11, jobs=1)
    b = run_ulln(fam, tlambda_grid(0.1), U, [50, 200], reps=4, seed=11, jobs=2)
    assert np.array_equal(a.sup_dev, b.sup_dev)
    c = run_ulln(fam, tlambda_grid(0.1), U, [50, 200], reps=4, seed=12)
    assert not np.array_equal(a.sup_dev, c.sup_dev)


def test_summary_json_roundtrip():
    import json
    run = run_ulln(tlambda_family(), tlambda_grid(0.5), U, N_GRID, reps=3, seed=0)
    d = json.loads(summary_json(run, fit_rate(run)))
    assert d["n_grid"] == N_GRID and d["reference"] == "closed_form" and "alpha" in d["fit"]
