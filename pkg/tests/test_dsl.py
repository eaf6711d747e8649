import json
import re
import warnings
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vclab.core import ContractViolation
from vclab.criteria import dsl_twin_agreement
from vclab.dsl import (LEVELS, TWINS, DslScopeError, DslSignatureError, DslSyntaxError, QuantifierBox, certify,
                       eval_formula, link_formula_source, load_twin, parse, resolve_formula, symbols)
from vclab.dsl import parser as parser_mod

GOLDEN = Path(__file__).parent / "golden"
DOCS = Path(__file__).parents[1] / "docs"
BOX_COX = "exists y . (exp(lam*y) - 1 = z) and (exp(y) = x)"


def test_semispace_parses_with_three_params():
    f = parse("b1*x1 + b2*x2 + b3 < 0", params=["b1", "b2", "b3"], data=["x1", "x2"], level="R_alg")
    c = certify(f)
    assert (c.d, c.density_bound, c.min_level) == (3, 3, "R_alg")


def test_exp_needs_r_exp():
    with pytest.raises(DslSignatureError, match="exp requires R_exp"):
        parse(BOX_COX, params=["lam"], data=["x", "z"], level="R_alg")
    assert certify(parse(BOX_COX, params=["lam"], data=["x", "z"], level="R_exp")).d == 1


def test_real_power_needs_r_exp():
    with pytest.raises(DslSignatureError, match="requires R_exp"):
        parse("x^lam < 1", params=["lam"], data=["x"])
    parse("x^3 < 1", data=["x"])


def test_scope_errors():
    with pytest.raises(DslScopeError, match="quantified parameter"):
        parse("exists lam . lam*x < 1", params=["lam"], data=["x"])
    with pytest.raises(DslScopeError, match="undeclared"):
        parse("a*x < q", params=["a"], data=["x"])
    with pytest.raises(DslScopeError):
        parse("a < 1", params=["a"], data=["a"])


@pytest.mark.parametrize("src", ["x < ", "x < 1 )", "(x < 1", "x << 1", "exists . x < 1", "x $ 1"])
def test_syntax_errors_report_position(src):
    with pytest.raises(DslSyntaxError, match="column"):
        parse(src, data=["x"])


def test_unknown_function_and_arity():
    with pytest.raises(DslSignatureError, match="unknown function"):
        parse("gamma(x) < 1", data=["x"], level="R_an_Pfaff")
    with pytest.raises(DslSignatureError, match="argument"):
        parse("max(x) < 1", data=["x"])


def test_division_adds_guard_warning():
    with pytest.warns(UserWarning, match="division guard"):
        f = parse("1/x > 0", data=["x"])
    assert eval_formula(f, [[0.0], [2.0], [-1.0]], []).tolist() == [False, True, False]


def test_levels_are_nested():
    for lo, hi in zip(LEVELS, LEVELS[1:]):
        assert set(symbols(lo)) < set(symbols(hi))


@pytest.mark.parametrize("name", sorted(TWINS))
def test_level_monotonicity(name):
    f, _, _ = load_twin(name)
    d = certify(f).d
    for lvl in LEVELS[LEVELS.index(certify(f).min_level):]:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert certify(parse(f.source(), level=lvl)).d == d
    below = LEVELS[:LEVELS.index(certify(f).min_level)]
    for lvl in below:
        with pytest.raises(DslSignatureError):
            parse(f.source(), level=lvl)


def test_certificate_examples():
    assert certify(load_twin("semispace")[0]).d == 3
    eta = load_twin("eta3_subgraph")[0]
    # a1..a3, b1..b3, c1, ck, B1, Bk, beta1, beta2
    assert certify(eta).d == 12 == len(eta.params)
    assert certify(load_twin("gaussian_link")[0]).d == 2 + 2
    c = certify(load_twin("tlambda_subgraph")[0])
    d = json.loads(c.to_json())
    assert d["covering_exponent"] == "1+eta (any eta>0)" and d["envelope_required"]
    assert any("graph_is_function" in a for a in d["assumptions"])


def test_link_formula_source_matches_shipped_file():
    shipped = parse(load_twin("eta3_subgraph")[0].source())
    assert parse(link_formula_source(3, 2)).root == shipped.root


def test_eval_examples():
    semi = load_twin("semispace")[0]
    assert eval_formula(semi, [1.0, 1.0], [1.0, 1.0, -3.0]) is True
    xl = load_twin("xlambda")[0]
    assert eval_formula(xl, [2.0], [1.0], QuantifierBox()) is True
    assert eval_formula(xl, [0.5], [1.0], QuantifierBox()) is False


def test_eval_requires_box_for_quantifiers():
    f = parse(BOX_COX, params=["lam"], data=["x", "z"], level="R_exp")
    with pytest.raises(ContractViolation):
        eval_formula(f, [2.0, 1.0], [1.0])
    # z = x^lam - 1 exactly when the witness y = ln x exists
    assert eval_formula(f, [np.e, np.e - 1], [1.0], QuantifierBox())
    assert not eval_formula(f, [np.e, 5.0], [1.0], QuantifierBox())


def test_eval_shape_errors():
    semi = load_twin("semispace")[0]
    with pytest.raises(ContractViolation):
        eval_formula(semi, [1.0], [1.0, 1.0, -3.0])
    with pytest.raises(ContractViolation):
        eval_formula(semi, [1.0, 1.0], [1.0, 1.0])


def test_semispace_traces_match_builtin(rng):
    f, fam, _ = load_twin("semispace")
    P = fam.sample_params(rng, 100)
    X = fam.sample_points(rng, 100)
    for p in P[:10]:
        got = eval_formula(f, X, p)
        assert np.array_equal(got, fam.member_batch(p[None], X)[0])


@pytest.mark.parametrize("name", sorted(TWINS))
def test_twin_agreement(name):
    d, expected, mismatches, rate = dsl_twin_agreement(name, seed=5, cases=1000)
    assert d == expected and mismatches == 0
    assert 0 < rate < 1


def test_resolve_formula_falls_back_to_shipped(tmp_path):
    assert certify(resolve_formula("examples/semispace.fml")).d == 3
    p = tmp_path / "mine.fml"
    p.write_text("param a; data x; a*x < 1\n")
    assert certify(resolve_formula(p)).d == 1
    with pytest.raises(FileNotFoundError):
        resolve_formula(tmp_path / "nothing.fml")


# --- round trip and golden files

names = st.sampled_from(["x", "y", "a", "b"])
atoms = st.one_of(names, st.integers(0, 9).map(str), st.floats(0.5, 9.5).map(lambda v: f"{v:.2f}"))


def _exprs():
    return st.recursive(atoms, lambda e: st.one_of(
        st.tuples(e, st.sampled_from(["+", "-", "*"]), e).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        e.map(lambda s: f"-{s}"),
        st.tuples(e, st.integers(1, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
        e.map(lambda s: f"abs({s})")), max_leaves=6)


def _formulas():
    cmp_ = st.tuples(_exprs(), st.sampled_from(["<", "<=", "=", ">", ">="]), _exprs()).map(" ".join)
    return st.recursive(cmp_, lambda f: st.one_of(
        st.tuples(f, st.sampled_from(["and", "or", "implies", "iff"]), f).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        f.map(lambda s: f"not {s}"),
        f.map(lambda s: f"(exists y . {s})"),
        f.map(lambda s: f"(forall y . {s})")), max_leaves=5)


@settings(max_examples=80)
@given(_formulas())
def test_pretty_print_round_trip(src):
    f = parse(src, params=["a", "b"], data=["x", "y"])
    g = parse(f.pretty(), params=["a", "b"], data=["x", "y"])
    assert g.root == f.root
    assert parse(f.source()).root == f.root


def test_golden_pretty_prints():
    cases = json.loads((GOLDEN / "pretty.json").read_text())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for c in cases:
            f = parse(c["source"], params=c["params"], data=c["data"], level=c.get("level"))
            assert f.pretty() == c["pretty"], c["source"]


def _productions(text):
    return {m.group(1): re.sub(r"\s+", " ", m.group(2)).strip()
            for m in re.finditer(r"^(\w+)\s*=(.*?);\s*$", text, re.M | re.S)}


def test_grammar_document_is_frozen():
    doc = (DOCS / "grammar.ebnf").read_text()
    assert doc == (GOLDEN / "grammar.ebnf").read_text()
    # every rule in the parser's own summary has a production in the shipped grammar
    prods = _productions(doc)
    for rule in re.findall(r"^    (\w+)\s+=", parser_mod.__doc__, re.M):
        assert rule in prods, rule
