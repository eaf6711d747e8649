import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vclab.core import (ContractViolation, PointSet, Trace, TraceSet, collect_traces, n_words, pack_rows,
                        subgraph_member, trace, trace_rows, unique_rows)
from vclab.families import finite_powerset_family, halfplane_family, tlambda_family
from vclab.seeding import derive_rng, resolve_seed


def test_trace_halfplane_sign_of_y():
    fam = halfplane_family("all")
    assert trace(fam, (0, 1, 0), PointSet([[0, -1], [0, 1]])).to_string() == "10"


def test_trace_powerset_subset_index():
    fam = finite_powerset_family(2, anchors=[0.25, 0.75])
    assert trace(fam, (3,), PointSet([0.25, 0.75, 0.5])).to_string() == "110"


def test_trace_tlambda_linear_case():
    fam = tlambda_family()
    assert trace(fam, (1.0,), PointSet([[2, 0.5], [2, 2]])).to_string() == "10"


def test_collect_traces_powerset_all_subsets():
    fam = finite_powerset_family(2, anchors=[0.25, 0.75])
    ts = collect_traces(fam, [[0], [1], [2], [3]], PointSet([0.25, 0.75]))
    assert ts.strings() == ["00", "01", "10", "11"]


def test_collect_traces_collinear_halfplanes_miss_alternating(rng):
    fam = halfplane_family("all")
    pts = PointSet([[0, 0], [1, 1], [2, 2]])
    ts = collect_traces(fam, rng.uniform(-3, 3, (20000, 3)), pts)
    # a line cannot split collinear points into alternating labels
    assert "101" not in ts and "010" not in ts
    assert all(s in ts for s in ("000", "111", "100", "001", "110", "011"))


def test_single_parameter_gives_one_trace():
    fam = tlambda_family()
    assert len(collect_traces(fam, [[0.7]], PointSet([[1, 0], [2, 1], [3, -1]]))) == 1


def test_trace_is_pure(rng):
    fam = tlambda_family()
    pts = PointSet(fam.sample_points(rng, 40))
    assert trace(fam, (0.3,), pts) == trace(fam, (0.3,), pts)


def test_collect_traces_monotone_in_params(rng):
    fam = halfplane_family("all")
    pts = PointSet(fam.sample_points(rng, 8))
    P = fam.sample_params(rng, 400)
    sizes = [len(collect_traces(fam, P[:m], pts)) for m in (1, 10, 100, 400)]
    assert sizes == sorted(sizes)


def test_subgraph_rule_at_zero_height():
    # (x, 0) lies in the subgraph iff f(x) >= 0 under the default rule
    assert subgraph_member([1.0, 0.0, -1.0], 0.0).tolist() == [True, True, False]
    assert subgraph_member([1.0, 0.0, -1.0], 0.0, rule="closed").tolist() == [True, True, True]
    with pytest.raises(ContractViolation):
        subgraph_member([1.0], 0.0, rule="open")


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=20), st.floats(-5, 5))
def test_subgraph_matches_inequalities(vals, t):
    got = subgraph_member(vals, t)
    want = [(0 <= t <= v) or (0 > t > v) for v in vals]
    assert got.tolist() == want


@given(st.lists(st.lists(st.booleans(), min_size=70, max_size=70), min_size=1, max_size=30))
def test_pack_rows_roundtrip_wide(rows):
    M = np.array(rows, dtype=bool)
    packed = pack_rows(M)
    assert packed.shape == (len(rows), n_words(70))
    ts = TraceSet.from_rows(unique_rows(packed), 70)
    assert len(ts) == len({tuple(r) for r in rows})
    for r in rows:
        assert Trace.from_bools(r) in ts


@given(st.text(alphabet="01", min_size=1, max_size=80))
def test_trace_string_roundtrip(s):
    t = Trace.from_string(s)
    assert t.to_string() == s
    assert t.members() == [i for i, c in enumerate(s) if c == "1"]


def test_trace_rejects_bad_string():
    with pytest.raises(ContractViolation):
        Trace.from_string("102")


def test_pointset_csv_roundtrip(tmp_path, rng):
    pts = PointSet(rng.normal(size=(7, 2)))
    pts.to_csv(tmp_path / "p.csv")
    back = PointSet.from_csv(tmp_path / "p.csv")
    assert np.array_equal(back.points, pts.points)
    assert len(back) == 7 and back.dim == 2


def test_pointset_keeps_duplicates():
    pts = PointSet([[1.0], [1.0]])
    fam = finite_powerset_family(1, anchors=[1.0])
    assert trace(fam, (1,), pts).to_string() == "11"


def test_family_rejects_bad_params():
    fam = tlambda_family()
    with pytest.raises(ContractViolation):
        fam.check_params([[0.0]])
    with pytest.raises(ContractViolation):
        fam.check_params([[1.0, 2.0]])


def test_trace_rows_dedupe(rng):
    fam = finite_powerset_family(3)
    X = fam.check_points(fam.info["anchors"][:, None])
    rows = trace_rows(fam, np.repeat(np.arange(8.0), 5)[:, None], X)
    assert len(rows) == 8


def test_seed_streams_are_keyed(monkeypatch):
    a = derive_rng(5, "x", 1).random(4)
    b = derive_rng(5, "x", 1).random(4)
    c = derive_rng(5, "x", 2).random(4)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    monkeypatch.setenv("VC_LAB_SEED", "99")
    assert resolve_seed() == 99 and resolve_seed(3) == 3
