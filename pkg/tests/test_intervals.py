import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from vclab.intervals import INF, IntervalUnion

ends = st.integers(-6, 6).map(float)
interval = st.tuples(ends, ends, st.booleans(), st.booleans()).map(
    lambda t: (min(t[0], t[1]), max(t[0], t[1]), t[2], t[3]))
unions = st.lists(interval, max_size=5).map(lambda ivs: IntervalUnion(tuple(ivs)))
# probe every integer and every half-integer so open/closed ends are exercised
PROBES = np.arange(-7, 7.01, 0.5)


def _naive(ivs, x):
    return any((lo < x or (lc and lo == x)) and (x < hi or (hc and x == hi)) for lo, hi, lc, hc in ivs)


@given(st.lists(interval, max_size=5))
def test_normal_form_preserves_membership(ivs):
    u = IntervalUnion(tuple(ivs))
    assert u.contains(PROBES).tolist() == [_naive(ivs, x) for x in PROBES]


@given(st.lists(interval, max_size=5))
def test_normal_form_is_sorted_disjoint_nonadjacent(ivs):
    u = IntervalUnion(tuple(ivs))
    for (a_lo, a_hi, _, a_hc), (b_lo, _, b_lc, _) in zip(u.intervals, u.intervals[1:]):
        assert a_hi <= b_lo
        assert not (a_hi == b_lo and (a_hc or b_lc))


@given(unions, unions)
def test_boolean_ops(a, b):
    ma, mb = a.contains(PROBES), b.contains(PROBES)
    assert a.union(b).contains(PROBES).tolist() == (ma | mb).tolist()
    assert a.intersection(b).contains(PROBES).tolist() == (ma & mb).tolist()
    assert a.complement().contains(PROBES).tolist() == (~ma).tolist()


@given(unions, st.integers(-3, 3))
def test_shift(a, s):
    assert a.shift(s).contains(PROBES + s).tolist() == a.contains(PROBES).tolist()


@given(unions)
def test_contains_sorted_agrees(a):
    assert a.contains_sorted(PROBES).tolist() == a.contains(PROBES).tolist()


def test_infinite_ends_are_open():
    u = IntervalUnion(((-INF, 0.0, True, True),))
    assert u.intervals[0][2] is False
    assert IntervalUnion.reals_minus_zero().contains([0.0, 1e-300, -1e-300]).tolist() == [False, True, True]


def test_touching_closed_intervals_merge():
    u = IntervalUnion(((0, 1, True, True), (1, 2, False, True)))
    assert u.intervals == ((0.0, 2.0, True, True),)
    v = IntervalUnion(((0, 1, True, False), (1, 2, False, True)))
    assert len(v) == 2
