"""Finite unions of intervals of the real line in a unique normal form."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

INF = float("inf")

Interval = Tuple[float, float, bool, bool]  # (lo, hi, lo_closed, hi_closed)


def _nonempty(iv):
    lo, hi, lc, hc = iv
    return lo < hi or (lo == hi and lc and hc)


def _normalize(intervals):
    ivs = []
    for lo, hi, lc, hc in intervals:
        lo, hi = float(lo), float(hi)
        if np.isnan(lo) or np.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        lc = bool(lc) and lo != -INF
        hc = bool(hc) and hi != INF
        if _nonempty((lo, hi, lc, hc)):
            ivs.append((lo, hi, lc, hc))
    # closed-lo sorts before open-lo at the same value
    ivs.sort(key=lambda iv: (iv[0], not iv[2]))
    out = []
    for iv in ivs:
        if out:
            plo, phi, plc, phc = out[-1]
            lo, hi, lc, hc = iv
            if lo < phi or (lo == phi and (phc or lc)):
                if hi > phi:
                    out[-1] = (plo, hi, plc, hc)
                elif hi == phi:
                    out[-1] = (plo, phi, plc, phc or hc)
                continue
        out.append(iv)
    return tuple(out)


@dataclass(frozen=True)
class IntervalUnion:
    intervals: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", _normalize(self.intervals))

    @classmethod
    def empty(cls):
        return cls(())

    @classmethod
    def real_line(cls):
        return cls(((-INF, INF, False, False),))

    @classmethod
    def reals_minus_zero(cls):
        return cls(((-INF, 0.0, False, False), (0.0, INF, False, False)))

    def __len__(self):
        return len(self.intervals)

    def is_empty(self):
        return not self.intervals

    def endpoints(self):
        """Finite endpoints in increasing order (with repeats removed)."""
        vals = {v for lo, hi, _, _ in self.intervals for v in (lo, hi) if np.isfinite(v)}
        return sorted(vals)

    def contains(self, values):
        v = np.asarray(values, dtype=float)
        out = np.zeros(v.shape, dtype=bool)
        for lo, hi, lc, hc in self.intervals:
            above = (v >= lo) if lc else (v > lo)
            below = (v <= hi) if hc else (v < hi)
            out |= above & below
        return out

    def contains_sorted(self, values):
        """Same as :meth:`contains`, via binary search; for unions with many pieces."""
        v = np.asarray(values, dtype=float)
        if not self.intervals:
            return np.zeros(v.shape, dtype=bool)
        lo, hi, lc, hc = (np.array(c) for c in zip(*self.intervals))
        idx = np.searchsorted(lo, v, side="right") - 1
        ok = idx >= 0
        j = np.clip(idx, 0, None)
        above = (v > lo[j]) | ((v == lo[j]) & lc[j])
        below = (v < hi[j]) | ((v == hi[j]) & hc[j])
        return ok & above & below

    def complement(self):
        pieces = []
        cur, cur_closed = -INF, False
        for lo, hi, lc, hc in self.intervals:
            pieces.append((cur, lo, cur_closed, not lc))
            cur, cur_closed = hi, not hc
        pieces.append((cur, INF, cur_closed, False))
        return IntervalUnion(tuple(pieces))

    def union(self, other):
        return IntervalUnion(self.intervals + other.intervals)

    def intersection(self, other):
        return self.complement().union(other.complement()).complement()

    def shift(self, x):
        return IntervalUnion(tuple((lo + x, hi + x, lc, hc) for lo, hi, lc, hc in self.intervals))

    def __str__(self):
        if not self.intervals:
            return "{}"
        parts = []
        for lo, hi, lc, hc in self.intervals:
            if lo == hi:
                parts.append(f"{{{lo:g}}}")
            else:
                parts.append(f"{'[' if lc else '('}{lo:g}, {hi:g}{']' if hc else ')'}")
        return " U ".join(parts)
