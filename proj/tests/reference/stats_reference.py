#!/usr/bin/env python3
"""Reference values for the statistics tests.

Welch's test, the incomplete beta and Student's t tail come from scipy. The
seeded bootstrap is re-implemented here from the documented substream
definition with exact integer arithmetic, and its quantiles are taken with
numpy. Run once; the printed values are frozen into tests/test_stats.cpp.

    python3 tests/reference/stats_reference.py tests/data/stats_pinned.csv
"""

import csv
import sys

import numpy as np
from scipy import special, stats

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
SALT = 0x632BE59BD9B4E019


def mix64(z):
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


class Substream:
    def __init__(self, seed, index):
        self.state = mix64(seed ^ mix64(index + SALT))

    def next(self):
        self.state = (self.state + GAMMA) & MASK
        return mix64(self.state)

    def below(self, bound):
        return (self.next() * bound) >> 64


def bootstrap(a, b, level, resamples, seed):
    diffs = []
    for r in range(resamples):
        s = Substream(seed, r)
        ra = [a[s.below(len(a))] for _ in a]
        rb = [b[s.below(len(b))] for _ in b]
        diffs.append(sum(ra) / len(a) - sum(rb) / len(b))
    diffs.append(sum(a) / len(a) - sum(b) / len(b))
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(np.array(diffs), [tail, 1.0 - tail], method="linear")
    return float(lo), float(hi)


def main(path):
    with open(path) as f:
        rows = list(csv.DictReader(f))
    a = [float(r["a"]) for r in rows]
    b = [float(r["b"]) for r in rows]
    w = stats.ttest_ind(a, b, equal_var=False)
    print(f"welch t  = {w.statistic!r}")
    print(f"welch df = {w.df!r}")
    print(f"welch p  = {w.pvalue!r}")
    for level, resamples, seed in [(0.95, 2000, 12345), (0.90, 1000, 7)]:
        lo, hi = bootstrap(a, b, level, resamples, seed)
        print(f"bootstrap level={level} R={resamples} seed={seed}: lo = {lo!r}, hi = {hi!r}")
    for x, y, z in [(2.5, 0.5, 0.3), (10.0, 0.5, 0.9), (0.5, 0.5, 0.5), (50.0, 3.0, 0.95), (1.0, 1.0, 0.25)]:
        print(f"betainc({x}, {y}, {z}) = {special.betainc(x, y, z)!r}")
    for t, df in [(2.0, 5.0), (0.5, 30.0), (-3.2, 12.5), (8.0, 999.0)]:
        print(f"t two-sided p(t={t}, df={df}) = {2.0 * stats.t.sf(abs(t), df)!r}")
    print(f"mix64(0) = {mix64(0):#018x}")
    s = Substream(1, 0)
    print("Substream(1, 0) first draws =", ", ".join(f"{s.next():#018x}" for _ in range(3)))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/stats_pinned.csv")
