"""Frozen paired t-test p-values for engineered two-system runs.

Writes ``tests/fixtures/ttest_reference.json``. Each case pairs a baseline
run with a candidate run whose per-segment differences are a constant shift
plus an alternating +-1 pattern, scaled so that the two-sided p-value lands
on a target. p-values come from ``scipy.stats.ttest_rel``.

    python3 ttest_reference.py
"""

import json
import math
from pathlib import Path

import numpy as np
from scipy import stats

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "ttest_reference.json"
TARGETS = [0.2, 0.03, 0.005, 0.0005]
SIZES = [10, 40, 101]


def engineered(n, target, rng):
    t = stats.t.isf(target / 2, n - 1)
    pattern = np.array([1.0 if i % 2 == 0 else -1.0 for i in range(n)])
    pattern -= pattern.mean()
    sd = pattern.std(ddof=1)
    shift = t * sd / math.sqrt(n)
    baseline = rng.uniform(20.0, 80.0, n).round(3)
    return baseline, baseline + shift + pattern


def main():
    rng = np.random.default_rng(7)
    cases = []
    for n in SIZES:
        for target in TARGETS:
            b, a = engineered(n, target, rng)
            p = stats.ttest_rel(a, b).pvalue
            cases.append({"target": target, "a": a.tolist(), "b": b.tolist(), "p": float(p)})
    FIXTURE.write_text(json.dumps({"cases": cases}, indent=1) + "\n")
    print(f"wrote {len(cases)} cases")


if __name__ == "__main__":
    main()
