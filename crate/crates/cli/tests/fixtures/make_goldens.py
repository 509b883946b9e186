"""Regenerates the distance fixtures and their expected values.

The expected values are computed here with numpy, independently of the
Rust implementation: both curves are linearly interpolated on a uniform
grid of 1000 points over their common time range.
"""
import json
import math
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent


def curve(t):
    return 250.0 + 30.0 * math.sin(t / 17.0) + 12.0 * math.cos(t / 5.0)


def write_series(name, times, values):
    with open(HERE / name, "w") as f:
        f.write("time,value\n")
        for t, v in zip(times, values):
            f.write(f"{t!r},{v!r}\n")


def msd(t1, v1, t2, v2, grid=1000):
    lo, hi = max(t1[0], t2[0]), min(t1[-1], t2[-1])
    g = np.linspace(lo, hi, grid)
    d = np.interp(g, t1, v1) - np.interp(g, t2, v2)
    return float(np.mean(d * d))


t1 = [round(2.0 + 1.37 * k + 0.4 * math.sin(1.3 * k), 6) for k in range(150)]
v1 = [round(curve(t), 6) for t in t1]
# data set 2 observes the curve at g0(s) = 1.1 s + 3 on its own clock
s2 = [round(0.5 + 1.21 * k + 0.3 * math.cos(0.7 * k), 6) for k in range(160)]
v2 = [round(curve(1.1 * s + 3.0), 6) for s in s2]
write_series("pre1.csv", t1, v1)
write_series("pre2.csv", s2, v2)

lo, hi = s2[0], s2[-1]
knots = list(np.linspace(lo, hi, 5))
values = [1.1 * k + 3.0 for k in knots]
with open(HERE / "warp.json", "w") as f:
    json.dump({"domain": [lo, hi], "knots": knots, "values": values}, f, indent=2)

aligned = np.interp(s2, knots, values)
golden = {
    "pre": msd(np.array(t1), np.array(v1), np.array(s2), np.array(v2)),
    "post": msd(np.array(t1), np.array(v1), aligned, np.array(v2)),
}
with open(HERE / "distance_golden.json", "w") as f:
    json.dump(golden, f, indent=2)
print(golden)
