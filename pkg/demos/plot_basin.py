"""
Basin of attraction on the plane y = v = 0
==========================================

On this plane the orbit is known exactly: with ``m = a1 a2 x u`` the state
after ``n`` steps is ``(m^(2^(n-1)) / a2, 0, m^(2^(n-1)) / a1, 0)``. The grid
below recovers the three regimes, split by the hyperbola ``x u = 4``.
"""
from collections import Counter

from gonodyn import preset
from gonodyn.scan import basin, parse_grid
from gonodyn.svg import heat_map

params = preset("classical")
axes = parse_grid("x=0:5:81,u=0:5:81")

records = basin(params, axes)
print(Counter(r.outcome for r in records))

# Every theorem-backed prediction should agree with the simulation.
checked = [r.agrees for r in records if r.agrees is not None]
print(f"{sum(checked)} of {len(checked)} decided predictions agree with simulation")

xs, us = axes[0].values, axes[1].values
cells = [[records[i * len(us) + j].outcome for j in range(len(us))] for i in range(len(xs))]
with open("basin.svg", "w") as fh:
    fh.write(heat_map(cells, xs, us, "x", "u"))
print("wrote basin.svg")

# Points that settle are exactly those on x u = 4.
on_curve = [r.state for r in records if r.outcome == "Point"]
print("settling points (x, u):", [(float(s[0]), float(s[2])) for s in on_curve])
