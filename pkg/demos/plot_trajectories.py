"""
Trajectories of the hemophilia operator
=======================================

Three starting points under the classical parameters: one collapses to the
origin, one sits on the boundary curve ``x u = 4`` and lands on the fixed
point ``(2, 0, 2, 0)``, and one escapes.
"""
import numpy as np

from gonodyn import iterate, predict_limit, preset
from gonodyn.svg import line_plot

params = preset("classical")

starts = {
    "inside P0": np.array([1.0, 0.5, 1.0, 0.5]),
    "on x u = 4": np.array([4.0, 0.0, 1.0, 0.0]),
    "a1 a2 x u > 1": np.array([3.0, 0.0, 3.0, 0.0]),
}

# The predictor names the result it relied on; the simulation confirms it.
for label, t0 in starts.items():
    traj = iterate(params, t0, n=40, point_tol=1e-13)
    print(f"{label:>14}: {predict_limit(params, t0)}")
    print(f"{'':>14}  {traj.termination.value} after {traj.steps} steps, final {traj.final}")

# Total mass (x + y)(u + v) squares at every step; on a log scale the
# three regimes separate immediately.
series = {}
for label, t0 in starts.items():
    traj = iterate(params, t0, n=8)
    series[label] = traj.states.sum(axis=1)

with open("trajectories.svg", "w") as fh:
    fh.write(line_plot(series, log=True, ylabel="total mass"))
print("wrote trajectories.svg")
