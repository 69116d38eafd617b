"""
Stability of (1/a2, 0, 1/a1, 0) along c1
========================================

Start from the classical parameters and move ``c1`` from 0 to 1 (``c2``
follows). The fixed point stays a saddle, but the number of eigenvalues
outside the unit circle changes where ``b4 c1 - a2 (a1 - b2)`` changes sign,
at ``c1 = 1/2``. Exactly there one eigenvalue sits on the unit circle.
"""
import numpy as np

from gonodyn import Form, preset
from gonodyn.scan import Axis, sweep
from gonodyn.svg import line_plot

base = preset("classical")
rows = sweep(base, [Axis("c1", 0.0, 199 / 200, 200)])

c1 = np.array([row.values["c1"] for row in rows])
moduli = np.array([sorted(row.forms[Form.II][0].witness) for row in rows])
unstable = (moduli > 1 + 1e-9).sum(axis=1)

for k in (0, 99, 100, 101, 199):
    p = rows[k].params
    sign = p.b4 * p.c1 - p.a2 * (p.a1 - p.b2)
    print(f"c1={c1[k]:.3f}  sign={sign:+.4f}  class={rows[k].stability(Form.II).value:<13}"
          f"  |lambda|>1: {unstable[k]}")

with open("c1_sweep.svg", "w") as fh:
    fh.write(line_plot({f"|lambda_{k + 1}|": moduli[:, k] for k in range(4)},
                       xlabel="c1 index (c1 = k/200)", ylabel="modulus"))
print("wrote c1_sweep.svg")
