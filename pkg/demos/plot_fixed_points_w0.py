"""
Fixed points and spectra of W0
==============================

The ``w0`` preset has more fixed points than the closed forms suggest.
Newton search from a seed grid turns up interior points, and every one of
them has 0 and 2 in the spectrum of its Jacobian.
"""
import numpy as np

from gonodyn import all_fixed_points, char_coeffs, classify, preset, residual

params = preset("w0")

points = all_fixed_points(params)
for fp in points:
    cls = classify(params, fp.state)
    spectrum = ", ".join(f"{lam.real:+.4f}" for lam in cls.spectrum)
    print(f"{fp.form.value:>3}  {np.round(fp.state, 6)}  [{spectrum}]  {cls.tag.value}")

# %%
# The interior points found all lie on one curve, (x, 2, 2, -x/(1+x)).
# Any point of that curve is fixed, so the search only samples it.
for x in (0.5, 3.0, -7.0):
    s = (x, 2.0, 2.0, -x / (1 + x))
    print(f"x = {x:+.1f}: residual {residual(params, s):.1e}")

# %%
# The quantity 8 - 4 p1 + 2 p2 + p3 vanishes exactly when 2 is an
# eigenvalue; it is zero at every nonzero fixed point.
for fp in points[1:]:
    print(f"{fp.form.value:>3}  8 - 4 p1 + 2 p2 + p3 = {char_coeffs(params, fp.state).two_identity:+.2e}")
