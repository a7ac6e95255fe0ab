"""How the control cost depends on the horizon and the window size.

The observability constant C_T = 1 / lambda_min(Gramian) measures the
worst-case cost of exact control.  Over the full torus it is exactly 1/T;
for a partial window it blows up as the horizon or the window shrinks.
"""

import numpy as np

from torus_control import (GramianSpec, full_window, make_grid, make_window,
                           observability_constant)

g = make_grid(1, 64)

print("full torus: C_T should equal 1/T exactly")
for T in (0.25, 0.5, 1.0, 2.0):
    c = observability_constant(GramianSpec(T=T, window=full_window(g)))
    print(f"  T = {T:4}   C_T = {c:.12f}   1/T = {1.0 / T:.12f}")

print("\nshrinking window at T = 1 (smooth cutoffs):")
for b in (0.5, 0.4, 0.3, 0.2, 0.15):
    w = make_window(g, (0.0, b), transition_width=0.04, kind="smooth")
    c = observability_constant(GramianSpec(T=1.0, window=w))
    print(f"  omega = (0, {b:4})   C_T = {c:10.2f}")

print("\nshrinking horizon for omega = (0, 0.3):")
w = make_window(g, (0.0, 0.3), transition_width=0.05, kind="smooth")
for T in (1.0, 0.5, 0.25, 0.1):
    c = observability_constant(GramianSpec(T=T, window=w))
    print(f"  T = {T:5}   C_T = {c:12.2f}")
print("(observability holds for every T > 0 here, but the constant "
      "degrades fast)")
