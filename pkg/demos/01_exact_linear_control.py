"""Exact control of the linear Schrodinger equation from one window.

Builds the control Gramian for a smooth cutoff supported on (0, 0.2),
solves for the control datum steering a random state to zero over T = 1,
and verifies the result by driving the closed discrete loop.
"""

import numpy as np

from torus_control import (GramianSpec, drive_linear, make_grid, make_window,
                           random_state, solve_hum, synthesize_control)

g = make_grid(1, 64)
window = make_window(g, (0.0, 0.2), transition_width=0.05, kind="smooth")
spec = GramianSpec(T=1.0, window=window)

u0 = random_state(g, np.random.default_rng(42), norm=1.0)
print(f"initial state: N = {g.modes_per_axis}, ||u0|| = {u0.norm_l2():.6f}")

sol = solve_hum(spec, u0, tol=1e-10)
print(f"Gramian solve: {sol.iterations} CG iterations, "
      f"||phi0|| = {sol.phi0.norm_l2():.4f}")

record, final_norm = drive_linear(u0, spec, sol.phi0)
print(f"closed-loop residual ||u(T)|| = {final_norm:.3e} "
      f"({final_norm / u0.norm_l2():.3e} relative)")

# the control that was actually applied, sampled mid-horizon
ctrl = synthesize_control(spec, sol.phi0, 0.5)
print(f"control amplitude at t = T/2: max |g| = "
      f"{np.max(np.abs(ctrl.physical())):.4f} (supported only on the window)")

print("\nmass along the controlled trajectory:")
for i in range(0, len(record.times), max(1, len(record.times) // 8)):
    print(f"  t = {record.times[i]:.3f}   mass = {record.mass[i]:.6f}")
