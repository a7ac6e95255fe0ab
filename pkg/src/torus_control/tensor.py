"""Observability transfer from T^1 to strips on T^2.

For a control region omega_1 x T the 2D flow decomposes along the second
axis: writing u0(x1, x2) = sum_k c_k(x1) e^{2 pi i k x2}, each slice
evolves under the 1D flow times a unimodular phase, and the windowed norm
is x2-independent, so the observability constant transfers exactly:
lambda_min(S_2d) = lambda_min(S_1d) at truncation.

The 2D constant is still computed from a genuinely 2D Gramian (2D
transforms and time quadrature) so the identity is verified, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .grid import FourierState, GridSpec, make_grid
from .hum import GramianSpec, _apply_batch, lambda_min_dense, CONDITIONING_FLOOR, \
    GramianSingularError
from .windows import CutoffWindow


@dataclass(frozen=True)
class StripWindow:
    """A 1D window extended constantly along the second torus axis."""

    base: CutoffWindow

    def __post_init__(self):
        if self.base.grid.dim != 1:
            raise ValueError("StripWindow base must live on a 1D grid")

    def to_2d(self) -> CutoffWindow:
        n = self.base.grid.modes_per_axis
        grid2 = make_grid(2, n)
        samples = np.repeat(self.base.samples[:, None], n, axis=1)
        return CutoffWindow(grid=grid2, samples=samples, omega=self.base.omega,
                            transition_width=self.base.transition_width,
                            kind=self.base.kind)


def decompose_modes(u2d: FourierState) -> list[FourierState]:
    """Second-axis mode slices c_k of a 2D state (k in FFT order).

    Plancherel: sum_k ||c_k||^2 = ||u2d||^2.
    """
    if u2d.grid.dim != 2:
        raise ValueError("decompose_modes expects a 2D state")
    n = u2d.grid.modes_per_axis
    grid1 = make_grid(1, n)
    return [FourierState(grid1, u2d.coeffs[:, k].copy()) for k in range(n)]


def compose_modes(slices: list[FourierState]) -> FourierState:
    """Inverse of decompose_modes."""
    n = len(slices)
    grid2 = make_grid(2, n)
    coeffs = np.stack([s.coeffs for s in slices], axis=1)
    return FourierState(grid2, coeffs)


def dense_gramian_2d(spec2d: GramianSpec) -> np.ndarray:
    """Dense 2D Gramian assembled by applying the quadrature operator to
    every Fourier basis vector.  Brute force; meant for small N per axis."""
    grid = spec2d.grid
    if grid.dim != 2:
        raise ValueError("dense_gramian_2d expects a 2D Gramian spec")
    n_tot = grid.n_points
    basis = np.eye(n_tot, dtype=complex).reshape((n_tot,) + grid.shape)
    cols = _apply_batch(spec2d, basis, chunk=64)
    s = cols.reshape(n_tot, n_tot).T
    return 0.5 * (s + s.conj().T)


def strip_observability_constant(base_spec: GramianSpec,
                                 n_quad_2d: int | None = None) -> tuple[float, float]:
    """(C_2d, C_1d) for the strip omega_1 x T versus its 1D base window.

    C_1d comes from the exact-time dense 1D Gramian; C_2d from a dense 2D
    assembly over the quadrature operator.  The contract is
    |C_2d - C_1d| / C_1d small (exact transfer at truncation).
    """
    if base_spec.grid.dim != 1:
        raise ValueError("base_spec must be a 1D Gramian spec")
    strip = StripWindow(base_spec.window)
    window2d = strip.to_2d()
    spec2d = GramianSpec(T=base_spec.T, window=window2d,
                         n_quad=n_quad_2d or base_spec.n_quad,
                         quad_rule=base_spec.quad_rule)
    s2 = dense_gramian_2d(spec2d)
    lam_min_2d = float(eigh(s2, eigvals_only=True, subset_by_index=[0, 0])[0])
    if lam_min_2d < CONDITIONING_FLOOR:
        raise GramianSingularError("2D Gramian numerically singular")
    c_2d = 1.0 / lam_min_2d
    c_1d = 1.0 / lambda_min_dense(base_spec)
    return c_2d, c_1d


def observed_energy_1d(spec: GramianSpec, c: FourierState) -> float:
    """int_0^T ||chi exp(i t Lap) c||^2 dt via the spec's quadrature
    (equals <S c, c>)."""
    out = _apply_batch(spec, c.coeffs[None, ...])[0]
    return float(np.real(np.vdot(c.coeffs, out)))
