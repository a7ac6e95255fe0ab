"""Free Schrodinger propagator, fractional multiplier D^r, Sobolev norms.

The free flow diagonalizes on Fourier modes: u_hat(k) picks up the phase
exp(-i*(2*pi*k)^2*t) in 1D (and exp(-i*(2*pi)^2*(k1^2+k2^2)*t) in 2D), so
propagation is exact and norm preserving for every Sobolev index.

D^r is the multiplier sgn(n)*|n|^r on nonzero modes and the identity on
the zero mode.  It deliberately uses the bare integer n, while Sobolev
norms use the (1 + |2*pi*k|^2)^(1/2) weight; the two scalings coexist.
"""

from __future__ import annotations

import numpy as np

from .grid import FourierState, GridSpec


def free_propagate(u: FourierState, t: float) -> FourierState:
    """Apply exp(i*t*Laplacian): u_hat(k) -> exp(-i*(2*pi*k)^2*t) * u_hat(k)."""
    phase = np.exp(1j * u.grid.laplacian_symbol() * t)
    return FourierState(u.grid, u.coeffs * phase)


def fractional_multiplier(grid: GridSpec, r: float) -> np.ndarray:
    """Symbol of D^r on a 1D grid: sgn(n)|n|^r for n != 0, 1 at n = 0."""
    if grid.dim != 1:
        raise ValueError("D^r is defined on the 1D torus only")
    n = grid.mode_indices().astype(float)
    sym = np.ones_like(n)
    nz = n != 0
    sym[nz] = np.sign(n[nz]) * np.abs(n[nz]) ** r
    return sym


def fractional_derivative(u: FourierState, r: float) -> FourierState:
    """Apply D^r (1D only); the zero mode is left unchanged."""
    return FourierState(u.grid, u.coeffs * fractional_multiplier(u.grid, r))


def sobolev_weights(grid: GridSpec, s: float) -> np.ndarray:
    """(1 + |2*pi*k|^2)^(s/2) in FFT order (shape matches the mode array)."""
    return (1.0 - grid.laplacian_symbol()) ** (s / 2.0)


def sobolev_norm(u: FourierState, s: float) -> float:
    """H^s norm (sum_k (1+|2*pi*k|^2)^s |u_hat(k)|^2)^(1/2); s=0 is L2."""
    return float(np.linalg.norm(u.coeffs * sobolev_weights(u.grid, s)))


def _refined_window_coeffs(grid: GridSpec, f, refine: int = 4) -> np.ndarray:
    """Fourier coefficients of the window profile, resolved on a grid
    refine times finer than the state grid, in FFT order.

    Pointwise multiplication on the state grid is a circular convolution:
    mode pairs near the two ends of the spectrum couple through wrapped
    frequency differences, which wrecks the commutator cancellation.  The
    refined coefficients let callers convolve with the true (unwrapped)
    difference k - j, matching the continuous operator.
    """
    from .grid import make_grid
    from .windows import make_window

    fine = make_grid(1, refine * grid.modes_per_axis)
    fw = make_window(fine, f.omega, transition_width=f.transition_width,
                     kind=f.kind)
    return np.fft.fft(fw.samples) / fine.modes_per_axis


def commutator_apply(u: FourierState, r: float, f) -> FourierState:
    """Apply the commutator [D^r, f] u = D^r(f*u) - f*(D^r u) (1D only).

    f is a CutoffWindow.  Products use the de-aliased convolution with the
    window (true frequency differences, no Nyquist wrap-around), so the
    result agrees with the mode-space truncation of the continuous
    commutator rather than the aliased pseudo-spectral product.
    """
    if u.grid.dim != 1:
        raise ValueError("commutator_apply is defined on the 1D torus only")
    n = u.grid.modes_per_axis
    fhat = _refined_window_coeffs(u.grid, f)
    k = u.grid.mode_indices()
    dr = fractional_multiplier(u.grid, r)
    # (f * v)(k) = sum_j fhat(k - j) v(j) with the true difference k - j
    diff = (k[:, None] - k[None, :]) % len(fhat)
    conv = fhat[diff]
    out = dr * (conv @ u.coeffs) - conv @ (dr * u.coeffs)
    return FourierState(u.grid, out)


def commutator_operator_norm(grid: GridSpec, r: float, s: float, f) -> float:
    """Empirical H^s -> H^(s-r+1) operator norm of u -> [D^r, f] u.

    Assembles the dense mode-space matrix f_hat(k - j) * (D(k) - D(j))
    with de-aliased window coefficients, weights it by the Sobolev
    scalings on both sides, and returns the largest singular value.
    Intended for moderate N (dense N x N assembly).
    """
    if grid.dim != 1:
        raise ValueError("commutator_operator_norm is defined on the 1D torus only")
    fhat = _refined_window_coeffs(grid, f)
    k = grid.mode_indices()
    dr = fractional_multiplier(grid, r)
    diff = (k[:, None] - k[None, :]) % len(fhat)
    mat = fhat[diff] * (dr[:, None] - dr[None, :])
    w_out = sobolev_weights(grid, s - r + 1.0)
    w_in = sobolev_weights(grid, s)
    weighted = (w_out[:, None] * mat) / w_in[None, :]
    return float(np.linalg.norm(weighted, ord=2))
