"""Strip-window observability on T^2 and its reduction to the 1D problem."""

import numpy as np
import pytest

from torus_control import (GramianSpec, StripWindow, decompose_modes,
                           make_grid, make_window, random_state,
                           strip_observability_constant)
from torus_control.hum import lambda_min_dense, resolved_n_quad
from torus_control.tensor import compose_modes, dense_gramian_2d


def test_strip_window_repeats_base_profile():
    g1 = make_grid(1, 16)
    base = make_window(g1, (0.0, 0.3), 0.05, "smooth")
    strip = StripWindow(base)
    w2 = strip.to_2d()
    assert w2.grid.dim == 2
    assert np.allclose(w2.samples, base.samples[:, None])


def test_decompose_compose_round_trip():
    g2 = make_grid(2, 16)
    u = random_state(g2, np.random.default_rng(0))
    slices = decompose_modes(u)
    assert len(slices) == 16
    v = compose_modes(slices)
    assert np.allclose(v.coeffs, u.coeffs)
    # Plancherel across the decomposition
    total = sum(s.norm_l2() ** 2 for s in slices)
    assert total == pytest.approx(u.norm_l2() ** 2, rel=1e-12)


def test_dense_gramian_2d_block_structure():
    # the 2D strip Gramian acts identically on every second-axis mode,
    # and each block equals the 1D Gramian at the same quadrature
    g1 = make_grid(1, 8)
    base = make_window(g1, (0.0, 0.4), 0.05, "smooth")
    n_quad = resolved_n_quad(make_grid(2, 8), 1.0)
    spec = GramianSpec(T=1.0, window=base, n_quad=n_quad)
    from torus_control.tensor import StripWindow as _SW
    spec2d = GramianSpec(T=1.0, window=_SW(base).to_2d(), n_quad=n_quad)
    s2 = dense_gramian_2d(spec2d)
    from torus_control.hum import dense_gramian

    s1 = dense_gramian(spec, exact_time=True)
    n = 8
    # block for second-axis mode q couples (k, q) only to (k', q)
    s2 = s2.reshape(n, n, n, n)  # (k1, k2, k1', k2')
    for q in (0, 3):
        block = s2[:, q, :, q]
        assert np.allclose(block, s1, atol=1e-8)
    # no coupling across distinct second-axis modes
    assert np.max(np.abs(s2[:, 0, :, 1])) < 1e-10


def test_strip_observability_matches_1d():
    g1 = make_grid(1, 8)
    base = make_window(g1, (0.0, 0.4), 0.05, "smooth")
    spec = GramianSpec(T=1.0, window=base)
    c2, c1 = strip_observability_constant(
        spec, n_quad_2d=resolved_n_quad(make_grid(2, 8), 1.0))
    assert abs(c2 - c1) / c1 < 1e-8
    assert c1 == pytest.approx(1.0 / lambda_min_dense(spec), rel=1e-10)
