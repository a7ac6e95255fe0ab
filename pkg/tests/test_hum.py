"""Gramian assembly, observability constants, control synthesis."""

import numpy as np
import pytest

from torus_control import (GramianSpec, GramianSingularError, apply_gramian,
                           dense_gramian, drive_linear, free_propagate,
                           full_window, make_grid, make_window,
                           observability_constant, random_state, solve_hum,
                           synthesize_control)
from torus_control.hum import (HUMConvergenceError, hum_regularity_ratio,
                               lambda_min_dense, lambda_min_iterative,
                               quadrature_nodes, resolved_n_quad,
                               solve_gramian_system, window_mode_matrix)


@pytest.fixture
def small_setup():
    g = make_grid(1, 32)
    w = make_window(g, (0.0, 0.25), 0.05, "smooth")
    return g, w, GramianSpec(T=1.0, window=w)


def test_quadrature_nodes_rules():
    t, wts = quadrature_nodes(2.0, 16, "gauss-legendre")
    assert np.all((t > 0) & (t < 2.0))
    assert np.sum(wts) == pytest.approx(2.0)
    t, wts = quadrature_nodes(1.0, 10, "midpoint")
    assert np.allclose(t, (np.arange(10) + 0.5) / 10)
    assert np.allclose(wts, 0.1)
    t, wts = quadrature_nodes(1.0, 11, "trapezoid")
    assert t[0] == 0.0 and t[-1] == 1.0
    with pytest.raises(ValueError):
        quadrature_nodes(1.0, 8, "simpson")


def test_gramian_spec_validation(small_setup):
    _, w, _ = small_setup
    with pytest.raises(ValueError):
        GramianSpec(T=0.0, window=w)
    with pytest.raises(ValueError):
        GramianSpec(T=1.0, window=w, n_quad=0)


def test_full_window_gramian_is_t_times_identity():
    g = make_grid(1, 32)
    spec = GramianSpec(T=0.7, window=full_window(g))
    s = dense_gramian(spec, exact_time=True)
    assert np.allclose(s, 0.7 * np.eye(32), atol=1e-12)


def test_dense_gramian_hermitian_psd(small_setup):
    _, _, spec = small_setup
    s = dense_gramian(spec, exact_time=True)
    assert np.allclose(s, s.conj().T)
    eigs = np.linalg.eigvalsh(s)
    assert eigs.min() > 0.0


def test_quadrature_gramian_converges_to_exact(small_setup):
    g, w, _ = small_setup
    spec = GramianSpec(T=1.0, window=w, n_quad=resolved_n_quad(g, 1.0))
    s_quad = dense_gramian(spec, exact_time=False)
    s_exact = dense_gramian(spec, exact_time=True)
    assert np.max(np.abs(s_quad - s_exact)) < 1e-10 * np.max(np.abs(s_exact))


def test_apply_gramian_matches_dense(small_setup):
    g, w, _ = small_setup
    spec = GramianSpec(T=1.0, window=w, n_quad=resolved_n_quad(g, 1.0))
    u = random_state(g, np.random.default_rng(0))
    via_op = apply_gramian(spec, u)
    via_mat = dense_gramian(spec, exact_time=True) @ u.coeffs
    assert np.allclose(via_op.coeffs, via_mat, atol=1e-9)


def test_window_mode_matrix_is_convolution(small_setup):
    g, w, _ = small_setup
    mat = window_mode_matrix(w)
    u = random_state(g, np.random.default_rng(1))
    direct = np.fft.fft(w.samples ** 2 * u.physical()) / g.n_points
    assert np.allclose(mat @ u.coeffs, direct)


def test_lambda_min_dense_vs_iterative(small_setup):
    g, w, _ = small_setup
    spec = GramianSpec(T=1.0, window=w, n_quad=resolved_n_quad(g, 1.0))
    dense = lambda_min_dense(spec, exact_time=True)
    iterative = lambda_min_iterative(spec)
    assert iterative == pytest.approx(dense, rel=1e-8)


def test_observability_constant_methods_agree(small_setup):
    g, w, _ = small_setup
    spec = GramianSpec(T=1.0, window=w, n_quad=resolved_n_quad(g, 1.0))
    c_dense = observability_constant(spec, method="dense")
    c_iter = observability_constant(spec, method="iterative")
    assert c_iter == pytest.approx(c_dense, rel=1e-8)
    assert c_dense > 1.0  # partial observation costs more than the full torus
    with pytest.raises(ValueError):
        observability_constant(spec, method="magic")


def test_observability_constant_full_window_is_inverse_t():
    g = make_grid(1, 32)
    spec = GramianSpec(T=0.5, window=full_window(g))
    assert observability_constant(spec, method="dense") == pytest.approx(2.0, abs=1e-10)


def test_singular_gramian_raises():
    g = make_grid(1, 32)
    # sharp window containing no grid point: chi == 0 identically
    w = make_window(g, (0.41, 0.42), kind="sharp")
    assert w.samples.sum() == 0.0
    spec = GramianSpec(T=1.0, window=w)
    with pytest.raises(GramianSingularError):
        observability_constant(spec, method="dense")


def test_solve_hum_certified_closed_loop(small_setup):
    g, w, _ = small_setup
    spec = GramianSpec(T=1.0, window=w)
    u0 = random_state(g, np.random.default_rng(2))
    sol = solve_hum(spec, u0, tol=1e-9)
    record, final_norm = drive_linear(u0, spec, sol.phi0)
    assert final_norm <= 1e-7 * u0.norm_l2()
    assert sol.residual_l2 <= 1e-7 * u0.norm_l2()
    assert record.times[0] == 0.0
    assert record.times[-1] == pytest.approx(1.0)
    assert record.mass[0] == pytest.approx(u0.norm_l2() ** 2)


def test_solve_hum_zero_target(small_setup):
    g, _, spec = small_setup
    from torus_control import zero_state

    sol = solve_hum(spec, zero_state(g))
    assert sol.phi0.norm_l2() == 0.0


def test_solve_gramian_system_convergence_error(small_setup):
    g, _, spec = small_setup
    u0 = random_state(g, np.random.default_rng(3))
    rhs = u0 * (-1j)
    with pytest.raises(HUMConvergenceError):
        solve_gramian_system(spec, rhs, 1e-14, 2)


def test_synthesize_control_is_observed_free_flow(small_setup):
    g, w, spec = small_setup
    phi0 = random_state(g, np.random.default_rng(4))
    t = 0.4
    ctrl = synthesize_control(spec, phi0, t)
    expect = w.samples ** 2 * free_propagate(phi0, t).physical()
    assert np.allclose(ctrl.physical(), expect)
    with pytest.raises(ValueError):
        synthesize_control(spec, phi0, 1.5)


def test_regularity_ratio_statistics(small_setup):
    _, _, spec = small_setup
    out = hum_regularity_ratio(spec, s=1.0, n_samples=10,
                               rng=np.random.default_rng(5))
    assert out["max"] >= out["mean"] > 0.0
    assert len(out["ratios"]) == 10
    with pytest.raises(ValueError):
        hum_regularity_ratio(spec, s=-1.0, n_samples=2,
                             rng=np.random.default_rng(6))


def test_resolved_n_quad_scales_with_bandwidth():
    g32, g64 = make_grid(1, 32), make_grid(1, 64)
    assert resolved_n_quad(g64, 1.0) > 3 * resolved_n_quad(g32, 1.0)
    assert resolved_n_quad(g32, 2.0) > 1.5 * resolved_n_quad(g32, 1.0)
