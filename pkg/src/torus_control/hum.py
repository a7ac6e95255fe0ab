"""HUM Gramian, observability constants, and exact control synthesis.

The control Gramian is

    S phi0 = integral_0^T exp(-i*t*Lap) chi^2 exp(i*t*Lap) phi0 dt,

a self-adjoint nonnegative operator; it is positive (and invertible)
exactly when the window observes every truncated mode.  The smallest
eigenvalue gives the observability constant C_T = 1 / lambda_min(S).

Two evaluation paths are provided and cross-checked:
  * a matrix-free quadrature path (Gauss-Legendre / trapezoid / midpoint
    nodes in time, exact propagation between nodes), used by the CG solver;
  * a dense path whose time integral is done in closed form per matrix
    element (the integrand is a pure phase), exact in time -- the
    brute-force oracle for all iterative computations (1D, moderate N).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import circulant, eigh, lu_factor, lu_solve
from scipy.sparse.linalg import LinearOperator, cg, eigsh
from scipy.special import roots_legendre

from .grid import FourierState, GridSpec, zero_state
from .windows import CutoffWindow

#: Smallest Gramian eigenvalue considered numerically observable.
CONDITIONING_FLOOR = 1e-14


class GramianSingularError(RuntimeError):
    """lambda_min fell below the conditioning floor: observability is
    numerically void at this truncation/window/horizon."""


class HUMConvergenceError(RuntimeError):
    """The Krylov solve for S phi0 = rhs did not reach tolerance; the
    window is effectively too small for this truncation and horizon."""


@dataclass(frozen=True)
class GramianSpec:
    """Horizon, window and time-quadrature rule defining the HUM operator."""

    T: float
    window: CutoffWindow
    n_quad: int | None = None
    quad_rule: str = "gauss-legendre"

    def __post_init__(self):
        if self.T <= 0.0:
            raise ValueError("T must be positive")
        if self.quad_rule not in ("gauss-legendre", "trapezoid", "midpoint"):
            raise ValueError(f"unknown quadrature rule {self.quad_rule!r}")
        if self.n_quad is None:
            object.__setattr__(self, "n_quad", max(32, 4 * self.window.grid.modes_per_axis))
        if self.n_quad < 2:
            raise ValueError("n_quad must be >= 2")

    @property
    def grid(self) -> GridSpec:
        return self.window.grid


@dataclass
class ControlSolution:
    """HUM minimizer with its closed-loop certificate."""

    phi0: FourierState
    residual_l2: float
    iterations: int
    observability_estimate: float | None = None


@dataclass
class TrajectoryRecord:
    """Sampled controlled trajectory: mass and observed mass over time."""

    times: np.ndarray
    mass: np.ndarray
    observed_mass: np.ndarray


@lru_cache(maxsize=32)
def _legendre_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    # scipy's routine is much faster than numpy's for large n, and the
    # resolved node counts run into the thousands
    return roots_legendre(n)


def quadrature_nodes(T: float, n: int, rule: str) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the time quadrature on [0, T]."""
    if rule == "gauss-legendre":
        x, w = _legendre_nodes(n)
        return 0.5 * T * (x + 1.0), 0.5 * T * w
    if rule == "trapezoid":
        t = np.linspace(0.0, T, n)
        h = T / (n - 1)
        w = np.full(n, h)
        w[0] = w[-1] = h / 2.0
        return t, w
    if rule == "midpoint":
        h = T / n
        return (np.arange(n) + 0.5) * h, np.full(n, h)
    raise ValueError(rule)


def resolved_n_quad(grid: GridSpec, T: float, margin: float = 1.25,
                    floor: int = 64) -> int:
    """Node count resolving every oscillation of the Gramian integrand.

    Mode-pair phase differences reach mu_max = (2*pi*N/2)^2 (times dim in
    2D); Gauss-Legendre resolves frequency delta once n exceeds about
    delta*T/2, after which convergence is spectral.
    """
    k_max = grid.modes_per_axis // 2
    mu_max = grid.dim * (2.0 * np.pi * k_max) ** 2
    return int(np.ceil(margin * mu_max * T / 2.0)) + floor


class _GramianApplier:
    """Matrix-free quadrature Gramian with precomputed node phases."""

    def __init__(self, spec: GramianSpec):
        self.spec = spec
        grid = spec.grid
        self.grid = grid
        self.fft_axes = tuple(range(-grid.dim, 0))
        self.chi2 = spec.window.samples ** 2
        lam = grid.laplacian_symbol()
        t, w = quadrature_nodes(spec.T, spec.n_quad, spec.quad_rule)
        self.weights = w
        # exp(i * t_j * Lap) for every node, shape (n_quad, *grid.shape)
        self.phases = np.exp(1j * t.reshape((-1,) + (1,) * grid.dim) * lam)

    def apply_batch(self, batch: np.ndarray, chunk: int = 256) -> np.ndarray:
        """batch shape (B,) + grid.shape -> same shape."""
        acc = np.zeros_like(batch)
        n_nodes = len(self.weights)
        for lo in range(0, n_nodes, chunk):
            ph = self.phases[lo:lo + chunk][:, None]
            v = ph * batch[None, ...]
            v = np.fft.ifftn(v, axes=self.fft_axes)
            v *= self.chi2
            v = np.fft.fftn(v, axes=self.fft_axes)
            v *= np.conj(ph)
            acc += np.tensordot(self.weights[lo:lo + chunk], v, axes=(0, 0))
        return acc

    def apply_one(self, coeffs: np.ndarray) -> np.ndarray:
        ph = self.phases
        v = ph * coeffs[None, ...]
        v = np.fft.ifftn(v, axes=self.fft_axes)
        v *= self.chi2
        v = np.fft.fftn(v, axes=self.fft_axes)
        v *= np.conj(ph)
        return np.tensordot(self.weights, v, axes=(0, 0))


def _apply_batch(spec: GramianSpec, batch: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Apply the quadrature Gramian to a batch of coefficient arrays."""
    return _GramianApplier(spec).apply_batch(batch, chunk=chunk)


def apply_gramian(spec: GramianSpec, phi0: FourierState) -> FourierState:
    """Quadrature approximation of S phi0."""
    if phi0.grid != spec.grid:
        raise ValueError("grid mismatch between state and Gramian spec")
    out = _GramianApplier(spec).apply_one(phi0.coeffs)
    return FourierState(spec.grid, out)


def gramian_operator(spec: GramianSpec) -> LinearOperator:
    """Matrix-free Gramian on flattened coefficient vectors."""
    n = spec.grid.n_points
    shape = spec.grid.shape
    applier = _GramianApplier(spec)

    def matvec(x):
        return applier.apply_one(x.reshape(shape)).ravel()

    return LinearOperator((n, n), matvec=matvec, dtype=complex)


def window_mode_matrix(window: CutoffWindow) -> np.ndarray:
    """Mode-space matrix of multiplication by chi^2 (1D): a circulant built
    from the DFT of the squared samples."""
    if window.grid.dim != 1:
        raise ValueError("window_mode_matrix supports 1D windows")
    c = np.fft.fft(window.samples.astype(complex) ** 2) / window.grid.modes_per_axis
    return circulant(c)


def dense_gramian(spec: GramianSpec, exact_time: bool = True) -> np.ndarray:
    """Dense Gramian matrix in mode space (1D).

    With exact_time=True each entry's time integral is evaluated in closed
    form: S_ab = W_ab * int_0^T exp(i*(mu_a - mu_b)*t) dt with mu = (2*pi*k)^2.
    Otherwise the configured quadrature rule is used (for convergence checks).
    """
    grid = spec.grid
    if grid.dim != 1:
        raise ValueError("dense_gramian supports 1D grids; use the tensor module in 2D")
    w_mat = window_mode_matrix(spec.window)
    mu = -grid.laplacian_symbol()  # (2*pi*k)^2
    if exact_time:
        delta = mu[:, None] - mu[None, :]
        x = delta * spec.T / 2.0
        e_int = spec.T * np.exp(1j * x) * np.sinc(x / np.pi)
        s = w_mat * e_int
    else:
        t, w = quadrature_nodes(spec.T, spec.n_quad, spec.quad_rule)
        ph = np.exp(-1j * np.outer(t, mu))
        s = np.einsum("q,qa,ab,qb->ab", w, ph.conj(), w_mat, ph, optimize=True)
    return 0.5 * (s + s.conj().T)


def lambda_min_dense(spec: GramianSpec, exact_time: bool = True) -> float:
    """Smallest eigenvalue of the densely assembled Gramian."""
    s = dense_gramian(spec, exact_time=exact_time)
    return float(eigh(s, eigvals_only=True, subset_by_index=[0, 0])[0])


def lambda_min_iterative(spec: GramianSpec, tol: float = 1e-10) -> float:
    """Smallest Gramian eigenvalue via Lanczos on S^{-1} applied
    matrix-free (inner solves by CG on the quadrature operator)."""
    op = gramian_operator(spec)
    n = op.shape[0]
    inner_iters = max(200, 10 * n)

    def inv_matvec(b):
        # CG terminates in at most dim iterations in exact arithmetic;
        # the loose cap only guards against rounding stalls.
        x, _ = cg(op, b, rtol=1e-12, atol=0.0, maxiter=inner_iters)
        return x

    opinv = LinearOperator(op.shape, matvec=inv_matvec, dtype=complex)
    vals = eigsh(opinv, k=1, which="LA", tol=tol, return_eigenvectors=False,
                 maxiter=2000)
    top = float(vals[0].real)
    if top <= 0.0:
        raise GramianSingularError("inverse iteration produced a nonpositive eigenvalue")
    return 1.0 / top


def observability_constant(spec: GramianSpec, method: str = "auto",
                           dense_cutoff: int = 128) -> float:
    """Observability constant C_T = 1 / lambda_min(S) at this truncation.

    method 'dense' uses the exact-time dense assembly (1D, moderate N);
    'iterative' uses shift-invert Lanczos on the quadrature operator;
    'auto' picks dense when available.
    """
    grid = spec.grid
    if method == "auto":
        method = "dense" if (grid.dim == 1 and grid.modes_per_axis <= dense_cutoff) else "iterative"
    if method == "dense":
        lam_min = lambda_min_dense(spec)
    elif method == "iterative":
        lam_min = lambda_min_iterative(spec)
    else:
        raise ValueError(f"unknown method {method!r}")
    if lam_min < CONDITIONING_FLOOR:
        raise GramianSingularError(
            f"lambda_min = {lam_min:.3e} below conditioning floor; observability "
            f"numerically void at N={grid.modes_per_axis}, T={spec.T}"
        )
    return 1.0 / lam_min


def solve_gramian_system(spec: GramianSpec, rhs: FourierState, tol: float,
                         max_iter: int) -> tuple[FourierState, int]:
    """CG solve of S x = rhs on the quadrature operator (S is Hermitian PSD)."""
    b = rhs.coeffs.ravel()
    nb = np.linalg.norm(b)
    if nb == 0.0:
        return zero_state(spec.grid), 0
    op = gramian_operator(spec)
    iters = 0

    def count(_):
        nonlocal iters
        iters += 1

    x, info = cg(op, b, rtol=tol, atol=0.0, maxiter=max_iter, callback=count)
    if info > 0:
        raise HUMConvergenceError(
            f"CG did not converge in {max_iter} iterations (relative residual "
            f"{np.linalg.norm(b - op @ x) / nb:.3e}); the Gramian is effectively "
            f"ill-conditioned for this window/truncation"
        )
    return FourierState(spec.grid, x.reshape(spec.grid.shape)), iters


def solve_hum(spec: GramianSpec, target: FourierState, tol: float = 1e-8,
              max_iter: int = 5000) -> ControlSolution:
    """HUM minimizer phi0 driving `target` to zero at time T.

    Solves S phi0 = -i * target; with the control source chi^2 exp(i*t*Lap) phi0
    the Duhamel formula gives u(T) = exp(i*T*Lap) (u0 - i S phi0), so the
    closed-loop final mass equals the solver residual exactly.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if target.grid != spec.grid:
        raise ValueError("grid mismatch between target and Gramian spec")
    rhs = FourierState(spec.grid, -1j * target.coeffs)
    phi0, iters = solve_gramian_system(spec, rhs, tol, max_iter)
    _, residual = drive_linear(target, spec, phi0)
    return ControlSolution(phi0=phi0, residual_l2=residual, iterations=iters)


def synthesize_control(spec: GramianSpec, phi0: FourierState, t: float) -> FourierState:
    """Control source at time t: chi^2 * (exp(i*t*Lap) phi0)."""
    if not (0.0 <= t <= spec.T):
        raise ValueError(f"t = {t} outside the control horizon [0, {spec.T}]")
    from .operators import free_propagate
    from .windows import multiply_window

    propagated = free_propagate(phi0, t)
    squared = CutoffWindow(grid=spec.grid, samples=spec.window.samples ** 2,
                           omega=spec.window.omega,
                           transition_width=spec.window.transition_width,
                           kind=spec.window.kind)
    return multiply_window(propagated, squared)


def drive_linear(u0: FourierState, spec: GramianSpec,
                 phi0: FourierState) -> tuple[TrajectoryRecord, float]:
    """Integrate i u_t + Lap u = chi^2 exp(i t Lap) phi0 from u0 over [0, T].

    Propagation between quadrature nodes is exact; the source enters
    through the Duhamel integral evaluated on the spec's quadrature rule,
    so the result is consistent with solve_hum's discrete Gramian.
    Returns the sampled trajectory and the final mass ||u(T)||_L2.
    """
    if u0.grid != spec.grid or phi0.grid != spec.grid:
        raise ValueError("grid mismatch")
    grid = spec.grid
    lam = grid.laplacian_symbol()
    chi2 = spec.window.samples ** 2
    t_nodes, w_nodes = quadrature_nodes(spec.T, spec.n_quad, spec.quad_rule)
    fft_axes = tuple(range(-grid.dim, 0))

    # Interaction-picture increments: -i * w_j * exp(-i t_j Lap) chi^2 exp(i t_j Lap) phi0
    ph = np.exp(1j * t_nodes.reshape((-1,) + (1,) * grid.dim) * lam)
    v = ph * phi0.coeffs[None, ...]
    v = np.fft.ifftn(v, axes=fft_axes)
    v *= chi2
    v = np.fft.fftn(v, axes=fft_axes)
    v *= np.conj(ph)
    increments = -1j * w_nodes.reshape((-1,) + (1,) * grid.dim) * v

    times = np.concatenate(([0.0], t_nodes, [spec.T]))
    mass = np.empty(len(times))
    observed = np.empty(len(times))
    acc = u0.coeffs.copy()  # interaction-picture running Duhamel sum
    node_idx = 0
    for i, t in enumerate(times):
        while node_idx < len(t_nodes) and t_nodes[node_idx] <= t:
            acc = acc + increments[node_idx]
            node_idx += 1
        state_coeffs = np.exp(1j * lam * t) * acc
        phys = np.fft.ifftn(state_coeffs, axes=fft_axes) * grid.n_points
        mass[i] = np.sum(np.abs(state_coeffs) ** 2)
        observed[i] = np.sum(spec.window.samples ** 2 * np.abs(phys) ** 2) / grid.n_points
    final = FourierState(grid, np.exp(1j * lam * spec.T) * acc)
    record = TrajectoryRecord(times=times, mass=mass, observed_mass=observed)
    return record, final.norm_l2()


def hum_regularity_ratio(spec: GramianSpec, s: float, n_samples: int,
                         rng: np.random.Generator, tol: float = 1e-10,
                         max_iter: int = 20000) -> dict:
    """H^s amplification statistics of S^{-1} over random unit-H^s data.

    Draws n_samples states with H^s norm 1, solves S phi0 = psi0, and
    reports the max and mean of ||phi0||_{H^s}.  Requires s >= 0 and a
    smooth window for the bounded-in-N contract to make sense.
    """
    if s < 0.0:
        raise ValueError("s must be >= 0")
    from .grid import FourierState
    from .operators import sobolev_norm, sobolev_weights

    if spec.grid.dim != 1:
        raise ValueError("regularity study uses the dense 1D Gramian")
    # Sample from an N-stable Gaussian measure on the unit H^s sphere:
    # coefficients ~ g_k * (1+|2 pi k|^2)^{-(s+1)/2}.  The extra decay
    # makes the tail summable, so refining the grid only appends
    # negligible modes and the statistic can converge in N.
    decay = sobolev_weights(spec.grid, -(s + 1.0))
    s_mat = dense_gramian(spec, exact_time=True)
    lu = lu_factor(s_mat)
    ratios = []
    for _ in range(n_samples):
        g = rng.standard_normal(spec.grid.shape) + 1j * rng.standard_normal(
            spec.grid.shape)
        psi0 = FourierState(spec.grid, g * decay)
        psi0 = psi0 * (1.0 / sobolev_norm(psi0, s))
        phi0 = FourierState(spec.grid, lu_solve(lu, psi0.coeffs))
        ratios.append(sobolev_norm(phi0, s))
    ratios = np.array(ratios)
    return {"max": float(ratios.max()), "mean": float(ratios.mean()),
            "ratios": ratios, "s": s, "n_samples": n_samples}
