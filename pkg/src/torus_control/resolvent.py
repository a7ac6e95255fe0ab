"""Hautus-type resolvent constants and their link with observability.

The estimate under study is, for every truncated state u and real lambda,

    ||u||^2 <= M ||(Lap - lambda) u||^2 + m ||chi u||^2.

For fixed m the best (smallest) M is an extremal eigenvalue problem:
with Q = I - m*W (W the windowed quadratic form) and A = Lap - lambda
diagonal, M is the largest eigenvalue of A^{-1} Q A^{-1} on the
orthogonal complement of ker(A), clamped at zero.  When lambda hits a
Laplacian eigenvalue the kernel block must satisfy m <chi phi, chi phi>
>= ||phi||^2, otherwise no finite M exists; a strictly negative kernel
block is eliminated by its Schur complement.

Observability and resolvent constants convert both ways:
forward  (M, m) = (2*C_T*T^3/3, 2*C_T*T);
reverse  controllability holds for T > pi*sqrt(M) with cost
         C_T = 2*m*T / (T^2 - M*pi^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import FourierState, GridSpec
from .hum import window_mode_matrix
from .windows import CutoffWindow, multiply_window


class InfeasibleResolventError(RuntimeError):
    """Some eigenfunction phi with (Lap - lambda) phi = 0 violates
    m ||chi phi||^2 >= ||phi||^2: no finite M exists at this lambda."""


@dataclass
class ResolventSweepResult:
    """Best constants M(lambda) over a lambda grid, with Miller bounds."""

    lambda_grid: np.ndarray
    m_fixed: float
    M_of_lambda: np.ndarray

    @property
    def M_sup(self) -> float:
        return float(np.max(self.M_of_lambda))

    @property
    def miller_time(self) -> float:
        return float(np.pi * np.sqrt(self.M_sup))

    def miller_cost(self, T: float) -> float:
        return miller_cost_bound(self.M_sup, self.m_fixed, T)


def best_resolvent_constant(lam: float, m: float, window: CutoffWindow,
                            grid: GridSpec, kernel_tol: float = 1e-9) -> float:
    """Smallest M >= 0 making the resolvent estimate hold for all states."""
    if m < 0.0:
        raise ValueError("m must be nonnegative")
    if grid.dim != 1:
        raise ValueError("best_resolvent_constant supports 1D grids")
    n = grid.modes_per_axis
    d = grid.laplacian_symbol() - lam  # Lap - lambda, diagonal in mode space
    w_mat = window_mode_matrix(window)
    q = np.eye(n) - m * w_mat
    q = 0.5 * (q + q.conj().T)

    scale = max(abs(lam), (2.0 * np.pi * n / 2.0) ** 2, 1.0)
    kernel = np.abs(d) <= kernel_tol * scale
    comp = ~kernel
    if kernel.any():
        q_kk = q[np.ix_(kernel, kernel)]
        vals, vecs = np.linalg.eigh(q_kk)
        # feasibility: m <W phi, phi> >= ||phi||^2 on the kernel, i.e. Q_kk <= 0
        if vals.max() > 1e-12:
            raise InfeasibleResolventError(
                f"lambda = {lam:.6g} hits the spectrum and m = {m:.6g} fails "
                f"m*||chi phi||^2 >= ||phi||^2 on the eigenspace "
                f"(max kernel eigenvalue {vals.max():.3e})"
            )
        if not comp.any():
            return 0.0
        q_ck = q[np.ix_(comp, kernel)]
        # eliminate strictly negative kernel directions by Schur complement;
        # near-zero directions must decouple or M is unbounded
        neg = vals < -1e-12
        flat = ~neg
        if flat.any():
            coupling = q_ck @ vecs[:, flat]
            if np.linalg.norm(coupling) > 1e-10:
                raise InfeasibleResolventError(
                    f"lambda = {lam:.6g}: kernel direction with vanishing "
                    f"margin couples to the complement; no finite M"
                )
        q_eff = q[np.ix_(comp, comp)]
        if neg.any():
            v_neg = vecs[:, neg]
            q_eff = q_eff - (q_ck @ v_neg) @ np.diag(1.0 / vals[neg]) @ (q_ck @ v_neg).conj().T
    else:
        q_eff = q

    inv_d = 1.0 / d[comp]
    g = inv_d[:, None] * q_eff * inv_d[None, :]
    g = 0.5 * (g + g.conj().T)
    top = float(np.linalg.eigvalsh(g)[-1])
    return max(0.0, top)


def default_lambda_grid(grid: GridSpec, n_points: int = 512,
                        margin: float = 1.1) -> np.ndarray:
    """lambda samples concentrated near the truncated Laplacian spectrum.

    Places points at each eigenvalue -(2*pi*k)^2, at small offsets around
    it, and fills every spectral gap (plus a margin beyond both ends);
    M(lambda) peaks between eigenvalues, so uniform grids miss the sup.
    """
    mu = np.unique(-grid.laplacian_symbol())  # 0 ... (2 pi N/2)^2
    eigs = np.sort(-mu)  # negative eigenvalues, ascending
    pts = set(eigs.tolist())
    lo = eigs[0] * margin
    hi = (2.0 * np.pi) ** 2  # positive side: M(lambda) decays like 1/lambda^2
    anchors = np.concatenate(([lo], eigs, [hi]))
    per_gap = max(3, n_points // max(1, len(anchors) - 1))
    for a, b in zip(anchors[:-1], anchors[1:]):
        if b - a <= 0:
            continue
        # Chebyshev-like clustering toward both gap ends
        theta = np.linspace(0.0, np.pi, per_gap + 2)[1:-1]
        pts.update((0.5 * (a + b) + 0.5 * (b - a) * np.cos(theta)).tolist())
        gap = b - a
        for off in (1e-4, 1e-2):
            pts.add(a + off * gap)
            pts.add(b - off * gap)
    return np.array(sorted(pts))


def feasible_m(window: CutoffWindow, grid: GridSpec, margin: float = 2.0) -> float:
    """An m for which every Laplacian eigenspace satisfies the kernel
    feasibility constraint, with the given multiplicative margin.

    For eigenvalue -(2*pi*k)^2 the eigenspace is span{e^{+-2*pi*i*k*x}};
    the constraint is m * lambda_min(W restricted) >= 1.
    """
    w_mat = window_mode_matrix(window)
    k_all = grid.mode_indices()
    worst = 0.0
    for k in range(0, grid.modes_per_axis // 2 + 1):
        idx = np.where(np.abs(k_all) == k)[0]
        if len(idx) == 0:
            continue
        block = w_mat[np.ix_(idx, idx)]
        lam_min = float(np.linalg.eigvalsh(0.5 * (block + block.conj().T))[0])
        if lam_min <= 0.0:
            raise InfeasibleResolventError(
                f"window does not observe the eigenspace of mode |k| = {k}"
            )
        worst = max(worst, 1.0 / lam_min)
    return margin * worst


def sweep(lambda_grid: np.ndarray, m: float, window: CutoffWindow,
          grid: GridSpec) -> ResolventSweepResult:
    """best_resolvent_constant over a lambda grid."""
    lambda_grid = np.asarray(lambda_grid, dtype=float)
    if lambda_grid.size == 0:
        raise ValueError("lambda grid must be nonempty")
    best = np.empty_like(lambda_grid)
    for i, lam in enumerate(lambda_grid):
        try:
            best[i] = best_resolvent_constant(lam, m, window, grid)
        except InfeasibleResolventError as exc:
            raise InfeasibleResolventError(
                f"infeasible at lambda = {lam:.6g}: {exc}"
            ) from exc
    return ResolventSweepResult(lambda_grid=lambda_grid, m_fixed=m, M_of_lambda=best)


def miller_cost_bound(M: float, m: float, T: float) -> float:
    """Observability cost 2*m*T / (T^2 - M*pi^2), valid for T > pi*sqrt(M)."""
    if T <= np.pi * np.sqrt(M):
        raise ValueError(
            f"T = {T} is at or below the Miller time pi*sqrt(M) = {np.pi * np.sqrt(M):.6g}"
        )
    return 2.0 * m * T / (T ** 2 - M * np.pi ** 2)


def constants_from_observability(c_t: float, T: float) -> tuple[float, float]:
    """Resolvent constants from an observability constant:
    M = 2*C_T*T^3/3 and m = 2*C_T*T."""
    if c_t < 0.0 or T <= 0.0:
        raise ValueError("need C_T >= 0 and T > 0")
    return 2.0 * c_t * T ** 3 / 3.0, 2.0 * c_t * T


def verify_resolvent(u: FourierState, lam: float, M: float, m: float,
                     window: CutoffWindow) -> tuple[float, float, bool]:
    """Evaluate both sides of the resolvent estimate for one state."""
    lhs = u.norm_l2() ** 2
    resolvent_term = float(np.sum(np.abs((u.grid.laplacian_symbol() - lam) * u.coeffs) ** 2))
    observed = multiply_window(u, window).norm_l2() ** 2
    rhs = M * resolvent_term + m * observed
    return lhs, rhs, lhs <= rhs * (1.0 + 1e-10)


def wave_resolvent_check(u: FourierState, lam: float, M2: float, m2: float,
                         window: CutoffWindow) -> tuple[float, float, bool]:
    """Wave-derived estimate ||lam*u||^2 <= M2 ||(Lap - lam^2) u||^2
    + m2 ||lam * chi u||^2."""
    lhs = lam ** 2 * u.norm_l2() ** 2
    resolvent_term = float(
        np.sum(np.abs((u.grid.laplacian_symbol() - lam ** 2) * u.coeffs) ** 2)
    )
    observed = multiply_window(u, window).norm_l2() ** 2
    rhs = M2 * resolvent_term + m2 * lam ** 2 * observed
    return lhs, rhs, lhs <= rhs * (1.0 + 1e-10)
