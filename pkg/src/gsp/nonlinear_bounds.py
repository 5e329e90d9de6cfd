"""Fixed-point refinement of the linear bounds.

The linear bounds drop every second-order term.  The iteration below puts
them back as nonnegative corrections: column bounds ``W``, ``K`` on
``|U^H dU|`` and ``|V^H dV|`` are propagated through the unitarity
constraints, the quadratic terms are bounded with them, and the result is
pushed through ``|L^{-1}|``.  On convergence the output dominates the linear
bound entrywise.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DivergenceDetected, NonConvergence, SingularS
from .gqz import GeneralizedSchur
from .linear_bounds import LinearSystem, SubspaceBound, _check_p, _factor_bound, _hat

PIVOT_TOL = 1e-3
DIVERGENCE_LIMIT = 1.0


@dataclass
class NonlinearState:
    x_nl: np.ndarray
    y_nl: np.ndarray
    W_nl: np.ndarray
    K_nl: np.ndarray
    iterations: int
    converged: bool
    steps: list = field(default_factory=list)


def nonlinear_iterate(schur: GeneralizedSchur, sys: LinearSystem, linear, q: int = 30, tol: float = 1e-12,
                      mode: str = "bound", strict: bool = False) -> NonlinearState:
    """Run the refinement.

    Parameters
    ----------
    schur : factorization of the unperturbed pair.
    sys : the matching :class:`~gsp.linear_bounds.LinearSystem`.
    linear : tuple
        In ``"bound"`` mode ``(x_bound, y_bound)``; in ``"oracle"`` mode the
        signed first-order approximation ``(x_lin, y_lin)`` whose moduli
        are used instead.
    q : maximum number of iterations.
    tol : stop when ``||new - old|| / ||old|| < tol``.
    strict : raise :class:`NonConvergence` instead of returning an
        unconverged state.

    Raises
    ------
    DivergenceDetected
        An entry exceeded 1; the perturbation is outside the regime where
        the fixed point is meaningful.
    SingularS
        A column-propagation solve met a pivot below ``1e-3``.
    """
    if q < 1 or tol <= 0:
        raise ValueError("need q >= 1 and tol > 0")
    if mode not in ("bound", "oracle"):
        raise ValueError(f"unknown mode {mode!r}")
    n, nu = sys.n, sys.nu
    lin = np.abs(np.concatenate([np.asarray(linear[0]), np.asarray(linear[1])])).astype(float)
    absLi = np.abs(sys.L_inv)
    absT = np.ascontiguousarray(np.abs(schur.T))
    absR = np.ascontiguousarray(np.abs(schur.R))
    Uh = schur.U.conj().T
    TA = np.ascontiguousarray(np.abs(Uh @ schur.A @ schur.V))
    TB = np.ascontiguousarray(np.abs(Uh @ schur.B @ schur.V))

    cur = np.zeros(2 * nu)
    W = np.zeros((n, n))
    K = np.zeros((n, n))
    steps = []
    converged = False
    it = 0
    for it in range(1, q + 1):
        W1, K1 = _hat(cur[:nu], n), _hat(cur[nu:], n)
        W2 = np.diag(0.5 * np.sum(W * W, axis=0))
        K2 = np.diag(0.5 * np.sum(K * K, axis=0))
        W, pw = kernels.propagate_columns(W1, W2)
        K, pk = kernels.propagate_columns(K1, K2)
        if min(pw, pk) < PIVOT_TOL:
            raise SingularS(f"pivot {min(pw, pk):.2e} in the column propagation; perturbation too large")
        dx, dy = kernels.second_order_xy(absT, absR, TA, TB, W, K)
        new = lin + absLi @ np.concatenate([dx, dy])
        if not np.all(np.isfinite(new)) or new.max(initial=0.0) > DIVERGENCE_LIMIT:
            raise DivergenceDetected(f"bound entry {new.max():.3e} exceeds {DIVERGENCE_LIMIT} at iteration {it}")
        old_norm = np.linalg.norm(cur)
        step = np.linalg.norm(new - cur) / old_norm if old_norm > 0 else (0.0 if not new.any() else np.inf)
        steps.append(float(step))
        cur = new
        if step < tol:
            converged = True
            break
    if not converged and strict:
        raise NonConvergence(f"no convergence in {q} iterations (last step {steps[-1]:.2e})")
    # W, K are from the last sweep and match the returned x, y up to the final step
    return NonlinearState(x_nl=cur[:nu], y_nl=cur[nu:], W_nl=W, K_nl=K, iterations=it, converged=converged, steps=steps)


def nonlinear_uv(U, V, state: NonlinearState) -> tuple[np.ndarray, np.ndarray]:
    return np.abs(U) @ state.W_nl, np.abs(V) @ state.K_nl


def nonlinear_tr(U, V, A, B, dA, dB, state: NonlinearState) -> tuple[np.ndarray, np.ndarray]:
    W, K = state.W_nl, state.K_nl
    return _factor_bound(U, V, A, dA, W, K), _factor_bound(U, V, B, dB, W, K)


def nonlinear_invariant(state: NonlinearState, p: int) -> SubspaceBound:
    """``arcsin(min(1, ||K_nl[p:, :p]||_2))``; ``cond_theta`` is NaN (not defined here)."""
    K = state.K_nl
    _check_p(p, K.shape[0])
    s = float(np.linalg.svd(K[p:, :p], compute_uv=False)[0])
    return SubspaceBound(float("nan"), float(np.arcsin(min(1.0, s))), s > 1.0)


def nonlinear_diag_second_order(T, R, U, V, A, B, state: NonlinearState):
    """Second-order diagonal terms ``(ddt, ddr, d_t, d_r)``.

    ``ddt_i = sum_{k<=i} |t_ki| w_i.w_k + w_i^T |U^H A V| k_i`` with ``w_i``,
    ``k_i`` the columns of ``W_nl``, ``K_nl``; ``d_t = |t_ii| (||w_i||^2 +
    ||k_i||^2) / 2``.  The ``R`` versions use ``R`` and ``B``.
    """
    W, K = state.W_nl, state.K_nl
    Uh = np.asarray(U).conj().T
    TA = np.ascontiguousarray(np.abs(Uh @ A @ V))
    TB = np.ascontiguousarray(np.abs(Uh @ B @ V))
    ddt, ddr = kernels.diag_second_order(
        np.ascontiguousarray(np.abs(T)), np.ascontiguousarray(np.abs(R)), TA, TB,
        np.ascontiguousarray(W), np.ascontiguousarray(K),
    )
    c = 0.5 * (np.sum(W * W, axis=0) + np.sum(K * K, axis=0))
    return ddt, ddr, np.abs(np.diag(T)) * c, np.abs(np.diag(R)) * c


def nonlinear_diagonal_bounds(t_bound, r_bound, second_order) -> tuple[np.ndarray, np.ndarray]:
    """Full nonlinear diagonal bounds ``t_i + ddt_i + d_t,i`` and ``r_i + ddr_i + d_r,i``."""
    ddt, ddr, dt, dr = second_order
    return t_bound + ddt + dt, r_bound + ddr + dr
