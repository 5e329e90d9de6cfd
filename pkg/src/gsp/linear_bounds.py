"""First-order componentwise perturbation bounds.

Everything here is driven by the ``2nu x 2nu`` matrix ``L`` that maps the
basic perturbation vectors ``x = slvec(U^H dU)``, ``y = slvec(V^H dV)`` to the
projected data perturbation ``[f; g]`` at first order.  Bounds follow from
row norms of ``L^{-1}`` times ``delta = ||[dA; dB]||_F``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import (
    BadDimension,
    DimensionMismatch,
    InvalidChordalBound,
    MissingPerturbedFactors,
    NearSingularL,
    ZeroDiagonal,
    ZeroPair,
)
from .gqz import GeneralizedSchur
from .matrixkit import as_complex_matrix, kron, m_slvec, nu_of, sl_pairs, sl_table, slvec

NEAR_SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class LinearSystem:
    n: int
    nu: int
    L: np.ndarray
    L_inv: np.ndarray
    row_norms: np.ndarray
    condition_estimate: float

    def blocks(self) -> dict[str, np.ndarray]:
        """The four ``nu x nu`` blocks, signed so that ``L = [-TX, TY; -RX, RY]``."""
        nu = self.nu
        return {
            "TX": -self.L[:nu, :nu], "TY": self.L[:nu, nu:],
            "RX": -self.L[nu:, :nu], "RY": self.L[nu:, nu:],
        }


@dataclass(frozen=True)
class OracleTerms:
    """Projected data perturbations ``F = -U^H dA V`` and ``G = -U^H dB V``.

    In ``oracle`` mode the perturbed factors are used, in ``a-priori`` mode the
    unperturbed ones (a first-order surrogate).
    """

    F: np.ndarray
    G: np.ndarray
    f: np.ndarray
    g: np.ndarray
    f1: np.ndarray
    g1: np.ndarray
    mode: str


@dataclass(frozen=True)
class DiagonalSystem:
    E: np.ndarray
    Z: np.ndarray
    z_row_norms: np.ndarray


@dataclass(frozen=True)
class SubspaceSystem:
    """Lazy view on the rows of ``L^{-1}`` belonging to the ``y`` unknowns."""

    n: int
    nu: int
    L_inv: np.ndarray = field(repr=False)

    def block(self, i: int, j: int) -> np.ndarray:
        """Row of ``L^{-1}`` for the ``y`` entry at 0-based position ``(i, j)``, ``i > j``."""
        if not (0 <= j < i < self.n):
            raise BadDimension(f"({i}, {j}) is not a strictly-lower position")
        return self.L_inv[self.nu + sl_table(self.n)[i, j]]

    def submatrix(self, p: int) -> np.ndarray:
        """``(n-p) x 2p nu`` matrix: row ``i`` concatenates blocks ``(i, 0..p-1)``."""
        _check_p(p, self.n)
        tab = sl_table(self.n)
        rows = self.nu + tab[p:, :p]  # (n-p, p)
        return self.L_inv[rows].reshape(self.n - p, -1)


class SubspaceBound(NamedTuple):
    cond_theta: float
    theta_lin: float
    saturated: bool


@dataclass(frozen=True)
class BoundsBundle:
    """All first-order bounds for one problem."""

    delta_norm: float
    x_bound: np.ndarray
    y_bound: np.ndarray
    hatW: np.ndarray
    hatK: np.ndarray
    U_bound: np.ndarray
    V_bound: np.ndarray
    T_bound: np.ndarray
    R_bound: np.ndarray
    t_bound: np.ndarray
    r_bound: np.ndarray
    eig_chordal_bounds: np.ndarray
    eig_chordal_status: list
    eig_conditions: np.ndarray
    subspace: dict
    system: LinearSystem = field(repr=False)
    diag_system: DiagonalSystem = field(repr=False)


def _check_p(p: int, n: int) -> None:
    if not (1 <= p <= n - 1):
        raise BadDimension(f"p must lie in 1..{n - 1}, got {p}")


def _upper(a, name):
    a = as_complex_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square")
    return a


def stacked_norm(dA, dB) -> float:
    """``||[dA; dB]||_F``."""
    return float(np.hypot(np.linalg.norm(dA), np.linalg.norm(dB)))


# ----------------------------------------------------------------- L system


def assemble_L_kron(T, R) -> np.ndarray:
    """Reference assembly of ``L`` through explicit Kronecker products.

    ``L_{T,X} = M (T^T kron I) M^T`` and ``L_{T,Y} = M (I kron T) M^T`` with
    ``M`` the slvec selection matrix; same for ``R``.
    """
    n = T.shape[0]
    M = m_slvec(n)
    eye = np.eye(n)
    tx = M @ kron(T.T, eye) @ M.T
    ty = M @ kron(eye, T) @ M.T
    rx = M @ kron(R.T, eye) @ M.T
    ry = M @ kron(eye, R) @ M.T
    return np.block([[-tx, ty], [-rx, ry]])


def build_L(T, R, method: str = "index", tol: float = NEAR_SINGULAR_TOL) -> LinearSystem:
    """Assemble ``L`` and its inverse.

    Parameters
    ----------
    T, R : upper triangular factors, ``n >= 2``.
    method : ``"index"`` (direct index-map assembly) or ``"kron"``.
    tol : reject ``L`` when ``sigma_min / sigma_max < tol``.

    Raises
    ------
    NearSingularL
        ``L`` is numerically singular, which happens when two generalized
        eigenvalues (nearly) coincide.
    """
    T = _upper(T, "T")
    R = _upper(R, "R")
    n = T.shape[0]
    if R.shape != T.shape:
        raise DimensionMismatch("T and R must have the same shape")
    if n < 2:
        raise BadDimension("need n >= 2")
    if method == "index":
        L = kernels.assemble_L(T, R)
    elif method == "kron":
        L = assemble_L_kron(T, R)
    else:
        raise ValueError(f"unknown method {method!r}")
    s = np.linalg.svd(L, compute_uv=False)
    if s[0] == 0.0 or s[-1] / s[0] < tol:
        raise NearSingularL(
            f"sigma_min/sigma_max of L is {s[-1] / s[0] if s[0] else 0.0:.2e};"
            " the pair has (nearly) repeated eigenvalues"
        )
    L_inv = np.linalg.inv(L)
    return LinearSystem(
        n=n, nu=nu_of(n), L=L, L_inv=L_inv,
        row_norms=np.linalg.norm(L_inv, axis=1),
        condition_estimate=float(s[0] / s[-1]),
    )


def build_fg(schur: GeneralizedSchur, dA, dB, mode: str = "a-priori", perturbed: GeneralizedSchur | None = None) -> OracleTerms:
    """Right-hand side terms ``f = slvec(F)``, ``g = slvec(G)`` and diagonals ``f1``, ``g1``."""
    dA = as_complex_matrix(dA, "dA")
    dB = as_complex_matrix(dB, "dB")
    if dA.shape != schur.T.shape or dB.shape != schur.T.shape:
        raise DimensionMismatch("perturbations must match the factor shapes")
    if mode == "oracle":
        if perturbed is None:
            raise MissingPerturbedFactors("oracle mode needs the aligned perturbed factors")
        U, V = perturbed.U, perturbed.V
    elif mode == "a-priori":
        U, V = schur.U, schur.V
    else:
        raise ValueError(f"unknown mode {mode!r}")
    PA = U.conj().T @ dA @ V
    PB = U.conj().T @ dB @ V
    F, G = -PA, -PB
    return OracleTerms(F=F, G=G, f=slvec(F), g=slvec(G), f1=np.diag(PA).copy(), g1=np.diag(PB).copy(), mode=mode)


def xy_linear_bounds(sys: LinearSystem, delta_norm: float) -> tuple[np.ndarray, np.ndarray]:
    """``x_bound_l = ||L^{-1}(l, :)|| delta`` and the same for ``y``."""
    if delta_norm < 0:
        raise ValueError("delta_norm must be nonnegative")
    b = sys.row_norms * delta_norm
    return b[: sys.nu].copy(), b[sys.nu:].copy()


def xy_linear_approx(sys: LinearSystem, terms: OracleTerms) -> tuple[np.ndarray, np.ndarray]:
    """Signed first-order approximation ``[x; y] = L^{-1} [f; g]``."""
    v = sys.L_inv @ np.concatenate([terms.f, terms.g])
    return v[: sys.nu], v[sys.nu:]


def hat_WK(x_bound, y_bound, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric hollow matrices carrying the x/y bounds on both triangles."""
    return _hat(x_bound, n), _hat(y_bound, n)


def _hat(v, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (nu_of(n),):
        raise DimensionMismatch(f"expected a vector of length {nu_of(n)}, got {v.shape}")
    H = np.zeros((n, n))
    p = sl_pairs(n)
    H[p[:, 0], p[:, 1]] = v
    H[p[:, 1], p[:, 0]] = v
    return H


def uv_bounds(U, V, hatW, hatK) -> tuple[np.ndarray, np.ndarray]:
    """``|dU| <= |U| hatW`` and ``|dV| <= |V| hatK``."""
    return np.abs(U) @ hatW, np.abs(V) @ hatK


def _factor_bound(U, V, X, dX, W, K) -> np.ndarray:
    aUh = np.abs(U.conj().T)
    aV = np.abs(V)
    M = aUh @ (np.abs(X) + np.abs(dX)) @ aV
    # W is real symmetric, so W^H = W^T
    return np.triu(M @ K + W.T @ M + W.T @ M @ K + aUh @ np.abs(dX) @ aV)


def tr_bounds(U, V, A, B, dA, dB, hatW, hatK) -> tuple[np.ndarray, np.ndarray]:
    """Upper triangular bounds on ``|dT|`` and ``|dR|``."""
    return _factor_bound(U, V, A, dA, hatW, hatK), _factor_bound(U, V, B, dB, hatW, hatK)


def linearization_remainder(schur: GeneralizedSchur, dU, dV) -> tuple[np.ndarray, np.ndarray]:
    """Second-order terms dropped by the linearization.

    With exact ``dU``, ``dV`` (aligned) and oracle ``f``, ``g`` one has
    ``L [x; y] = [f; g] + [rx; ry]`` identically, where
    ``rx_l = sum_{k<=j} t_kj du_i^H du_k - du_i^H A dv_j`` (same with ``R``,
    ``B``).  Evaluating the products directly keeps full relative accuracy
    even when ``L [x; y] - [f; g]`` itself would drown in rounding.
    """
    G = dU.conj().T @ dU
    UA = dU.conj().T @ schur.A @ dV
    UB = dU.conj().T @ schur.B @ dV
    return slvec(G @ schur.T - UA), slvec(G @ schur.R - UB)


# -------------------------------------------------------- diagonal elements


def build_Z(T, R, sys: LinearSystem) -> DiagonalSystem:
    """``E`` (first-order map from ``[x; y]`` to the diagonal changes) and ``Z = [E L^{-1}, I]``."""
    n = sys.n
    E = kernels.assemble_E(T, R)
    Z = np.hstack([E @ sys.L_inv, np.eye(2 * n)])
    return DiagonalSystem(E=E, Z=Z, z_row_norms=np.linalg.norm(Z, axis=1))


def diagonal_bounds(diag_sys: DiagonalSystem, delta_norm: float) -> tuple[np.ndarray, np.ndarray]:
    """Bounds ``t_i >= |dt_ii|`` and ``r_i >= |dr_ii|`` at first order."""
    n = diag_sys.E.shape[0] // 2
    b = diag_sys.z_row_norms * delta_norm
    return b[:n].copy(), b[n:].copy()


def eig_chordal_bound(t_ii, r_ii, t_i: float, r_i: float) -> float:
    """Chordal-metric bound on the perturbation of the eigenvalue ``<t_ii, r_ii>``.

    Raises
    ------
    ZeroPair
        Both diagonal entries vanish.
    InvalidChordalBound
        The diagonal bounds are not small against ``|t_ii|``, ``|r_ii|`` and
        the formula's radicand is not positive.
    """
    at, ar = abs(t_ii), abs(r_ii)
    s = at * at + ar * ar
    if s == 0:
        raise ZeroPair("eigenvalue pair <0, 0>")
    rad = s - 2.0 * (at * t_i + ar * r_i)
    if rad <= 0:
        raise InvalidChordalBound(f"radicand {rad:.3e} is not positive; perturbation too large")
    return float((at * r_i + ar * t_i) / (np.sqrt(s) * np.sqrt(rad)))


def eig_condition(diag_sys: DiagonalSystem, t_ii, r_ii, i: int) -> float:
    """``||Z(i, :)|| / |t_ii| + ||Z(n+i, :)|| / |r_ii|`` for 0-based slot ``i``."""
    n = diag_sys.E.shape[0] // 2
    if t_ii == 0 or r_ii == 0:
        which = "t" if t_ii == 0 else "r"
        raise ZeroDiagonal(f"{which}_ii vanishes at slot {i}; eigenvalue is {'0' if which == 't' else 'infinite'}")
    z = diag_sys.z_row_norms
    return float(z[i] / abs(t_ii) + z[n + i] / abs(r_ii))


# ------------------------------------------------------ invariant subspaces


def build_Ltilde(sys: LinearSystem) -> SubspaceSystem:
    return SubspaceSystem(n=sys.n, nu=sys.nu, L_inv=sys.L_inv)


def invariant_subspace_bound(sub: SubspaceSystem, p: int, delta_norm: float) -> SubspaceBound:
    """Condition number and linear bound on the largest canonical angle.

    ``cond = ||Ltilde_p||_2``; ``theta = arcsin(min(1, cond * delta))``.  The
    ``saturated`` flag records that the argument had to be clipped.
    """
    c = float(np.linalg.svd(sub.submatrix(p), compute_uv=False)[0])
    arg = c * delta_norm
    return SubspaceBound(c, float(np.arcsin(min(1.0, arg))), arg > 1.0)


def exact_subspace_angle(dK, p: int) -> float:
    """``arcsin ||dK[p:, :p]||_2`` (largest canonical angle, 0-based slicing)."""
    dK = np.asarray(dK)
    _check_p(p, dK.shape[0])
    s = float(np.linalg.svd(dK[p:, :p], compute_uv=False)[0])
    return float(np.arcsin(min(1.0, s)))


# ------------------------------------------------------------------ bundle


def linear_bundle(schur: GeneralizedSchur, dA, dB, ps=None) -> BoundsBundle:
    """Evaluate every first-order bound for ``schur`` perturbed by ``(dA, dB)``.

    ``ps`` selects subspace dimensions (default ``1..n-1``).
    """
    dA = as_complex_matrix(dA, "dA")
    dB = as_complex_matrix(dB, "dB")
    n = schur.n
    delta = stacked_norm(dA, dB)
    sys = build_L(schur.T, schur.R)
    xb, yb = xy_linear_bounds(sys, delta)
    W, K = hat_WK(xb, yb, n)
    Ub, Vb = uv_bounds(schur.U, schur.V, W, K)
    Tb, Rb = tr_bounds(schur.U, schur.V, schur.A, schur.B, dA, dB, W, K)
    dsys = build_Z(schur.T, schur.R, sys)
    tb, rb = diagonal_bounds(dsys, delta)
    tt, rr = np.diag(schur.T), np.diag(schur.R)
    chordal = np.full(n, np.nan)
    status = []
    conds = np.full(n, np.nan)
    for i in range(n):
        try:
            chordal[i] = eig_chordal_bound(tt[i], rr[i], tb[i], rb[i])
            status.append("ok")
        except InvalidChordalBound:
            status.append("invalid")
        try:
            conds[i] = eig_condition(dsys, tt[i], rr[i], i)
        except ZeroDiagonal:
            pass
    sub = build_Ltilde(sys)
    ps = range(1, n) if ps is None else ps
    subspace = {p: invariant_subspace_bound(sub, p, delta) for p in ps}
    return BoundsBundle(
        delta_norm=delta, x_bound=xb, y_bound=yb, hatW=W, hatK=K,
        U_bound=Ub, V_bound=Vb, T_bound=Tb, R_bound=Rb,
        t_bound=tb, r_bound=rb, eig_chordal_bounds=chordal, eig_chordal_status=status,
        eig_conditions=conds, subspace=subspace, system=sys, diag_system=dsys,
    )
