"""Ordered generalized Schur factorization and exact perturbation quantities.

The factorization is ``A = U T V^H``, ``B = U R V^H`` with unitary ``U, V`` and
upper triangular ``T, R``.  Every bound in the package depends on which
eigenvalue sits in which diagonal slot, so the ordering is an explicit
argument everywhere.

Notes
-----
The complex QZ iteration itself is LAPACK's (``zgges`` through
:func:`scipy.linalg.qz`); reordering uses adjacent swaps from ``ztgexc``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
import scipy.linalg as sla
from scipy.linalg.lapack import ztgexc

from .errors import (
    ConvergenceFailure,
    DefectivePencil,
    DimensionMismatch,
    IrregularPencil,
    OrderingUnmatchable,
    ZeroOverlap,
    ZeroPair,
)
from .matrixkit import as_complex_matrix, slvec

Ordering = Union[str, Sequence]

AS_COMPUTED = "as-computed"
DESCENDING = "descending-real-lambda"

CLUSTER_TOL = 1e-8
OVERLAP_TOL = 1e-3
PERTURBED_MATCH_TOL = 1e-3
_REGULARITY_SEED = 20240521


@dataclass(frozen=True)
class MatrixPair:
    """A square matrix pair ``(A, B)`` of equal size."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = as_complex_matrix(self.A, "A")
        B = as_complex_matrix(self.B, "B")
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        if A.shape != B.shape:
            raise DimensionMismatch(f"A is {A.shape} but B is {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]


def _as_pair(pair, B=None) -> MatrixPair:
    if isinstance(pair, MatrixPair):
        return pair
    return MatrixPair(pair, B)


@dataclass(frozen=True)
class GeneralizedSchur:
    """Ordered generalized Schur factors of ``(A, B)``.

    Attributes
    ----------
    U, V : unitary factors.
    T, R : upper triangular factors.
    A, B : the factored pair (kept so perturbed factors can be re-projected).
    clustered : True when two eigenvalues are closer than ``CLUSTER_TOL`` in
        the chordal metric; the bounds assume distinct eigenvalues.
    """

    U: np.ndarray
    V: np.ndarray
    T: np.ndarray
    R: np.ndarray
    A: np.ndarray
    B: np.ndarray
    clustered: bool = False

    @property
    def n(self) -> int:
        return self.T.shape[0]

    @property
    def eigenpairs(self) -> list[tuple[complex, complex]]:
        return [(complex(t), complex(r)) for t, r in zip(np.diag(self.T), np.diag(self.R))]

    @property
    def lambdas(self) -> np.ndarray:
        """``t_ii / r_ii`` with ``inf`` where ``r_ii`` vanishes."""
        return _pair_ratio(np.diag(self.T), np.diag(self.R))

    def residuals(self) -> dict:
        n = self.n
        eye = np.eye(n)
        return {
            "U_orth": float(np.linalg.norm(self.U.conj().T @ self.U - eye)),
            "V_orth": float(np.linalg.norm(self.V.conj().T @ self.V - eye)),
            "T_lower": float(np.abs(np.tril(self.T, -1)).max(initial=0.0)),
            "R_lower": float(np.abs(np.tril(self.R, -1)).max(initial=0.0)),
            "A": float(np.linalg.norm(self.A - self.U @ self.T @ self.V.conj().T)),
            "B": float(np.linalg.norm(self.B - self.U @ self.R @ self.V.conj().T)),
        }


@dataclass(frozen=True)
class ExactPerturbation:
    """Differences between aligned factorizations of the base and perturbed pair."""

    dU: np.ndarray
    dV: np.ndarray
    dT: np.ndarray
    dR: np.ndarray
    dW: np.ndarray
    dK: np.ndarray
    x: np.ndarray
    y: np.ndarray
    perturbed: GeneralizedSchur = field(repr=False)


@dataclass(frozen=True)
class EigenpairSet:
    """Homogeneous eigenvalues with unit left/right eigenvectors (columns)."""

    alpha: np.ndarray
    beta: np.ndarray
    xi: np.ndarray
    eta: np.ndarray

    @property
    def lambdas(self) -> np.ndarray:
        return _pair_ratio(self.alpha, self.beta)


# ------------------------------------------------------------------ helpers


def _pair_ratio(t, r) -> np.ndarray:
    t = np.asarray(t, dtype=complex)
    r = np.asarray(r, dtype=complex)
    scale = np.maximum(np.abs(t), np.abs(r))
    inf_mask = np.abs(r) <= 1e-14 * np.where(scale > 0, scale, 1.0)
    out = np.empty_like(t)
    out[inf_mask] = complex(np.inf, 0.0)
    out[~inf_mask] = t[~inf_mask] / r[~inf_mask]
    return out


def _homogeneous(lam) -> tuple[complex, complex]:
    lam = complex(lam)
    if np.isinf(lam.real) or np.isinf(lam.imag):
        return 1.0 + 0j, 0.0 + 0j
    return lam, 1.0 + 0j


def chordal_pair_distance(a, b, a2, b2) -> float:
    """Chordal distance between homogeneous pairs ``<a, b>`` and ``<a2, b2>``."""
    n1 = np.hypot(abs(a), abs(b))
    n2 = np.hypot(abs(a2), abs(b2))
    if n1 == 0 or n2 == 0:
        raise ZeroPair("chordal distance of the pair <0, 0> is undefined")
    return float(abs(a * b2 - b * a2) / (n1 * n2))


def _lambda_distance(l1, l2) -> float:
    return chordal_pair_distance(*_homogeneous(l1), *_homogeneous(l2))


def _check_regular(A: np.ndarray, B: np.ndarray) -> None:
    # The pencil is singular iff det(A - lam B) vanishes for every lam, so
    # five random shifts witnessing numerical singularity is enough to reject.
    rng = np.random.default_rng(_REGULARITY_SEED)
    shifts = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    nA = np.linalg.norm(A, 2)
    nB = np.linalg.norm(B, 2)
    for lam in shifts:
        s = np.linalg.svd(A - lam * B, compute_uv=False)
        scale = nA + abs(lam) * nB
        if scale > 0 and s[-1] > 1e-13 * scale:
            return
    raise IrregularPencil("det(A - lambda B) vanishes at every sampled lambda")


def _min_pairwise_chordal(t, r) -> float:
    n = len(t)
    best = np.inf
    for i in range(n):
        for j in range(i + 1, n):
            best = min(best, chordal_pair_distance(t[i], r[i], t[j], r[j]))
    return best


def _resolve_targets(order, lam: np.ndarray):
    """Turn an ordering spec into a list of target eigenvalues (or None)."""
    if isinstance(order, str):
        if order == AS_COMPUTED:
            return None
        if order == DESCENDING:
            # infinite eigenvalues first, then by decreasing real part
            key = [(-np.inf if np.isinf(l) else -l.real, -l.imag if np.isfinite(l) else 0.0) for l in lam]
            idx = sorted(range(len(lam)), key=lambda k: key[k])
            return lam[idx]
        raise ValueError(f"unknown ordering {order!r}")
    seq = list(order)
    if len(seq) != len(lam):
        raise OrderingUnmatchable(f"ordering has {len(seq)} entries for {len(lam)} eigenvalues")
    if all(isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in seq):
        if sorted(seq) != list(range(len(lam))):
            raise OrderingUnmatchable(f"{seq} is not a permutation of 0..{len(lam) - 1}")
        return lam[seq]
    return np.array([complex(v) for v in seq])


def _reorder(T, R, Q, Z, targets, match_tol):
    n = T.shape[0]
    for k, target in enumerate(targets):
        lam = _pair_ratio(np.diag(T), np.diag(R))
        dist = [_lambda_distance(lam[j], target) for j in range(k, n)]
        j = k + int(np.argmin(dist))
        if dist[j - k] > match_tol:
            raise OrderingUnmatchable(
                f"no eigenvalue within chordal distance {match_tol:g} of target {target}"
                f" (closest {lam[j]}, distance {dist[j - k]:.3e})"
            )
        if j != k:
            # ztgexc uses 1-based positions
            T, R, Q, Z, info = ztgexc(T, R, Q, Z, j + 1, k + 1)
            if info != 0:
                raise ConvergenceFailure(f"eigenvalue swap failed (ztgexc info={info})")
    return T, R, Q, Z


# --------------------------------------------------------------- operations


def generalized_schur(pair, B=None, order: Ordering = AS_COMPUTED, match_tol: float = 1e-6) -> GeneralizedSchur:
    """Ordered complex generalized Schur decomposition.

    Parameters
    ----------
    pair : MatrixPair or array_like
        The pair, or ``A`` when ``B`` is given separately.
    order : str or sequence
        ``"as-computed"``, ``"descending-real-lambda"``, a permutation of
        ``range(n)`` applied to the as-computed eigenvalues, or a list of
        target eigenvalues (``inf`` allowed) matched greedily slot by slot in
        the chordal metric.
    match_tol : float
        Largest chordal distance accepted between a target and the eigenvalue
        placed in its slot.

    Raises
    ------
    IrregularPencil, OrderingUnmatchable, ConvergenceFailure
    """
    pair = _as_pair(pair, B)
    A, B = pair.A, pair.B
    _check_regular(A, B)
    try:
        T, R, Q, Z = sla.qz(A, B, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceFailure(f"QZ iteration failed: {exc}") from exc
    targets = _resolve_targets(order, _pair_ratio(np.diag(T), np.diag(R)))
    if targets is not None:
        T, R, Q, Z = _reorder(T, R, Q, Z, targets, match_tol)
    T = np.triu(T)
    R = np.triu(R)
    d = np.diag(T), np.diag(R)
    clustered = pair.n > 1 and _min_pairwise_chordal(*d) <= CLUSTER_TOL
    if clustered:
        warnings.warn("eigenvalues are clustered; bounds assume distinct eigenvalues", RuntimeWarning, stacklevel=2)
    return GeneralizedSchur(U=Q, V=Z, T=T, R=R, A=A, B=B, clustered=clustered)


def align_factors(base: GeneralizedSchur, raw_perturbed: GeneralizedSchur) -> GeneralizedSchur:
    """Fix the column phases of a perturbed factorization against ``base``.

    Column ``j`` of ``U~`` is rotated so that ``u_j^H u~_j`` is real positive,
    and likewise for ``V~``.  ``T~`` and ``R~`` are recomputed from the
    perturbed pair so the factorization stays exact.

    Raises
    ------
    ZeroOverlap
        If some ``|u_j^H u~_j|`` (or ``|v_j^H v~_j|``) is below ``1e-3``.
    """
    if base.n != raw_perturbed.n:
        raise DimensionMismatch("factorizations have different sizes")
    for lb, lp in zip(base.lambdas, raw_perturbed.lambdas):
        if _lambda_distance(lb, lp) > PERTURBED_MATCH_TOL:
            raise OrderingUnmatchable(f"eigenvalue slots differ: {lb} vs {lp}")
    Ut, Vt = raw_perturbed.U, raw_perturbed.V
    ou = np.einsum("ij,ij->j", base.U.conj(), Ut)
    ov = np.einsum("ij,ij->j", base.V.conj(), Vt)
    worst = min(np.abs(ou).min(), np.abs(ov).min())
    if worst < OVERLAP_TOL:
        raise ZeroOverlap(f"column overlap {worst:.2e} too small to align phases")
    Ut = Ut * (np.conj(ou) / np.abs(ou))
    Vt = Vt * (np.conj(ov) / np.abs(ov))
    At, Bt = raw_perturbed.A, raw_perturbed.B
    Tt = Ut.conj().T @ At @ Vt
    Rt = Ut.conj().T @ Bt @ Vt
    return GeneralizedSchur(U=Ut, V=Vt, T=Tt, R=Rt, A=At, B=Bt, clustered=raw_perturbed.clustered)


def exact_perturbations(pair, dA, dB, order: Ordering = AS_COMPUTED, base: GeneralizedSchur | None = None) -> ExactPerturbation:
    """Refactorize ``(A + dA, B + dB)`` and return the aligned differences.

    ``base`` may be passed to reuse an existing factorization of ``pair``;
    the perturbed pair is then ordered to match its eigenvalue slots.
    """
    pair = _as_pair(pair) if not isinstance(pair, GeneralizedSchur) else MatrixPair(pair.A, pair.B)
    dA = as_complex_matrix(dA, "dA")
    dB = as_complex_matrix(dB, "dB")
    if dA.shape != pair.A.shape or dB.shape != pair.B.shape:
        raise DimensionMismatch("perturbations must match the pair's shape")
    if base is None:
        base = generalized_schur(pair, order=order)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        raw = generalized_schur(MatrixPair(pair.A + dA, pair.B + dB), order=list(base.lambdas), match_tol=PERTURBED_MATCH_TOL)
    pert = align_factors(base, raw)
    dU = pert.U - base.U
    dV = pert.V - base.V
    dW = base.U.conj().T @ dU
    dK = base.V.conj().T @ dV
    return ExactPerturbation(
        dU=dU, dV=dV, dT=pert.T - base.T, dR=pert.R - base.R,
        dW=dW, dK=dK, x=slvec(dW), y=slvec(dK), perturbed=pert,
    )


def generalized_eigenpairs(pair, B=None, schur: GeneralizedSchur | None = None, residual_tol: float = 1e-9) -> EigenpairSet:
    """Unit-norm right (``xi``) and left (``eta``) eigenvectors.

    When ``schur`` is given the eigenpairs follow its diagonal order.

    Raises
    ------
    DefectivePencil
        If a computed eigenvector fails the pencil residual test.
    """
    pair = _as_pair(pair, B)
    A, B = pair.A, pair.B
    _check_regular(A, B)
    w, vl, vr = sla.eig(A, B, left=True, right=True, homogeneous_eigvals=True)
    alpha, beta = w[0], w[1]
    if schur is not None:
        lam = _pair_ratio(alpha, beta)
        remaining = list(range(len(lam)))
        idx = []
        for target in schur.lambdas:
            k = min(remaining, key=lambda m: _lambda_distance(lam[m], target))
            remaining.remove(k)
            idx.append(k)
        alpha, beta, vl, vr = alpha[idx], beta[idx], vl[:, idx], vr[:, idx]
    xi = vr / np.linalg.norm(vr, axis=0)
    eta = vl / np.linalg.norm(vl, axis=0)
    nA = np.linalg.norm(A, 2)
    nB = np.linalg.norm(B, 2)
    for k in range(len(alpha)):
        s = np.hypot(abs(alpha[k]), abs(beta[k]))
        a, b = alpha[k] / s, beta[k] / s
        scale = abs(b) * nA + abs(a) * nB
        right = np.linalg.norm((b * A - a * B) @ xi[:, k])
        left = np.linalg.norm(eta[:, k].conj() @ (b * A - a * B))
        if max(right, left) > residual_tol * scale:
            raise DefectivePencil(f"eigenvector {k} residual {max(right, left):.2e} exceeds tolerance")
    return EigenpairSet(alpha=alpha, beta=beta, xi=xi, eta=eta)
