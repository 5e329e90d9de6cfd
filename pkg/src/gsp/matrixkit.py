"""Dense complex kernels and the strictly-lower vectorization operators.

Index conventions
-----------------
The public index helpers :func:`sl_index` and :func:`sl_pair` speak the
1-based language used when writing the formulas down (``1 <= j < i <= n``,
``l`` in ``1..nu``).  Everything else in the package is 0-based; the single
shim between the two worlds is :func:`sl_index0` / :func:`sl_pairs`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, InputError, SingularMatrix

DEFAULT_SINGULAR_TOL = 1e-13


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a finite 2-D ``complex128`` array (a copy)."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{name} has non-finite entries")
    return m


def matrices_close(a, b, tol: float = 1e-12) -> bool:
    """Elementwise equality within absolute tolerance ``tol``."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= tol))


def _require_square(a: np.ndarray, name: str = "matrix") -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a.shape[0]


# ---------------------------------------------------------------- index maps


def nu_of(n: int) -> int:
    """Number of strictly-lower entries of an ``n x n`` matrix."""
    return n * (n - 1) // 2


def sl_index(i: int, j: int, n: int) -> int:
    """1-based linear index ``l = i + (j-1) n - j (j+1) / 2`` of entry ``(i, j)``.

    Valid for ``1 <= j < i <= n``; the entries are counted column by column.
    """
    if not (1 <= j < i <= n):
        raise InputError(f"(i={i}, j={j}) is not a strictly-lower position of a {n}x{n} matrix")
    return i + (j - 1) * n - j * (j + 1) // 2


def sl_pair(l: int, n: int) -> tuple[int, int]:
    """Inverse of :func:`sl_index` (1-based)."""
    if not (1 <= l <= nu_of(n)):
        raise InputError(f"l={l} out of range 1..{nu_of(n)}")
    i, j = sl_pairs(n)[l - 1]
    return int(i) + 1, int(j) + 1


def sl_index0(i: int, j: int, n: int) -> int:
    """0-based counterpart of :func:`sl_index` (``0 <= j < i < n``)."""
    return sl_index(i + 1, j + 1, n) - 1


@lru_cache(maxsize=64)
def _sl_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    pairs = np.array([(i, j) for j in range(n) for i in range(j + 1, n)], dtype=np.int64).reshape(-1, 2)
    table = np.full((n, n), -1, dtype=np.int64)
    if len(pairs):
        table[pairs[:, 0], pairs[:, 1]] = np.arange(len(pairs))
    pairs.setflags(write=False)
    table.setflags(write=False)
    return pairs, table


def sl_pairs(n: int) -> np.ndarray:
    """``(nu, 2)`` array of 0-based ``(i, j)`` pairs in slvec order."""
    return _sl_tables(n)[0]


def sl_table(n: int) -> np.ndarray:
    """``n x n`` integer table: 0-based slvec index of ``(i, j)``, or -1 off the strict lower part."""
    return _sl_tables(n)[1]


@dataclass(frozen=True)
class SlvecSpace:
    """Bookkeeping for the strictly-lower index space of dimension ``n``."""

    n: int

    @property
    def nu(self) -> int:
        return nu_of(self.n)

    def forward(self, i: int, j: int) -> int:
        return sl_index(i, j, self.n)

    def inverse(self, l: int) -> tuple[int, int]:
        return sl_pair(l, self.n)


# ------------------------------------------------------- vectorization ops


def vec(a) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(a).reshape(-1, order="F")


def unvec(v, n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return np.asarray(v).reshape((n, m), order="F")


def slvec(a) -> np.ndarray:
    """Stack the strictly-lower part of a square matrix column by column."""
    a = np.asarray(a)
    n = _require_square(a)
    p = sl_pairs(n)
    return a[p[:, 0], p[:, 1]].copy()


def unslvec(v, n: int) -> np.ndarray:
    """Place a length-``nu`` vector on the strict lower part of a zero matrix."""
    v = np.asarray(v)
    if v.shape != (nu_of(n),):
        raise DimensionMismatch(f"expected length {nu_of(n)}, got {v.shape}")
    out = np.zeros((n, n), dtype=v.dtype)
    p = sl_pairs(n)
    out[p[:, 0], p[:, 1]] = v
    return out


def m_slvec(n: int) -> np.ndarray:
    """Explicit ``nu x n^2`` 0/1 selection matrix with ``slvec(A) = M vec(A)``."""
    if n < 2:
        raise InputError("m_slvec needs n >= 2")
    blocks = [np.hstack([np.zeros((n - i, i)), np.eye(n - i)]) for i in range(1, n)]
    return np.hstack([sla.block_diag(*blocks), np.zeros((nu_of(n), n))])


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def vec_permutation(n: int) -> np.ndarray:
    """The ``n^2 x n^2`` permutation ``P`` with ``vec(A^T) = P vec(A)``."""
    if n < 1:
        raise InputError("vec_permutation needs n >= 1")
    idx = np.arange(n * n).reshape((n, n), order="F")
    P = np.zeros((n * n, n * n))
    P[np.arange(n * n), vec(idx.T)] = 1.0
    return P


def triu_abs(a) -> np.ndarray:
    """``triu(|A|)``."""
    a = np.asarray(a)
    _require_square(a)
    return np.triu(np.abs(a))


# ------------------------------------------------------------ dense kernels


def spectral_norm(a) -> float:
    """Largest singular value, from a full SVD."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def _check_conditioning(a: np.ndarray, tol: float) -> None:
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0 or s[-1] / s[0] < tol:
        ratio = 0.0 if s[0] == 0.0 else s[-1] / s[0]
        raise SingularMatrix(f"sigma_min/sigma_max = {ratio:.3e} below {tol:.1e}")


def solve(a, b, tol: float = DEFAULT_SINGULAR_TOL) -> np.ndarray:
    a = np.asarray(a)
    _require_square(a)
    _check_conditioning(a, tol)
    return np.linalg.solve(a, b)


def invert(a, tol: float = DEFAULT_SINGULAR_TOL) -> np.ndarray:
    a = np.asarray(a)
    _require_square(a)
    _check_conditioning(a, tol)
    return np.linalg.inv(a)


def qr(a) -> tuple[np.ndarray, np.ndarray]:
    """Full QR factorization ``A = QR`` (LAPACK Householder)."""
    q, r = np.linalg.qr(np.asarray(a), mode="complete")
    return q, r
