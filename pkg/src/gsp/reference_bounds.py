"""Classical comparison quantities for generalized eigenvalues and deflating subspaces.

These are the normwise and componentwise results the componentwise bounds of
:mod:`gsp.linear_bounds` are measured against: the chordal metric, the
Stewart-Sun eigenvalue bound and condition number, Higham's normwise and
componentwise condition numbers, and Sun's ``s`` and ``dif^{-1}`` for the
leading ``p``-dimensional deflating subspace.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadDimension, DegenerateProjection, SingularH, ZeroEigenvalue, ZeroPair
from .gqz import EigenpairSet, ExactPerturbation, GeneralizedSchur, chordal_pair_distance
from .linear_bounds import BoundsBundle

SINGULAR_H_TOL = 1e-13


def chordal_metric(a, b, a2, b2) -> float:
    """Chordal distance between ``<a, b>`` and ``<a2, b2>``; lies in ``[0, 1]``."""
    return chordal_pair_distance(a, b, a2, b2)


def spectral_norm_hcat(dA, dB) -> float:
    """``||[dA, dB]||_2`` of the ``n x 2n`` horizontal concatenation."""
    return float(np.linalg.svd(np.hstack([dA, dB]), compute_uv=False)[0])


def stewart_sun_bound(eigpair, xi, eta, dA, dB) -> float:
    """``||xi|| ||eta|| ||[dA, dB]||_2 / sqrt(|alpha|^2 + |beta|^2)``."""
    a, b = eigpair
    s = np.hypot(abs(a), abs(b))
    if s == 0:
        raise ZeroPair("eigenvalue pair <0, 0>")
    return float(np.linalg.norm(xi) * np.linalg.norm(eta) * spectral_norm_hcat(dA, dB) / s)


def _projection(lam, xi, eta, B) -> float:
    if lam == 0 or not np.isfinite(lam):
        raise ZeroEigenvalue(f"relative condition undefined for lambda = {lam}")
    proj = abs(np.vdot(eta, B @ xi))
    if proj <= 1e-13 * np.linalg.norm(B, 2):
        raise DegenerateProjection(f"|eta^H B xi| = {proj:.2e} is negligible")
    return proj


def stewart_sun_condition(lam, xi, eta, B) -> float:
    """``sqrt(1 + |lam|^2) / |lam| * ||xi|| ||eta|| / |eta^H B xi|``."""
    proj = _projection(lam, xi, eta, B)
    return float(np.sqrt(1 + abs(lam) ** 2) / abs(lam) * np.linalg.norm(xi) * np.linalg.norm(eta) / proj)


def higham_normwise(lam, xi, eta, B, E, F) -> float:
    """``||eta|| ||xi|| (||E||_2 + |lam| ||F||_2) / (|lam| |eta^H B xi|)``."""
    proj = _projection(lam, xi, eta, B)
    nE = np.linalg.norm(E, 2)
    nF = np.linalg.norm(F, 2)
    return float(np.linalg.norm(eta) * np.linalg.norm(xi) * (nE + abs(lam) * nF) / (abs(lam) * proj))


def higham_componentwise(lam, xi, eta, B, E, F) -> float:
    """``(|eta|^T E |xi| + |lam| |eta|^T F |xi|) / (|lam| |eta^H B xi|)``."""
    proj = _projection(lam, xi, eta, B)
    ae, ax = np.abs(eta), np.abs(xi)
    num = ae @ np.abs(E) @ ax + abs(lam) * (ae @ np.abs(F) @ ax)
    return float(num / (abs(lam) * proj))


def sun_operator(T, R, p: int, convention: str = "transpose") -> np.ndarray:
    """Matrix of ``(P, Q) -> (T22 P - Q T11, R22 P - Q R11)`` acting on ``[vec P; vec Q]``.

    With ``convention="transpose"`` the ``Q`` blocks are ``T11^T kron I`` and
    ``R11^T kron I`` (the vectorization of ``Q T11``).  ``"literal"`` uses
    ``T11 kron I`` instead; it is kept only to reproduce published numbers
    and does not represent the operator for nonsymmetric ``T11``.
    """
    n = T.shape[0]
    if not (1 <= p <= n - 1):
        raise BadDimension(f"p must lie in 1..{n - 1}, got {p}")
    T11, T22 = T[:p, :p], T[p:, p:]
    R11, R22 = R[:p, :p], R[p:, p:]
    if convention == "transpose":
        T11, R11 = T11.T, R11.T
    elif convention != "literal":
        raise ValueError(f"unknown convention {convention!r}")
    Ip = np.eye(p)
    Iq = np.eye(n - p)
    return np.block([
        [-np.kron(Ip, T22), np.kron(T11, Iq)],
        [-np.kron(Ip, R22), np.kron(R11, Iq)],
    ])


def sun_subspace_quantities(T, R, p: int, convention: str = "transpose") -> tuple[float, float]:
    """Sun's ``s`` and ``dif^{-1} = 1 / sigma_min(H)``.

    Raises
    ------
    SingularH
        The leading and trailing blocks share an eigenvalue.
    """
    H = sun_operator(np.asarray(T), np.asarray(R), p, convention)
    sv = np.linalg.svd(H, compute_uv=False)
    if sv[-1] <= SINGULAR_H_TOL * sv[0]:
        raise SingularH(f"H is singular for p={p}: blocks share an eigenvalue")
    Hi = np.linalg.inv(H)
    m = p * (T.shape[0] - p)
    s = float(np.linalg.svd(Hi[:m], compute_uv=False)[0])
    return s, float(1.0 / sv[-1])


@dataclass
class ComparisonReport:
    """Per-eigenvalue and per-subspace comparison table.

    ``C`` is the exact chordal distance (needs exact perturbations), ``C1``
    the Stewart-Sun bound, ``C2`` the componentwise bound, ``cond1`` the
    componentwise condition number and ``cond2..cond4`` the references.
    Undefined entries are NaN with a matching note in ``status``.
    """

    lambdas: np.ndarray
    C: np.ndarray
    C1: np.ndarray
    C2: np.ndarray
    cond1: np.ndarray
    cond2: np.ndarray
    cond3: np.ndarray
    cond4: np.ndarray
    cond_theta: dict
    s: dict
    dif_inv: dict
    status: dict = field(default_factory=dict)


def comparison_report(schur: GeneralizedSchur, pairs: EigenpairSet, bundle: BoundsBundle, dA, dB,
                      E=None, F=None, exact: ExactPerturbation | None = None, ps=None) -> ComparisonReport:
    """Assemble the comparison quantities.

    The weights ``E`` and ``F`` of the Higham condition numbers default to
    ``|dA|`` and ``|dB|``.
    """
    n = schur.n
    E = np.abs(dA) if E is None else np.asarray(E)
    F = np.abs(dB) if F is None else np.asarray(F)
    tt, rr = np.diag(schur.T), np.diag(schur.R)
    lam = schur.lambdas
    status = {}
    nan = lambda: np.full(n, np.nan)  # noqa: E731
    C, C1, c2, c3, c4 = nan(), nan(), nan(), nan(), nan()
    for i in range(n):
        xi, eta = pairs.xi[:, i], pairs.eta[:, i]
        C1[i] = stewart_sun_bound((tt[i], rr[i]), xi, eta, dA, dB)
        if exact is not None:
            C[i] = chordal_metric(tt[i], rr[i], exact.perturbed.T[i, i], exact.perturbed.R[i, i])
        try:
            c2[i] = stewart_sun_condition(lam[i], xi, eta, schur.B)
            c3[i] = higham_normwise(lam[i], xi, eta, schur.B, E, F)
            c4[i] = higham_componentwise(lam[i], xi, eta, schur.B, E, F)
        except (ZeroEigenvalue, DegenerateProjection) as exc:
            status[f"cond[{i}]"] = str(exc)
    for i, st in enumerate(bundle.eig_chordal_status):
        if st != "ok":
            status[f"C2[{i}]"] = st
    ps = range(1, n) if ps is None else ps
    s, dif = {}, {}
    for p in ps:
        try:
            s[p], dif[p] = sun_subspace_quantities(schur.T, schur.R, p)
        except SingularH as exc:
            s[p] = dif[p] = np.nan
            status[f"sun[{p}]"] = str(exc)
    return ComparisonReport(
        lambdas=lam, C=C, C1=C1, C2=bundle.eig_chordal_bounds.copy(), cond1=bundle.eig_conditions.copy(),
        cond2=c2, cond3=c3, cond4=c4,
        cond_theta={p: bundle.subspace[p].cond_theta for p in ps if p in bundle.subspace},
        s=s, dif_inv=dif, status=status,
    )
