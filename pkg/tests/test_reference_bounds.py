import numpy as np
import pytest

from golden import SUN5_C, SUN5_COND1, SUN5_COND2, SUN5_COND4, SUN5_S, SUN5_SLOT, rel_err
from gsp import reference_bounds as rb
from gsp.errors import BadDimension, DegenerateProjection, SingularH, ZeroEigenvalue, ZeroPair


def test_chordal_metric_basics(rng):
    assert rb.chordal_metric(2 + 1j, 3, 2 + 1j, 3) == 0
    assert rb.chordal_metric(1, 0, 0, 1) == pytest.approx(1.0)
    for _ in range(20):
        a, b, a2, b2 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        c = complex(*rng.standard_normal(2))
        d = rb.chordal_metric(a, b, a2, b2)
        assert abs(d - rb.chordal_metric(a2, b2, a, b)) <= 1e-14
        assert abs(d - rb.chordal_metric(c * a, c * b, a2, b2)) <= 1e-14
        assert 0 <= d <= 1


def test_stewart_sun_bound():
    z = np.zeros((2, 2))
    e = np.array([1.0, 0.0])
    assert rb.stewart_sun_bound((1.0, 1.0), e, e, z, z) == 0
    with pytest.raises(ZeroPair):
        rb.stewart_sun_bound((0, 0), e, e, np.eye(2), z)


def test_hcat_norm_differs_from_stack(rng):
    dA = rng.standard_normal((3, 3))
    dB = rng.standard_normal((3, 3))
    h = rb.spectral_norm_hcat(dA, dB)
    assert h == pytest.approx(np.linalg.norm(np.hstack([dA, dB]), 2))
    assert h != pytest.approx(np.linalg.norm(np.vstack([dA, dB]), 2))


def test_condition_numbers_trivial():
    e = np.array([1.0, 0.0])
    B = np.eye(2)
    assert rb.stewart_sun_condition(1.0, e, e, B) == pytest.approx(np.sqrt(2))
    z = np.zeros((2, 2))
    assert rb.higham_normwise(2.0, e, e, B, z, z) == 0
    assert rb.higham_componentwise(2.0, e, e, B, z, z) == 0
    E, F = np.ones((2, 2)), 2 * np.eye(2)
    base = rb.higham_normwise(2.0, e, e, B, E, F)
    assert rb.higham_normwise(2.0, e, e, B, 3 * E, 3 * F) == pytest.approx(3 * base)
    with pytest.raises(ZeroEigenvalue):
        rb.stewart_sun_condition(0.0, e, e, B)
    with pytest.raises(ZeroEigenvalue):
        rb.higham_normwise(np.inf, e, e, B, E, F)
    with pytest.raises(DegenerateProjection):
        rb.stewart_sun_condition(1.0, e, np.array([0.0, 1.0]), B)


def test_sun5_conditions(sun5):
    S, ep, pr = sun5.schur, sun5.eig, sun5.problem
    lam = S.lambdas
    c2 = np.array([rb.stewart_sun_condition(lam[i], ep.xi[:, i], ep.eta[:, i], S.B) for i in range(5)])
    c4 = np.array([rb.higham_componentwise(lam[i], ep.xi[:, i], ep.eta[:, i], S.B, pr.E, pr.F) for i in range(5)])
    assert rel_err(c2[SUN5_SLOT], SUN5_COND2) <= 1e-6
    assert rel_err(c4[SUN5_SLOT], SUN5_COND4) <= 1e-6


def test_sun_quantities(sun5):
    S = sun5.schur
    s = [rb.sun_subspace_quantities(S.T, S.R, p)[0] for p in range(1, 5)]
    assert rel_err(s, SUN5_S) <= 1e-6
    for p in range(1, 5):
        sp, dif = rb.sun_subspace_quantities(S.T, S.R, p)
        assert sp <= dif * (1 + 1e-12)
    # cond(Theta) and s coincide for p = 1 on this instance
    assert sun5.bundle.subspace[1].cond_theta == pytest.approx(s[0], rel=1e-6)
    with pytest.raises(BadDimension):
        rb.sun_operator(S.T, S.R, 0)
    with pytest.raises(ValueError):
        rb.sun_operator(S.T, S.R, 1, convention="other")


def test_sun_operator_is_the_map(rng):
    n, p = 5, 2
    T = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    R = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    P = rng.standard_normal((n - p, p)) + 1j * rng.standard_normal((n - p, p))
    Q = rng.standard_normal((n - p, p)) + 1j * rng.standard_normal((n - p, p))
    H = rb.sun_operator(T, R, p)
    got = H @ np.concatenate([P.ravel("F"), Q.ravel("F")])
    T11, T22, R11, R22 = T[:p, :p], T[p:, p:], R[:p, :p], R[p:, p:]
    want = np.concatenate([(Q @ T11 - T22 @ P).ravel("F"), (Q @ R11 - R22 @ P).ravel("F")])
    assert np.allclose(got, want, atol=1e-12)


def test_singular_H():
    T = np.diag([1.0, 2.0, 1.0]).astype(complex)
    with pytest.raises(SingularH):
        rb.sun_subspace_quantities(T, np.eye(3), 1)


def test_comparison_report(sun5):
    pr = sun5.problem
    cr = rb.comparison_report(sun5.schur, sun5.eig, sun5.bundle, pr.dA, pr.dB, E=pr.E, F=pr.F, exact=sun5.exact)
    assert rel_err(cr.cond1[SUN5_SLOT], SUN5_COND1) <= 1e-6
    assert rel_err(cr.C[SUN5_SLOT], SUN5_C) <= 1e-2
    assert np.all(cr.C <= cr.C1) and np.all(cr.C <= cr.C2)
    # regression facts for this instance
    assert np.all(cr.cond1 < cr.cond3) and np.all(cr.cond1 < cr.cond4)
    assert not cr.status
    no_exact = rb.comparison_report(sun5.schur, sun5.eig, sun5.bundle, pr.dA, pr.dB)
    assert np.all(np.isnan(no_exact.C))
