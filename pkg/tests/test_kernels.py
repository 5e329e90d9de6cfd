"""The compiled and vectorized kernel variants must agree."""
import numpy as np
import pytest

from gsp import kernels
from gsp._accel import HAVE_NUMBA
from gsp.matrixkit import sl_table


def _data(n, seed=0):
    rng = np.random.default_rng(seed)
    T = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    R = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    W = 1e-3 * np.abs(rng.standard_normal((n, n)))
    K = 1e-3 * np.abs(rng.standard_normal((n, n)))
    return T, R, W, K


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_assembly_variants_agree(n):
    T, R, _, _ = _data(n)
    tab = sl_table(n)
    assert np.array_equal(kernels._assemble_L_loops(T, R, tab), kernels._assemble_L_numpy(T, R, tab))
    assert np.array_equal(kernels._assemble_E_loops(T, R, tab), kernels._assemble_E_numpy(T, R, tab))


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_second_order_variants_agree(n):
    T, R, W, K = _data(n, seed=n)
    args = (np.abs(T), np.abs(R), np.abs(T) + 1, np.abs(R) + 1, W, K)
    for fast, ref in [(kernels._second_order_xy_loops, kernels._second_order_xy_numpy),
                      (kernels._diag_second_order_loops, kernels._diag_second_order_numpy)]:
        for a, b in zip(fast(*args), ref(*args)):
            assert np.allclose(a, b, rtol=1e-13, atol=0)


@pytest.mark.parametrize("n", [2, 4, 7])
def test_propagation_variants_agree(n):
    _, _, W, K = _data(n, seed=3)
    W1 = W + W.T
    np.fill_diagonal(W1, 0)
    W2 = np.diag(np.diag(K))
    Wf, pf = kernels._propagate_columns_loops(W1, W2)
    Wr, pr = kernels._propagate_columns_numpy(W1, W2)
    assert np.allclose(Wf, Wr, rtol=1e-13, atol=1e-18)
    assert pf == pytest.approx(pr)


def test_propagation_reference_loop():
    # literal column recursion with a general solver
    _, _, W, K = _data(5, seed=9)
    W1 = W + W.T
    W2 = np.diag(np.diag(K))
    ref = np.zeros((5, 5))
    ref[:, 0] = W1[:, 0] + W2[:, 0]
    S = np.eye(5)
    for i in range(1, 5):
        S[i - 1] -= ref[:, i - 1]
        ref[:, i] = np.linalg.solve(S, W1[:, i] + W2[:, i])
    got, _ = kernels.propagate_columns(W1, W2)
    assert np.allclose(got, ref, rtol=1e-13)


def test_backend_name():
    assert kernels.BACKEND in ("numba", "numpy")
    if not HAVE_NUMBA:
        assert kernels.BACKEND == "numpy"
