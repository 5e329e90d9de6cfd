import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gsp import linear_bounds as lb  # noqa: E402
from gsp import nonlinear_bounds as nlb  # noqa: E402
from gsp.gqz import MatrixPair, exact_perturbations, generalized_eigenpairs, generalized_schur  # noqa: E402
from gsp.problem import load_problem  # noqa: E402

ACCEPTANCE_LINES = []
_START = {}


@dataclass
class Case:
    problem: object
    pair: MatrixPair
    schur: object
    bundle: object
    exact: object
    eig: object
    state: object


def build_case(name: str) -> Case:
    pr = load_problem(name)
    pair = MatrixPair(pr.A, pr.B)
    S = generalized_schur(pair, order=pr.order)
    b = lb.linear_bundle(S, pr.dA, pr.dB)
    ex = exact_perturbations(pair, pr.dA, pr.dB, base=S)
    eig = generalized_eigenpairs(pair, schur=S)
    st = nlb.nonlinear_iterate(S, b.system, (b.x_bound, b.y_bound), q=30, tol=1e-12)
    return Case(pr, pair, S, b, ex, eig, st)


@pytest.fixture(scope="session")
def sun5():
    return build_case("sun5")


@pytest.fixture(scope="session")
def schur5():
    return build_case("schur5")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_pencil(rng, n):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return A, B


def unit_direction(rng, n):
    D = rng.standard_normal((2, n, n)) + 1j * rng.standard_normal((2, n, n))
    D /= np.linalg.norm(D)
    return D[0], D[1]


def pytest_sessionstart(session):
    _START["t"] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
        dt = time.perf_counter() - _START.get("t", time.perf_counter())
        tag = "PASS" if dt < 60 else "FAIL"
        terminalreporter.write_line(f"[{tag}]   9 full suite runtime {dt:.1f} s (limit 60 s)")
