import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qrip.quaternion import adjoint

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def quaternion_arrays(shape):
    return arrays(np.float64, tuple(shape) + (4,), elements=finite)


@pytest.fixture
def np_rng():
    return np.random.default_rng(12345)


def random_quaternion_matrix(rng, m, n):
    return rng.standard_normal((m, n, 4))


def random_hermitian(rng, n):
    A = rng.standard_normal((n, n, 4))
    return 0.5 * (A + adjoint(A))


# acceptance criteria register their verdicts here; printed at the end of the run
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
