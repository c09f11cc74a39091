import numpy as np
import pytest

from purity_witness import kernels

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

BACKENDS = ["python"]
try:
    from purity_witness import _ckernels  # noqa: F401
    BACKENDS.append("cython")
except ImportError:  # pragma: no cover
    pass

ACCEPTANCE_LINES = []


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def ket(*amps):
    v = np.array(amps, dtype=complex)
    return v / np.linalg.norm(v)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    terminalreporter.write_line(f"kernel backend: {kernels.BACKEND}")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
