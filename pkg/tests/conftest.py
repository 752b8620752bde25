import numpy as np
import pytest

from choi_gauge.bases import CANONICAL, SETTINGS, meas_operator, prep_state
from choi_gauge.tomography import FrequencyTable

# criterion id -> (passed, detail); filled by the acceptance tests
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}: {detail}")


def linear_frequencies(apply):
    """Exact frequency table of a linear map probed with ideal states and projectors."""
    ones = np.empty((4, 3))
    for k, p in enumerate(CANONICAL):
        out = apply(prep_state(p))
        for i, s in enumerate(SETTINGS):
            ones[k, i] = np.real(np.trace(meas_operator((s, 1)) @ out))
    return FrequencyTable(ones)


def random_channel(rng):
    """Random CPTP qubit channel from a random system-environment unitary."""
    u = random_unitary(rng, 4)
    env = np.diag([1.0, 0.0])

    def apply(rho):
        joint = u @ np.kron(rho, env) @ u.conj().T
        return np.einsum("ajbj->ab", joint.reshape(2, 2, 2, 2))

    return apply


def random_linear_map(rng):
    """Trace-preserving, Hermiticity-preserving map that is usually not CP.

    An affine combination (1 + a) E1 - a E2 of two random channels.
    """
    e1, e2 = random_channel(rng), random_channel(rng)
    a = rng.uniform(0.0, 1.0)
    return lambda rho: (1 + a) * e1(rho) - a * e2(rho)


def random_unitary(rng, n=2):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, n):
    a = rng.uniform(-1, 1, size=(n, n)) + 1j * rng.uniform(-1, 1, size=(n, n))
    return 0.5 * (a + a.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


CORRELATED_CHOI = 0.5 * np.array(
    [
        [1, 1, -1j, -1 - 1j],
        [1, 1, -1 - 1j, 1j],
        [1j, -1 + 1j, 1, 1],
        [-1 + 1j, -1j, 1, 1],
    ]
)
