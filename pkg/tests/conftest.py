import numpy as np
import pytest


def haar_unitary(dim, rng):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q @ np.diag(np.diag(r) / np.abs(np.diag(r)))


def random_density_matrix(dim, rng, rank=None):
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def max_dev_up_to_phase(ref, other):
    """Max elementwise deviation after stripping a global phase.

    The stripping index is chosen on the reference matrix so that the
    magnitude tie between e.g. u00 and u11 of a 2x2 unitary cannot pick
    different entries for the two operands.
    """
    idx = np.unravel_index(np.argmax(np.abs(ref)), ref.shape)
    a = ref * np.exp(-1j * np.angle(ref[idx]))
    b = other * np.exp(-1j * np.angle(other[idx]))
    return float(np.max(np.abs(a - b)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260811)


# -- acceptance summary --------------------------------------------------------

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if name.startswith("test_criterion_"):
        _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        outcome = _ACCEPTANCE[name]
        label = name.removeprefix("test_criterion_")
        terminalreporter.write_line(f"[{'PASS' if outcome == 'passed' else 'FAIL'}] {label}")
