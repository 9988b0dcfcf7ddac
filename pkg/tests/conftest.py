import numpy as np
import pytest

from qsdcocycle import models
from qsdcocycle.generator import GeneratorMatrix, NoiseBasis

# Lines recorded by the acceptance module, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def cplx(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng, n):
    Q, R = np.linalg.qr(cplx(rng, n, n))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_isometric_generator(rng, m, d, scale=1.0):
    """Bounded ``[[iH - L*L/2, -L* S], [L, S - I]]`` with ``S`` unitary on ``h (x) C^d``.

    Satisfies the isometry equality exactly in exact arithmetic.
    """
    H = cplx(rng, m, m)
    H = 0.5 * scale * (H + H.conj().T)
    L = scale * cplx(rng, d * m, m) / np.sqrt(m)
    S = random_unitary(rng, d * m)
    F00 = 1j * H - 0.5 * L.conj().T @ L
    top = np.hstack([F00, -L.conj().T @ S])
    bottom = np.hstack([L, S - np.eye(d * m)])
    return GeneratorMatrix(m, NoiseBasis(d), np.vstack([top, bottom]))


def random_contractive_generator(rng, m, d, scale=1.0):
    """An isometric generator pushed strictly inside the form inequality."""
    F = random_isometric_generator(rng, m, d, scale)
    P = cplx(rng, m, m)
    M = F.matrix.copy()
    M[:m, :m] -= P @ P.conj().T / m + 0.1 * np.eye(m)
    return F.with_matrix(M)


def drift_only(F00, d):
    m = F00.shape[0]
    M = np.zeros((m * (d + 1), m * (d + 1)), dtype=complex)
    M[:m, :m] = F00
    return GeneratorMatrix(m, NoiseBasis(d), M)


@pytest.fixture(scope="session")
def zoo():
    """The four example models at their documented default sizes."""
    return {
        "cayley": models.cayley_shift(16),
        "iho": models.iho(12, "sqrt", "zero"),
        "bd": models.birth_death(21, "const:1", "zero"),
        "shg": models.shg(8, 8, 1.0, 0.5),
    }


@pytest.fixture(scope="session")
def small_zoo():
    """Smaller instances for tests that need superoperators or Choi matrices."""
    return {
        "cayley": models.cayley_shift(8),
        "iho": models.iho(8, "sqrt", "zero"),
        "bd": models.birth_death(9, "const:1", "const:0.5"),
        "shg": models.shg(4, 4, 1.0, 0.5),
    }
