import numpy as np
import scipy.linalg
from hypothesis import settings

from cvgme.symplectic import symplectic_form

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def random_symplectic(n_modes, rng, scale=0.5):
    """exp(Omega H) with H symmetric is symplectic."""
    h = rng.normal(size=(2 * n_modes, 2 * n_modes)) * scale
    return scipy.linalg.expm(symplectic_form(n_modes) @ (h + h.T) / 2)


def random_physical_cm(n_modes, rng, max_thermal=2.0):
    s = random_symplectic(n_modes, rng)
    nu = 1.0 + rng.uniform(0, max_thermal, n_modes)
    gamma = s @ np.diag(np.repeat(nu, 2)) @ s.T
    return (gamma + gamma.T) / 2, np.sort(nu)


def sqrt_route_symplectic_eigenvalues(gamma):
    """Independent route: the spectrum of gamma^1/2 Omega gamma^1/2 is +-i nu."""
    root = scipy.linalg.sqrtm(gamma).real
    n = gamma.shape[0] // 2
    ev = np.linalg.eigvals(root @ symplectic_form(n) @ root)
    return np.sort(np.abs(ev.imag))[::2]


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
