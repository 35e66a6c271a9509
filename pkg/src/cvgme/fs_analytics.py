"""Closed-form results for the fully symmetric (FS) non-Gaussian family.

The FS state is the equal mixture of a two-mode squeezed vacuum on each pair
of modes with the Fock state ``|n>`` on the remaining mode.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DomainError, NumericalError, UsageError
from .fock import fs_state_density, tensor
from .symplectic import ModeBipartition
from .witnesses import CriterionValue, gabriel_criterion

GABRIEL_TOL = 1e-15
CROSS_CHECK_TOL = 1e-10

# each TMSV placement: (paired modes, mode carrying |n>)
_PLACEMENTS = (((0, 1), 2), ((0, 2), 1), ((1, 2), 0))


def _check_lambda(lam: float) -> float:
    if not (0.0 <= lam < 1.0):
        raise DomainError(f"lambda must lie in [0, 1), got {lam}")
    return float(lam)


def fs_matrix_element(n: int, lam: float, bra: Sequence[int], ket: Sequence[int]) -> float:
    """Exact (untruncated) ``<bra|rho_FS|ket>``."""
    lam = _check_lambda(lam)
    bra, ket = tuple(bra), tuple(ket)
    if len(bra) != 3 or len(ket) != 3 or min(bra + ket) < 0:
        raise UsageError(f"need two triples of nonnegative levels, got {bra}, {ket}")
    total = 0.0
    for (i, j), single in _PLACEMENTS:
        if bra[single] == ket[single] == n and bra[i] == bra[j] and ket[i] == ket[j]:
            total += (1 - lam**2) * lam ** (bra[i] + ket[i])
    return total / 3.0


def pt_block_eigenvalues(lam: float, m: int) -> tuple[float, float]:
    """Nonzero eigenvalues ``mu_m^(+/-)`` of the ``{|00m>, |0m0>, |m00>}`` block of the
    partial transpose (on mode A) of the ``n = 0`` FS state."""
    lam = _check_lambda(lam)
    if m < 1:
        raise UsageError("block index m must be at least 1")
    mu = np.sqrt(2) / 3 * (1 - lam**2) * lam**m
    return float(mu), float(-mu)


def mu_minus_eigenvector(m: int, cutoff: int) -> np.ndarray:
    """``(|00m> + |0m0> - sqrt2 |m00>) / 2`` in the truncated three-mode basis."""
    if not (1 <= m < cutoff):
        raise UsageError(f"need 1 <= m < cutoff, got m={m}, cutoff={cutoff}")
    vec = np.zeros(cutoff**3)
    idx = lambda t: np.ravel_multi_index(t, (cutoff,) * 3)  # noqa: E731
    vec[idx((0, 0, m))] = 0.5
    vec[idx((0, m, 0))] = 0.5
    vec[idx((m, 0, 0))] = -np.sqrt(2) / 2
    return vec


def two_qubit_reduction_vector(lam: float, k: int, kp: int) -> np.ndarray:
    """Normalized ``lam^k |kk> + lam^k' |k'k'>`` in the ``{k, k'}^2`` qubit basis."""
    lam = _check_lambda(lam)
    psi = np.zeros(4)
    psi[0], psi[3] = lam**k, lam**kp
    return psi / np.linalg.norm(psi)


def two_copy_test_vector(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Product test vector for two FS copies, modes ordered ``(A1, B1, C1, A2, B2, C2)``."""
    return (n, 0, 0, 0, n, 0), (n, 1, 1, 1, n, 1)


def two_copy_bipartitions() -> list[ModeBipartition]:
    """Party-level bipartitions of two copies where party X holds modes ``X1`` and ``X2``."""
    return [ModeBipartition.from_group(g, 6) for g in ((0, 3), (1, 4), (2, 5))]


def gabriel_two_copy_closed_form(lam: float) -> float:
    lam = _check_lambda(lam)
    return (1 - lam**2) ** 2 * lam**2 / 9.0


def gabriel_two_copy_fs(n: int, lam: float, cutoff: int = 8, cross_check: bool = True) -> CriterionValue:
    """Gabriel ``k = 2`` criterion on two FS copies with the product vector of :func:`two_copy_test_vector`.

    The left side is ``(1 - lam^2)^2 lam^2 / 9`` and the right side vanishes
    identically. With ``cross_check`` both sides are recomputed by the generic
    evaluator on the truncated two-copy matrix and must agree to ``1e-10``.
    """
    lhs = gabriel_two_copy_closed_form(lam)
    rhs = 0.0
    if cross_check:
        if cutoff <= max(n, 1):
            raise UsageError(f"cutoff {cutoff} too small for n={n}")
        one = fs_state_density(n, lam, cutoff)
        two = tensor(one, one)
        g_lhs, g_rhs = gabriel_criterion(two.element, two_copy_test_vector(n), two_copy_bipartitions())
        if abs(g_lhs - lhs) > CROSS_CHECK_TOL or abs(g_rhs - rhs) > CROSS_CHECK_TOL:
            raise NumericalError(
                f"generic evaluator disagrees with closed form: ({g_lhs}, {g_rhs}) vs ({lhs}, {rhs})"
            )
    return CriterionValue(lhs, rhs, bool(lhs > rhs + GABRIEL_TOL))
