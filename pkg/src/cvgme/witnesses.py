"""Entanglement criteria evaluated from density-matrix elements."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import UsageError
from .fock import FockDensityMatrix, min_eigenvalue, partial_transpose
from .gaussian_fock import qubit_subspace_element
from .symplectic import ModeBipartition

WITNESS_TOL = 1e-12

ElementOracle = Callable[[Sequence[int], Sequence[int]], complex]


class CriterionValue(NamedTuple):
    lhs: float
    rhs: float
    violated: bool


def _swap(target: Sequence[int], source: Sequence[int], modes: Sequence[int]) -> tuple[int, ...]:
    out = list(target)
    for k in modes:
        out[k] = source[k]
    return tuple(out)


def gabriel_criterion(element: ElementOracle, phi, bipartitions: Sequence[ModeBipartition]) -> tuple[float, float]:
    """Both sides of the ``k = 2`` separability inequality for a product test vector.

    ``phi = (phi_1, phi_2)`` gives the Fock levels of the two copies, one entry
    per mode of the state. For product ``phi`` the total-swap term collapses to
    ``|<phi_1|rho|phi_2>|`` and each bipartition contributes the fourth root of
    the product of the four diagonal elements reached by the partial swaps.
    Biseparable states satisfy ``lhs <= rhs``.
    """
    if not bipartitions:
        raise UsageError("need at least one bipartition")
    try:
        phi1, phi2 = (tuple(int(n) for n in part) for part in phi)
    except (TypeError, ValueError) as exc:
        raise UsageError("phi must be a pair of Fock-level tuples (a product vector)") from exc
    if len(phi1) != len(phi2) or min(phi1 + phi2) < 0:
        raise UsageError("phi must be a pair of equal-length tuples of nonnegative levels")
    n_modes = len(phi1)
    lhs = abs(element(phi1, phi2))
    rhs = 0.0
    for bip in bipartitions:
        if bip.n_modes != n_modes:
            raise UsageError(f"bipartition {bip} does not match {n_modes} modes")
        prod = 1.0
        for group in (bip.group_a, bip.group_b):
            psi1, psi2 = _swap(phi1, phi2, group), _swap(phi2, phi1, group)
            prod *= abs(element(psi1, psi1)) * abs(element(psi2, psi2))
        rhs += prod ** 0.25
    return float(lhs), float(rhs)


@dataclass(frozen=True)
class WitnessElements:
    """The ten matrix elements entering the tripartite biseparability witness."""

    c011: complex
    c101: complex
    c110: complex
    d000: float
    d011: float
    d101: float
    d110: float
    d001: float
    d010: float
    d100: float

    @classmethod
    def from_oracle(cls, element: ElementOracle) -> "WitnessElements":
        z = (0, 0, 0)
        diag = lambda t: float(np.real(element(t, t)))  # noqa: E731
        return cls(
            complex(element(z, (0, 1, 1))), complex(element(z, (1, 0, 1))), complex(element(z, (1, 1, 0))),
            diag(z), diag((0, 1, 1)), diag((1, 0, 1)), diag((1, 1, 0)),
            diag((0, 0, 1)), diag((0, 1, 0)), diag((1, 0, 0)),
        )

    @classmethod
    def from_mapping(cls, values: Mapping[str, complex]) -> "WitnessElements":
        return cls(**values)


def biseparability_witness(el: WitnessElements, tol: float = WITNESS_TOL) -> CriterionValue:
    """Nonlinear three-party witness: every biseparable state has ``lhs <= rhs``."""
    diags = (el.d000, el.d011, el.d101, el.d110, el.d001, el.d010, el.d100)
    if min(diags) < 0:
        raise UsageError(f"diagonal elements must be nonnegative, got {diags}")
    lhs = abs(el.c011) + abs(el.c101) + abs(el.c110)
    rhs = (
        np.sqrt(el.d000) * np.sqrt(el.d011 + el.d101 + el.d110)
        + np.sqrt(el.d001 * el.d010)
        + np.sqrt(el.d001 * el.d100)
        + np.sqrt(el.d010 * el.d100)
    )
    return CriterionValue(float(lhs), float(rhs), bool(lhs > rhs + tol))


def symmetric_witness(r: float, tol: float = WITNESS_TOL) -> CriterionValue:
    """Permutation-symmetric form of the witness for the Gaussian state with CM ``fs_mixture_cm(r)``."""
    if r < 0:
        raise UsageError(f"r must be nonnegative, got {r}")
    el = lambda b, k: qubit_subspace_element(r, b, k)  # noqa: E731
    lhs = np.sqrt(3) * abs(el((0, 0, 0), (0, 1, 1)))
    rhs = np.sqrt(el((0, 0, 0), (0, 0, 0)) * el((0, 1, 1), (0, 1, 1))) + np.sqrt(3) * el((0, 0, 1), (0, 0, 1))
    return CriterionValue(float(lhs), float(rhs), bool(lhs > rhs + tol))


def symmetric_witness_margin(r: float) -> float:
    """``lhs - rhs`` of :func:`symmetric_witness`; positive means GME detected."""
    v = symmetric_witness(r)
    return v.lhs - v.rhs


def _haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_partition_separable(bip: ModeBipartition, rng: np.random.Generator, n_terms: int = 10) -> np.ndarray:
    """Dirichlet-weighted mixture of ``n_terms`` products of Haar-random pure states across ``bip`` (qubits)."""
    n = bip.n_modes
    weights = rng.dirichlet(np.ones(n_terms))
    order = list(bip.group_a) + list(bip.group_b)
    inverse = np.argsort(order)
    rho = np.zeros((2**n, 2**n), dtype=complex)
    for w in weights:
        psi = np.kron(_haar_state(2 ** len(bip.group_a), rng), _haar_state(2 ** len(bip.group_b), rng))
        # put the qubits back into their natural order
        psi = psi.reshape((2,) * n).transpose(inverse).ravel()
        rho += w * np.outer(psi, psi.conj())
    return rho


def random_biseparable(rng: np.random.Generator, n_qubits: int = 3, n_terms: int = 10) -> np.ndarray:
    """Random mixture of partition-separable states over the single-qubit cuts."""
    cuts = [ModeBipartition.from_group([m], n_qubits) for m in range(n_qubits)]
    weights = rng.dirichlet(np.ones(len(cuts)))
    return sum(w * random_partition_separable(c, rng, n_terms) for w, c in zip(weights, cuts))


def elements_from_matrix(rho: np.ndarray) -> WitnessElements:
    """Witness elements of a dense three-qubit matrix in the ``|ijk>`` ordering."""
    rho = np.asarray(rho)
    idx = lambda t: 4 * t[0] + 2 * t[1] + t[2]  # noqa: E731
    return WitnessElements.from_oracle(lambda b, k: rho[idx(b), idx(k)])


def ppt_min_eig(rho: FockDensityMatrix, bip: ModeBipartition) -> float:
    """Smallest eigenvalue of the partial transpose on ``bip.group_a``; negative means NPT across ``bip``."""
    if bip.n_modes != rho.n_modes:
        raise UsageError(f"bipartition {bip} does not match {rho.n_modes} modes")
    return min_eigenvalue(partial_transpose(rho, bip.group_a))
