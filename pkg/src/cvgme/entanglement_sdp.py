"""Witness optimization problems built on :mod:`cvgme.sdp`.

Two problems live here. The first decides whether a covariance matrix admits
a convex decomposition into block-diagonal valid CMs (one per bipartition) and
otherwise returns an optimal linear witness on CMs. The second finds the best
fully decomposable witness for a three-qubit density matrix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import sdp
from .errors import NumericalError, UsageError
from .fock import FockDensityMatrix
from .records import ScanRecord, map_ordered
from .symplectic import (
    CovarianceMatrix,
    ModeBipartition,
    direct_sum,
    fs_mixture_cm,
    ps_mixture_cm,
    symplectic_eigenvalues,
    symplectic_form,
    tripartite_bipartitions,
    _as_matrix,
)

log = logging.getLogger(__name__)

CM_FEAS_TOL = 1e-6
UNUSED_WEIGHT = 1e-9

# compound of two three-mode states, modes (A, B, C, a, b, c); parties Aa, Bb, Cc
PAIR_PARTIES = ((0, 3), (1, 4), (2, 5))


@dataclass
class CmWitness:
    """Linear CM witness: ``Tr(W gamma_bs) >= 1`` for every biseparable-decomposable CM."""

    matrix: np.ndarray
    value: float
    bipartitions: list[ModeBipartition] = field(default_factory=list)

    @property
    def detects(self) -> bool:
        return self.value < 0


@dataclass
class Feasible:
    weights: np.ndarray
    matrices: list[np.ndarray]
    bipartitions: list[ModeBipartition]
    slack: float

    @property
    def used(self) -> list[bool]:
        return [bool(p > UNUSED_WEIGHT) for p in self.weights]

    def component_cms(self) -> list[np.ndarray | None]:
        """``K_i / p_i`` for used bipartitions, ``None`` where the bipartition is unused."""
        return [k / p if p > UNUSED_WEIGHT else None for k, p in zip(self.matrices, self.weights)]


@dataclass
class Infeasible:
    witness: CmWitness


def _block_entries(bip: ModeBipartition) -> list[tuple[int, int]]:
    """Upper-triangular quadrature index pairs inside the diagonal blocks of ``bip``."""
    out = []
    for group in (bip.group_a, bip.group_b):
        quads = sorted(2 * m + q for m in group for q in (0, 1))
        out += [(a, b) for i, a in enumerate(quads) for b in quads[i:]]
    return out


def _unit(n: int, a: int, b: int) -> np.ndarray:
    e = np.zeros((n, n))
    e[a, b] = e[b, a] = 1.0
    return e


def _cm_problem(gamma: np.ndarray, bips: Sequence[ModeBipartition]) -> tuple[sdp.SdpProblem, list]:
    """Primal whose dual is ``max sum p_i : gamma - sum K_i >= 0, K_i + i p_i Omega >= 0``.

    Blocks: ``W`` (real), then one Hermitian ``Y_i`` per bipartition, then a
    scalar slack per bipartition. Returns the problem and the dual-variable
    layout ``[(i, a, b) or (i, 'p')]``.
    """
    n = gamma.shape[0]
    k = len(bips)
    omega = symplectic_form(n // 2)
    blocks = [sdp.Block(n)] + [sdp.Block(n, "hermitian")] * k + [sdp.Block(1)] * k
    objective = [gamma] + [None] * (2 * k)
    constraints, layout = [], []
    for i, bip in enumerate(bips):
        for a, b in _block_entries(bip):
            e = _unit(n, a, b)
            constraints.append(sdp.Constraint({0: e, 1 + i: -e.astype(complex)}, 0.0))
            layout.append((i, a, b))
        constraints.append(sdp.Constraint({1 + i: -1j * omega, 1 + k + i: -np.eye(1)}, 1.0))
        layout.append((i, "p"))
    return sdp.SdpProblem(blocks, objective, constraints), layout


def _check_input(gamma, bipartitions):
    g = _as_matrix(gamma)
    if not bipartitions:
        raise UsageError("need at least one bipartition")
    for bip in bipartitions:
        if 2 * bip.n_modes != g.shape[0]:
            raise UsageError(f"bipartition {bip} does not match a {g.shape[0] // 2}-mode CM")
    return g


def _solve_cm(gamma, bipartitions, options=None):
    g = _check_input(gamma, bipartitions)
    problem, layout = _cm_problem(g, bipartitions)
    sol = sdp.solve_or_raise(problem, options)
    if sol.status != sdp.OPTIMAL:
        raise NumericalError(f"CM witness problem returned {sol.status} ({sol.certificate})")
    return g, sol, layout


def optimal_cm_witness(gamma, bipartitions: Sequence[ModeBipartition], options=None) -> CmWitness:
    """Optimal witness ``W >= 0`` with ``min Tr(W gamma_i) >= 1`` over valid block CMs.

    The reported value is ``Tr(W gamma) - 1``; a negative value shows that no
    decomposition into block-diagonal valid CMs exists.
    """
    g, sol, _ = _solve_cm(gamma, bipartitions, options)
    w = 0.5 * (sol.X[0] + sol.X[0].T)
    return CmWitness(w, float(np.sum(w * g)) - 1.0, list(bipartitions))


def cm_bisep_feasibility(gamma, bipartitions: Sequence[ModeBipartition], options=None) -> Feasible | Infeasible:
    """Search for ``gamma >= sum_i p_i gamma_i`` with ``gamma_i`` valid and block diagonal for bipartition ``i``."""
    g, sol, layout = _solve_cm(gamma, bipartitions, options)
    n, k = g.shape[0], len(bipartitions)
    value = float(np.sum(sol.X[0] * g))
    if value < 1.0 - CM_FEAS_TOL:
        w = 0.5 * (sol.X[0] + sol.X[0].T)
        return Infeasible(CmWitness(w, value - 1.0, list(bipartitions)))
    mats = [np.zeros((n, n)) for _ in range(k)]
    p = np.zeros(k)
    for yj, entry in zip(sol.y, layout):
        if entry[1] == "p":
            p[entry[0]] = yj
        else:
            i, a, b = entry
            mats[i][a, b] = mats[i][b, a] = yj
    total = p.sum()
    p, mats = p / total, [m / total for m in mats]
    return Feasible(np.clip(p, 0.0, None), mats, list(bipartitions), total - 1.0)


# ---------------------------------------------------------------- independent re-verification

def min_valid_block_trace(w: np.ndarray, bip: ModeBipartition, reg: float = 1e-12) -> float:
    """``min Tr(W gamma)`` over valid CMs block diagonal for ``bip``.

    For each diagonal block the minimum over valid CMs is twice the sum of the
    symplectic eigenvalues of the block, computed independently of the solver.
    """
    total = 0.0
    for group in (bip.group_a, bip.group_b):
        quads = sorted(2 * m + q for m in group for q in (0, 1))
        blk = w[np.ix_(quads, quads)] + reg * np.eye(len(quads))
        total += 2.0 * float(np.sum(symplectic_eigenvalues(blk)))
    return total


def verify_feasible(gamma, result: Feasible) -> tuple[float, float]:
    """Smallest eigenvalues of ``gamma - sum K_i`` and of the ``K_i + i p_i Omega`` (worst case)."""
    g = _as_matrix(gamma)
    omega = symplectic_form(g.shape[0] // 2)
    gap = np.linalg.eigvalsh(g - sum(result.matrices))[0]
    valid = min(np.linalg.eigvalsh(k + 1j * p * omega)[0] for k, p in zip(result.matrices, result.weights))
    return float(gap), float(valid)


def verify_witness(w: CmWitness) -> float:
    """Worst ``min Tr(W gamma_i) - 1`` over the witness's bipartitions."""
    return min(min_valid_block_trace(w.matrix, bip) for bip in w.bipartitions) - 1.0


# ---------------------------------------------------------------- pair activation

def pair_compound_cm(r1: float, r2: float) -> CovarianceMatrix:
    return direct_sum([fs_mixture_cm(r1), ps_mixture_cm(r2)])


def pair_bipartitions() -> list[ModeBipartition]:
    return tripartite_bipartitions(PAIR_PARTIES)


def pair_activation_value(r1: float, r2: float, options=None) -> float:
    """``Tr(W gamma) - 1`` for the compound of the symmetric and the partially symmetric mixture."""
    return optimal_cm_witness(pair_compound_cm(r1, r2), pair_bipartitions(), options).value


def _pair_point(args):
    r1, r2 = args
    try:
        v = pair_activation_value(r1, r2)
        return ScanRecord({"r1": r1, "r2": r2}, {"witness_value": v}, {"gme": v < 0}, "ok")
    except NumericalError as exc:
        log.warning("pair scan failed at (%g, %g): %s", r1, r2, exc)
        return ScanRecord({"r1": r1, "r2": r2}, {"witness_value": float("nan")}, {"gme": False}, "failed")


def pair_activation_scan(r1_grid: Sequence[float], r2_grid: Sequence[float], jobs: int = 1):
    """Witness value on the grid, row-major in ``(r1, r2)``; failures are recorded, not raised."""
    points = [(float(a), float(b)) for a in r1_grid for b in r2_grid]
    return map_ordered(_pair_point, points, jobs)


# ---------------------------------------------------------------- fully decomposable qubit witness

@dataclass
class QubitGmeWitness:
    w: np.ndarray
    p: list[np.ndarray]
    q: list[np.ndarray]


def qubit_partial_transpose(mat: np.ndarray, qubit: int, n_qubits: int = 3) -> np.ndarray:
    t = np.asarray(mat).reshape((2,) * (2 * n_qubits))
    t = np.swapaxes(t, qubit, n_qubits + qubit)
    return t.reshape(2**n_qubits, 2**n_qubits)


def _hermitian_basis(d: int) -> list[np.ndarray]:
    basis = []
    for i in range(d):
        for j in range(i, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1.0
            basis.append(e)
            if i != j:
                e = np.zeros((d, d), dtype=complex)
                e[i, j], e[j, i] = -1j, 1j
                basis.append(e)
    return basis


def fully_decomposable_problem(rho: np.ndarray) -> sdp.SdpProblem:
    """``min Tr(W rho)`` over ``W = P_M + Q_M^{T_M}`` (all three single-qubit cuts), ``Tr W = 1``.

    Blocks are ``P_0, P_1, P_2, Q_0, Q_1, Q_2``; ``W`` is represented through
    ``P_0 + Q_0^{T_0}`` and the other two decompositions are tied to it.
    """
    d = 8
    pt = lambda m, q: qubit_partial_transpose(m, q)  # noqa: E731
    blocks = [sdp.Block(d, "hermitian")] * 6
    objective = [rho, None, None, pt(rho, 0), None, None]
    constraints = []
    for m in (1, 2):
        for h in _hermitian_basis(d):
            constraints.append(sdp.Constraint({0: h, 3: pt(h, 0), m: -h, 3 + m: -pt(h, m)}, 0.0))
    eye = np.eye(d, dtype=complex)
    constraints.append(sdp.Constraint({0: eye, 3: eye}, 1.0))
    return sdp.SdpProblem(blocks, objective, constraints)


def fully_decomposable_witness(rho: FockDensityMatrix | np.ndarray, options=None) -> tuple[QubitGmeWitness, float]:
    """Optimal fully decomposable witness for a three-qubit state; a negative optimum certifies GME."""
    if isinstance(rho, FockDensityMatrix):
        if tuple(rho.dims) != (2, 2, 2):
            raise UsageError(f"expected a three-qubit state, got dims {rho.dims}")
        mat = rho.to_dense()
    else:
        mat = np.asarray(rho, dtype=complex)
        if mat.shape != (8, 8):
            raise UsageError(f"expected an 8x8 matrix, got {mat.shape}")
    mat = 0.5 * (mat + mat.conj().T)
    sol = sdp.solve_or_raise(fully_decomposable_problem(mat), options)
    if sol.status != sdp.OPTIMAL:
        raise NumericalError(f"qubit witness problem returned {sol.status} ({sol.certificate})")
    p, q = sol.X[:3], sol.X[3:]
    w = p[0] + qubit_partial_transpose(q[0], 0)
    return QubitGmeWitness(w, list(p), list(q)), float(np.real(np.trace(w @ mat)))


def decomposition_error(wit: QubitGmeWitness) -> float:
    """Largest ``max |W - P_M - Q_M^{T_M}|`` over the three cuts."""
    return max(float(np.max(np.abs(wit.w - pm - qubit_partial_transpose(qm, m))))
               for m, (pm, qm) in enumerate(zip(wit.p, wit.q)))
