"""Covariance-matrix algebra for zero-mean Gaussian states.

Conventions
-----------
Quadratures are interleaved, ``(x_1, p_1, ..., x_N, p_N)``, and the vacuum
has the identity covariance matrix. Mode indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import DomainError, InvalidCovarianceError, NumericalError, UsageError

SYMMETRY_REPAIR_TOL = 1e-8
PHYSICAL_TOL = 1e-9
_COND_FALLBACK = 1e12


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Real symmetric ``2N x 2N`` matrix of symmetrized quadrature moments.

    Round-off asymmetry below ``1e-8`` (relative) is repaired on construction;
    anything larger raises :class:`InvalidCovarianceError`. Physicality is
    *not* enforced here because partially transposed matrices are legitimate
    values of this type; use :meth:`is_physical`.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise InvalidCovarianceError(f"expected a 2N x 2N matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidCovarianceError("covariance matrix has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.T)) > SYMMETRY_REPAIR_TOL * scale:
            raise InvalidCovarianceError("covariance matrix is not symmetric")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"CovarianceMatrix(n_modes={self.n_modes})"

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        """True if all symplectic eigenvalues are at least ``1 - tol``."""
        if np.linalg.eigvalsh(self.matrix)[0] <= 0:
            return False
        return bool(symplectic_eigenvalues(self)[0] >= 1.0 - tol)


@dataclass(frozen=True)
class ModeBipartition:
    """Split of the modes ``0..n-1`` into two nonempty groups."""

    group_a: tuple[int, ...]
    group_b: tuple[int, ...]

    def __post_init__(self):
        a = tuple(sorted(set(self.group_a)))
        b = tuple(sorted(set(self.group_b)))
        if not a or not b:
            raise UsageError("both groups of a bipartition must be nonempty")
        if set(a) & set(b):
            raise UsageError(f"groups overlap: {a} and {b}")
        if set(a) | set(b) != set(range(len(a) + len(b))):
            raise UsageError(f"groups {a} | {b} do not cover modes 0..{len(a) + len(b) - 1}")
        object.__setattr__(self, "group_a", a)
        object.__setattr__(self, "group_b", b)

    @classmethod
    def from_group(cls, group: Iterable[int], n_modes: int) -> "ModeBipartition":
        group = set(group)
        if not group <= set(range(n_modes)):
            raise UsageError(f"mode indices {sorted(group)} out of range for {n_modes} modes")
        return cls(tuple(group), tuple(set(range(n_modes)) - group))

    @property
    def n_modes(self) -> int:
        return len(self.group_a) + len(self.group_b)

    def is_one_vs_rest(self) -> bool:
        return min(len(self.group_a), len(self.group_b)) == 1

    def __str__(self):
        return f"{''.join(map(str, self.group_a))}|{''.join(map(str, self.group_b))}"


def tripartite_bipartitions(parties: Sequence[Sequence[int]]) -> list[ModeBipartition]:
    """The three bipartitions ``X|YZ`` of three parties, each a list of modes."""
    if len(parties) != 3:
        raise UsageError("expected exactly three parties")
    n = sum(len(p) for p in parties)
    return [ModeBipartition.from_group(p, n) for p in parties]


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _finite(r: float) -> float:
    r = float(r)
    if not np.isfinite(r):
        raise DomainError(f"parameter must be finite, got {r}")
    return r


def _as_matrix(cm) -> np.ndarray:
    return cm.matrix if isinstance(cm, CovarianceMatrix) else np.asarray(cm, dtype=float)


def tmsv_cm(r: float) -> CovarianceMatrix:
    """Two-mode squeezed vacuum with squeezing ``r``."""
    r = _finite(r)
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    z = np.diag([1.0, -1.0])
    return CovarianceMatrix(np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]]))


def squeezed_cm(r: float) -> CovarianceMatrix:
    """Single-mode squeezed vacuum, ``diag(e^{2r}, e^{-2r})``."""
    r = _finite(r)
    return CovarianceMatrix(np.diag([np.exp(2 * r), np.exp(-2 * r)]))


def vacuum_cm(n_modes: int) -> CovarianceMatrix:
    return CovarianceMatrix(np.eye(2 * n_modes))


def place_blocks(n_modes: int, blocks: dict[tuple[int, ...], CovarianceMatrix]) -> CovarianceMatrix:
    """Assemble a product-state CM from CMs living on given (disjoint) mode sets.

    Modes not covered by any block are in vacuum.
    """
    out = np.eye(2 * n_modes)
    seen: set[int] = set()
    for modes, cm in blocks.items():
        m = _as_matrix(cm)
        if m.shape[0] != 2 * len(modes):
            raise UsageError(f"block for modes {modes} has wrong size {m.shape}")
        if seen & set(modes):
            raise UsageError("blocks overlap")
        seen |= set(modes)
        idx = np.array([[2 * k, 2 * k + 1] for k in modes]).ravel()
        out[np.ix_(idx, idx)] = m
    return CovarianceMatrix(out)


def fs_mixture_decomposition(r: float):
    """Defining convex decomposition of :func:`fs_mixture_cm`.

    Returns a list of ``(weight, block-diagonal CM, bipartition)`` triples,
    one per placement of the TMSV pair.
    """
    t = tmsv_cm(r)
    out = []
    for pair, single in (((0, 1), 2), ((1, 2), 0), ((0, 2), 1)):
        out.append((1.0 / 3.0, place_blocks(3, {pair: t}), ModeBipartition((single,), pair)))
    return out


def fs_mixture_cm(r: float) -> CovarianceMatrix:
    """Equal mixture of the three TMSV-pair-plus-vacuum CMs on modes A, B, C."""
    return CovarianceMatrix(sum(w * cm.matrix for w, cm, _ in fs_mixture_decomposition(r)))


def ps_mixture_decomposition(r: float):
    t, sq = tmsv_cm(r), squeezed_cm(r)
    return [
        (0.5, place_blocks(3, {(0, 1): t, (2,): sq}), ModeBipartition((2,), (0, 1))),
        (0.5, place_blocks(3, {(1, 2): t, (0,): sq}), ModeBipartition((0,), (1, 2))),
    ]


def ps_mixture_cm(r: float) -> CovarianceMatrix:
    """Half-half mixture of TMSV_ab (+) sq_c and TMSV_bc (+) sq_a."""
    return CovarianceMatrix(sum(w * cm.matrix for w, cm, _ in ps_mixture_decomposition(r)))


def direct_sum(cms: Sequence[CovarianceMatrix]) -> CovarianceMatrix:
    if len(cms) == 0:
        raise UsageError("direct_sum needs at least one covariance matrix")
    return CovarianceMatrix(scipy.linalg.block_diag(*[_as_matrix(c) for c in cms]))


def symplectic_eigenvalues(cm) -> np.ndarray:
    """Ascending symplectic eigenvalues (the N positive eigenvalues of ``|i Omega gamma|``).

    Uses the real spectrum of ``(Omega gamma)^2``, which is ``-nu^2`` with
    multiplicity two; falls back to the complex spectrum of ``Omega gamma``
    when the squared matrix is ill conditioned.
    """
    g = _as_matrix(cm)
    g = 0.5 * (g + g.T)
    n = g.shape[0] // 2
    og = symplectic_form(n) @ g
    sq = og @ og
    try:
        if np.linalg.cond(sq) > _COND_FALLBACK:
            raise np.linalg.LinAlgError("ill conditioned")
        ev = np.sort(np.sqrt(np.clip(-np.linalg.eigvals(sq).real, 0.0, None)))
    except np.linalg.LinAlgError:
        try:
            ev = np.sort(np.abs(np.linalg.eigvals(og).imag))
        except np.linalg.LinAlgError as exc:
            raise NumericalError("symplectic eigenvalue solver failed") from exc
    return 0.5 * (ev[0::2] + ev[1::2])


def partial_transpose_cm(cm, modes: Iterable[int]) -> CovarianceMatrix:
    """Flip the momentum quadrature of every listed mode."""
    g = _as_matrix(cm)
    n = g.shape[0] // 2
    modes = list(modes)
    if any(k < 0 or k >= n for k in modes):
        raise UsageError(f"mode indices {modes} out of range for {n} modes")
    t = np.ones(2 * n)
    t[[2 * k + 1 for k in modes]] = -1.0
    return CovarianceMatrix(t[:, None] * g * t[None, :])


def ppt_min_symplectic_eigenvalue(cm, bip: ModeBipartition) -> float:
    """Smallest symplectic eigenvalue of the CM partially transposed on ``bip.group_a``.

    A value below one certifies entanglement across ``bip``.
    """
    g = _as_matrix(cm)
    if bip.n_modes != g.shape[0] // 2:
        raise UsageError("bipartition does not match the number of modes")
    return float(symplectic_eigenvalues(partial_transpose_cm(g, bip.group_a))[0])


def ppt_verdict(cm, bip: ModeBipartition, tol: float = PHYSICAL_TOL) -> str:
    """``"entangled"``, ``"separable"`` or ``"inconclusive"`` for the given cut.

    PPT is only sufficient for separability when one side holds a single mode,
    so a PPT result on a larger cut is reported as inconclusive.
    """
    nu = ppt_min_symplectic_eigenvalue(cm, bip)
    if nu < 1.0 - tol:
        return "entangled"
    return "separable" if bip.is_one_vs_rest() else "inconclusive"


def purity(cm) -> float:
    det = float(np.linalg.det(_as_matrix(cm)))
    if det <= 0:
        raise InvalidCovarianceError(f"non-positive determinant {det}")
    return 1.0 / np.sqrt(det)


def _block_mask(bip: ModeBipartition) -> np.ndarray:
    side = np.zeros(bip.n_modes, dtype=int)
    side[list(bip.group_b)] = 1
    side = np.repeat(side, 2)
    return side[:, None] == side[None, :]


def is_block_diagonal(cm, bip: ModeBipartition, tol: float = 1e-12) -> bool:
    g = _as_matrix(cm)
    return bool(np.all(np.abs(g[~_block_mask(bip)]) <= tol))


def multi_copy_gap(cm, decomposition, k: int = 1) -> float:
    """Minimum eigenvalue of ``(+)_k (gamma - sum_i p_i gamma_i)``.

    ``decomposition`` holds ``(weight, cm)`` pairs or ``(weight, cm, bipartition)``
    triples; with a bipartition the block-diagonal structure is checked.
    """
    if k < 1:
        raise UsageError("number of copies must be positive")
    weights = np.array([d[0] for d in decomposition], dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
        raise UsageError(f"weights must be nonnegative and sum to one, got {weights}")
    g = _as_matrix(cm)
    delta = g.copy()
    for entry in decomposition:
        w, gi = entry[0], _as_matrix(entry[1])
        if len(entry) > 2 and not is_block_diagonal(gi, entry[2]):
            raise UsageError(f"component is not block diagonal for {entry[2]}")
        delta -= w * gi
    stacked = scipy.linalg.block_diag(*([delta] * k))
    return float(np.linalg.eigvalsh(0.5 * (stacked + stacked.T))[0])


def nu_tilde_closed_form(r: float) -> float:
    """Closed-form smallest PT symplectic eigenvalue of :func:`fs_mixture_cm` (one-mode cut)."""
    c2, c4, s2 = np.cosh(2 * r), np.cosh(4 * r), np.sinh(2 * r)
    inner = 9 + 16 * c2 + 11 * c4 - np.sqrt(2 * s2**2 * (199 + 256 * c2 + 121 * c4))
    return float(np.sqrt(inner) / 6.0)


def full_inseparability_threshold() -> float:
    """Squeezing above which :func:`fs_mixture_cm` is PPT across every cut."""
    return 0.5 * float(np.arccosh((7 + 2 * np.sqrt(31)) / 3))
