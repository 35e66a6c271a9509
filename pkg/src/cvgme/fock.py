"""Truncated multi-mode Fock-space density matrices.

Flat basis index is mode-major: ``flat = sum_i n_i * prod_{j>i} d_j``
(numpy C order), so ``np.unravel_index(flat, dims)`` recovers ``(n_0, ..., n_{N-1})``.

Matrices are held in scipy.sparse CSR form. The three-mode states used here
reach dimension ``25**3`` and their two-copy versions ``8**6``, far beyond
what dense storage allows, while having only a few thousand nonzeros.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateFilterError, DomainError, NumericalError, UsageError
from .symplectic import CovarianceMatrix

DEFAULT_CUTOFF = 10
MOMENT_DEFICIT_LIMIT = 1e-6


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """Operator on ``C^{d_0} (x) ... (x) C^{d_{N-1}}`` with a recorded truncation deficit.

    ``deficit`` is the trace weight lost to the cutoff (``1 - trace`` for a
    truncated normalized state). It is bookkeeping only; the matrix is never
    rescaled to hide it.
    """

    dims: tuple[int, ...]
    matrix: sp.csr_array
    deficit: float = 0.0

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or min(dims) < 1:
            raise UsageError(f"invalid mode dimensions {self.dims}")
        m = sp.csr_array(self.matrix, dtype=complex)
        size = math.prod(dims)
        if m.shape != (size, size):
            raise UsageError(f"matrix shape {m.shape} does not match dims {dims}")
        m.sum_duplicates()
        m.eliminate_zeros()
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_dense(cls, dims: Sequence[int], matrix, deficit: float = 0.0) -> "FockDensityMatrix":
        return cls(tuple(dims), sp.csr_array(np.asarray(matrix, dtype=complex)), deficit)

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def trace(self) -> complex:
        return complex(self.matrix.diagonal().sum())

    def index(self, levels: Sequence[int]) -> int:
        if len(levels) != self.n_modes:
            raise UsageError(f"expected {self.n_modes} Fock levels, got {tuple(levels)}")
        if any(n < 0 or n >= d for n, d in zip(levels, self.dims)):
            raise UsageError(f"Fock levels {tuple(levels)} outside cutoffs {self.dims}")
        return int(np.ravel_multi_index(tuple(levels), self.dims))

    def element(self, bra: Sequence[int], ket: Sequence[int]) -> complex:
        """``<bra| rho |ket>``; levels at or above a cutoff give zero."""
        if any(n >= d for n, d in zip(bra, self.dims)) or any(n >= d for n, d in zip(ket, self.dims)):
            return 0.0j
        return complex(self.matrix[self.index(bra), self.index(ket)])

    def hermiticity_error(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def __repr__(self):
        return f"FockDensityMatrix(dims={self.dims}, nnz={self.matrix.nnz}, deficit={self.deficit:.3g})"


@dataclass(frozen=True)
class LocalFilter:
    """Per-mode lists of retained Fock levels."""

    levels: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        levels = tuple(tuple(int(n) for n in lv) for lv in self.levels)
        for lv in levels:
            if not lv:
                raise UsageError("each mode must retain at least one level")
            if any(b <= a for a, b in zip(lv, lv[1:])) or lv[0] < 0:
                raise UsageError(f"retained levels must be strictly increasing and nonnegative: {lv}")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def uniform(cls, levels: Sequence[int], n_modes: int) -> "LocalFilter":
        return cls(tuple(tuple(levels) for _ in range(n_modes)))


def _entries(rho: FockDensityMatrix):
    coo = rho.matrix.tocoo()
    rows = np.array(np.unravel_index(coo.row, rho.dims)) if coo.nnz else np.zeros((rho.n_modes, 0), int)
    cols = np.array(np.unravel_index(coo.col, rho.dims)) if coo.nnz else np.zeros((rho.n_modes, 0), int)
    return rows, cols, coo.data


def _build(dims, rows, cols, data, deficit=0.0) -> FockDensityMatrix:
    dims = tuple(dims)
    size = math.prod(dims)
    if len(data):
        r = np.ravel_multi_index(tuple(rows), dims)
        c = np.ravel_multi_index(tuple(cols), dims)
    else:
        r = c = np.zeros(0, dtype=int)
    m = sp.coo_array((data, (r, c)), shape=(size, size)).tocsr()
    return FockDensityMatrix(dims, m, deficit)


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not (0.0 <= lam < 1.0):
        raise DomainError(f"lambda must lie in [0, 1), got {lam}")
    return lam


def _check_cutoff(cutoff: int, minimum: int = 1) -> int:
    if int(cutoff) != cutoff or cutoff < minimum:
        raise UsageError(f"cutoff must be an integer >= {minimum}, got {cutoff}")
    return int(cutoff)


def fock_projector(levels: Sequence[int], dims: Sequence[int]) -> FockDensityMatrix:
    """``|n_0 ... n_{N-1}><n_0 ... n_{N-1}|``."""
    rows = np.array(levels, dtype=int)[:, None]
    return _build(dims, rows, rows, np.ones(1, dtype=complex))


def thermal_density(lam: float, cutoff: int) -> FockDensityMatrix:
    """Single-mode thermal state, diagonal ``(1 - lam^2) lam^(2m)``."""
    lam = _check_lambda(lam)
    cutoff = _check_cutoff(cutoff)
    diag = (1 - lam**2) * lam ** (2 * np.arange(cutoff))
    return FockDensityMatrix((cutoff,), sp.diags_array(diag.astype(complex), format="csr"), 1.0 - diag.sum())


def tmsv_density(lam: float, cutoff: int) -> FockDensityMatrix:
    """Truncated two-mode squeezed vacuum ``(1 - lam^2) sum lam^(m+m') |mm><m'm'|``."""
    lam = _check_lambda(lam)
    cutoff = _check_cutoff(cutoff, 2)
    amp = lam ** np.arange(cutoff)
    m, mp = np.meshgrid(np.arange(cutoff), np.arange(cutoff), indexing="ij")
    data = ((1 - lam**2) * np.outer(amp, amp)).ravel().astype(complex)
    rows = np.stack([m.ravel(), m.ravel()])
    cols = np.stack([mp.ravel(), mp.ravel()])
    deficit = 1.0 - (1 - lam**2) * np.sum(amp**2)
    return _build((cutoff, cutoff), rows, cols, data, deficit)


def permute_modes(rho: FockDensityMatrix, order: Sequence[int]) -> FockDensityMatrix:
    """Reorder modes: output mode ``i`` is input mode ``order[i]``."""
    order = list(order)
    if sorted(order) != list(range(rho.n_modes)):
        raise UsageError(f"{order} is not a permutation of {rho.n_modes} modes")
    rows, cols, data = _entries(rho)
    return _build([rho.dims[k] for k in order], rows[order], cols[order], data, rho.deficit)


def tensor(a: FockDensityMatrix, b: FockDensityMatrix) -> FockDensityMatrix:
    m = sp.kron(a.matrix, b.matrix, format="csr")
    deficit = 1.0 - (1.0 - a.deficit) * (1.0 - b.deficit)
    return FockDensityMatrix(a.dims + b.dims, m, deficit)


def mix(states: Sequence[FockDensityMatrix], weights: Sequence[float]) -> FockDensityMatrix:
    if not states or len(states) != len(weights):
        raise UsageError("need equally many states and weights")
    dims = states[0].dims
    if any(s.dims != dims for s in states):
        raise UsageError("cannot mix states with different mode dimensions")
    m = sum(w * s.matrix for w, s in zip(weights, states))
    return FockDensityMatrix(dims, m, float(sum(w * s.deficit for w, s in zip(weights, states))))


def fs_state_density(n: int, lam: float, cutoff: int) -> FockDensityMatrix:
    """Fully symmetric three-mode state: equal mixture of TMSV on each pair with ``|n>`` on the third mode."""
    cutoff = _check_cutoff(cutoff, 2)
    if not (0 <= n < cutoff):
        raise UsageError(f"Fock level n={n} must lie below the cutoff {cutoff}")
    base = tensor(tmsv_density(lam, cutoff), fock_projector([n], [cutoff]))  # modes (A, B, C)
    placements = [
        base,  # TMSV_AB (x) |n>_C
        permute_modes(base, [0, 2, 1]),  # TMSV_AC (x) |n>_B
        permute_modes(base, [2, 0, 1]),  # |n>_A (x) TMSV_BC
    ]
    return mix(placements, [1 / 3, 1 / 3, 1 / 3])


def partial_trace(rho: FockDensityMatrix, keep: Iterable[int]) -> FockDensityMatrix:
    keep = sorted(set(keep))
    if not keep:
        raise UsageError("partial_trace needs at least one mode to keep")
    if keep[-1] >= rho.n_modes or keep[0] < 0:
        raise UsageError(f"modes {keep} out of range")
    traced = [k for k in range(rho.n_modes) if k not in keep]
    rows, cols, data = _entries(rho)
    mask = np.all(rows[traced] == cols[traced], axis=0) if traced else np.ones(len(data), bool)
    return _build([rho.dims[k] for k in keep], rows[keep][:, mask], cols[keep][:, mask], data[mask], rho.deficit)


def partial_transpose(rho: FockDensityMatrix, modes: Iterable[int]) -> FockDensityMatrix:
    """Transpose the listed modes (swap their bra and ket indices)."""
    modes = sorted(set(modes))
    if modes and (modes[-1] >= rho.n_modes or modes[0] < 0):
        raise UsageError(f"modes {modes} out of range")
    rows, cols, data = _entries(rho)
    new_rows, new_cols = rows.copy(), cols.copy()
    new_rows[modes], new_cols[modes] = cols[modes], rows[modes]
    return _build(rho.dims, new_rows, new_cols, data, rho.deficit)


def local_project(rho: FockDensityMatrix, filt: LocalFilter, min_norm: float = 1e-14) -> FockDensityMatrix:
    """Restrict each mode to its retained levels and renormalize to unit trace."""
    if len(filt.levels) != rho.n_modes:
        raise UsageError(f"filter has {len(filt.levels)} modes, state has {rho.n_modes}")
    for lv, d in zip(filt.levels, rho.dims):
        if lv[-1] >= d:
            raise UsageError(f"retained level {lv[-1]} exceeds cutoff {d}")
    rows, cols, data = _entries(rho)
    keep = np.ones(len(data), dtype=bool)
    new_rows, new_cols = np.empty_like(rows), np.empty_like(cols)
    for k, lv in enumerate(filt.levels):
        lookup = np.full(rho.dims[k], -1)
        lookup[list(lv)] = np.arange(len(lv))
        new_rows[k], new_cols[k] = lookup[rows[k]], lookup[cols[k]]
        keep &= (new_rows[k] >= 0) & (new_cols[k] >= 0)
    out = _build([len(lv) for lv in filt.levels], new_rows[:, keep], new_cols[:, keep], data[keep])
    norm = out.trace().real
    if norm <= min_norm:
        raise DegenerateFilterError(f"filter leaves trace {norm:.3g}")
    return FockDensityMatrix(out.dims, out.matrix / norm, 0.0)


def _to_dense_hermitian(h) -> np.ndarray:
    if isinstance(h, FockDensityMatrix):
        h = h.to_dense()
    elif sp.issparse(h):
        h = h.toarray()
    h = np.asarray(h)
    return 0.5 * (h + h.conj().T)


def min_eigenvalue(h) -> float:
    """Smallest eigenvalue of a Hermitian matrix (dense, sparse or FockDensityMatrix)."""
    try:
        return float(np.linalg.eigvalsh(_to_dense_hermitian(h))[0])
    except np.linalg.LinAlgError as exc:
        raise NumericalError("Hermitian eigen-solver failed") from exc


def is_psd(rho: FockDensityMatrix, tol: float = 1e-10) -> bool:
    return min_eigenvalue(rho) >= -tol


class Moments(NamedTuple):
    mean: np.ndarray
    cm: CovarianceMatrix
    truncation_warning: bool


def _quadrature_ops(d: int):
    a = np.diag(np.sqrt(np.arange(1, d)), 1).astype(complex)
    ad = a.conj().T
    a2 = a @ a
    ad2 = ad @ ad
    num = np.diag(np.arange(d)).astype(complex)
    one = np.eye(d)
    x = (a + ad) / np.sqrt(2)
    p = (a - ad) / (1j * np.sqrt(2))
    # same-mode symmetrized products written in normal order so they are exact below the cutoff
    xx = (a2 + ad2 + 2 * num + one) / 2
    pp = (-a2 - ad2 + 2 * num + one) / 2
    xp = (a2 - ad2) / 1j
    return [x, p], {(0, 0): 2 * xx, (1, 1): 2 * pp, (0, 1): xp, (1, 0): xp}


def moments_from_density(rho: FockDensityMatrix) -> Moments:
    """First moments and covariance matrix from ladder-operator expectation values.

    The warning flag is raised when the truncation deficit exceeds ``1e-6``.
    """
    rows, cols, data = _entries(rho)
    norm = rho.trace().real
    n = rho.n_modes
    ops = [_quadrature_ops(d) for d in rho.dims]

    def expect(factors: dict[int, np.ndarray]) -> complex:
        # Tr(rho O) = sum_ij rho_ij O_ji with O a product of single-mode operators
        w = data.copy()
        for k in range(n):
            if k in factors:
                w = w * factors[k][cols[k], rows[k]]
            else:
                w = w * (cols[k] == rows[k])
        return w.sum() / norm

    mean = np.zeros(2 * n)
    for k in range(n):
        for q in range(2):
            mean[2 * k + q] = expect({k: ops[k][0][q]}).real
    g = np.zeros((2 * n, 2 * n))
    for i, j in itertools.combinations_with_replacement(range(2 * n), 2):
        ki, qi, kj, qj = i // 2, i % 2, j // 2, j % 2
        if ki == kj:
            val = expect({ki: ops[ki][1][(qi, qj)]})
        else:
            val = 2 * expect({ki: ops[ki][0][qi], kj: ops[kj][0][qj]})
        g[i, j] = g[j, i] = val.real - 2 * mean[i] * mean[j]
    return Moments(mean, CovarianceMatrix(g), bool(rho.deficit > MOMENT_DEFICIT_LIMIT))
