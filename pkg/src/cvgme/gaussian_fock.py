"""Fock-basis matrix elements of zero-mean Gaussian states.

Two independent routes are provided:

* closed forms for the symmetric three-mode mixture CM restricted to at most
  one excitation per mode (:func:`qubit_subspace_element`);
* a phase-space overlap oracle (:class:`WignerGaussian`). The Wigner function
  of a Fock dyad ``|m><n|`` is a polynomial times ``exp(-x^2 - p^2)``, so its
  overlap with a Gaussian Wigner function reduces to Gaussian moments, which
  are evaluated exactly through the Isserlis generating function.

A tensor-grid Gauss-Hermite evaluation of the same overlap is kept as a third
route (:meth:`WignerGaussian.element_quadrature`).
"""

from __future__ import annotations

import functools
import itertools
import math
from typing import Sequence

import numpy as np
import scipy.signal
from scipy.special import binom

from .errors import DomainError, InvalidCovarianceError, UsageError
from .fock import FockDensityMatrix
from .symplectic import CovarianceMatrix, fs_mixture_cm

QUBIT_BASIS = tuple(itertools.product((0, 1), repeat=3))


def shorthand_f(r: float) -> float:
    return 2.0 / np.sqrt(5 + 4 * np.cosh(2 * r))


def shorthand_g(r: float) -> float:
    return 9.0 / (37 + 32 * np.cosh(2 * r) + 3 * np.cosh(4 * r))


def _closed_form_groups(r: float) -> dict[str, float]:
    f, g = shorthand_f(r), shorthand_g(r)
    ch = lambda k: np.cosh(k * r)  # noqa: E731
    sh, sh2r = np.sinh(r), np.sinh(2 * r)
    return {
        "d0": 4 * 3 * f * g,
        "d1": 8 * 3 * f * g * (67 + 68 * ch(2) + 9 * ch(4)) * sh**2
        / (249 + 314 * ch(2) + 79 * ch(4) + 6 * ch(6)),
        "d2": f**5 * g**3 / (8 * 27)
        * (20558 + 38274 * ch(2) + 24384 * ch(4) + 8539 * ch(6) + 1458 * ch(8) + 99 * ch(10))
        * sh**2,
        "d3": f**7 * g**4 / (32 * 243)
        * (9216316 + 15789701 * ch(2) + 9730682 * ch(4) + 4155731 * ch(6)
           + 1182212 * ch(8) + 213057 * ch(10) + 22086 * ch(12) + 999 * ch(14))
        * sh**4,
        "o02": f**3 * g**2 * (19 + 16 * ch(2) + ch(4)) * sh2r,
        "o11": -(f**3) * g**2 * 2 * (2 + ch(2)) * sh2r**2,
        "o13": f**5 * g**2 / 2 * (54 * ch(1) + 17 * ch(3) + ch(5)) * sh**3,
        "o22": f**5 * g**2 / 4 * (33 + 22 * ch(2) - ch(4)) * sh2r**2,
    }


def _group_key(bra: tuple[int, ...], ket: tuple[int, ...]) -> str | None:
    nb, nk = sum(bra), sum(ket)
    if bra == ket:
        return f"d{nb}"
    if (nb + nk) % 2:
        return None
    lo, hi = sorted((nb, nk))
    return {(0, 2): "o02", (1, 1): "o11", (1, 3): "o13", (2, 2): "o22"}.get((lo, hi))


def qubit_subspace_element(r: float, bra: Sequence[int], ket: Sequence[int]) -> float:
    """Closed-form ``<bra|rho|ket>`` of the Gaussian state with CM ``fs_mixture_cm(r)``.

    Valid for occupation numbers in ``{0, 1}`` on each of the three modes.
    Elements connecting different total-excitation parities vanish.
    """
    bra, ket = tuple(int(i) for i in bra), tuple(int(i) for i in ket)
    if len(bra) != 3 or len(ket) != 3 or not set(bra + ket) <= {0, 1}:
        raise UsageError(f"closed forms cover {{0,1}}^3 only, got {bra}, {ket}")
    if not np.isfinite(r):
        raise DomainError(f"r must be finite, got {r}")
    key = _group_key(bra, ket)
    return 0.0 if key is None else float(_closed_form_groups(r)[key])


gaussian_fock_element_closed = qubit_subspace_element


def qubit_subspace_table(r: float) -> np.ndarray:
    """8x8 table of :func:`qubit_subspace_element` in the ``|ijk>`` ordering."""
    groups = _closed_form_groups(r)
    out = np.zeros((8, 8))
    for a, bra in enumerate(QUBIT_BASIS):
        for b, ket in enumerate(QUBIT_BASIS):
            key = _group_key(bra, ket)
            out[a, b] = 0.0 if key is None else groups[key]
    return out


def qubit_projection(r: float) -> FockDensityMatrix:
    """Three-qubit state obtained by filtering onto at most one excitation per mode."""
    if r < 0 or not np.isfinite(r):
        raise DomainError(f"r must be finite and nonnegative, got {r}")
    table = qubit_subspace_table(r)
    return FockDensityMatrix.from_dense((2, 2, 2), table / np.trace(table))


@functools.lru_cache(maxsize=None)
def fock_dyad_wigner_poly(m: int, n: int) -> np.ndarray:
    """Polynomial part of the Wigner function of ``|m><n|``.

    Returns complex ``c`` with ``W(x, p) = sum_ij c[i, j] x^i p^j exp(-x^2 - p^2)``,
    from the associated-Laguerre closed form.
    """
    if m < 0 or n < 0:
        raise UsageError("Fock levels must be nonnegative")
    if m < n:
        return np.conj(fock_dyad_wigner_poly(n, m))
    alpha = m - n
    # (sqrt2 (x - i p))^alpha
    lead = np.zeros((alpha + 1, alpha + 1), dtype=complex)
    for j in range(alpha + 1):
        lead[j, alpha - j] = binom(alpha, j) * (-1j) ** (alpha - j)
    lead *= 2 ** (alpha / 2)
    # L_n^alpha(2 (x^2 + p^2))
    lag = np.zeros((2 * n + 1, 2 * n + 1), dtype=complex)
    for k in range(n + 1):
        ck = (-1) ** k * binom(n + alpha, n - k) / math.factorial(k) * 2**k
        for j in range(k + 1):
            lag[2 * j, 2 * (k - j)] += ck * binom(k, j)
    poly = scipy.signal.convolve2d(lead, lag)
    poly *= (-1) ** n / np.pi * np.sqrt(math.factorial(n) / math.factorial(m))
    poly.setflags(write=False)
    return poly


def gaussian_moments(cov: np.ndarray, max_deg: Sequence[int]) -> np.ndarray:
    """Moments ``E[prod_i r_i^k_i]`` of ``N(0, cov)`` for all ``k <= max_deg`` componentwise.

    Coefficients of the generating function ``exp(t^T cov t / 2)`` are built
    power by power of the quadratic form, which is the Isserlis pairing sum
    organised by degree.
    """
    cov = np.asarray(cov, dtype=float)
    shape = tuple(int(d) + 1 for d in max_deg)
    dim = len(shape)
    quad = []
    for a in range(dim):
        for b in range(a, dim):
            c = cov[a, b] if a != b else 0.5 * cov[a, a]
            if c != 0.0:
                shift = [0] * dim
                shift[a] += 1
                shift[b] += 1
                if all(s < sh for s, sh in zip(shift, shape)):
                    dst = tuple(slice(s, None) for s in shift)
                    src = tuple(slice(0, sh - s) for s, sh in zip(shift, shape))
                    quad.append((c, dst, src))
    term = np.zeros(shape)
    term[(0,) * dim] = 1.0
    total = term.copy()
    for j in range(1, sum(shape) // 2 + 1):
        nxt = np.zeros(shape)
        for c, dst, src in quad:
            nxt[dst] += c * term[src]
        term = nxt / j
        if not term.any():
            break
        total += term
    fact = np.ones(shape)
    for axis, size in enumerate(shape):
        f = np.array([math.factorial(k) for k in range(size)], dtype=float)
        fact = fact * f.reshape([-1 if i == axis else 1 for i in range(dim)])
    return total * fact


class WignerGaussian:
    """Zero-mean Gaussian Wigner function ``exp(-r^T g^-1 r) / (pi^N sqrt(det g))``."""

    def __init__(self, cm: CovarianceMatrix | np.ndarray):
        self.cm = cm if isinstance(cm, CovarianceMatrix) else CovarianceMatrix(cm)
        g = self.cm.matrix
        self.n_modes = self.cm.n_modes
        self.det = float(np.linalg.det(g))
        if self.det <= 0:
            raise InvalidCovarianceError("covariance matrix must be positive definite")
        self.inv = np.linalg.inv(g)
        if np.max(np.abs(g @ self.inv - np.eye(2 * self.n_modes))) >= 1e-10:
            raise InvalidCovarianceError("covariance matrix is too ill conditioned to invert")
        # overlap with dyad Wigner functions: Gaussian weight exp(-r^T (g^-1 + 1) r)
        self._quad = self.inv + np.eye(2 * self.n_modes)
        evals = np.linalg.eigvalsh(self._quad)
        if evals[0] <= 0:
            raise InvalidCovarianceError("combined quadratic form is not positive definite")
        self._cov = np.linalg.inv(2 * self._quad)
        self._prefactor = (2 * np.pi) ** self.n_modes / np.sqrt(self.det * np.prod(evals))
        self._moments = np.ones((1,) * (2 * self.n_modes))

    def __call__(self, r: np.ndarray) -> np.ndarray:
        r = np.atleast_2d(r)
        q = np.einsum("...i,ij,...j->...", r, self.inv, r)
        return np.exp(-q) / (np.pi**self.n_modes * np.sqrt(self.det))

    def _moment_tensor(self, max_deg: Sequence[int]) -> np.ndarray:
        have = self._moments.shape
        need = tuple(max(h - 1, d) for h, d in zip(have, max_deg))
        if any(n + 1 > h for n, h in zip(need, have)):
            self._moments = gaussian_moments(self._cov, need)
        return self._moments

    def _polys(self, bra, ket):
        bra, ket = tuple(int(i) for i in bra), tuple(int(i) for i in ket)
        if len(bra) != self.n_modes or len(ket) != self.n_modes:
            raise UsageError(f"expected {self.n_modes} Fock levels per tuple")
        # <bra|rho|ket> = Tr(rho |ket><bra|)
        return [fock_dyad_wigner_poly(k, b) for b, k in zip(bra, ket)]

    def overlap(self, polys: Sequence[np.ndarray]) -> complex:
        """``(2 pi)^N * integral W_rho * prod_j poly_j(x_j, p_j) exp(-x_j^2 - p_j^2)``."""
        max_deg = [d - 1 for poly in polys for d in poly.shape]
        mom = self._moment_tensor(max_deg)
        out = mom[tuple(slice(0, d + 1) for d in max_deg)]
        # contract modes from the last one inwards
        for poly in reversed(polys):
            out = np.tensordot(out, poly, axes=([out.ndim - 2, out.ndim - 1], [0, 1]))
        return complex(self._prefactor * out)

    def element(self, bra: Sequence[int], ket: Sequence[int]) -> complex:
        return self.overlap(self._polys(bra, ket))

    def element_quadrature(self, bra: Sequence[int], ket: Sequence[int], nodes: int = 10) -> complex:
        """Same overlap by tensor-grid Gauss-Hermite quadrature in whitened coordinates.

        Exact for total polynomial degree below ``2 * nodes``; meant as an
        independent cross-check for a few modes only.
        """
        polys = self._polys(bra, ket)
        z, w = np.polynomial.hermite_e.hermegauss(nodes)
        w = w / np.sqrt(2 * np.pi)
        dim = 2 * self.n_modes
        chol = np.linalg.cholesky(self._cov)
        grid = np.stack(np.meshgrid(*([z] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
        weights = functools.reduce(np.multiply.outer, [w] * dim).ravel()
        pts = grid @ chol.T
        vals = np.ones(len(pts), dtype=complex)
        for k, poly in enumerate(polys):
            vals *= np.polynomial.polynomial.polyval2d(pts[:, 2 * k], pts[:, 2 * k + 1], poly)
        return complex(self._prefactor * np.sum(weights * vals))

    def density(self, cutoff: int) -> FockDensityMatrix:
        """All elements with every occupation below ``cutoff``, as a truncated density matrix."""
        levels = list(itertools.product(range(cutoff), repeat=self.n_modes))
        size = len(levels)
        out = np.zeros((size, size), dtype=complex)
        for a, bra in enumerate(levels):
            for b in range(a, size):
                val = self.element(bra, levels[b])
                out[a, b] = val
                out[b, a] = np.conj(val)
        deficit = 1.0 - float(np.trace(out).real)
        return FockDensityMatrix.from_dense((cutoff,) * self.n_modes, out, deficit)


def gaussian_fock_element_oracle(cm, bra: Sequence[int], ket: Sequence[int]) -> complex:
    """``<bra|rho|ket>`` for the zero-mean Gaussian state with covariance ``cm``."""
    return WignerGaussian(cm).element(bra, ket)


def oracle_qubit_subspace_table(r: float) -> np.ndarray:
    """The 8x8 ``{0,1}^3`` table computed by the overlap oracle."""
    wg = WignerGaussian(fs_mixture_cm(r))
    out = np.zeros((8, 8), dtype=complex)
    for a, bra in enumerate(QUBIT_BASIS):
        for b, ket in enumerate(QUBIT_BASIS):
            out[a, b] = wg.element(bra, ket)
    return out
