"""Small dense semidefinite-program solver.

Problems are in standard primal form::

    minimize    sum_b <C_b, X_b>
    subject to  sum_b <A_jb, X_b> = b_j,   j = 1..m
                X_b >= 0 (positive semidefinite)

with ``<A, X> = Re Tr(A^H X)``. The dual is ``max b^T y`` subject to
``Z = C - sum_j y_j A_j >= 0``.

Blocks are real symmetric or complex Hermitian; a Hermitian block ``X = P + iQ``
is carried internally as the real matrix ``[[P, -Q], [Q, P]]``.

The method is an infeasible-start primal-dual path-following scheme with
Nesterov-Todd scaling and Mehrotra predictor-corrector steps.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from typing import Literal, Sequence, TextIO

import numpy as np
import scipy.linalg

from .errors import NumericalError, UsageError

log = logging.getLogger(__name__)

BlockKind = Literal["real", "hermitian"]

# smallest admissible eigenvalue ratio of the constraint Gram matrix
DEPENDENCE_TOL = 1e-13

OPTIMAL = "optimal"
INFEASIBLE = "infeasible-certificate"
FAILURE = "numerical-failure"


@dataclass(frozen=True)
class Block:
    size: int
    kind: BlockKind = "real"

    def __post_init__(self):
        if self.size < 1:
            raise UsageError(f"block size must be positive, got {self.size}")
        if self.kind not in ("real", "hermitian"):
            raise UsageError(f"unknown block kind {self.kind!r}")

    @property
    def internal_size(self) -> int:
        return self.size if self.kind == "real" else 2 * self.size


@dataclass
class Constraint:
    """``sum_b <coeffs[b], X_b> = rhs``; blocks absent from ``coeffs`` have zero coefficient."""

    coeffs: dict[int, np.ndarray]
    rhs: float


@dataclass
class SdpProblem:
    blocks: list[Block]
    objective: list[np.ndarray | None]
    constraints: list[Constraint]

    def __post_init__(self):
        if len(self.objective) != len(self.blocks):
            raise UsageError("need one objective matrix per block (None for zero)")
        for b, c in enumerate(self.objective):
            if c is not None:
                _check_coeff(c, self.blocks[b], f"objective block {b}")
        for j, con in enumerate(self.constraints):
            if not con.coeffs:
                raise UsageError(f"constraint {j} has no coefficients")
            for b, a in con.coeffs.items():
                if not 0 <= b < len(self.blocks):
                    raise UsageError(f"constraint {j} refers to missing block {b}")
                _check_coeff(a, self.blocks[b], f"constraint {j} block {b}")

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)


@dataclass
class SolverOptions:
    feastol: float = 1e-8
    gaptol: float = 1e-7
    max_iter: int = 200
    infeas_ratio: float = 1e8
    step_fraction: float = 0.98
    refine_steps: int = 2
    neighbourhood: float = 1e-3


@dataclass
class SdpSolution:
    status: str
    X: list[np.ndarray]
    y: np.ndarray
    Z: list[np.ndarray]
    primal_objective: float
    dual_objective: float
    iterations: int
    primal_residual: float
    dual_residual: float
    gap: float
    certificate: str | None = None
    message: str = ""
    history: list[tuple[float, float, float]] = field(default_factory=list, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _check_coeff(a, block: Block, what: str):
    a = np.asarray(a)
    if a.shape != (block.size, block.size):
        raise UsageError(f"{what}: expected shape {(block.size, block.size)}, got {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.conj().T)) > 1e-12 * scale:
        raise UsageError(f"{what}: coefficient matrix is not symmetric/Hermitian")
    if block.kind == "real" and np.iscomplexobj(a) and np.max(np.abs(a.imag)) > 0:
        raise UsageError(f"{what}: complex coefficient on a real block")


def embed(a: np.ndarray, kind: BlockKind, coefficient: bool = True) -> np.ndarray:
    """Real representation of a block matrix.

    Coefficient matrices carry a factor 1/2 so that inner products with the
    embedded variable reproduce ``Re Tr(A^H X)``.
    """
    if kind == "real":
        return np.real(np.asarray(a, dtype=complex)).astype(float) if np.iscomplexobj(a) else np.asarray(a, float)
    a = np.asarray(a, dtype=complex)
    out = np.block([[a.real, -a.imag], [a.imag, a.real]])
    return 0.5 * out if coefficient else out


def unembed(x: np.ndarray, kind: BlockKind, coefficient: bool = False) -> np.ndarray:
    if kind == "real":
        return x
    n = x.shape[0] // 2
    re = 0.5 * (x[:n, :n] + x[n:, n:])
    im = 0.5 * (x[n:, :n] - x[:n, n:])
    out = re + 1j * im
    return 2 * out if coefficient else out


class _Internal:
    """Embedded, stacked representation used by the iterations."""

    def __init__(self, problem: SdpProblem):
        self.problem = problem
        self.kinds = [b.kind for b in problem.blocks]
        self.sizes = [b.internal_size for b in problem.blocks]
        self.m = problem.n_constraints
        self.b = np.array([c.rhs for c in problem.constraints], dtype=float)
        self.C = [
            embed(c, k) if c is not None else np.zeros((s, s))
            for c, k, s in zip(problem.objective, self.kinds, self.sizes)
        ]
        # per block: constraint indices touching it and their stacked matrices
        self.rows: list[np.ndarray] = []
        self.A: list[np.ndarray] = []
        for bi, (k, s) in enumerate(zip(self.kinds, self.sizes)):
            idx = [j for j, con in enumerate(problem.constraints) if bi in con.coeffs]
            self.rows.append(np.array(idx, dtype=int))
            if idx:
                self.A.append(np.stack([embed(problem.constraints[j].coeffs[bi], k) for j in idx]))
            else:
                self.A.append(np.zeros((0, s, s)))
        gram = np.zeros((self.m, self.m))
        for rows, A in zip(self.rows, self.A):
            if len(rows):
                gram[np.ix_(rows, rows)] += np.einsum("kij,lij->kl", A, A)
        ev = np.linalg.eigvalsh(gram) if self.m else np.ones(1)
        if ev[0] <= DEPENDENCE_TOL * ev[-1]:
            raise UsageError("constraint matrices are linearly dependent")
        self.gram = scipy.linalg.cho_factor(gram)

    def project_residual(self, dX, target) -> list[np.ndarray]:
        """Least-norm correction of ``dX`` so that ``A(dX) = target`` to working precision."""
        z = scipy.linalg.cho_solve(self.gram, target - self.op(dX))
        return [d + c for d, c in zip(dX, self.adj(z))]

    def op(self, X) -> np.ndarray:
        out = np.zeros(self.m)
        for rows, A, x in zip(self.rows, self.A, X):
            if len(rows):
                out[rows] += np.einsum("kij,ij->k", A, x)
        return out

    def adj(self, y) -> list[np.ndarray]:
        return [np.einsum("k,kij->ij", y[rows], A) if len(rows) else np.zeros_like(c)
                for rows, A, c in zip(self.rows, self.A, self.C)]


def _inner(X, Z) -> float:
    return float(sum(np.sum(x * z) for x, z in zip(X, Z)))


def _norm(X) -> float:
    return float(np.sqrt(sum(np.sum(x * x) for x in X)))


def _sym(a):
    return 0.5 * (a + a.T)


def _max_step(lam: np.ndarray, d: np.ndarray) -> float:
    """Largest alpha with diag(lam) + alpha * d >= 0 (lam > 0)."""
    s = 1.0 / np.sqrt(lam)
    ev = np.linalg.eigvalsh(_sym(s[:, None] * d * s[None, :]))[0]
    return np.inf if ev >= 0 else -1.0 / ev


def _centred(X, Z, n_total: int, theta: float) -> bool:
    """All eigenvalues of ``X Z`` (blockwise) are at least ``theta * mu``."""
    mu = _inner(X, Z) / n_total
    try:
        for x, z in zip(X, Z):
            lx = np.linalg.cholesky(x)
            np.linalg.cholesky(z)
            if np.linalg.eigvalsh(lx.T @ z @ lx)[0] < theta * mu:
                return False
    except np.linalg.LinAlgError:
        return False
    return True


def _nt_scaling(x, z):
    lx = np.linalg.cholesky(x)
    lz = np.linalg.cholesky(z)
    u, s, vt = np.linalg.svd(lz.T @ lx)
    g = lx @ vt.T / np.sqrt(s)[None, :]
    ginv = (np.sqrt(s)[:, None] * vt) @ scipy.linalg.solve_triangular(lx, np.eye(len(s)), lower=True)
    return g, ginv, s


def _initial_point(ip: _Internal):
    X, Z = [], []
    normb = max(1.0, np.max(np.abs(ip.b))) if ip.m else 1.0
    for rows, A, C, s in zip(ip.rows, ip.A, ip.C, ip.sizes):
        anorms = np.sqrt(np.einsum("kij,kij->k", A, A)) if len(rows) else np.zeros(0)
        xi = max(10.0, np.sqrt(s), s * max([(1 + abs(ip.b[r])) / (1 + a) for r, a in zip(rows, anorms)] + [1.0]))
        eta = max(10.0, np.sqrt(s), 1 + max([np.linalg.norm(C)] + list(anorms)))
        X.append(xi * np.eye(s))
        Z.append(eta * np.eye(s))
    del normb
    return X, np.zeros(ip.m), Z


def solve(problem: SdpProblem, options: SolverOptions | None = None) -> SdpSolution:
    """Solve ``problem``; never raises on non-convergence, see ``SdpSolution.status``."""
    opts = options or SolverOptions()
    ip = _Internal(problem)
    X, y, Z = _initial_point(ip)
    n_total = sum(ip.sizes)
    normb = 1.0 + np.linalg.norm(ip.b)
    normC = 1.0 + _norm(ip.C)
    history = []
    status, message, certificate = FAILURE, "iteration limit reached", None
    it = 0
    pobj = dobj = np.nan
    rp = rd = gap = np.inf

    for it in range(1, opts.max_iter + 1):
        AX = ip.op(X)
        ATy = ip.adj(y)
        Rp = ip.b - AX
        Rd = [c - z - a for c, z, a in zip(ip.C, Z, ATy)]
        mu = _inner(X, Z) / n_total
        pobj, dobj = _inner(ip.C, X), float(ip.b @ y)
        rp, rd = np.linalg.norm(Rp) / normb, _norm(Rd) / normC
        gap = _inner(X, Z)
        history.append((rp, rd, gap))
        if rp < opts.feastol and rd < opts.feastol and max(gap, abs(pobj - dobj)) < opts.gaptol * (1 + abs(pobj)):
            status, message = OPTIMAL, "converged"
            break
        # infeasibility rays
        ray_d = _norm([a + z for a, z in zip(ATy, Z)])
        if dobj > 0 and dobj > opts.infeas_ratio * ray_d:
            status, certificate, message = INFEASIBLE, "primal-infeasible", "b^T y unbounded along a dual ray"
            break
        if pobj < 0 and -pobj > opts.infeas_ratio * max(np.linalg.norm(AX), 1e-300):
            status, certificate, message = INFEASIBLE, "dual-infeasible", "<C, X> unbounded along a primal ray"
            break

        try:
            scal = [_nt_scaling(x, z) for x, z in zip(X, Z)]
        except np.linalg.LinAlgError:
            message = "lost positive definiteness of iterates"
            break
        Wm = [g @ g.T for g, _, _ in scal]

        # Schur complement M_ij = <A_i, W A_j W>
        M = np.zeros((ip.m, ip.m))
        for rows, A, w in zip(ip.rows, ip.A, Wm):
            if len(rows):
                WAW = w @ A @ w
                M[np.ix_(rows, rows)] += np.einsum("kij,lij->kl", A, WAW)
        try:
            chol = scipy.linalg.cho_factor(M)
            msolve = lambda v: scipy.linalg.cho_solve(chol, v)  # noqa: E731
        except np.linalg.LinAlgError:
            pinv = np.linalg.pinv(M, rcond=1e-14)
            msolve = lambda v: pinv @ v  # noqa: E731

        WRdW = [w @ r @ w for w, r in zip(Wm, Rd)]

        def direction(Rc_list):
            # Rc: scaled complementarity residual; solve Lyapunov in the diagonal scaled space
            Lc = []
            for (g, _, lam), rc in zip(scal, Rc_list):
                lc = 2 * rc / (lam[:, None] + lam[None, :])
                Lc.append(g @ lc @ g.T)
            rhs = Rp - ip.op(Lc) + ip.op(WRdW)
            dy = msolve(rhs)
            for k in range(opts.refine_steps + 1):
                ATdy = ip.adj(dy)
                dZ = [r - a for r, a in zip(Rd, ATdy)]
                dX = [_sym(lc - w @ dz @ w) for lc, w, dz in zip(Lc, Wm, dZ)]
                res = Rp - ip.op(dX)
                if k == opts.refine_steps or np.linalg.norm(res) <= 1e-15 * (1 + np.linalg.norm(Rp)):
                    break
                dy = dy + msolve(res)
            # whatever the refinement left over is removed by a least-norm correction
            return ip.project_residual(dX, Rp), dy, dZ

        def steps(dX, dZ):
            ap, ad = np.inf, np.inf
            for (g, ginv, lam), dx, dz in zip(scal, dX, dZ):
                ap = min(ap, _max_step(lam, _sym(ginv @ dx @ ginv.T)))
                ad = min(ad, _max_step(lam, _sym(g.T @ dz @ g)))
            return ap, ad

        # predictor
        Rc = [-np.diag(lam**2) for _, _, lam in scal]
        dXa, dya, dZa = direction(Rc)
        ap, ad = steps(dXa, dZa)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = _inner([x + ap * d for x, d in zip(X, dXa)], [z + ad * d for z, d in zip(Z, dZa)]) / n_total
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0

        # corrector
        Rc = []
        for (g, ginv, lam), dx, dz in zip(scal, dXa, dZa):
            dxs = ginv @ dx @ ginv.T
            dzs = g.T @ dz @ g
            Rc.append(sigma * mu * np.eye(len(lam)) - np.diag(lam**2) - _sym(dxs @ dzs))
        dX, dy, dZ = direction(Rc)
        ap, ad = steps(dX, dZ)
        ap, ad = min(1.0, opts.step_fraction * ap), min(1.0, opts.step_fraction * ad)
        # backtrack until the new point stays in a wide neighbourhood of the central path
        for _ in range(40):
            Xn = [_sym(x + ap * d) for x, d in zip(X, dX)]
            Zn = [_sym(z + ad * d) for z, d in zip(Z, dZ)]
            if _centred(Xn, Zn, n_total, opts.neighbourhood):
                break
            ap, ad = 0.8 * ap, 0.8 * ad
        X, Z = Xn, Zn
        y = y + ad * dy
        if not all(np.all(np.isfinite(x)) for x in X) or not np.all(np.isfinite(y)):
            message = "iterates became non-finite"
            break
    else:
        it = opts.max_iter

    if status == INFEASIBLE and certificate == "primal-infeasible":
        scale = float(ip.b @ y)
        y, Z = y / scale, [z / scale for z in Z]
    elif status == INFEASIBLE:
        scale = -_inner(ip.C, X)
        X = [x / scale for x in X]

    log.debug("sdp %s after %d iterations: p=%.10g d=%.10g rp=%.2e rd=%.2e gap=%.2e",
              status, it, pobj, dobj, rp, rd, gap)
    return SdpSolution(
        status=status,
        X=[unembed(x, k) for x, k in zip(X, ip.kinds)],
        y=y,
        Z=[unembed(z, k, coefficient=True) for z, k in zip(Z, ip.kinds)],
        primal_objective=float(pobj),
        dual_objective=float(dobj),
        iterations=it,
        primal_residual=float(rp),
        dual_residual=float(rd),
        gap=float(gap),
        certificate=certificate,
        message=message,
        history=history,
    )


def solve_or_raise(problem: SdpProblem, options: SolverOptions | None = None) -> SdpSolution:
    sol = solve(problem, options)
    if sol.status == FAILURE:
        raise NumericalError(f"SDP solver failed: {sol.message} (rp={sol.primal_residual:.2e}, "
                             f"rd={sol.dual_residual:.2e}, gap={sol.gap:.2e})")
    return sol


# ---------------------------------------------------------------- verification helpers

def dual_slack(problem: SdpProblem, y: np.ndarray) -> list[np.ndarray]:
    """``C - sum_j y_j A_j`` per block, in the blocks' own (real or complex) form."""
    out = []
    for b, block in enumerate(problem.blocks):
        c = problem.objective[b]
        z = np.zeros((block.size, block.size), dtype=complex if block.kind == "hermitian" else float)
        if c is not None:
            z = z + c
        for j, con in enumerate(problem.constraints):
            if b in con.coeffs:
                z = z - y[j] * con.coeffs[b]
        out.append(z)
    return out


def primal_values(problem: SdpProblem, X: Sequence[np.ndarray]) -> np.ndarray:
    """``A(X)`` evaluated with the Hermitian inner product."""
    return np.array([
        sum(np.real(np.vdot(a, X[b])) for b, a in con.coeffs.items()) for con in problem.constraints
    ])


def objective_value(problem: SdpProblem, X: Sequence[np.ndarray]) -> float:
    return float(sum(np.real(np.vdot(c, x)) for c, x in zip(problem.objective, X) if c is not None))


def min_eig_blocks(mats: Sequence[np.ndarray]) -> float:
    return float(min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0] for m in mats))


# ---------------------------------------------------------------- dual problem in primal form

def _svec_basis(block: Block):
    """Orthonormal basis of the block's real matrix space (w.r.t. Re Tr(A^H B))."""
    n = block.size
    basis = []
    for i in range(n):
        for j in range(i, n):
            e = np.zeros((n, n), dtype=complex if block.kind == "hermitian" else float)
            if i == j:
                e[i, i] = 1.0
            else:
                e[i, j] = e[j, i] = 1 / np.sqrt(2)
            basis.append(e)
    if block.kind == "hermitian":
        for i in range(n):
            for j in range(i + 1, n):
                e = np.zeros((n, n), dtype=complex)
                e[i, j], e[j, i] = 1j / np.sqrt(2), -1j / np.sqrt(2)
                basis.append(e)
    return basis


def svec(problem: SdpProblem, mats: Sequence[np.ndarray | None]) -> np.ndarray:
    parts = []
    for block, m in zip(problem.blocks, mats):
        basis = _svec_basis(block)
        if m is None:
            parts.append(np.zeros(len(basis)))
        else:
            parts.append(np.array([np.real(np.vdot(e, m)) for e in basis]))
    return np.concatenate(parts)


def smat(problem: SdpProblem, v: np.ndarray) -> list[np.ndarray]:
    out, pos = [], 0
    for block in problem.blocks:
        basis = _svec_basis(block)
        coeffs = v[pos:pos + len(basis)]
        pos += len(basis)
        out.append(sum(c * e for c, e in zip(coeffs, basis)))
    return out


def dual_as_primal(problem: SdpProblem, rcond: float = 1e-12) -> tuple[SdpProblem, float]:
    """Rewrite the dual ``max b^T y, C - A^T y >= 0`` as a standard-form primal.

    With ``X0`` any solution of ``A(X0) = b`` and ``N`` a basis of the null space
    of ``A``, the dual equals ``<C, X0> - min { <X0, S> : <N_k, S> = <N_k, C>, S >= 0 }``.
    Returns the new problem and the offset ``<C, X0>``.
    """
    rows = np.array([svec(problem, [con.coeffs.get(b) for b in range(len(problem.blocks))])
                     for con in problem.constraints])
    b = np.array([c.rhs for c in problem.constraints])
    x0 = np.linalg.lstsq(rows, b, rcond=None)[0]
    _, s, vt = np.linalg.svd(rows)
    rank = int(np.sum(s > rcond * s[0]))
    null = vt[rank:]
    cvec = svec(problem, problem.objective)
    constraints = []
    for nv in null:
        mats = smat(problem, nv)
        constraints.append(Constraint({bi: m for bi, m in enumerate(mats) if np.max(np.abs(m)) > 0}, float(nv @ cvec)))
    dual = SdpProblem(list(problem.blocks), smat(problem, x0), constraints)
    return dual, float(cvec @ x0)


# ---------------------------------------------------------------- plain-text dump / load

def dump(problem: SdpProblem, fh: TextIO) -> None:
    """Write ``problem`` as text.

    Layout: a header line, ``blocks K`` followed by ``size kind`` lines,
    ``constraints m``, then one section per matrix. A section starts with
    ``objective b`` or ``constraint j b rhs`` and lists the rows of the
    matrix (real part; Hermitian blocks add the rows of the imaginary part).
    """
    fh.write("cvgme-sdp 1\n")
    fh.write(f"blocks {len(problem.blocks)}\n")
    for block in problem.blocks:
        fh.write(f"{block.size} {block.kind}\n")
    fh.write(f"constraints {problem.n_constraints}\n")

    def write_matrix(m, block):
        m = np.asarray(m)
        for row in np.real(m):
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
        if block.kind == "hermitian":
            for row in np.imag(m):
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")

    for b, c in enumerate(problem.objective):
        if c is not None:
            fh.write(f"objective {b}\n")
            write_matrix(c, problem.blocks[b])
    for j, con in enumerate(problem.constraints):
        for b, a in sorted(con.coeffs.items()):
            fh.write(f"constraint {j} {b} {con.rhs!r}\n")
            write_matrix(a, problem.blocks[b])


def load(fh: TextIO) -> SdpProblem:
    lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    pos = 0

    def nxt():
        nonlocal pos
        pos += 1
        return lines[pos - 1]

    if not nxt().startswith("cvgme-sdp"):
        raise UsageError("not an SDP dump")
    k = int(nxt().split()[1])
    blocks = []
    for _ in range(k):
        size, kind = nxt().split()
        blocks.append(Block(int(size), kind))
    m = int(nxt().split()[1])
    objective: list[np.ndarray | None] = [None] * k
    coeffs: list[dict[int, np.ndarray]] = [dict() for _ in range(m)]
    rhs = [0.0] * m

    def read_matrix(block):
        re = np.array([[float(v) for v in nxt().split()] for _ in range(block.size)])
        if block.kind == "hermitian":
            im = np.array([[float(v) for v in nxt().split()] for _ in range(block.size)])
            return re + 1j * im
        return re

    while pos < len(lines):
        head = nxt().split()
        if head[0] == "objective":
            b = int(head[1])
            objective[b] = read_matrix(blocks[b])
        elif head[0] == "constraint":
            j, b = int(head[1]), int(head[2])
            rhs[j] = float(head[3])
            coeffs[j][b] = read_matrix(blocks[b])
        else:
            raise UsageError(f"unexpected section {head[0]!r}")
    return SdpProblem(blocks, objective, [Constraint(c, r) for c, r in zip(coeffs, rhs)])


def dumps(problem: SdpProblem) -> str:
    buf = io.StringIO()
    dump(problem, buf)
    return buf.getvalue()


def loads(text: str) -> SdpProblem:
    return load(io.StringIO(text))
