import itertools

import numpy as np
import pytest

from cvgme.entanglement_sdp import (
    Feasible,
    Infeasible,
    cm_bisep_feasibility,
    decomposition_error,
    fully_decomposable_witness,
    min_valid_block_trace,
    optimal_cm_witness,
    pair_activation_scan,
    pair_activation_value,
    pair_bipartitions,
    pair_compound_cm,
    qubit_partial_transpose,
    verify_feasible,
    verify_witness,
)
from cvgme.errors import UsageError
from cvgme.gaussian_fock import qubit_projection
from cvgme.symplectic import (
    ModeBipartition,
    direct_sum,
    fs_mixture_cm,
    symplectic_form,
    tripartite_bipartitions,
)

from conftest import random_physical_cm, random_symplectic

CUTS3 = tripartite_bipartitions([[0], [1], [2]])


def random_block_cm(bip, rng):
    """Valid CM that is block diagonal with respect to ``bip``."""
    n = bip.n_modes
    out = np.zeros((2 * n, 2 * n))
    for group in (bip.group_a, bip.group_b):
        g, _ = random_physical_cm(len(group), rng, max_thermal=1.0)
        quads = [2 * m + q for m in group for q in (0, 1)]
        out[np.ix_(quads, quads)] = g
    return out


def random_biseparable_cm(bips, rng):
    w = rng.dirichlet(np.ones(len(bips)))
    return sum(wi * random_block_cm(b, rng) for wi, b in zip(w, bips))


def gme_pure_cm(seed=11):
    s = random_symplectic(3, np.random.default_rng(seed), scale=0.8)
    return s @ s.T


def test_vacuum_is_feasible():
    res = cm_bisep_feasibility(np.eye(6), CUTS3)
    assert isinstance(res, Feasible)
    assert np.allclose(res.weights, 1 / 3, atol=1e-6)
    gap, valid = verify_feasible(np.eye(6), res)
    assert gap >= -1e-7 and valid >= -1e-7


@pytest.mark.parametrize("r", [0.3, 1.0])
def test_fs_mixture_is_feasible(r):
    res = cm_bisep_feasibility(fs_mixture_cm(r), CUTS3)
    assert isinstance(res, Feasible)
    gap, valid = verify_feasible(fs_mixture_cm(r), res)
    assert gap >= -1e-7 and valid >= -1e-7
    assert abs(res.weights.sum() - 1) < 1e-9
    for gi, used in zip(res.component_cms(), res.used):
        assert (gi is None) == (not used)


@pytest.mark.parametrize("seed", [0, 1])
def test_random_biseparable_cm_is_feasible(seed):
    gamma = random_biseparable_cm(CUTS3, np.random.default_rng(seed))
    res = cm_bisep_feasibility(gamma, CUTS3)
    assert isinstance(res, Feasible)
    gap, valid = verify_feasible(gamma, res)
    assert gap >= -1e-7 and valid >= -1e-7


def test_gme_pure_state_gives_separating_witness():
    gamma = gme_pure_cm()
    res = cm_bisep_feasibility(gamma, CUTS3)
    assert isinstance(res, Infeasible)
    w = res.witness.matrix
    assert np.linalg.eigvalsh(w)[0] >= -1e-8
    assert np.sum(w * gamma) < 1 - 1e-7
    assert verify_witness(res.witness) >= -1e-6
    rng = np.random.default_rng(3)
    for _ in range(200):
        assert np.sum(w * random_biseparable_cm(CUTS3, rng)) >= 1 - 1e-6


def test_min_valid_block_trace_is_a_lower_bound():
    rng = np.random.default_rng(4)
    a = rng.normal(size=(6, 6))
    w = a @ a.T + 0.1 * np.eye(6)
    bip = CUTS3[0]
    bound = min_valid_block_trace(w, bip)
    samples = [np.sum(w * random_block_cm(bip, rng)) for _ in range(300)]
    assert min(samples) >= bound - 1e-9
    # the bound is attained by the Williamson-optimal block
    assert min(samples) < 3 * bound


def test_input_validation():
    with pytest.raises(UsageError):
        cm_bisep_feasibility(np.eye(6), [])
    with pytest.raises(UsageError):
        optimal_cm_witness(np.eye(4), CUTS3)
    with pytest.raises(UsageError):
        fully_decomposable_witness(np.eye(4))


@pytest.mark.parametrize("k", [2, 3])
def test_multicopy_blindness(k):
    r = 0.3
    gamma = direct_sum([fs_mixture_cm(r)] * k)
    bips = tripartite_bipartitions([[x + 3 * j for j in range(k)] for x in range(3)])
    res = cm_bisep_feasibility(gamma, bips)
    assert isinstance(res, Feasible)
    gap, valid = verify_feasible(gamma, res)
    assert gap >= -1e-7 and valid >= -1e-7


def test_pair_activation_detects():
    v = pair_activation_value(0.5, 0.5)
    assert v < -0.04
    wit = optimal_cm_witness(pair_compound_cm(0.5, 0.5), pair_bipartitions())
    assert verify_witness(wit) >= -1e-6
    assert wit.detects


def test_pair_scan_ordering_and_jobs():
    r1, r2 = [0.2, 0.5], [0.3, 1.0]
    serial = pair_activation_scan(r1, r2, jobs=1)
    parallel = pair_activation_scan(r1, r2, jobs=2)
    assert [rec.params for rec in serial] == [{"r1": a, "r2": b} for a in r1 for b in r2]
    assert [rec.row() for rec in serial] == [rec.row() for rec in parallel]
    assert all(rec.status == "ok" for rec in serial)


def ghz():
    psi = np.zeros(8)
    psi[0] = psi[7] = 1 / np.sqrt(2)
    return np.outer(psi, psi)


def check_witness_invariants(wit):
    for m in wit.p + wit.q:
        assert np.linalg.eigvalsh(m)[0] >= -1e-8
    assert decomposition_error(wit) < 1e-7
    assert abs(np.trace(wit.w).real - 1) < 1e-8


def test_product_state_not_detected():
    rho = np.zeros((8, 8))
    rho[0, 0] = 1
    wit, opt = fully_decomposable_witness(rho)
    assert opt >= -1e-8
    check_witness_invariants(wit)


def test_ghz_detected():
    wit, opt = fully_decomposable_witness(ghz())
    assert opt < 0
    assert opt == pytest.approx(-1 / 6, abs=1e-6)
    check_witness_invariants(wit)
    assert abs(opt) <= np.max(np.abs(np.linalg.eigvalsh(wit.w)))


def test_qubit_projection_detected_below_threshold():
    wit, opt = fully_decomposable_witness(qubit_projection(0.4))
    assert opt < 0
    check_witness_invariants(wit)
    _, opt_hi = fully_decomposable_witness(qubit_projection(0.7))
    assert opt_hi >= -1e-8


def test_qubit_witness_permutation_invariant():
    rho = qubit_projection(0.5).to_dense()
    base = fully_decomposable_witness(rho)[1]
    rng = np.random.default_rng(0)
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    mixed = 0.8 * ghz() + 0.2 * a @ a.conj().T / np.trace(a @ a.conj().T).real
    mbase = fully_decomposable_witness(mixed)[1]
    for order in itertools.permutations(range(3)):
        perm = lambda m: m.reshape((2,) * 6).transpose(list(order) + [3 + o for o in order]).reshape(8, 8)  # noqa: E731
        assert abs(fully_decomposable_witness(perm(rho))[1] - base) < 1e-7
        assert abs(fully_decomposable_witness(perm(mixed))[1] - mbase) < 1e-7


def test_qubit_partial_transpose():
    rho = ghz()
    pt = qubit_partial_transpose(rho, 0)
    assert pt[0, 7] == 0 and pt[3, 4] == pytest.approx(0.5)
    assert np.allclose(qubit_partial_transpose(pt, 0), rho)


# -------------------------------------------------------------- independent formulations

cp = pytest.importorskip("cvxpy")


def cvxpy_fully_decomposable(rho):
    w = cp.Variable((8, 8), hermitian=True)
    cons = [cp.real(cp.trace(w)) == 1]
    for m in range(3):
        p = cp.Variable((8, 8), hermitian=True)
        q = cp.Variable((8, 8), hermitian=True)
        cons += [p >> 0, q >> 0, w == p + cp.partial_transpose(q, (2, 2, 2), m)]
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(w @ rho))), cons)
    prob.solve(solver=cp.CLARABEL)
    return prob.value


@pytest.mark.parametrize("r", [0.4, 0.57, 0.58])
def test_fully_decomposable_matches_cvxpy(r):
    rho = qubit_projection(r).to_dense()
    assert fully_decomposable_witness(rho)[1] == pytest.approx(cvxpy_fully_decomposable(rho), abs=1e-6)


def cvxpy_cm_value(gamma, bips):
    n = gamma.shape[0]
    omega = symplectic_form(n // 2)
    ks = [cp.Variable((n, n), symmetric=True) for _ in bips]
    ps = cp.Variable(len(bips))
    cons = [gamma - sum(ks) >> 0]
    for k, bip, i in zip(ks, bips, range(len(bips))):
        side = np.zeros(n // 2, dtype=int)
        side[list(bip.group_b)] = 1
        side = np.repeat(side, 2)
        mask = (side[:, None] != side[None, :]).astype(float)
        cons += [cp.multiply(mask, k) == 0, k + 1j * ps[i] * omega >> 0]
    prob = cp.Problem(cp.Maximize(cp.sum(ps)), cons)
    prob.solve(solver=cp.CLARABEL)
    return prob.value


@pytest.mark.parametrize("r1,r2", [(0.5, 0.5), (0.2, 1.8)])
def test_pair_value_matches_cvxpy(r1, r2):
    gamma = pair_compound_cm(r1, r2).matrix
    # strong duality: the witness value equals (max sum p) - 1
    ref = cvxpy_cm_value(gamma, pair_bipartitions()) - 1
    assert pair_activation_value(r1, r2) == pytest.approx(ref, abs=1e-6)
