import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cvgme.errors import DegenerateFilterError, DomainError, UsageError
from cvgme.fock import (
    FockDensityMatrix,
    LocalFilter,
    fock_projector,
    fs_state_density,
    is_psd,
    local_project,
    min_eigenvalue,
    moments_from_density,
    partial_trace,
    partial_transpose,
    permute_modes,
    tensor,
    thermal_density,
    tmsv_density,
)
from cvgme.fs_analytics import two_qubit_reduction_vector
from cvgme.symplectic import fs_mixture_cm, tmsv_cm

dims_st = st.lists(st.integers(1, 3), min_size=1, max_size=3)


def random_density(dims, rng, rank=2):
    d = int(np.prod(dims))
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return FockDensityMatrix.from_dense(dims, rho / np.trace(rho))


def dense_partial_transpose(rho, dims, modes):
    n = len(dims)
    t = rho.reshape(tuple(dims) * 2)
    axes = list(range(2 * n))
    for k in modes:
        axes[k], axes[n + k] = axes[n + k], axes[k]
    return t.transpose(axes).reshape(rho.shape)


def dense_partial_trace(rho, dims, keep):
    n = len(dims)
    t = rho.reshape(tuple(dims) * 2)
    letters = "abcdefgh"
    bra = [letters[k] for k in range(n)]
    ket = [letters[k] if k not in keep else letters[k].upper() for k in range(n)]
    out = "".join(letters[k] for k in keep) + "".join(letters[k].upper() for k in keep)
    d = int(np.prod([dims[k] for k in keep]))
    return np.einsum("".join(bra) + "".join(ket) + "->" + out, t).reshape(d, d)


def test_index_layout_is_mode_major():
    rho = fock_projector([1, 2], [2, 3])
    assert rho.index([1, 2]) == 1 * 3 + 2
    assert rho.element([1, 2], [1, 2]) == 1
    assert rho.trace() == 1


def test_constructor_validation():
    with pytest.raises(UsageError):
        FockDensityMatrix.from_dense([2, 2], np.eye(3))
    with pytest.raises(UsageError):
        LocalFilter(((1, 0),))
    with pytest.raises(UsageError):
        LocalFilter(((),))
    with pytest.raises(DomainError):
        tmsv_density(1.0, 5)
    with pytest.raises(UsageError):
        fs_state_density(4, 0.3, 4)


def test_tmsv_density_entries_and_deficit():
    lam, d = 0.5, 6
    rho = tmsv_density(lam, d)
    assert rho.element([2, 2], [3, 3]) == pytest.approx((1 - lam**2) * lam**5)
    assert rho.element([2, 1], [2, 1]) == 0
    assert rho.deficit == pytest.approx(lam ** (2 * d))
    assert rho.trace().real + rho.deficit == pytest.approx(1.0)


def test_vacuum_limit():
    rho = tmsv_density(0.0, 4)
    assert rho.matrix.nnz == 1
    assert rho.element([0, 0], [0, 0]) == 1


@given(dims_st, st.integers(0, 2**32 - 1), st.data())
def test_partial_transpose_matches_dense(dims, seed, data):
    rho = random_density(dims, np.random.default_rng(seed))
    modes = data.draw(st.sets(st.integers(0, len(dims) - 1)))
    got = partial_transpose(rho, modes).to_dense()
    assert np.allclose(got, dense_partial_transpose(rho.to_dense(), dims, sorted(modes)), atol=1e-14)


@given(st.lists(st.integers(1, 3), min_size=2, max_size=3), st.integers(0, 2**32 - 1), st.data())
def test_partial_trace_matches_dense(dims, seed, data):
    rho = random_density(dims, np.random.default_rng(seed))
    keep = sorted(data.draw(st.sets(st.integers(0, len(dims) - 1), min_size=1)))
    red = partial_trace(rho, keep)
    assert np.allclose(red.to_dense(), dense_partial_trace(rho.to_dense(), dims, keep), atol=1e-14)
    assert red.hermiticity_error() < 1e-12
    assert is_psd(red)


@given(st.integers(0, 2**32 - 1))
def test_partial_trace_of_tensor_recovers_factor(seed):
    rng = np.random.default_rng(seed)
    a, b = random_density([2, 3], rng), random_density([2], rng)
    b = FockDensityMatrix(b.dims, b.matrix * 0.7)
    ab = tensor(a, b)
    assert is_psd(ab) and ab.hermiticity_error() < 1e-12
    assert np.max(np.abs(partial_trace(ab, [0, 1]).to_dense() - 0.7 * a.to_dense())) < 1e-12
    assert np.max(np.abs(partial_trace(ab, [2]).to_dense() - b.to_dense())) < 1e-12


@given(st.integers(0, 2**32 - 1))
def test_local_project_preserves_state_properties(seed):
    rho = random_density([3, 3], np.random.default_rng(seed), rank=3)
    out = local_project(rho, LocalFilter.uniform([0, 2], 2))
    assert out.dims == (2, 2)
    assert out.trace().real == pytest.approx(1.0)
    assert out.hermiticity_error() < 1e-12
    assert min_eigenvalue(out) >= -1e-10


def test_local_project_errors():
    rho = fock_projector([1, 1], [2, 2])
    with pytest.raises(DegenerateFilterError):
        local_project(rho, LocalFilter.uniform([0], 2))
    with pytest.raises(UsageError):
        local_project(rho, LocalFilter.uniform([0, 2], 2))
    with pytest.raises(UsageError):
        local_project(rho, LocalFilter.uniform([0], 3))


@pytest.mark.parametrize("lam", [0.2, 0.5, 0.7])
def test_fs_state_permutation_invariance(lam):
    rho = fs_state_density(1, lam, 5)
    dense = rho.to_dense()
    for order in itertools.permutations(range(3)):
        assert np.max(np.abs(permute_modes(rho, order).to_dense() - dense)) < 1e-12


def test_fs_state_structure():
    lam, d = 0.4, 6
    rho = fs_state_density(0, lam, d)
    assert rho.trace().real == pytest.approx((1 - lam ** (2 * d)), abs=1e-12)
    assert rho.element([0, 0, 0], [0, 0, 0]) == pytest.approx(1 - lam**2)
    assert rho.element([1, 1, 0], [2, 2, 0]) == pytest.approx((1 - lam**2) * lam**3 / 3)
    assert is_psd(rho)


@pytest.mark.parametrize("k,kp", [(0, 1), (1, 3), (2, 0)])
def test_two_qubit_reduction_is_entangled(k, kp):
    for lam in (0.1, 0.5, 0.9):
        psi = two_qubit_reduction_vector(lam, k, kp).reshape(2, 2)
        s = np.linalg.svd(psi, compute_uv=False)
        assert np.sum(s > 1e-12) == 2
        # the filtered TMSV gives the same vector
        filt = LocalFilter(((min(k, kp), max(k, kp)),) * 2)
        rho = local_project(tmsv_density(lam, 5), filt).to_dense()
        v = psi.ravel() if k < kp else psi.ravel()[::-1]
        assert np.allclose(rho, np.outer(v, v), atol=1e-12)


def test_thermal_moments():
    lam = 0.6
    mom = moments_from_density(thermal_density(lam, 60))
    nbar = lam**2 / (1 - lam**2)
    assert np.allclose(mom.cm.matrix, (2 * nbar + 1) * np.eye(2), atol=1e-8)
    assert np.allclose(mom.mean, 0)


def test_tmsv_moments_match_symplectic_constructor():
    r = 0.5
    mom = moments_from_density(tmsv_density(np.tanh(r), 25))
    assert np.max(np.abs(mom.cm.matrix - tmsv_cm(r).matrix)) < 1e-6
    assert not mom.truncation_warning


def test_coherent_like_state_has_mean():
    psi = np.array([1.0, 1.0]) / np.sqrt(2)
    rho = FockDensityMatrix.from_dense([2], np.outer(psi, psi))
    mom = moments_from_density(rho)
    assert mom.mean[0] == pytest.approx(1 / np.sqrt(2))
    assert mom.mean[1] == pytest.approx(0.0)


def test_fs_state_has_fs_mixture_moments():
    r = 0.5
    mom = moments_from_density(fs_state_density(0, np.tanh(r), 25))
    assert np.max(np.abs(mom.cm.matrix - fs_mixture_cm(r).matrix)) < 1e-5


def test_truncation_warning():
    assert moments_from_density(tmsv_density(0.9, 5)).truncation_warning
