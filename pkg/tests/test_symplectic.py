import numpy as np
import pytest
import scipy.optimize
from hypothesis import given, strategies as st

from cvgme.errors import InvalidCovarianceError, UsageError
from cvgme.symplectic import (
    CovarianceMatrix,
    ModeBipartition,
    direct_sum,
    fs_mixture_cm,
    fs_mixture_decomposition,
    full_inseparability_threshold,
    multi_copy_gap,
    nu_tilde_closed_form,
    partial_transpose_cm,
    ppt_min_symplectic_eigenvalue,
    ppt_verdict,
    ps_mixture_cm,
    ps_mixture_decomposition,
    purity,
    squeezed_cm,
    symplectic_eigenvalues,
    symplectic_form,
    tmsv_cm,
    tripartite_bipartitions,
    vacuum_cm,
)

from conftest import random_physical_cm, sqrt_route_symplectic_eigenvalues

A_BC = ModeBipartition((0,), (1, 2))


def test_symplectic_form_identities():
    om = symplectic_form(3)
    assert np.allclose(om @ om, -np.eye(6))
    assert np.allclose(om.T, -om)
    assert om[0, 1] == 1 and om[1, 0] == -1


def test_bipartition_validation():
    with pytest.raises(UsageError):
        ModeBipartition((), (0, 1))
    with pytest.raises(UsageError):
        ModeBipartition((0, 1), (1, 2))
    with pytest.raises(UsageError):
        ModeBipartition((0,), (2,))
    with pytest.raises(UsageError):
        ModeBipartition.from_group([3], 3)
    bip = ModeBipartition.from_group([2, 0], 3)
    assert bip.group_a == (0, 2) and bip.group_b == (1,)
    assert bip.is_one_vs_rest()
    assert not ModeBipartition((0, 1), (2, 3)).is_one_vs_rest()


def test_tripartite_bipartitions_on_copies():
    bips = tripartite_bipartitions([[0, 3], [1, 4], [2, 5]])
    assert [b.group_a for b in bips] == [(0, 3), (1, 4), (2, 5)]
    with pytest.raises(UsageError):
        tripartite_bipartitions([[0], [1]])


def test_covariance_rejects_bad_input():
    with pytest.raises(InvalidCovarianceError):
        CovarianceMatrix(np.eye(3))
    with pytest.raises(InvalidCovarianceError):
        CovarianceMatrix(np.array([[1.0, 0.5], [0.0, 1.0]]))
    bad = np.eye(2)
    bad[0, 0] = np.nan
    with pytest.raises(InvalidCovarianceError):
        CovarianceMatrix(bad)


def test_vacuum_and_tmsv():
    assert np.array_equal(vacuum_cm(2).matrix, np.eye(4))
    assert np.allclose(tmsv_cm(0.0).matrix, np.eye(4))
    t = tmsv_cm(0.7).matrix
    c, s = np.cosh(1.4), np.sinh(1.4)
    assert np.allclose(np.diag(t), c)
    # x-x correlation positive, p-p negative
    assert np.isclose(t[0, 2], s) and np.isclose(t[1, 3], -s)


def test_symplectic_eigenvalues_vacuum_thermal():
    assert np.allclose(symplectic_eigenvalues(np.eye(6)), 1.0)
    assert np.allclose(symplectic_eigenvalues(np.diag([3.0, 3.0, 2.0, 2.0])), [2.0, 3.0])


@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_symplectic_eigenvalues_match_independent_route(n, seed):
    rng = np.random.default_rng(seed)
    gamma, nu = random_physical_cm(n, rng)
    ours = symplectic_eigenvalues(gamma)
    assert np.allclose(ours, nu, rtol=1e-8)
    assert np.allclose(ours, sqrt_route_symplectic_eigenvalues(gamma), rtol=1e-8)


@given(st.floats(-3, 3))
def test_pure_constructors_have_unit_spectrum(r):
    for cm in (tmsv_cm(r), squeezed_cm(r)):
        assert abs(np.linalg.det(cm.matrix) - 1.0) < 1e-9 * np.linalg.norm(cm.matrix) ** 2
        assert np.allclose(symplectic_eigenvalues(cm), 1.0, atol=1e-7)
        assert abs(purity(cm) - 1) < 1e-6


@given(st.floats(0, 2.5))
def test_mixtures_are_physical(r):
    for cm in (fs_mixture_cm(r), ps_mixture_cm(r)):
        m = cm.matrix
        assert np.allclose(m, m.T)
        assert np.linalg.eigvalsh(m)[0] > 0
        assert cm.is_physical()


@given(st.floats(0, 2.0))
def test_fs_mixture_cyclic_symmetry(r):
    m = fs_mixture_cm(r).matrix
    perm = np.array([2, 3, 4, 5, 0, 1])
    assert np.allclose(m[np.ix_(perm, perm)], m, atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.lists(st.integers(0, 2), max_size=3))
def test_partial_transpose_involution(seed, modes):
    gamma, _ = random_physical_cm(3, np.random.default_rng(seed))
    twice = partial_transpose_cm(partial_transpose_cm(gamma, modes), modes)
    assert np.array_equal(twice.matrix, gamma)


@given(st.integers(0, 2**32 - 1))
def test_partial_transpose_commutes_with_direct_sum(seed):
    rng = np.random.default_rng(seed)
    a, _ = random_physical_cm(2, rng)
    b, _ = random_physical_cm(1, rng)
    lhs = partial_transpose_cm(direct_sum([CovarianceMatrix(a), CovarianceMatrix(b)]), [1, 2])
    rhs = direct_sum([partial_transpose_cm(a, [1]), partial_transpose_cm(b, [0])])
    assert np.array_equal(lhs.matrix, rhs.matrix)


@given(st.integers(0, 2**32 - 1))
def test_direct_sum_spectrum_is_union(seed):
    rng = np.random.default_rng(seed)
    a, nu_a = random_physical_cm(2, rng)
    b, nu_b = random_physical_cm(1, rng)
    got = symplectic_eigenvalues(direct_sum([CovarianceMatrix(a), CovarianceMatrix(b)]))
    assert np.allclose(got, np.sort(np.concatenate([nu_a, nu_b])), atol=1e-10 * max(1, got.max()))


def test_ppt_tmsv_and_product():
    r = 0.4
    nu = ppt_min_symplectic_eigenvalue(tmsv_cm(r), ModeBipartition((0,), (1,)))
    assert np.isclose(nu, np.exp(-2 * r))
    assert ppt_verdict(tmsv_cm(r), ModeBipartition((0,), (1,))) == "entangled"
    assert ppt_verdict(np.eye(4), ModeBipartition((0,), (1,))) == "separable"
    assert ppt_verdict(np.eye(8), ModeBipartition((0, 1), (2, 3))) == "inconclusive"
    with pytest.raises(UsageError):
        ppt_min_symplectic_eigenvalue(np.eye(4), A_BC)


def test_nu_tilde_closed_form_agreement():
    for r in np.linspace(0, 2, 201):
        cm = fs_mixture_cm(r)
        vals = [ppt_min_symplectic_eigenvalue(cm, ModeBipartition.from_group([m], 3)) for m in range(3)]
        assert max(abs(v - nu_tilde_closed_form(r)) for v in vals) < 1e-9


def test_full_inseparability_threshold_root():
    r1 = full_inseparability_threshold()
    assert abs(r1 - 1.242747) < 1e-4
    root = scipy.optimize.brentq(lambda r: nu_tilde_closed_form(r) - 1, 1.0, 1.5, xtol=1e-14)
    assert abs(root - r1) < 1e-10
    assert nu_tilde_closed_form(r1 - 0.01) < 1 < nu_tilde_closed_form(r1 + 0.01)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_multi_copy_gap_block_invariance(k):
    for r in (0.1, 0.6, 1.3):
        dec = fs_mixture_decomposition(r)
        one = multi_copy_gap(fs_mixture_cm(r), dec, 1)
        assert multi_copy_gap(fs_mixture_cm(r), dec, k) == pytest.approx(one, abs=1e-12)
        assert one >= -1e-12


def test_multi_copy_gap_examples():
    delta = np.diag([1.0, 2.0, 3.0, 4.0])
    assert multi_copy_gap(delta + np.eye(4), [(1.0, np.eye(4))], 1) == pytest.approx(1.0)
    assert multi_copy_gap(ps_mixture_cm(0.8), ps_mixture_decomposition(0.8), 3) >= -1e-12
    with pytest.raises(UsageError):
        multi_copy_gap(np.eye(6), [(0.5, np.eye(6))])
    with pytest.raises(UsageError):
        multi_copy_gap(np.eye(6), [(1.0, fs_mixture_cm(0.3), A_BC)])


def test_decomposition_components_are_block_diagonal_and_valid():
    for w, cm, bip in fs_mixture_decomposition(0.9):
        assert w == pytest.approx(1 / 3)
        assert cm.is_physical()
        m = cm.matrix
        a = [2 * bip.group_a[0], 2 * bip.group_a[0] + 1]
        b = [i for i in range(6) if i not in a]
        assert np.all(m[np.ix_(a, b)] == 0)
