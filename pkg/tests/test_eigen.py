import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from ultraacv.eigen import (
    TridiagonalForm, eig_tridiagonal, eigvals_sym, jacobi_eigvals, tridiagonalize,
)
from ultraacv.errors import ContractError, NonConvergenceError, NumericalDegeneracyError


def rand_sym(rng, n):
    M = rng.standard_normal((n, n))
    return (M + M.T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


class TestJacobiOracle:
    def test_against_lapack(self, rng):
        # sanity of the oracle itself, using an unrelated implementation
        for n in (1, 2, 5, 12):
            M = rand_sym(rng, n)
            assert np.allclose(jacobi_eigvals(M), np.linalg.eigvalsh(M), atol=1e-12)

    def test_zero_matrix(self):
        assert np.array_equal(jacobi_eigvals(np.zeros((3, 3))), np.zeros(3))


class TestTridiagonalize:
    def test_already_tridiagonal(self):
        d = np.array([1.0, -2.0, 3.0, 0.5])
        e = np.array([0.7, -1.1, 2.0])
        t = tridiagonalize(np.diag(d) + np.diag(e, 1) + np.diag(e, -1))
        assert np.allclose(t.diag, d, atol=1e-15)
        assert np.allclose(np.abs(t.offdiag), np.abs(e), atol=1e-15)

    def test_trace_invariant(self, rng):
        for n in (3, 10, 40):
            M = rand_sym(rng, n)
            t = tridiagonalize(M)
            assert t.diag.sum() == pytest.approx(np.trace(M), rel=1e-10, abs=1e-12)

    def test_spectrum_preserved(self, rng):
        M = rand_sym(rng, 6)
        assert np.max(np.abs(jacobi_eigvals(tridiagonalize(M).to_dense()) - jacobi_eigvals(M))) < 1e-10

    def test_asymmetric_rejected(self):
        with pytest.raises(ContractError):
            tridiagonalize(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_nonsquare_rejected(self):
        with pytest.raises(ContractError):
            tridiagonalize(np.ones((2, 3)))

    def test_small_asymmetry_tolerated(self, rng):
        M = rand_sym(rng, 5)
        M[0, 1] += 1e-12
        tridiagonalize(M)


class TestEigTridiagonal:
    def test_decoupled(self):
        assert np.array_equal(eig_tridiagonal(TridiagonalForm(np.array([2.0, 2.0]), np.array([0.0]))),
                              [2.0, 2.0])

    def test_two_by_two(self):
        vals = eig_tridiagonal(TridiagonalForm(np.zeros(2), np.array([1.0])))
        assert np.allclose(vals, [-1.0, 1.0], atol=1e-15)

    def test_random_50(self, rng):
        d = rng.standard_normal(50)
        e = rng.standard_normal(49)
        t = TridiagonalForm(d, e)
        assert np.max(np.abs(eig_tridiagonal(t) - jacobi_eigvals(t.to_dense()))) < 1e-10

    def test_ascending(self, rng):
        vals = eig_tridiagonal(TridiagonalForm(rng.standard_normal(30), rng.standard_normal(29)))
        assert np.all(np.diff(vals) >= 0)

    def test_empty_and_single(self):
        assert eig_tridiagonal(TridiagonalForm(np.array([3.0]), np.array([]))).tolist() == [3.0]

    def test_iteration_cap_surfaces(self, monkeypatch):
        import ultraacv.eigen as eig
        monkeypatch.setattr(eig, "MAX_QL_ITER", 0)
        with pytest.raises(NonConvergenceError):
            eig.eig_tridiagonal(TridiagonalForm(np.zeros(2), np.array([1.0])))


class TestEigvalsSym:
    def test_diagonal(self):
        assert np.array_equal(eigvals_sym(np.diag([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0])

    def test_swap(self):
        assert np.allclose(eigvals_sym(np.array([[0.0, 1.0], [1.0, 0.0]])), [-1, 1], atol=1e-15)

    def test_random_5_vs_jacobi(self, rng):
        M = rand_sym(rng, 5)
        assert np.max(np.abs(eigvals_sym(M) - jacobi_eigvals(M))) < 1e-10

    def test_oracle_equivalence_100(self, rng):
        worst = 0.0
        for _ in range(100):
            M = rand_sym(rng, int(rng.integers(1, 13)))
            worst = max(worst, np.max(np.abs(eigvals_sym(M) - jacobi_eigvals(M))))
        assert worst < 1e-10

    @pytest.mark.parametrize("n", [8, 64, 256])
    def test_trace_frobenius(self, rng, n):
        M = rand_sym(rng, n)
        lam = eigvals_sym(M)
        scale = np.abs(np.diag(M)).sum()
        assert abs(lam.sum() - np.trace(M)) <= 1e-9 * scale
        assert np.sum(lam**2) == pytest.approx(np.sum(M * M), rel=1e-9)

    @pytest.mark.parametrize("c", [2.0, 1e-3])
    def test_scaling(self, rng, c):
        M = rand_sym(rng, 15)
        base = eigvals_sym(M)
        assert np.max(np.abs(eigvals_sym(c * M) - c * base)) <= 1e-10 * c * np.max(np.abs(base))

    def test_permutation(self, rng):
        M = rand_sym(rng, 15)
        perm = rng.permutation(15)
        assert np.allclose(eigvals_sym(M[np.ix_(perm, perm)]), eigvals_sym(M), atol=1e-12)

    def test_psd_clamp(self, rng):
        X = rng.standard_normal((6, 3))
        A = X @ X.T  # rank 3: three eigenvalues are round-off around 0
        vals = eigvals_sym(A, psd=True)
        assert np.all(vals >= 0)
        assert np.sum(vals < 1e-10) == 3

    def test_psd_violation(self):
        with pytest.raises(NumericalDegeneracyError):
            eigvals_sym(np.diag([1.0, -0.5]), psd=True)

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, (7, 7), elements=st.floats(-10, 10)))
    def test_property_vs_jacobi(self, M):
        M = (M + M.T) / 2
        ql = eigvals_sym(M)
        ref = jacobi_eigvals(M)
        assert np.max(np.abs(ql - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref)))
