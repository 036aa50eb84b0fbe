import math

import numpy as np
import pytest

from momentbounds.engine import (
    BoundResult,
    MomentMatrix,
    QuantityVector,
    Tolerances,
    _eigen_factor,
    factor_psd,
    positive_eigenvalue_bound,
    symmetric_eigenvalues,
)
from momentbounds.errors import (
    DimensionMismatch,
    NotPositiveSemiDefinite,
    ParameterOutOfRange,
)


def random_psd(rng, n, rank=None):
    a = rng.standard_normal((rank or n, n))
    return MomentMatrix(a.T @ a + 1e-3 * np.eye(n))


class TestMomentMatrix:
    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            MomentMatrix(np.ones((2, 3)))

    def test_rejects_asymmetric(self):
        with pytest.raises(ParameterOutOfRange):
            MomentMatrix([[1.0, 0.1], [np.nextafter(0.1, 1.0), 1.0]])

    def test_rejects_non_positive_diagonal(self):
        with pytest.raises(ParameterOutOfRange):
            MomentMatrix([[1.0, 0.0], [0.0, 0.0]])

    def test_entries_are_frozen(self):
        q = MomentMatrix(np.eye(2))
        with pytest.raises(ValueError):
            q.entries[0, 0] = 2.0


class TestQuantityVector:
    def test_mixed_sign_flag(self):
        assert QuantityVector([1.0, -2.0]).is_mixed_sign
        assert not QuantityVector([1.0, 2.0]).is_mixed_sign

    def test_rejects_non_finite(self):
        with pytest.raises(ParameterOutOfRange):
            QuantityVector([1.0, math.inf])


class TestFactorPsd:
    def test_identity(self):
        fac = factor_psd(MomentMatrix(np.eye(2)))
        assert fac.rank == 2
        assert np.allclose(fac.matrix, np.eye(2))

    def test_vanilla_pair_matches_triangular_factor(self):
        # f = 1, nu = 0.04: the triangular factor has rows (1, 0) and
        # (sqrt(0.96), 0.2) in asset-major layout.
        q = MomentMatrix([[1.0, math.sqrt(0.96)], [math.sqrt(0.96), 1.0]])
        fac = factor_psd(q)
        assert fac.method == "pivoted_cholesky"
        assert fac.rank == 2
        lower = fac.matrix.T
        expected = np.array([[1.0, 0.0], [math.sqrt(0.96), 0.2]])
        assert np.max(np.abs(np.abs(lower) - expected)) < 1e-14
        assert np.max(np.abs(fac.matrix.T @ fac.matrix - q.entries)) <= 1e-12

    def test_rank_one_symmetric_case(self):
        fac = factor_psd(MomentMatrix([[1.0, 1.0], [1.0, 1.0]]))
        assert fac.rank == 1
        assert fac.matrix.shape == (1, 2)
        assert np.allclose(np.abs(fac.matrix), [[1.0, 1.0]])

    def test_reconstruction_on_random_psd(self):
        rng = np.random.default_rng(7)
        for n in (2, 3, 5, 8):
            q = random_psd(rng, n)
            fac = factor_psd(q)
            err = np.max(np.abs(fac.matrix.T @ fac.matrix - q.entries))
            assert err <= 1e-10 * np.max(np.diag(q.entries))

    def test_rank_deficient_detection(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((2, 5))
        q = a.T @ a
        q = MomentMatrix(q + np.diag(np.full(5, 1e-14)))
        fac = factor_psd(q)
        assert fac.rank == 2
        err = np.max(np.abs(fac.matrix.T @ fac.matrix - q.entries))
        assert err <= 1e-10 * np.max(np.diag(q.entries))

    def test_indefinite_raises(self):
        q = MomentMatrix([[1.0, 2.0], [2.0, 1.0]])  # eigenvalues 3 and -1
        with pytest.raises(NotPositiveSemiDefinite):
            factor_psd(q)

    def test_eigen_fallback_clips_tolerable_negatives(self):
        # Slightly indefinite within psd tolerance: the eigen path clips and
        # reports the clipped mass.
        u = np.array([1.0, 1.0]) / math.sqrt(2.0)
        v = np.array([1.0, -1.0]) / math.sqrt(2.0)
        q = MomentMatrix(np.outer(u, u) - 5e-11 * np.outer(v, v))
        fac = _eigen_factor(q, Tolerances())
        assert fac.method == "eigen"
        assert fac.rank == 1
        assert 0.0 < fac.clipped_negative_mass < 1e-10
        err = np.max(np.abs(fac.matrix.T @ fac.matrix - q.entries))
        assert err <= 1e-9


class TestSymmetricEigenvalues:
    def test_diagonal_case(self):
        assert np.allclose(symmetric_eigenvalues(np.diag([3.0, -1.0, 0.0])), [3.0, 0.0, -1.0])

    def test_exchange_matrix(self):
        assert np.allclose(symmetric_eigenvalues([[0.0, 1.0], [1.0, 0.0]]), [1.0, -1.0])

    def test_vanilla_p_matrix_roots(self):
        # P for f = 1, k = 0.8, nu = 0.04; eigenvalues are the roots of
        # p^2 - 0.2 p - 0.032 = 0.
        f, k, nu = 1.0, 0.8, 0.04
        p = np.array(
            [
                [f * nu, f * math.sqrt(nu * (1.0 - nu))],
                [f * math.sqrt(nu * (1.0 - nu)), f * (1.0 - nu) - k],
            ]
        )
        disc = math.sqrt(0.2**2 + 4.0 * 0.032)
        expected = [(0.2 + disc) / 2.0, (0.2 - disc) / 2.0]
        assert np.allclose(symmetric_eigenvalues(p), expected, atol=1e-14)

    def test_rejects_asymmetric(self):
        with pytest.raises(ParameterOutOfRange):
            symmetric_eigenvalues([[0.0, 1.0], [0.5, 0.0]])


class TestPositiveEigenvalueBound:
    def test_identity_case(self):
        result = positive_eigenvalue_bound(MomentMatrix(np.eye(2)), QuantityVector([1.0, -1.0]))
        assert result.bound == pytest.approx(1.0, abs=1e-15)
        assert result.positive_count == 1
        assert np.allclose(result.eigenvalues, [1.0, -1.0])

    def test_atm_case(self):
        f = k = 1.0
        nu = 0.04
        s = math.sqrt(f * (1.0 - nu))
        q = MomentMatrix([[f, s], [s, 1.0]])
        result = positive_eigenvalue_bound(q, QuantityVector([1.0, -k]))
        assert result.bound == pytest.approx(math.sqrt(f * k * nu), rel=1e-14)

    def test_single_asset(self):
        q = MomentMatrix([[2.0]])
        assert positive_eigenvalue_bound(q, QuantityVector([3.0])).bound == pytest.approx(6.0)
        assert positive_eigenvalue_bound(q, QuantityVector([-3.0])).bound == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            positive_eigenvalue_bound(MomentMatrix(np.eye(2)), QuantityVector([1.0]))

    def test_result_reports_diagnostics(self):
        rng = np.random.default_rng(3)
        q = random_psd(rng, 4)
        result = positive_eigenvalue_bound(q, QuantityVector(rng.standard_normal(4)))
        assert isinstance(result, BoundResult)
        assert result.rank_q == 4
        assert result.factorization == "pivoted_cholesky"
        assert result.eigenvalues.size == 4
        assert result.bound >= 0.0


class TestEngineProperties:
    def test_scaling(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            q = random_psd(rng, 4)
            lam = QuantityVector(rng.standard_normal(4))
            base = positive_eigenvalue_bound(q, lam).bound
            for c in (0.25, 3.0, 117.0):
                scaled = positive_eigenvalue_bound(MomentMatrix(c * q.entries), lam).bound
                assert scaled == pytest.approx(c * base, rel=1e-12)

    def test_factorization_independence(self):
        # Bound through the pivoted triangular factor vs the eigen square
        # root of Q: identical to 1e-10 relative.
        rng = np.random.default_rng(23)
        tol = Tolerances()
        for _ in range(25):
            q = random_psd(rng, 5)
            lam = rng.standard_normal(5)
            via_cholesky = positive_eigenvalue_bound(q, QuantityVector(lam), tol).bound
            eig_fac = _eigen_factor(q, tol)
            p = (eig_fac.matrix * lam[None, :]) @ eig_fac.matrix.T
            eigs = symmetric_eigenvalues(0.5 * (p + p.T), tol)
            via_eigen = float(np.sum(eigs[eigs > tol.eig * np.max(np.abs(eigs))]))
            scale = max(1.0, abs(via_cholesky))
            assert abs(via_cholesky - via_eigen) <= 1e-10 * scale

    def test_schur_horn_domination_and_attainment(self):
        # Random orthonormal bases never beat the bound; the eigenbasis of P
        # attains it exactly.
        rng = np.random.default_rng(29)
        q = random_psd(rng, 4)
        lam = rng.standard_normal(4)
        result = positive_eigenvalue_bound(q, QuantityVector(lam))
        fac = factor_psd(q)
        p = (fac.matrix * lam[None, :]) @ fac.matrix.T
        p = 0.5 * (p + p.T)
        z = np.linalg.qr(rng.standard_normal((2000, 4, 4)))[0]
        diag = np.einsum("bji,jk,bki->bi", z, p, z)
        values = np.sum(np.clip(diag, 0.0, None), axis=1)
        assert np.all(values <= result.bound + 1e-12)
        _, vectors = np.linalg.eigh(p)
        attained = float(np.sum(np.clip(np.diag(vectors.T @ p @ vectors), 0.0, None)))
        assert attained == pytest.approx(result.bound, abs=1e-12)

    def test_monotone_in_quantities(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            q = random_psd(rng, 4)
            lam = rng.standard_normal(4)
            base = positive_eigenvalue_bound(q, QuantityVector(lam)).bound
            bumped = lam.copy()
            bumped[rng.integers(0, 4)] += abs(rng.standard_normal())
            higher = positive_eigenvalue_bound(q, QuantityVector(bumped)).bound
            assert higher >= base - 1e-12

    def test_dominates_exercise_extremes(self):
        rng = np.random.default_rng(37)
        for _ in range(20):
            q = random_psd(rng, 5)
            lam = rng.standard_normal(5)
            result = positive_eigenvalue_bound(q, QuantityVector(lam))
            full_exercise = float(np.dot(lam, np.diag(q.entries)))
            assert result.bound >= max(0.0, full_exercise) - 1e-12
