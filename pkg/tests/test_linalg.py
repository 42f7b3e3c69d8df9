import numpy as np
import pytest

from fixedspec.generate import crandn, deficient_bordered_triple, random_bordered_triple
from fixedspec.linalg import (
    RankTolerance,
    assemble_bordered,
    bordered_rank,
    eigenvalues,
    gain_equivalence_check,
    numeric_rank,
    rank_factorize,
    rank_restoring_gains,
)


def random_unitary(rng, n):
    Q, _ = np.linalg.qr(crandn(rng, (n, n)))
    return Q


class TestRankTolerance:
    def test_defaults(self):
        assert RankTolerance().relative == 1e-9

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.5, 2.0])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            RankTolerance(bad)

    def test_coerce(self):
        assert RankTolerance.coerce(None).relative == 1e-9
        assert RankTolerance.coerce(1e-6).relative == 1e-6
        tol = RankTolerance(1e-8)
        assert RankTolerance.coerce(tol) is tol


class TestNumericRank:
    def test_zero_matrix(self):
        assert numeric_rank(np.zeros((3, 3))) == 0

    def test_identity(self):
        assert numeric_rank(np.eye(4)) == 4

    def test_constructed_singular_values(self):
        # build 5x3 with known singular values (1, 1e-14, 0); only the first
        # survives the 1e-9 relative cutoff
        rng = np.random.default_rng(3)
        U, _ = np.linalg.qr(crandn(rng, (5, 3)))
        V = random_unitary(rng, 3)
        M = U @ np.diag([1.0, 1e-14, 0.0]) @ V
        assert numeric_rank(M, 1e-9) == 1

    def test_empty_dimensions(self):
        assert numeric_rank(np.zeros((0, 4))) == 0
        assert numeric_rank(np.zeros((4, 0))) == 0

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            numeric_rank(np.array([[np.nan, 0.0], [0.0, 1.0]]))
        with pytest.raises(ValueError):
            numeric_rank(np.array([[np.inf, 0.0], [0.0, 1.0]]))

    def test_unitary_invariance(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n1, n2 = rng.integers(1, 7, 2)
            r = int(rng.integers(0, min(n1, n2) + 1))
            M = crandn(rng, (n1, r)) @ crandn(rng, (r, n2))
            U = random_unitary(rng, n1)
            V = random_unitary(rng, n2)
            assert numeric_rank(U @ M @ V) == numeric_rank(M) == r


class TestEigenvalues:
    def test_diagonal(self):
        np.testing.assert_allclose(eigenvalues(np.diag([1.0, 2.0])), [1.0, 2.0])

    def test_rotation(self):
        vals = eigenvalues([[0.0, 1.0], [-1.0, 0.0]])
        np.testing.assert_allclose(vals, [1j, -1j], atol=1e-12)

    def test_sorted_real_then_imag(self):
        vals = eigenvalues(np.diag([2.0, -1.0, 2.0 + 0.0j, 0.5]))
        keys = [(v.real, v.imag) for v in vals]
        assert keys == sorted(keys)

    def test_residual_oracle(self):
        # each reported eigenvalue must nearly annihilate lam*I - A
        rng = np.random.default_rng(5)
        A = crandn(rng, (5, 5))
        for lam in eigenvalues(A):
            resid = np.linalg.svd(lam * np.eye(5) - A, compute_uv=False)[-1]
            assert resid < 1e-10

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            eigenvalues(np.zeros((2, 3)))


class TestRankFactorize:
    def test_zero_matrix(self):
        fact = rank_factorize(np.zeros((3, 4)))
        assert fact.rank == 0
        assert fact.W.shape == (3, 0)
        assert fact.R.shape == (0, 4)

    def test_identity(self):
        fact = rank_factorize(np.eye(3))
        assert fact.rank == 3
        np.testing.assert_allclose(fact.W @ fact.R, np.eye(3), atol=1e-12)

    def test_known_factors(self):
        rng = np.random.default_rng(7)
        M = crandn(rng, (4, 2)) @ crandn(rng, (2, 5))
        fact = rank_factorize(M)
        assert fact.rank == 2
        assert np.linalg.norm(fact.W @ fact.R - M) < 1e-9

    def test_factor_independence(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            n1, n2 = rng.integers(1, 6, 2)
            r = int(rng.integers(0, min(n1, n2) + 1))
            M = crandn(rng, (n1, r)) @ crandn(rng, (r, n2))
            fact = rank_factorize(M)
            assert fact.rank == numeric_rank(M) == r
            assert numeric_rank(fact.W) == r
            assert numeric_rank(fact.R) == r


class TestBorderedRank:
    def test_zero_blocks(self):
        A = np.zeros((2, 2))
        assert bordered_rank(A, np.zeros((2, 0)), np.zeros((0, 2))) == 0

    def test_antidiagonal_identities(self):
        A = np.zeros((2, 2))
        assert bordered_rank(A, np.eye(2), np.eye(2)) == 4

    def test_matches_explicit_assembly(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            A, B, C = random_bordered_triple(rng, n)
            block = np.block([
                [A, B],
                [C, np.zeros((C.shape[0], B.shape[1]))],
            ])
            assert bordered_rank(A, B, C) == numeric_rank(block)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            bordered_rank(np.eye(2), np.zeros((3, 1)), np.zeros((0, 2)))
        with pytest.raises(ValueError):
            bordered_rank(np.eye(2), np.zeros((2, 1)), np.zeros((1, 3)))

    def test_assemble_layout(self):
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        B = np.array([[5.0], [6.0]])
        C = np.array([[7.0, 8.0]])
        out = assemble_bordered(A, B, C)
        np.testing.assert_allclose(
            out, [[1, 2, 5], [3, 4, 6], [7, 8, 0]])


class TestRankRestoringGains:
    def test_full_rank_needs_nothing(self):
        E, K = rank_restoring_gains(np.eye(2), np.zeros((2, 0)), np.zeros((0, 2)))
        assert E.shape == (0, 2)
        assert K.shape == (2, 0)

    def test_scalar_single_channel(self):
        E, K = rank_restoring_gains(np.zeros((1, 1)), np.eye(1), np.zeros((0, 1)))
        assert numeric_rank(np.zeros((1, 1)) + np.eye(1) @ E) == 1

    def test_deficient_returns_none(self):
        rng = np.random.default_rng(17)
        A, B, C = deficient_bordered_triple(rng, 3, rank=1)
        assert rank_restoring_gains(A, B, C) is None

    def test_postcondition_on_random_triples(self):
        rng = np.random.default_rng(19)
        for _ in range(30):
            n = int(rng.integers(1, 7))
            A, B, C = random_bordered_triple(rng, n)
            if bordered_rank(A, B, C) < n:
                continue
            E, K = rank_restoring_gains(A, B, C)
            assert E.shape == (B.shape[1], n)
            assert K.shape == (n, C.shape[0])
            assert numeric_rank(A + B @ E + K @ C) == n


class TestGainEquivalence:
    def test_trivial_cases(self):
        assert gain_equivalence_check(np.zeros((2, 2)), np.eye(2),
                                        np.zeros((0, 2)))
        assert gain_equivalence_check(np.eye(3), np.zeros((3, 2)),
                                        np.zeros((1, 3)))

    def test_property_run(self):
        rng = np.random.default_rng(23)
        for i in range(50):
            n = int(rng.integers(1, 6))
            if rng.random() < 0.5:
                A, B, C = deficient_bordered_triple(rng, n)
            else:
                A, B, C = random_bordered_triple(rng, n)
            assert gain_equivalence_check(A, B, C, trials=5, rng_seed=i)
