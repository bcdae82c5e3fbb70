from fractions import Fraction

import numpy as np
import sympy
from django.test import SimpleTestCase

from numtheory.exceptions import InputError, NotOrthonormal, NotSelfAdjoint, Singular
from numtheory.matrix import Matrix, exact_rank
from numtheory.norms import lp_norm
from numtheory.operators import (
    MinPoly,
    basis_quadratic_lp,
    determinant,
    eigenvalue_check,
    hilbert_schmidt_norm,
    injectivity_margin,
    inverse_via_powers,
    minimal_poly,
    opnorm_estimate,
    opnorm_l1,
    opnorm_linf,
    padic_isometry_check,
    padic_max_norm,
    random_orthonormal_basis,
    schatten_norm,
    schur_certificate,
    symmetric_eigen,
    unimodular_check,
)

SWAP = Matrix.of([[0, 1], [1, 0]])
NILPOTENT = Matrix.of([[0, 1], [0, 0]])
DIAG = Matrix.diagonal([3, -4])


def random_integer_matrix(rng, n, low=-5, high=6):
    return Matrix.of(rng.integers(low, high, size=(n, n)).tolist())


def random_symmetric(rng, n):
    G = rng.standard_normal((n, n))
    return Matrix.from_numpy((G + G.T) / 2)


class ExactOperatorNormTests(SimpleTestCase):

    def test_examples(self):
        T = Matrix.of([[1, 2], [3, 4]])
        self.assertEqual(opnorm_l1(T), 6)
        self.assertEqual(opnorm_linf(T), 7)
        self.assertEqual(opnorm_l1(Matrix.identity(3)), 1)
        self.assertEqual(opnorm_l1(Matrix.zeros(2)), 0)
        self.assertEqual(opnorm_linf(Matrix.of([[0, 0, 1], [1, 0, 0], [0, 1, 0]])), 1)

    def test_schur_certificate(self):
        half = Fraction(1, 2)
        self.assertTrue(schur_certificate(Matrix.of([[half, half], [half, half]])))
        self.assertTrue(schur_certificate(Matrix.identity(2)))
        self.assertFalse(schur_certificate(Matrix.of([[2, 0], [0, 0]])))

    def test_submultiplicative(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = int(rng.integers(1, 5))
            S, T = random_integer_matrix(rng, n), random_integer_matrix(rng, n)
            self.assertLessEqual(opnorm_l1(S @ T), opnorm_l1(S) * opnorm_l1(T))
            self.assertLessEqual(opnorm_linf(S @ T), opnorm_linf(S) * opnorm_linf(T))

    def test_schur_contraction(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            A = rng.standard_normal((n, n))
            A /= max(np.abs(A).sum(axis=0).max(), np.abs(A).sum(axis=1).max())
            T = Matrix.from_numpy(A)
            self.assertTrue(schur_certificate(T))
            for _ in range(50):
                v = rng.standard_normal(n)
                for p in ('3/2', 2, 3, 4):
                    self.assertLessEqual(lp_norm(A @ v, p), lp_norm(v, p) * (1 + 1e-10))

    def test_estimate(self):
        self.assertAlmostEqual(opnorm_estimate(DIAG, 2).value, 4.0)
        self.assertFalse(opnorm_estimate(DIAG, 2).exact)
        self.assertAlmostEqual(opnorm_estimate(DIAG, 3).value, 4.0)
        self.assertAlmostEqual(opnorm_estimate(Matrix.identity(2), 2).value, 1.0)
        self.assertGreaterEqual(opnorm_estimate(NILPOTENT, 2).value, 1.0)
        self.assertEqual(opnorm_estimate(Matrix.of([[1, 2], [3, 4]]), 1), (6.0, True))
        with self.assertRaises(InputError):
            opnorm_estimate(DIAG, 2, trials=0)

    def test_estimate_is_a_lower_bound(self):
        rng = np.random.default_rng(13)
        for seed in range(20):
            A = rng.standard_normal((3, 3))
            estimate = opnorm_estimate(Matrix.from_numpy(A), 2, seed=seed)
            self.assertLessEqual(estimate.value, np.linalg.norm(A, ord=2) * (1 + 1e-12))


class SymmetricEigenTests(SimpleTestCase):

    def test_diagonal(self):
        eig = symmetric_eigen(DIAG)
        np.testing.assert_allclose(eig.eigenvalues, [3, -4])
        np.testing.assert_allclose(np.abs(eig.basis), np.eye(2))
        self.assertEqual(eig.sweeps, 0)

    def test_swap(self):
        eig = symmetric_eigen(SWAP)
        np.testing.assert_allclose(eig.eigenvalues, [1, -1], atol=1e-12)
        self.assertLess(eig.residual, 1e-10)
        self.assertEqual(eig.to_json()['eigenvalues'][0], eig.eigenvalues[0])

    def test_not_self_adjoint(self):
        with self.assertRaises(NotSelfAdjoint):
            symmetric_eigen(NILPOTENT)

    def test_trace_and_frobenius_moments(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            n = int(rng.integers(1, 7))
            A = random_symmetric(rng, n)
            M = A.to_numpy()
            eig = symmetric_eigen(A)
            self.assertAlmostEqual(eig.eigenvalues.sum(), np.trace(M), delta=1e-8 * max(1.0, abs(np.trace(M))))
            frobenius = float(np.sum(M**2))
            self.assertAlmostEqual(float(np.sum(eig.eigenvalues**2)), frobenius, delta=1e-8 * max(1.0, frobenius))
            np.testing.assert_allclose(eig.basis.T @ eig.basis, np.eye(n), atol=1e-10)
            self.assertTrue(np.all(np.diff(eig.eigenvalues) <= 1e-12))


class SchattenTests(SimpleTestCase):

    def test_examples(self):
        self.assertAlmostEqual(schatten_norm(DIAG, 1), 7.0)
        self.assertAlmostEqual(schatten_norm(DIAG, 2), 5.0)
        self.assertAlmostEqual(schatten_norm(DIAG, 'inf'), 4.0)
        self.assertAlmostEqual(schatten_norm(Matrix.identity(2), 3), 2 ** (1 / 3))
        self.assertEqual(schatten_norm(Matrix.zeros(3), 2), 0)
        self.assertAlmostEqual(hilbert_schmidt_norm(DIAG), schatten_norm(DIAG, 2))

    def test_basis_quadratic_examples(self):
        self.assertAlmostEqual(basis_quadratic_lp(DIAG, symmetric_eigen(DIAG).basis, 1), 7.0)
        rng = np.random.default_rng(3)
        W = random_orthonormal_basis(2, rng)
        self.assertAlmostEqual(basis_quadratic_lp(Matrix.identity(2), W, 1), 2.0)
        self.assertEqual(basis_quadratic_lp(SWAP, np.eye(2), 1), 0)
        with self.assertRaises(NotOrthonormal):
            basis_quadratic_lp(SWAP, np.array([[1.0, 1.0], [0.0, 1.0]]), 1)

    def test_basis_quadratic_never_exceeds_schatten(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            n = int(rng.integers(1, 7))
            A = random_symmetric(rng, n)
            for p in (1, 2, 3, 'inf'):
                bound = schatten_norm(A, p)
                for _ in range(10):
                    W = random_orthonormal_basis(n, rng)
                    self.assertLessEqual(basis_quadratic_lp(A, W, p), bound + 1e-8)

    def test_eigenbasis_attains_schatten(self):
        rng = np.random.default_rng(32)
        A = random_symmetric(rng, 5)
        eig = symmetric_eigen(A)
        for p in (1, 2, 3):
            self.assertAlmostEqual(basis_quadratic_lp(A, eig.basis, p), schatten_norm(A, p), places=8)


class MinimalPolynomialTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(str(minimal_poly(Matrix.identity(2))), 't - 1')
        self.assertEqual(str(minimal_poly(NILPOTENT)), 't^2')
        mu = minimal_poly(SWAP)
        self.assertEqual(str(mu), 't^2 - 1')
        self.assertEqual(mu.relation(), (1, 0))
        self.assertEqual(mu.to_json(), ['-1', '0', '1'])

    def test_str(self):
        self.assertEqual(str(MinPoly((Fraction(6), Fraction(-5), Fraction(1)))), 't^2 - 5*t + 6')
        self.assertEqual(str(MinPoly((Fraction(1, 2), Fraction(1)))), 't + 1/2')

    def test_annihilates_with_least_degree(self):
        rng = np.random.default_rng(41)
        for _ in range(60):
            n = int(rng.integers(1, 5))
            T = random_integer_matrix(rng, n, -3, 4)
            mu = minimal_poly(T)
            self.assertTrue(mu.annihilates(T))
            self.assertLessEqual(mu.degree, n)
            powers, P = [], Matrix.identity(n)
            for _ in range(mu.degree):
                powers.append(P.flatten())
                P = P @ T
            self.assertEqual(exact_rank(powers), mu.degree)

    def test_rational_examples(self):
        half, third = Fraction(1, 2), Fraction(1, 3)
        self.assertEqual(minimal_poly(Matrix.diagonal([half, third])).coeffs,
                         (Fraction(1, 6), Fraction(-5, 6), Fraction(1)))
        self.assertEqual(minimal_poly(Matrix.of([[half, 1], [0, half]])).coeffs,
                         (Fraction(1, 4), Fraction(-1), Fraction(1)))
        self.assertEqual(minimal_poly(Matrix.identity(3).scale(Fraction(2, 3))).coeffs,
                         (Fraction(-2, 3), Fraction(1)))

    def test_rational_matrices_divide_the_characteristic_polynomial(self):
        t = sympy.Symbol('t')
        rng = np.random.default_rng(43)
        for _ in range(40):
            n = int(rng.integers(1, 4))
            entries = [[Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5))) for _ in range(n)]
                       for _ in range(n)]
            T = Matrix.of(entries)
            mu = minimal_poly(T)
            self.assertTrue(mu.annihilates(T))
            oracle = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in entries])
            divisor = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(mu.coeffs)], t)
            remainder = sympy.Poly(oracle.charpoly(t).as_expr(), t).rem(divisor)
            self.assertTrue(remainder.is_zero)

    def test_real_matrices_are_rejected(self):
        with self.assertRaises(InputError):
            minimal_poly(Matrix.from_numpy(np.eye(2)))


class InverseTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(inverse_via_powers(SWAP), SWAP)
        self.assertEqual(inverse_via_powers(Matrix.identity(3)), Matrix.identity(3))
        with self.assertRaises(Singular):
            inverse_via_powers(NILPOTENT)

    def test_norm_product_at_least_one(self):
        rng = np.random.default_rng(51)
        checked = 0
        for _ in range(100):
            T = random_integer_matrix(rng, int(rng.integers(1, 5)))
            if determinant(T) == 0:
                with self.assertRaises(Singular):
                    inverse_via_powers(T)
                continue
            inverse = inverse_via_powers(T)
            self.assertEqual(T @ inverse, Matrix.identity(T.n))
            self.assertGreaterEqual(opnorm_l1(T) * opnorm_l1(inverse), 1)
            checked += 1
        self.assertGreater(checked, 50)

    def test_small_perturbations_stay_invertible(self):
        rng = np.random.default_rng(52)
        for _ in range(50):
            n = int(rng.integers(1, 5))
            T = random_integer_matrix(rng, n)
            if determinant(T) == 0:
                continue
            c = 1 / opnorm_l1(inverse_via_powers(T))
            A = Matrix.of([[Fraction(int(x), 100) for x in row] for row in rng.integers(-20, 21, size=(n, n))])
            A = A.scale(c / (2 * max(opnorm_l1(A), Fraction(1, 100))))
            self.assertGreater(injectivity_margin(T, A), 0)
            perturbed = T + A
            self.assertEqual(perturbed @ inverse_via_powers(perturbed), Matrix.identity(n))

    def test_margin(self):
        A = Matrix.of([[Fraction(1, 4), 0], [0, 0]])
        self.assertEqual(injectivity_margin(Matrix.identity(2), A), Fraction(3, 4))


class EigenvalueAndGroupTests(SimpleTestCase):

    def test_eigenvalue_examples(self):
        self.assertTrue(eigenvalue_check(SWAP, 1))
        self.assertFalse(eigenvalue_check(SWAP, 2))
        self.assertTrue(eigenvalue_check(Matrix.identity(2), 1))
        self.assertTrue(eigenvalue_check(SWAP, '-1'))

    def test_eigenvalues_bounded_by_operator_norm(self):
        rng = np.random.default_rng(61)
        for _ in range(100):
            A = random_integer_matrix(rng, 2)
            for alpha in range(-12, 13):
                if eigenvalue_check(A, alpha):
                    self.assertLessEqual(abs(alpha), opnorm_l1(A))

    def test_unimodular(self):
        self.assertTrue(unimodular_check(Matrix.of([[1, 1], [0, 1]])))
        self.assertFalse(unimodular_check(Matrix.of([[2, 0], [0, 1]])))
        self.assertTrue(unimodular_check(Matrix.identity(3)))
        self.assertFalse(unimodular_check(Matrix.of([['1/2', 0], [0, 2]])))

    def test_padic_isometry(self):
        self.assertTrue(padic_isometry_check(Matrix.identity(2), 7))
        self.assertFalse(padic_isometry_check(Matrix.of([[2, 0], [0, 1]]), 2))
        self.assertFalse(padic_isometry_check(Matrix.of([['1/2', 0], [0, 2]]), 2))
        self.assertTrue(padic_isometry_check(Matrix.of([[2, 0], [0, 1]]), 3))

    def test_padic_isometries_preserve_max_norm(self):
        T = Matrix.of([[1, 3], [2, 1]])
        self.assertTrue(padic_isometry_check(T, 3))
        rng = np.random.default_rng(62)
        for _ in range(200):
            v = [Fraction(int(rng.integers(-500, 501)), int(rng.integers(1, 50))) for _ in range(2)]
            self.assertEqual(padic_max_norm(T.apply(v), 3), padic_max_norm(v, 3))


class ExactEliminationTests(SimpleTestCase):

    def test_determinant_and_rank_match_sympy(self):
        rng = np.random.default_rng(81)
        for _ in range(100):
            n = int(rng.integers(1, 6))
            entries = [[Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))) for _ in range(n)]
                       for _ in range(n)]
            if n > 1 and rng.integers(0, 3) == 0:
                entries[-1] = [2 * x for x in entries[0]]
            T = Matrix.of(entries)
            oracle = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in entries])
            self.assertEqual(determinant(T), Fraction(str(oracle.det())))
            self.assertEqual(exact_rank(T.rows), oracle.rank())
