"""
Operator norms, the Schur contraction certificate, symmetric eigensolver,
Schatten norms, minimal polynomials and matrix-group membership tests.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .conf import get_setting
from .exceptions import (
    InputError,
    NotOrthonormal,
    NotSelfAdjoint,
    Singular,
    TheoremViolation,
)
from .matrix import REAL, Matrix, bareiss_determinant, exact_solve
from .norms import PExponent, Vec, dual_norm, lp_norm
from .scalars import abs_p, as_rational, prime
from .series import poly_eval_in_algebra

logger = logging.getLogger(__name__)


def _matrix(T):
    return T if isinstance(T, Matrix) else Matrix.of(T)


def _rational(T):
    T = _matrix(T).require_square()
    if not T.is_rational:
        raise InputError("This operation needs an exact rational matrix")
    return T


def _abs_sum(values):
    values = list(values)
    if all(isinstance(x, Fraction) for x in values):
        return sum((abs(x) for x in values), Fraction(0))
    return math.fsum(abs(x) for x in values)


def column_sums(T):
    T = _matrix(T)
    return [_abs_sum(c) for c in T.columns()]


def row_sums(T):
    T = _matrix(T)
    return [_abs_sum(r) for r in T.rows]


def opnorm_l1(T):
    """Operator norm for ||.||_1: the largest column absolute sum."""
    return max(column_sums(T))


def opnorm_linf(T):
    """Operator norm for ||.||_inf: the largest row absolute sum."""
    return max(row_sums(T))


def schur_certificate(T):
    """Every row and column absolute sum is at most 1, so ||Tv||_p <= ||v||_p for all p."""
    return opnorm_l1(T) <= 1 and opnorm_linf(T) <= 1


class OpNormEstimate(NamedTuple):
    value: float
    exact: bool


def opnorm_estimate(T, p, trials=64, seed=None):
    """
    Lower bound for the p operator norm by sampling unit vectors: coordinate
    vectors, dual-norm witnesses of the rows, and random directions. Exact
    for p = 1 and p = inf.
    """
    T = _matrix(T)
    p = PExponent.parse(p)
    if p.value == 1:
        return OpNormEstimate(float(opnorm_l1(T)), True)
    if p.is_infinite:
        return OpNormEstimate(float(opnorm_linf(T)), True)
    if trials < 1:
        raise InputError(f"trials must be at least 1, got {trials}")
    seed = get_setting('SEED') if seed is None else seed
    rng = np.random.default_rng(seed)
    A = T.to_numpy()
    n = A.shape[1]
    fp = float(p)
    candidates = list(np.eye(n))
    for r in T.rows:
        witness = dual_norm(Vec.of([float(x) for x in r]), p).witness
        candidates.append(witness.to_numpy())
    candidates.extend(rng.standard_normal((trials, n)))
    best = 0.0
    for v in candidates:
        size = np.linalg.norm(v, ord=fp)
        if size == 0:
            continue
        best = max(best, float(np.linalg.norm(A @ v, ord=fp) / size))
    return OpNormEstimate(best, False)


@dataclass(frozen=True, eq=False)
class EigenDecomp:
    eigenvalues: np.ndarray
    basis: np.ndarray
    residual: float
    sweeps: int = 0

    def to_json(self):
        return {
            'eigenvalues': [float(x) for x in self.eigenvalues],
            'residual': float(self.residual),
        }


def _self_adjoint_array(A, tol):
    M = _matrix(A).require_square().to_numpy()
    gap = float(np.max(np.abs(M - M.T))) if M.size else 0.0
    if gap > tol:
        raise NotSelfAdjoint(f"max |A - A^T| = {gap:.3e} exceeds {tol:.1e}")
    return (M + M.T) / 2


def symmetric_eigen(A, tol=None, max_sweeps=None):
    """Cyclic Jacobi rotations until the off-diagonal Frobenius mass is below tol."""
    tol = get_setting('JACOBI_TOL') if tol is None else tol
    max_sweeps = get_setting('JACOBI_MAX_SWEEPS') if max_sweeps is None else max_sweeps
    M = _self_adjoint_array(A, tol)
    n = M.shape[0]
    a = M.copy()
    V = np.eye(n)
    scale = max(1.0, float(np.linalg.norm(M)))
    sweeps = 0
    while True:
        off = math.sqrt(2 * float(np.sum(np.triu(a, 1) ** 2)))
        if off <= tol * scale:
            break
        if sweeps == max_sweeps:
            logger.warning(f"Jacobi stopped after {max_sweeps} sweeps, off-diagonal mass {off:.3e}")
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * apq)
                t = 1.0 if theta == 0 else math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1 / math.hypot(t, 1.0)
                s = t * c
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * row_p - s * row_q, s * row_p + c * row_q
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * col_p - s * col_q, s * col_p + c * col_q
                vec_p, vec_q = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vec_p - s * vec_q, s * vec_p + c * vec_q
    values = np.diag(a).copy()
    order = np.argsort(-values, kind='stable')
    values, V = values[order], V[:, order]
    residual = max((float(np.linalg.norm(M @ V[:, j] - values[j] * V[:, j])) for j in range(n)), default=0.0)
    logger.debug(f"Jacobi converged in {sweeps} sweeps, residual {residual:.3e}")
    return EigenDecomp(values, V, residual, sweeps)


def schatten_norm(A, p, tol=None):
    """lp norm of the eigenvalues of a self-adjoint A; S_inf is the operator norm."""
    eig = symmetric_eigen(A, tol)
    return float(lp_norm(Vec.of([float(x) for x in eig.eigenvalues]), p))


def hilbert_schmidt_norm(A):
    """Frobenius norm sqrt(sum a_ij^2); equals the S_2 norm for self-adjoint A."""
    return float(np.linalg.norm(_matrix(A).to_numpy()))


def basis_quadratic_lp(A, W, p, tol=1e-10):
    """(sum_l |<A w_l, w_l>|^p)^(1/p) over the orthonormal columns w_l of W."""
    M = _matrix(A).require_square().to_numpy()
    W = W.to_numpy() if isinstance(W, Matrix) else np.asarray(W, dtype=np.float64)
    if W.shape != M.shape:
        raise NotOrthonormal(f"Basis shape {W.shape} does not match {M.shape}")
    gap = float(np.max(np.abs(W.T @ W - np.eye(W.shape[1]))))
    if gap > tol:
        raise NotOrthonormal(f"max |W^T W - I| = {gap:.3e} exceeds {tol:.1e}")
    quadratic = np.einsum('il,ij,jl->l', W, M, W)
    return float(lp_norm(Vec.of([float(x) for x in quadratic]), p))


def random_orthonormal_basis(n, rng):
    """Gram-Schmidt with one re-orthogonalization pass on a random Gaussian matrix."""
    G = rng.standard_normal((n, n))
    Q = np.zeros((n, n))
    for j in range(n):
        v = G[:, j].copy()
        for _ in range(2):
            v -= Q[:, :j] @ (Q[:, :j].T @ v)
        Q[:, j] = v / np.linalg.norm(v)
    return Q


@dataclass(frozen=True)
class MinPoly:
    """Monic polynomial, coefficients in ascending order with coeffs[-1] == 1."""
    coeffs: tuple

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def constant_term(self):
        return self.coeffs[0]

    def relation(self):
        """c_0..c_{l-1} with T^l = c_{l-1} T^{l-1} + ... + c_0 I."""
        return tuple(-c for c in self.coeffs[:-1])

    def annihilates(self, T):
        T = _rational(T)
        return poly_eval_in_algebra(self.coeffs, T) == Matrix.zeros(T.n)

    def to_json(self):
        return [str(c) for c in self.coeffs]

    def __str__(self):
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            monomial = '' if k == 0 else ('t' if k == 1 else f't^{k}')
            size = abs(c)
            body = str(size) if not monomial else (monomial if size == 1 else f"{size}*{monomial}")
            sign = '-' if c < 0 else '+'
            parts.append(f"{sign} {body}")
        text = ' '.join(parts)
        return text[2:] if text.startswith('+ ') else '-' + text[2:]


def minimal_poly(T):
    """Least-degree monic annihilator, by exact elimination on flattened powers I, T, T^2, ..."""
    T = _rational(T)
    power = Matrix.identity(T.n)
    flattened = [power.flatten()]
    for degree in range(1, T.n**2 + 1):
        power = power @ T
        solution = exact_solve(flattened, power.flatten())
        if solution is not None:
            logger.debug(f"Minimal polynomial of degree {degree} for a {T.n}x{T.n} matrix")
            return MinPoly(tuple(-c for c in solution) + (Fraction(1),))
        flattened.append(power.flatten())
    raise TheoremViolation(f"No annihilating polynomial of degree <= {T.n**2}")


def inverse_via_powers(T):
    """T^-1 = -(1/a_0) (a_1 I + a_2 T + ... + T^(l-1)) from the minimal polynomial."""
    T = _rational(T)
    mu = minimal_poly(T)
    a0 = mu.constant_term
    if a0 == 0:
        raise Singular(f"Minimal polynomial {mu} has zero constant term")
    inverse = poly_eval_in_algebra([-c / a0 for c in mu.coeffs[1:]], T)
    if T @ inverse != Matrix.identity(T.n):
        raise TheoremViolation("Polynomial inverse does not satisfy T T^-1 = I")
    return inverse


def determinant(T):
    T = _matrix(T).require_square()
    if T.kind == REAL:
        return float(np.linalg.det(T.to_numpy()))
    return bareiss_determinant(T.rows)


def eigenvalue_check(A, alpha):
    """alpha is an eigenvalue iff A - alpha I is singular."""
    A = _rational(A)
    alpha = as_rational(alpha)
    return determinant(A - Matrix.identity(A.n).scale(alpha)) == 0


def unimodular_check(T):
    """Integer entries and determinant +-1: T and T^-1 both preserve Z^n."""
    T = _rational(T)
    return T.is_integer() and abs(determinant(T)) == 1


def padic_isometry_check(T, p):
    """Entries in Z_p and |det T|_p = 1: T preserves max |v_i|_p."""
    T = _rational(T)
    p = prime(p)
    return all(abs_p(x, p) <= 1 for x in T.flatten()) and abs_p(determinant(T), p) == 1


def padic_max_norm(v, p):
    """N(v) = max |v_i|_p on Q_p^n."""
    p = prime(p)
    return max(abs_p(x, p) for x in v)


def injectivity_margin(T, A):
    """
    1/||T^-1||_1 - ||A||_1. When positive, (c - ||A||)||v|| <= ||(T + A)v||
    shows T + A is injective, hence invertible.
    """
    inverse = inverse_via_powers(T)
    return 1 / opnorm_l1(inverse) - opnorm_l1(_matrix(A))
