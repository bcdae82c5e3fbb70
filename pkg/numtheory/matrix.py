"""
Small dense matrices over exact rationals or double-precision reals.

Rational matrices are used for everything that must be exact (determinants,
minimal polynomials, group membership); real matrices go through numpy.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .conf import get_setting
from .exceptions import DimensionMismatch, DimensionTooLarge, NonSquareMatrix, ParseError
from .scalars import as_rational

logger = logging.getLogger(__name__)

RATIONAL = 'rational'
REAL = 'real'


def _coerce_entry(value, kind):
    if kind == REAL:
        return float(value)
    if isinstance(value, np.integer):
        value = int(value)
    return as_rational(value)


@dataclass(frozen=True)
class Matrix:
    rows: tuple
    kind: str = RATIONAL

    @classmethod
    def of(cls, rows, kind=None):
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ParseError("A matrix needs at least one entry")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ParseError("Matrix rows have different lengths")
        limit = get_setting('MAX_DIMENSION')
        if len(rows) > limit or width > limit:
            raise DimensionTooLarge(f"Matrices are limited to {limit}x{limit}")
        if kind is None:
            has_float = any(isinstance(x, (float, np.floating)) for r in rows for x in r)
            kind = REAL if has_float else RATIONAL
        return cls(tuple(tuple(_coerce_entry(x, kind) for x in r) for r in rows), kind)

    @classmethod
    def identity(cls, n, kind=RATIONAL):
        one, zero = (1.0, 0.0) if kind == REAL else (Fraction(1), Fraction(0))
        return cls(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), kind)

    @classmethod
    def zeros(cls, n, kind=RATIONAL):
        zero = 0.0 if kind == REAL else Fraction(0)
        return cls(tuple((zero,) * n for _ in range(n)), kind)

    @classmethod
    def diagonal(cls, values, kind=None):
        values = list(values)
        n = len(values)
        return cls.of([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], kind)

    @classmethod
    def from_numpy(cls, array):
        return cls.of(np.asarray(array, dtype=np.float64).tolist(), REAL)

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    @property
    def n(self):
        return len(self.rows)

    @property
    def is_square(self):
        rows, cols = self.shape
        return rows == cols

    @property
    def is_rational(self):
        return self.kind == RATIONAL

    def require_square(self):
        if not self.is_square:
            rows, cols = self.shape
            raise NonSquareMatrix(f"Expected a square matrix, got {rows}x{cols}")
        return self

    def __getitem__(self, index):
        i, j = index
        return self.rows[i][j]

    def row(self, i):
        return self.rows[i]

    def column(self, j):
        return tuple(r[j] for r in self.rows)

    def columns(self):
        return [self.column(j) for j in range(self.shape[1])]

    def transpose(self):
        return Matrix(tuple(zip(*self.rows)), self.kind)

    def flatten(self):
        return tuple(x for r in self.rows for x in r)

    def trace(self):
        self.require_square()
        return sum(self.rows[i][i] for i in range(self.n))

    def as_real(self):
        if self.kind == REAL:
            return self
        return Matrix(tuple(tuple(float(x) for x in r) for r in self.rows), REAL)

    def to_numpy(self):
        return np.array([[float(x) for x in r] for r in self.rows], dtype=np.float64)

    def is_integer(self):
        if self.kind == REAL:
            return all(float(x).is_integer() for x in self.flatten())
        return all(x.denominator == 1 for x in self.flatten())

    def _combined_kind(self, other):
        return RATIONAL if self.kind == RATIONAL and other.kind == RATIONAL else REAL

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"Shapes {self.shape} and {other.shape} differ")

    def __add__(self, other):
        self._check_same_shape(other)
        kind = self._combined_kind(other)
        return Matrix.of([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], kind)

    def __sub__(self, other):
        self._check_same_shape(other)
        kind = self._combined_kind(other)
        return Matrix.of([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], kind)

    def __neg__(self):
        return Matrix(tuple(tuple(-x for x in r) for r in self.rows), self.kind)

    def scale(self, factor):
        if self.kind == RATIONAL and not isinstance(factor, float):
            factor = as_rational(factor)
            return Matrix(tuple(tuple(factor * x for x in r) for r in self.rows), RATIONAL)
        return Matrix.of([[float(factor) * x for x in r] for r in self.rows], REAL)

    def __matmul__(self, other):
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"Cannot multiply {self.shape} by {other.shape}")
        kind = self._combined_kind(other)
        if kind == REAL:
            return Matrix.from_numpy(self.to_numpy() @ other.to_numpy())
        cols = other.columns()
        return Matrix(
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows),
            RATIONAL,
        )

    def apply(self, vector):
        """T(v) for a sequence of scalars."""
        if len(vector) != self.shape[1]:
            raise DimensionMismatch(f"Vector of length {len(vector)} for a {self.shape} matrix")
        return tuple(sum(a * x for a, x in zip(r, vector)) for r in self.rows)

    def to_json(self):
        if self.kind == REAL:
            return [[float(x) for x in r] for r in self.rows]
        return [[str(x) for x in r] for r in self.rows]

    def __str__(self):
        return '[' + ', '.join('[' + ', '.join(str(x) for x in r) + ']' for r in self.rows) + ']'


def bareiss_determinant(rows):
    """Exact determinant of a rational square matrix by fraction-free elimination."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    # Clear denominators row by row; the scale is divided out at the end.
    scale = Fraction(1)
    m = []
    for r in rows:
        r = [as_rational(x) for x in r]
        lcm = math.lcm(*(x.denominator for x in r))
        scale *= lcm
        m.append([int(x * lcm) for x in r])
    sign = 1
    previous = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) // previous
            m[i][k] = 0
        previous = m[k][k]
    return Fraction(sign * m[n - 1][n - 1]) / scale


def exact_solve(columns, target):
    """
    Solve sum(x_k * columns[k]) = target exactly over the rationals.

    Returns the coefficient list, or None when target is outside the span.
    Columns are assumed linearly independent.
    """
    width = len(columns)
    height = len(target)
    aug = [[columns[k][i] for k in range(width)] + [target[i]] for i in range(height)]
    pivot_row = 0
    pivots = []
    for col in range(width):
        pivot = next((r for r in range(pivot_row, height) if aug[r][col] != 0), None)
        if pivot is None:
            continue
        aug[pivot_row], aug[pivot] = aug[pivot], aug[pivot_row]
        lead = aug[pivot_row][col]
        aug[pivot_row] = [x / lead for x in aug[pivot_row]]
        for r in range(height):
            if r != pivot_row and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[pivot_row])]
        pivots.append(col)
        pivot_row += 1
    if any(aug[r][width] != 0 for r in range(pivot_row, height)):
        return None
    solution = [Fraction(0)] * width
    for r, col in enumerate(pivots):
        solution[col] = aug[r][width]
    return solution


def exact_rank(vectors):
    """Rank of a list of rational vectors."""
    rows = [[as_rational(x) for x in v] for v in vectors]
    rank = 0
    width = len(rows[0]) if rows else 0
    for col in range(width):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(rank + 1, len(rows)):
            if rows[r][col] != 0:
                factor = rows[r][col] / rows[rank][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank
