"""
Z_E and its diagonal embedding into R x Q_p1 x ... x Q_pn, the covering
construction, and integer-point searches in convex regions of R^n.

Region oracles must be pure functions of a point (a tuple of Fractions).
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .conf import get_setting
from .exceptions import (
    AsymmetricRegion,
    DimensionMismatch,
    InputError,
    LengthMismatch,
    NonConvexRegion,
    NotInZE,
    ParseError,
    PreconditionViolation,
    SearchExhausted,
    TheoremViolation,
)
from .matrix import Matrix, bareiss_determinant
from .scalars import abs_p, as_rational, prime

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PrimeSet:
    primes: tuple

    @classmethod
    def of(cls, values):
        if isinstance(values, PrimeSet):
            return values
        primes = sorted({prime(int(p)) for p in values})
        limit = get_setting('MAX_PRIMES')
        if not primes:
            raise InputError("A prime set needs at least one prime")
        if len(primes) > limit:
            raise InputError(f"At most {limit} primes are supported, got {len(primes)}")
        return cls(tuple(primes))

    @classmethod
    def parse(cls, text):
        pieces = text.strip().strip("{}").split(",")
        try:
            values = [int(p) for p in pieces if p.strip()]
        except ValueError as exc:
            raise ParseError(f"Not a prime list: {text!r}") from exc
        return cls.of(values)

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def __contains__(self, p):
        return p in self.primes

    def __str__(self):
        return '{' + ','.join(str(p) for p in self.primes) + '}'


def in_ZE(x, E):
    """True iff the reduced denominator of x has no prime factor outside E."""
    x = as_rational(x)
    d = x.denominator
    for p in PrimeSet.of(E):
        while d % p == 0:
            d //= p
    return d == 1


def _require_ZE(x, E):
    if not in_ZE(x, E):
        raise NotInZE(f"{x} has a denominator prime outside {E}")


@dataclass(frozen=True)
class EmbeddedPoint:
    """x in Z_E seen at the real place and at each p in E."""
    value: Fraction
    primes: PrimeSet

    @property
    def coords(self):
        return (('inf', self.value),) + tuple((p, self.value) for p in self.primes)

    def place_norms(self):
        norms = {'inf': abs(self.value)}
        norms.update({p: abs_p(self.value, p) for p in self.primes})
        return norms

    def distance(self, other):
        return product_distance(self.value, other.value, self.primes)

    def to_json(self):
        return {str(place): str(size) for place, size in self.place_norms().items()}


def embed(x, E):
    E = PrimeSet.of(E)
    x = as_rational(x)
    _require_ZE(x, E)
    return EmbeddedPoint(x, E)


def product_distance(x, y, E):
    """max(|x - y|, |x - y|_p1, ..., |x - y|_pn), exactly."""
    E = PrimeSet.of(E)
    diff = as_rational(x) - as_rational(y)
    return max([abs(diff)] + [abs_p(diff, p) for p in E])


def discreteness_gap(x, y, E):
    """Product distance between two points of Z_E; at least 1 unless x == y."""
    E = PrimeSet.of(E)
    x, y = as_rational(x), as_rational(y)
    _require_ZE(x, E)
    _require_ZE(y, E)
    gap = product_distance(x, y, E)
    if x != y and gap < 1:
        logger.error(f"Distinct points {x}, {y} of Z_E with E={E} at distance {gap}")
        raise TheoremViolation(f"Distance {gap} < 1 between distinct points {x} and {y}")
    return gap


def principal_part(t, p):
    """b in Z[1/p] with 0 <= b < 1 and |t - b|_p <= 1."""
    t = as_rational(t)
    k = 0
    m = t.denominator
    while m % p == 0:
        m //= p
        k += 1
    if k == 0:
        return Fraction(0)
    modulus = p**k
    c = t.numerator * pow(m, -1, modulus) % modulus
    return Fraction(c, modulus)


def covering_point(y, w, E):
    """
    x in Z_E with |x - y| < n and |x - w_i|_{p_i} <= 1 for every i, where n = |E|.

    Each w_i - y splits into a p_i-adic integer plus b_i in Z[1/p_i] cap [0, 1);
    x = y + b_1 + ... + b_n.
    """
    E = PrimeSet.of(E)
    y = as_rational(y)
    _require_ZE(y, E)
    w = [as_rational(v) for v in w]
    if len(w) != len(E):
        raise LengthMismatch(f"Need one target per prime in {E}, got {len(w)}")
    parts = [principal_part(target - y, p) for target, p in zip(w, E)]
    x = y + sum(parts, Fraction(0))
    n = len(E)
    if not abs(x - y) < n or any(abs_p(x - target, p) > 1 for target, p in zip(w, E)):
        raise TheoremViolation(f"Covering bounds fail for x = {x}")
    logger.debug(f"Covering point {x} at archimedean distance {float(abs(x - y)):.6g} < {n}")
    return x


@dataclass(frozen=True, eq=False)
class ConvexRegion:
    """
    Open region of R^n given by a membership oracle, an axis-aligned
    bounding box of (lower, upper) rational pairs and a caller-supplied
    rational lower bound on its volume.
    """
    dim: int
    membership: Callable = field(repr=False)
    bounding_box: tuple = ()
    volume_lb: Fraction = Fraction(0)
    description: dict = field(default_factory=dict, compare=False)

    def __contains__(self, point):
        if len(point) != self.dim:
            raise DimensionMismatch(f"Point of length {len(point)} for a region in R^{self.dim}")
        return bool(self.membership(tuple(point)))

    @classmethod
    def box(cls, halfwidths):
        """Open box |x_i| < h_i."""
        h = [as_rational(x) for x in halfwidths]
        if not h or any(x <= 0 for x in h):
            raise InputError("Box half-widths must be positive")
        volume = math.prod((2 * x for x in h), start=Fraction(1))
        return cls(
            len(h),
            lambda point: all(abs(c) < x for c, x in zip(point, h)),
            tuple((-x, x) for x in h),
            volume,
            {'type': 'box', 'halfwidths': [str(x) for x in h]},
        )

    @classmethod
    def bounds(cls, lower, upper):
        """Open box lower_i < x_i < upper_i, not necessarily symmetric."""
        lower = [as_rational(x) for x in lower]
        upper = [as_rational(x) for x in upper]
        if len(lower) != len(upper) or not lower:
            raise LengthMismatch("Lower and upper bounds must have the same positive length")
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            raise InputError("Each lower bound must be below its upper bound")
        volume = math.prod((hi - lo for lo, hi in zip(lower, upper)), start=Fraction(1))
        return cls(
            len(lower),
            lambda point: all(lo < c < hi for c, lo, hi in zip(point, lower, upper)),
            tuple(zip(lower, upper)),
            volume,
            {'type': 'bounds', 'lower': [str(x) for x in lower], 'upper': [str(x) for x in upper]},
        )

    @classmethod
    def ellipsoid(cls, matrix):
        """Open ellipsoid x^T M x < 1 for a symmetric positive-definite rational M."""
        M = matrix if isinstance(matrix, Matrix) else Matrix.of(matrix)
        M.require_square()
        if not M.is_rational or M != M.transpose():
            raise InputError("Ellipsoid matrices must be rational and symmetric")
        n = M.n
        minors = [bareiss_determinant([r[:k] for r in M.rows[:k]]) for k in range(1, n + 1)]
        if any(d <= 0 for d in minors):
            raise InputError("Ellipsoid matrix is not positive definite")
        rows = M.rows
        unit_ball = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
        exact = unit_ball / math.sqrt(minors[-1])
        # Round down and away from the float error so the bound stays a lower bound.
        volume = Fraction(math.floor(exact * (1 - 1e-12) * 10**9), 10**9)
        inverse = np.linalg.inv(M.to_numpy())
        box = []
        for i in range(n):
            reach = math.sqrt(inverse[i, i])
            top = Fraction(math.ceil(reach * (1 + 1e-9) * 10**9) + 1, 10**9)
            box.append((-top, top))

        def membership(point):
            return sum(rows[i][j] * point[i] * point[j] for i in range(n) for j in range(n)) < 1

        return cls(n, membership, tuple(box), volume, {'type': 'ellipsoid', 'matrix': M.to_json()})

    @classmethod
    def cross_polytope(cls, radius, dim):
        """Open l1 ball sum |x_i| < r, of volume (2r)^n / n!."""
        r = as_rational(radius)
        if r <= 0 or dim < 1:
            raise InputError("Cross-polytope needs a positive radius and dimension")
        return cls(
            dim,
            lambda point: sum(abs(c) for c in point) < r,
            tuple((-r, r) for _ in range(dim)),
            (2 * r) ** dim / math.factorial(dim),
            {'type': 'cross-polytope', 'radius': str(r), 'dim': dim},
        )

    def to_json(self):
        payload = dict(self.description)
        payload['volume_lb'] = str(self.volume_lb)
        return payload

    def _sample(self, rng, resolution=2**20):
        steps = rng.integers(0, resolution + 1, size=self.dim)
        return tuple(lo + (hi - lo) * Fraction(int(k), resolution) for (lo, hi), k in zip(self.bounding_box, steps))

    def spot_check(self, points=None, seed=None):
        """
        Probabilistic symmetry and midpoint-convexity check on random points of
        the bounding box. Raises AsymmetricRegion or NonConvexRegion.
        """
        points = get_setting('SPOT_CHECK_POINTS') if points is None else points
        seed = get_setting('SEED') if seed is None else seed
        rng = np.random.default_rng(seed)
        members = []
        for _ in range(points):
            x = self._sample(rng)
            if x in self:
                if tuple(-c for c in x) not in self:
                    raise AsymmetricRegion(f"{_point_text(x)} is inside but its negative is not")
                members.append(x)
        for x, y in zip(members, members[1:]):
            mid = tuple((a + b) / 2 for a, b in zip(x, y))
            if mid not in self:
                raise NonConvexRegion(f"Midpoint {_point_text(mid)} of two members is outside")
        logger.debug(f"Spot check passed with {len(members)} of {points} samples inside")
        return len(members)


REGION_TYPES = {
    'box': lambda data: ConvexRegion.box(data['halfwidths']),
    'bounds': lambda data: ConvexRegion.bounds(data['lower'], data['upper']),
    'ellipsoid': lambda data: ConvexRegion.ellipsoid(data['matrix']),
    'cross-polytope': lambda data: ConvexRegion.cross_polytope(data['radius'], int(data['dim'])),
}


def register_region(name, factory):
    """Make a named oracle available to region_from_json and the CLI."""
    REGION_TYPES[name] = factory


def region_from_json(data):
    if not isinstance(data, dict) or 'type' not in data:
        raise ParseError("A region needs a 'type' field")
    factory = REGION_TYPES.get(data['type'])
    if factory is None:
        raise ParseError(f"Unknown region type {data['type']!r}; known: {', '.join(sorted(REGION_TYPES))}")
    try:
        region = factory(data)
    except KeyError as exc:
        raise ParseError(f"Region of type {data['type']!r} is missing {exc}") from exc
    if 'volume_lb' in data:
        region = ConvexRegion(region.dim, region.membership, region.bounding_box,
                              as_rational(str(data['volume_lb'])), region.description)
    return region


def _point_text(point):
    return '(' + ','.join(str(c) for c in point) + ')'


def _grid_axis(lo, hi, k):
    """Indices i >= 0 with lo + (i + 1/2)/k < hi."""
    count = math.ceil((hi - lo) * k - Fraction(1, 2))
    return range(max(count, 0))


def pigeonhole_pair(U):
    """
    x != y in U with x - y in Z^n. Samples the grid lo + (i + 1/2)/k of the
    bounding box and buckets points by i mod k, doubling k until two members
    share a bucket.
    """
    if U.volume_lb <= 1:
        raise PreconditionViolation(f"Volume lower bound {U.volume_lb} must exceed 1")
    k = get_setting('PIGEONHOLE_START_CELLS')
    limit = get_setting('PIGEONHOLE_CELL_LIMIT')
    while True:
        axes = [_grid_axis(lo, hi, k) for lo, hi in U.bounding_box]
        cells = math.prod(len(axis) for axis in axes)
        if cells > limit:
            raise SearchExhausted(f"No collision with up to {limit} grid cells; check volume_lb")
        seen = {}
        for index in itertools.product(*axes):
            point = tuple(lo + Fraction(2 * i + 1, 2 * k) for (lo, _), i in zip(U.bounding_box, index))
            if point not in U:
                continue
            bucket = tuple(i % k for i in index)
            if bucket in seen:
                logger.debug(f"Collision at {k} cells per axis after {len(seen)} members")
                return seen[bucket], point
            seen[bucket] = point
        logger.debug(f"No collision at {k} cells per axis, refining")
        k *= 2


def _shell(radius, reach):
    """Integer points with sup norm exactly radius inside the per-axis reach."""
    ranges = [range(-min(radius, r), min(radius, r) + 1) for r in reach]
    points = [c for c in itertools.product(*ranges) if max(abs(x) for x in c) == radius]
    return sorted(points, key=lambda c: (sum(abs(x) for x in c), tuple(-x for x in c)))


def minkowski_point(U, seed=None):
    """A nonzero integer point of a symmetric convex U with volume above 2^n."""
    if U.volume_lb <= 2**U.dim:
        raise PreconditionViolation(f"Volume lower bound {U.volume_lb} must exceed 2^{U.dim}")
    U.spot_check(seed=seed)
    reach = [math.floor(max(abs(lo), abs(hi))) for lo, hi in U.bounding_box]
    for radius in range(1, max(reach, default=0) + 1):
        for point in _shell(radius, reach):
            if tuple(Fraction(x) for x in point) in U:
                logger.debug(f"Nonzero lattice point {point} at sup-norm {radius}")
                return point
    raise SearchExhausted("No nonzero integer point in the bounding box; the region is degenerate")
