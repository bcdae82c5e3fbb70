"""
lp norms on n-tuples, comparison constants, Hölder/Young, dual norms with
extremal witnesses and a randomized seminorm-axiom checker.

p = 1 and p = infinity are computed exactly for rational vectors; other
exponents go through numpy in double precision.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from .conf import get_setting
from .exceptions import DimensionMismatch, InputError, InvalidExponent, OrderViolation, ParseError
from .scalars import as_rational

logger = logging.getLogger(__name__)

INF = math.inf

# Relative slack for floating-point axiom checks.
AXIOM_TOL = 1e-9


@dataclass(frozen=True)
class PExponent:
    value: object

    @classmethod
    def parse(cls, raw):
        if isinstance(raw, PExponent):
            return raw
        if isinstance(raw, str):
            text = raw.strip().lower()
            if text in ('inf', 'infinity', '∞', 'oo'):
                return cls(INF)
            try:
                value = Fraction(text)
            except (ValueError, ZeroDivisionError) as exc:
                raise InvalidExponent(f"Exponent must be a rational >= 1 or inf, got {raw!r}") from exc
        elif isinstance(raw, float):
            if math.isinf(raw) and raw > 0:
                return cls(INF)
            if not math.isfinite(raw):
                raise InvalidExponent(f"Exponent must be finite or +inf, got {raw!r}")
            value = Fraction(repr(raw))
        elif isinstance(raw, (int, Fraction)) and not isinstance(raw, bool):
            value = Fraction(raw)
        else:
            raise InvalidExponent(f"Unsupported exponent {raw!r}")
        if value < 1:
            raise InvalidExponent(f"Exponent must be at least 1, got {value}")
        return cls(value)

    @property
    def is_infinite(self):
        return self.value == INF

    @property
    def reciprocal(self):
        """1/p, with 1/inf = 0."""
        return Fraction(0) if self.is_infinite else 1 / self.value

    @property
    def conjugate(self):
        if self.is_infinite:
            return PExponent(Fraction(1))
        if self.value == 1:
            return PExponent(INF)
        return PExponent(self.value / (self.value - 1))

    def __float__(self):
        return INF if self.is_infinite else float(self.value)

    def __str__(self):
        return 'inf' if self.is_infinite else str(self.value)


P1 = PExponent(Fraction(1))
P2 = PExponent(Fraction(2))
PINF = PExponent(INF)


@dataclass(frozen=True)
class Vec:
    entries: tuple
    kind: str = 'rational'

    @classmethod
    def of(cls, values):
        if isinstance(values, Vec):
            return values
        values = list(values)
        if not values:
            raise ParseError("A vector needs at least one entry")
        if any(isinstance(x, (float, np.floating)) for x in values):
            return cls(tuple(float(x) for x in values), 'real')
        return cls(tuple(as_rational(int(x) if isinstance(x, np.integer) else x) for x in values), 'rational')

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, j):
        return self.entries[j]

    @property
    def is_rational(self):
        return self.kind == 'rational'

    def to_numpy(self):
        return np.array([float(x) for x in self.entries], dtype=np.float64)

    def scaled(self, alpha):
        if self.is_rational and not isinstance(alpha, float):
            return Vec(tuple(as_rational(alpha) * x for x in self.entries), 'rational')
        return Vec(tuple(float(alpha) * float(x) for x in self.entries), 'real')

    def to_json(self):
        if self.is_rational:
            return [str(x) for x in self.entries]
        return list(self.entries)

    def __str__(self):
        return '(' + ','.join(str(x) for x in self.entries) + ')'


def _sign(x):
    return (x > 0) - (x < 0)


def lp_norm(v, p):
    v = Vec.of(v)
    p = PExponent.parse(p)
    if p.value == 1:
        if v.is_rational:
            return sum((abs(x) for x in v), Fraction(0))
        return math.fsum(abs(x) for x in v)
    if p.is_infinite:
        return max(abs(x) for x in v)
    return float(np.linalg.norm(v.to_numpy(), ord=float(p)))


def lp_norm_power(v, p):
    """sum |v_j|^p exactly, for integer p and rational v (e.g. squared l2 norms)."""
    v = Vec.of(v)
    p = PExponent.parse(p)
    if p.is_infinite or p.value.denominator != 1 or not v.is_rational:
        raise InvalidExponent("Exact power sums need an integer exponent and a rational vector")
    k = p.value.numerator
    return sum((abs(x) ** k for x in v), Fraction(0))


class Comparison(NamedTuple):
    constant: float
    reverse_constant: int = 1


def comparison_constant(n, p, q):
    """
    ||v||_p <= n^(1/p - 1/q) ||v||_q for p <= q; the reverse direction
    ||v||_q <= ||v||_p holds with constant 1.
    """
    p = PExponent.parse(p)
    q = PExponent.parse(q)
    if float(p) > float(q):
        raise OrderViolation(f"Need p <= q, got p = {p}, q = {q}")
    if n < 1:
        raise DimensionMismatch(f"Dimension must be positive, got {n}")
    exponent = p.reciprocal - q.reciprocal
    if exponent == 0:
        return Comparison(1.0)
    return Comparison(float(n) ** float(exponent))


class HolderResult(NamedTuple):
    pairing: object
    bound: object
    young_holds: Optional[bool]
    equality: bool


def holder_pairing(a, b, p):
    """(sum a_j b_j, ||a||_p ||b||_q) plus the termwise Young inequality check."""
    a = Vec.of(a)
    b = Vec.of(b)
    p = PExponent.parse(p)
    if len(a) != len(b):
        raise DimensionMismatch(f"Vectors have dimensions {len(a)} and {len(b)}")
    q = p.conjugate
    if a.is_rational and b.is_rational:
        pairing = sum((x * y for x, y in zip(a, b)), Fraction(0))
    else:
        pairing = math.fsum(float(x) * float(y) for x, y in zip(a, b))
    bound = lp_norm(a, p) * lp_norm(b, q)
    young = None
    if not p.is_infinite and p.value != 1:
        fp, fq = float(p), float(q)
        young = all(
            abs(float(x)) * abs(float(y))
            <= (abs(float(x)) ** fp / fp + abs(float(y)) ** fq / fq) * (1 + AXIOM_TOL)
            for x, y in zip(a, b)
        )
    slack = float(bound) - abs(float(pairing))
    if slack < -AXIOM_TOL * max(1.0, float(bound)):
        logger.error(f"Hölder bound violated: |{pairing}| > {bound}")
    equality = abs(slack) <= 1e-12 * max(1.0, float(bound))
    return HolderResult(pairing, bound, young, equality)


class DualNorm(NamedTuple):
    value: object
    witness: Vec
    degenerate: bool = False


def dual_norm(w, p):
    """
    Dual norm of v -> sum v_j w_j under ||.||_p, which is ||w||_q, together
    with a vector of unit p-norm achieving it.
    """
    w = Vec.of(w)
    p = PExponent.parse(p)
    n = len(w)
    zero = Fraction(0) if w.is_rational else 0.0
    one = Fraction(1) if w.is_rational else 1.0
    if all(x == 0 for x in w):
        witness = Vec(tuple(one if j == 0 else zero for j in range(n)), w.kind)
        return DualNorm(zero, witness, degenerate=True)
    q = p.conjugate
    if p.value == 1:
        k = max(range(n), key=lambda j: (abs(w[j]), -j))
        witness = Vec(tuple(one * _sign(w[k]) if j == k else zero for j in range(n)), w.kind)
        return DualNorm(lp_norm(w, PINF), witness)
    if p.is_infinite:
        witness = Vec(tuple(one * _sign(x) for x in w), w.kind)
        return DualNorm(lp_norm(w, P1), witness)
    fq = float(q)
    arr = w.to_numpy()
    # powers are taken of |w_j| / max|w_j| <= 1 so large q cannot overflow
    scale = float(np.max(np.abs(arr)))
    unit = arr / scale
    unit_norm = float(np.linalg.norm(unit, ord=fq))
    raw = np.sign(unit) * np.abs(unit) ** (fq - 1)
    witness = raw / unit_norm ** (fq - 1)
    return DualNorm(scale * unit_norm, Vec(tuple(float(x) for x in witness), 'real'))


@dataclass(frozen=True)
class AxiomCheck:
    axiom: str
    status: str
    trials: int
    counterexample: Optional[tuple] = None

    @property
    def passed(self):
        return self.status == 'pass'

    def to_json(self):
        data = {'axiom': self.axiom, 'status': self.status, 'trials': self.trials}
        if self.counterexample is not None:
            data['counterexample'] = [
                [str(x) for x in v] if isinstance(v, tuple) else str(v) for v in self.counterexample
            ]
        return data


@dataclass(frozen=True)
class SeminormReport:
    checks: tuple

    def get(self, axiom):
        return next(c for c in self.checks if c.axiom == axiom)

    @property
    def is_seminorm(self):
        return all(c.passed for c in self.checks if c.axiom != 'definiteness')

    @property
    def is_norm(self):
        return all(c.passed for c in self.checks)

    def to_json(self):
        return [c.to_json() for c in self.checks]


def _random_vector(rng, dim):
    return tuple(
        Fraction(int(rng.integers(-50, 51)), int(rng.integers(1, 21))) for _ in range(dim)
    )


def _close_enough(lhs, rhs):
    return lhs <= rhs + AXIOM_TOL * (1.0 + abs(rhs))


def _definiteness_probe(oracle, dim, depth):
    """
    Search integer vectors supported on two coordinates with growing second
    entry. A zero value on a nonzero vector, or a ratio N(v)/||v||_inf that
    keeps shrinking as the grid is refined, marks the oracle as degenerate.
    """
    coarse_limit = max(1, depth // 8)
    coarse = fine = INF
    witness = None
    axes = range(min(dim, 3))
    for i, j in itertools.combinations(axes, 2):
        for q in range(1, depth + 1):
            for m in range(-2 * q, 2 * q + 1):
                v = [Fraction(0)] * dim
                v[i], v[j] = Fraction(m), Fraction(q)
                v = tuple(v)
                ratio = float(oracle(v)) / float(max(abs(x) for x in v))
                if ratio == 0:
                    return 0, 0, v
                if ratio < fine:
                    fine, witness = ratio, v
                if q <= coarse_limit and ratio < coarse:
                    coarse = ratio
    if dim == 1:
        v = (Fraction(1),)
        value = float(oracle(v))
        return value, value, (None if value > 0 else v)
    return coarse, fine, witness


def seminorm_axioms_check(oracle, dim, trials=200, seed=None, depth=200):
    """
    Randomized falsification of homogeneity, the triangle inequality and
    midpoint convexity of the unit ball, plus a definiteness probe. Each axiom
    reports the first counterexample found or its pass count.
    """
    if dim < 1:
        raise InputError(f"Dimension must be at least 1, got {dim}")
    if trials < 1:
        raise InputError(f"Need at least one trial, got {trials}")
    seed = get_setting('SEED') if seed is None else seed
    rng = np.random.default_rng(seed)
    checks = []

    failure = None
    for _ in range(trials):
        x = _random_vector(rng, dim)
        alpha = Fraction(int(rng.integers(-30, 31)), int(rng.integers(1, 11)))
        lhs = float(oracle(tuple(alpha * c for c in x)))
        rhs = float(abs(alpha)) * float(oracle(x))
        if abs(lhs - rhs) > AXIOM_TOL * (1.0 + abs(rhs)):
            failure = (x, alpha)
            break
    checks.append(AxiomCheck('homogeneity', 'fail' if failure else 'pass', trials, failure))

    failure = None
    basis = [tuple(Fraction(int(k == i)) for k in range(dim)) for i in range(dim)]
    pairs = [(e, e) for e in basis] + [(e, f) for e, f in itertools.combinations(basis, 2)]
    pairs += [(_random_vector(rng, dim), _random_vector(rng, dim)) for _ in range(trials)]
    for x, y in pairs:
        total = tuple(a + b for a, b in zip(x, y))
        if not _close_enough(float(oracle(total)), float(oracle(x)) + float(oracle(y))):
            failure = (x, y)
            break
    checks.append(AxiomCheck('triangle', 'fail' if failure else 'pass', len(pairs), failure))

    failure = None
    members = []
    for _ in range(2 * trials):
        x = _random_vector(rng, dim)
        size = float(oracle(x))
        if size > 0:
            u = tuple(c * Fraction(1 / size) for c in x)
            if float(oracle(u)) <= 1 + AXIOM_TOL:
                members.append(u)
    for u, w in zip(members[::2], members[1::2]):
        mid = tuple((a + b) / 2 for a, b in zip(u, w))
        if float(oracle(mid)) > 1 + AXIOM_TOL:
            failure = (u, w)
            break
    checks.append(AxiomCheck('convexity', 'fail' if failure else 'pass', len(members) // 2, failure))

    coarse, fine, witness = _definiteness_probe(oracle, dim, depth)
    degenerate = fine == 0 or fine < coarse / 10
    logger.debug(f"Definiteness probe: coarse ratio {coarse:.3e}, fine ratio {fine:.3e}")
    checks.append(AxiomCheck(
        'definiteness',
        'fail' if degenerate else 'pass',
        depth,
        (witness,) if degenerate else None,
    ))
    return SeminormReport(tuple(checks))
