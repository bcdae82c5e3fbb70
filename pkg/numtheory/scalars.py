"""
Exact rationals, complex identities, p-adic valuations and truncated p-adic numbers.

Rationals are ``fractions.Fraction`` (always reduced, positive denominator).
A ``PAdic`` stores p^v * sum(d_i p^i) known modulo p^(v+N), digits least
significant first. Zero is the exact value with valuation ``INFINITY`` and no
digits.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .conf import get_setting
from .exceptions import (
    BudgetExceeded,
    DivisionByZero,
    DomainError,
    InputError,
    LengthMismatch,
    NonDecreasingRho,
    NonFiniteInput,
    NonPrimeModulus,
    ParseError,
    PrecisionExhausted,
    PrimeMismatch,
)

logger = logging.getLogger(__name__)

INFINITY = math.inf

PRIME_LIMIT = 2**31


def as_rational(x):
    """Coerce ints, Fractions and "a/b" strings to a Fraction; floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ParseError(f"Not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        text = x.strip()
        try:
            if '/' in text:
                num, den = text.split('/', 1)
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"Not a rational: {x!r}") from exc
    raise ParseError(f"Not a rational: {x!r} ({type(x).__name__})")


@lru_cache(maxsize=256)
def prime(p):
    """Validated prime handle: returns ``p`` after deterministic trial division."""
    if isinstance(p, bool) or not isinstance(p, int):
        raise NonPrimeModulus(f"Modulus must be an integer, got {p!r}")
    if p < 2 or p >= PRIME_LIMIT:
        raise NonPrimeModulus(f"{p} is outside the supported prime range [2, 2^31)")
    for d in range(2, math.isqrt(p) + 1):
        if p % d == 0:
            raise NonPrimeModulus(f"{p} is not prime (divisible by {d})")
    return p


def _int_vp(n, p):
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def vp(x, p):
    """Exponent k with x = p^k (m/n), p dividing neither m nor n; INFINITY for 0."""
    x = as_rational(x)
    p = prime(p)
    if x == 0:
        return INFINITY
    return _int_vp(x.numerator, p) - _int_vp(x.denominator, p)


def abs_p(x, p):
    """|x|_p = p^(-vp(x)) as an exact Fraction, 0 for x = 0."""
    v = vp(x, p)
    if v == INFINITY:
        return Fraction(0)
    return Fraction(p) ** -v


def padic_distance(x, y, p):
    return abs_p(as_rational(x) - as_rational(y), p)


def unit_part(x, p):
    """x / p^vp(x): numerator and denominator both prime to p."""
    x = as_rational(x)
    v = vp(x, p)
    if v == INFINITY:
        return Fraction(0)
    return x / Fraction(p) ** v


@dataclass(frozen=True)
class PAdic:
    prime: int
    valuation: object
    digits: tuple
    precision: int

    def __post_init__(self):
        if self.precision < 1:
            raise InputError(f"p-adic precision must be at least 1, got {self.precision}")
        if self.valuation == INFINITY:
            if self.digits:
                raise InputError("The zero p-adic number has no digits")
            return
        if len(self.digits) != self.precision:
            raise InputError(
                f"Expected {self.precision} digits, got {len(self.digits)}"
            )
        if any(not 0 <= d < self.prime for d in self.digits):
            raise InputError(f"Digits must lie in [0, {self.prime})")
        if self.digits[0] == 0:
            raise InputError("Leading p-adic digit of a nonzero value must be nonzero")

    @classmethod
    def zero(cls, p, precision=1):
        return cls(prime(p), INFINITY, (), precision)

    @classmethod
    def from_unit(cls, p, valuation, unit, precision):
        """Build from an integer ``unit`` known modulo p^precision, normalizing p-factors."""
        modulus = p**precision
        unit %= modulus
        if unit == 0:
            raise PrecisionExhausted(
                f"No certain nonzero digit remains below p^{valuation + precision}"
            )
        shift = _int_vp(unit, p)
        unit //= p**shift
        precision -= shift
        digits = []
        for _ in range(precision):
            unit, d = divmod(unit, p)
            digits.append(d)
        return cls(p, valuation + shift, tuple(digits), precision)

    @property
    def is_zero(self):
        return self.valuation == INFINITY

    @property
    def unit(self):
        """The integer sum(d_i p^i)."""
        return sum(d * self.prime**i for i, d in enumerate(self.digits))

    @property
    def absolute_precision(self):
        if self.is_zero:
            return INFINITY
        return self.valuation + self.precision

    @property
    def norm(self):
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.prime) ** -self.valuation

    def to_rational(self):
        """The finite expansion p^v * unit as a Fraction."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.prime) ** self.valuation * self.unit

    def reduce(self, k):
        """Integer representative in [0, p^k) of this p-adic integer modulo p^k."""
        if self.is_zero:
            return 0
        if self.valuation < 0:
            raise DomainError(
                f"|x|_{self.prime} = {self.prime}^{-self.valuation} > 1: not a {self.prime}-adic integer"
            )
        if k > self.absolute_precision:
            raise PrecisionExhausted(
                f"Value is only known modulo {self.prime}^{self.absolute_precision}, "
                f"cannot reduce modulo {self.prime}^{k}"
            )
        return (self.prime**self.valuation * self.unit) % self.prime**k

    def to_json(self):
        return {
            'prime': self.prime,
            'valuation': 'inf' if self.is_zero else self.valuation,
            'digits': list(self.digits),
            'precision': self.precision,
        }

    def __str__(self):
        v = 'inf' if self.is_zero else self.valuation
        digits = ','.join(str(d) for d in self.digits)
        return f"p={self.prime} v={v} digits=[{digits}] (N={self.precision})"

    def _coerce(self, other):
        if isinstance(other, PAdic):
            return other
        return padic_from_rational(other, self.prime, self.precision)

    def __neg__(self):
        if self.is_zero:
            return self
        return PAdic.from_unit(self.prime, self.valuation, -self.unit, self.precision)

    def __add__(self, other):
        return padic_arith('add', self, self._coerce(other))

    def __radd__(self, other):
        return padic_arith('add', self._coerce(other), self)

    def __sub__(self, other):
        return padic_arith('sub', self, self._coerce(other))

    def __rsub__(self, other):
        return padic_arith('sub', self._coerce(other), self)

    def __mul__(self, other):
        return padic_arith('mul', self, self._coerce(other))

    def __rmul__(self, other):
        return padic_arith('mul', self._coerce(other), self)

    def __truediv__(self, other):
        return padic_arith('div', self, self._coerce(other))

    def __rtruediv__(self, other):
        return padic_arith('div', self._coerce(other), self)


def padic_from_rational(x, p, N=None):
    """Digit expansion of x in Q_p to N digits of relative precision."""
    x = as_rational(x)
    p = prime(p)
    N = get_setting('PADIC_PRECISION') if N is None else N
    if N < 1:
        raise InputError(f"p-adic precision must be at least 1, got {N}")
    if x == 0:
        return PAdic.zero(p, N)
    v = vp(x, p)
    u = unit_part(x, p)
    modulus = p**N
    unit = u.numerator * pow(u.denominator, -1, modulus) % modulus
    return PAdic.from_unit(p, v, unit, N)


def padic_arith(op, a, b):
    """add/sub/mul/div with the largest precision the inputs guarantee."""
    if a.prime != b.prime:
        raise PrimeMismatch(f"Cannot combine {a.prime}-adic and {b.prime}-adic values")
    p = a.prime
    if op in ('add', 'sub'):
        if op == 'sub':
            b = -b
        if b.is_zero:
            return a
        if a.is_zero:
            return b
        absolute = min(a.absolute_precision, b.absolute_precision)
        low = min(a.valuation, b.valuation)
        total = (a.unit * p**(a.valuation - low) + b.unit * p**(b.valuation - low))
        total %= p**(absolute - low)
        if total == 0:
            logger.debug(f"Cancellation in {op} left no digits below p^{absolute}")
            raise PrecisionExhausted(
                f"Cancellation leaves no certain digits modulo {p}^{absolute}"
            )
        return PAdic.from_unit(p, low, total, absolute - low)
    if op == 'mul':
        if a.is_zero or b.is_zero:
            return PAdic.zero(p, min(a.precision, b.precision))
        precision = min(a.precision, b.precision)
        return PAdic.from_unit(p, a.valuation + b.valuation, a.unit * b.unit, precision)
    if op == 'div':
        if b.is_zero:
            raise DivisionByZero(f"Division by the zero {p}-adic number")
        if a.is_zero:
            return PAdic.zero(p, min(a.precision, b.precision))
        precision = min(a.precision, b.precision)
        modulus = p**precision
        unit = a.unit * pow(b.unit, -1, modulus)
        return PAdic.from_unit(p, a.valuation - b.valuation, unit, precision)
    raise InputError(f"Unknown p-adic operation {op!r}")


def ball_decomposition(p, n):
    """Residues 0..p^n-1 whose radius p^-n balls partition Z_p."""
    p = prime(p)
    if n < 0:
        raise InputError(f"Ball depth must be nonnegative, got {n}")
    budget = get_setting('BALL_BUDGET')
    if p**n > budget:
        raise BudgetExceeded(f"{p}^{n} balls exceed the budget of {budget}")
    return [Fraction(r) for r in range(p**n)]


def ball_index(x, p, n):
    """The residue r in [0, p^n) with |x - r|_p <= p^-n, for x in Z_p."""
    p = prime(p)
    if n < 0:
        raise InputError(f"Ball depth must be nonnegative, got {n}")
    x = as_rational(x)
    if vp(x, p) < 0:
        raise DomainError(f"|x|_{p} > 1: {x} is not a {p}-adic integer")
    modulus = p**n
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


def _finite_complex(z):
    if isinstance(z, Fraction):
        z = float(z)
    try:
        z = complex(z)
    except (TypeError, ValueError) as exc:
        raise NonFiniteInput(f"Not a complex number: {z!r}") from exc
    if not cmath.isfinite(z):
        raise NonFiniteInput(f"Complex input must be finite, got {z!r}")
    return z


def cx_abs(z):
    return abs(_finite_complex(z))


def cx_conj(z):
    return _finite_complex(z).conjugate()


def cx_parts(z):
    """(Re z, Im z) recovered from z and its conjugate."""
    z = _finite_complex(z)
    w = z.conjugate()
    return ((z + w) / 2).real, ((z - w) / 2j).real


def default_rho(length):
    return [Fraction(1, 2**l) for l in range(1, length + 1)]


def sequence_ultrametric(x, y, rho=None):
    """rho_n for the first (1-based) index n where x and y disagree, 0 if x == y."""
    if len(x) != len(y):
        raise LengthMismatch(f"Sequences have lengths {len(x)} and {len(y)}")
    rho = default_rho(len(x)) if rho is None else list(rho)
    if len(rho) < len(x):
        raise LengthMismatch(f"Need {len(x)} rho values, got {len(rho)}")
    if any(r <= 0 for r in rho):
        raise NonDecreasingRho("rho values must be positive")
    for i in range(1, len(rho)):
        if rho[i] >= rho[i - 1]:
            raise NonDecreasingRho(f"rho is not strictly decreasing at position {i + 1}")
    for i, (a, b) in enumerate(zip(x, y)):
        if a != b:
            return rho[i]
    return Fraction(0)
