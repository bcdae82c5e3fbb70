"""
Series engine: coefficient sequences, Cauchy products, certified summation
(complex, alternating and p-adic), exponentials, Laurent sequences in the
l1 convolution algebra, and polynomial evaluation in an algebra.

Summation only reports a result as certified when a tail bound has been
proven for the method used; convergence itself is not decidable from
finitely many terms.
"""

import logging
import math
import threading
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from .conf import get_setting
from .exceptions import (
    DomainError,
    InputError,
    KindMismatch,
    MonotonicityViolation,
    NoValuationCertificate,
    NonConvergenceSuspected,
    OffCircleWithInfiniteSupport,
    OverflowRisk,
    ParseError,
    PrecisionExhausted,
    UnboundedCoefficients,
    ZeroArgument,
)
from .matrix import Matrix
from .scalars import (
    INFINITY,
    PAdic,
    _finite_complex,
    abs_p,
    as_rational,
    padic_arith,
    padic_from_rational,
    prime,
    vp,
)

logger = logging.getLogger(__name__)

# relative float noise tolerated between consecutive term ratios
RATIO_SLACK = 1e-14


@dataclass(frozen=True)
class ScalarKind:
    name: str
    prime: Optional[int] = None

    @classmethod
    def parse(cls, text):
        text = text.strip().lower()
        if text in ('rational', 'complex'):
            return cls(text)
        if text.startswith('padic'):
            digits = text[len('padic'):].strip('():= ')
            try:
                return padic(int(digits))
            except ValueError as exc:
                raise ParseError(f"Bad p-adic scalar kind {text!r}; use padic(p)") from exc
        raise ParseError(f"Unknown scalar kind {text!r}")

    @property
    def zero(self):
        if self.name == 'complex':
            return 0j
        return Fraction(0)

    @property
    def one(self):
        if self.name == 'complex':
            return 1 + 0j
        return Fraction(1)

    def coerce(self, value):
        if self.name == 'complex':
            return _finite_complex(value)
        if isinstance(value, PAdic):
            if self.name != 'padic' or value.prime != self.prime:
                raise KindMismatch(f"{value.prime}-adic term in a {self} sequence")
            return value
        return as_rational(value)

    def __str__(self):
        return f"padic({self.prime})" if self.name == 'padic' else self.name


RATIONAL = ScalarKind('rational')
COMPLEX = ScalarKind('complex')


def padic(p):
    return ScalarKind('padic', prime(p))


def _magnitude(x):
    if isinstance(x, Fraction):
        return abs(x)
    return abs(complex(x))


class CoeffSeq:
    """
    Coefficients a_0, a_1, ... either as an explicit finite list or as a pure
    rule j -> a_j. Streamed terms are memoized; the memo is guarded by a lock
    so one sequence can be shared between threads.

    ``alternating`` declares that the terms are real, alternate in sign and
    decrease in size to 0. Summation checks it on every term it consumes.
    """

    def __init__(self, scalar=RATIONAL, terms=None, rule=None, bound=None, alternating=False):
        if (terms is None) == (rule is None):
            raise InputError("A sequence needs exactly one of terms or rule")
        self.scalar = scalar
        self.bound = bound
        self.alternating = alternating
        self._rule = rule
        self._terms = None if terms is None else tuple(scalar.coerce(t) for t in terms)
        self._memo = []
        self._lock = threading.Lock()

    @classmethod
    def finite(cls, terms, scalar=RATIONAL):
        return cls(scalar, terms=terms)

    @classmethod
    def streamed(cls, rule, scalar=RATIONAL, bound=None, alternating=False):
        return cls(scalar, rule=rule, bound=bound, alternating=alternating)

    @property
    def is_finite(self):
        return self._terms is not None

    @property
    def kind(self):
        return 'finite' if self.is_finite else 'streamed'

    @property
    def length(self):
        return len(self._terms) if self.is_finite else None

    @property
    def terms(self):
        if not self.is_finite:
            raise InputError("A streamed sequence has no finite term list")
        return self._terms

    def __getitem__(self, j):
        if j < 0:
            raise IndexError(j)
        if self.is_finite:
            return self._terms[j] if j < len(self._terms) else self.scalar.zero
        with self._lock:
            while len(self._memo) <= j:
                self._memo.append(self.scalar.coerce(self._rule(len(self._memo))))
            return self._memo[j]

    def prefix(self, n):
        return [self[j] for j in range(n)]

    def sup_bound(self):
        """A proven bound on sup |a_j|, when one is known."""
        if self.bound is not None:
            return self.bound
        if self.is_finite and self.scalar.name != 'padic':
            return max((_magnitude(t) for t in self._terms), default=0)
        return None

    def __repr__(self):
        if self.is_finite:
            return f"CoeffSeq.finite({list(map(str, self._terms))}, {self.scalar})"
        return f"CoeffSeq.streamed(<rule>, {self.scalar})"


@dataclass(frozen=True)
class SumResult:
    value: object
    terms_used: int
    error_bound: object
    certified: bool = True

    @property
    def is_exact(self):
        return self.certified and self.error_bound == 0


def cauchy_product(a, b, upto):
    """c_n = sum_{j=0}^{n} a_j b_{n-j} for n = 0..upto, exact in the scalar ring."""
    if a.scalar != b.scalar:
        raise KindMismatch(f"Cannot multiply a {a.scalar} series by a {b.scalar} series")
    if upto < 0:
        raise InputError(f"upto must be nonnegative, got {upto}")
    left = a.prefix(upto + 1)
    right = b.prefix(upto + 1)
    zero = a.scalar.zero
    coeffs = [sum((left[j] * right[n - j] for j in range(n + 1)), zero) for n in range(upto + 1)]
    return CoeffSeq.finite(coeffs, a.scalar)


def _geometric_tail(magnitudes):
    """
    Tail bound sum_{i>j}|a_i| <= m_j r/(1-r) over a window whose consecutive
    ratios never increase (up to rounding) and stay below r < 1. Terms decaying
    like a power of j have increasing ratios and are never certified.
    """
    if len(magnitudes) < 2 or any(m == 0 for m in magnitudes):
        return None
    ratios = [magnitudes[k + 1] / magnitudes[k] for k in range(len(magnitudes) - 1)]
    if any(later > earlier * (1 + RATIO_SLACK) for earlier, later in zip(ratios, ratios[1:])):
        return None
    ratio = max(ratios)
    if ratio >= 1:
        return None
    return magnitudes[-1] * ratio / (1 - ratio)


def _alternating_step(previous, term, j):
    """Check one step of a sequence declared alternating: real, sign change, nonincreasing size."""
    if term.imag != 0:
        raise MonotonicityViolation(f"a_{j} = {term} is not real in an alternating series", index=j)
    if previous is None:
        return
    if previous.real * term.real > 0:
        raise MonotonicityViolation(f"a_{j} = {term.real} has the sign of a_{j - 1}", index=j)
    if abs(term) > abs(previous):
        raise MonotonicityViolation(f"|a_{j}| = {abs(term)} exceeds |a_{j - 1}| = {abs(previous)}", index=j)


def sum_complex(a, eps, max_terms=None, strict=True, window=8):
    """
    Sum a complex series with a certified tail bound below ``eps``.

    Certificates: exact for finite sequences, the Leibniz bound for sequences
    built with ``alternating=True`` (checked over every consumed term), or
    geometric domination over the last ``window`` ratios. Without a certificate
    after ``max_terms`` terms, raises NonConvergenceSuspected (or returns an
    uncertified partial sum when ``strict`` is false).
    """
    if eps <= 0:
        raise InputError(f"eps must be positive, got {eps}")
    max_terms = get_setting('MAX_TERMS') if max_terms is None else max_terms
    if a.is_finite:
        value = sum((_finite_complex(t) for t in a.terms), 0j)
        return SumResult(value, a.length, 0.0)
    if a.bound == 0:
        return SumResult(0j, 0, 0.0)

    partial = 0j
    recent = deque(maxlen=window + 1)
    previous = None
    for j in range(max_terms):
        term = _finite_complex(a[j])
        if a.alternating:
            _alternating_step(previous, term, j)
            if abs(term) < eps:
                logger.debug(f"Alternating tail certificate after {j} terms")
                return SumResult(partial, j, abs(term))
            previous = term
            partial += term
            continue
        partial += term
        recent.append(term)
        if len(recent) <= window:
            continue
        tail = _geometric_tail([abs(t) for t in recent])
        if tail is not None and tail < eps:
            logger.debug(f"Geometric tail certificate after {j + 1} terms: {tail:.3e}")
            return SumResult(partial, j + 1, tail)

    if strict:
        raise NonConvergenceSuspected(f"No tail certificate after {max_terms} terms")
    logger.warning(f"Returning an uncertified partial sum of {max_terms} terms")
    return SumResult(partial, max_terms, math.inf, certified=False)


def alternating_sum(b, eps, max_terms=None):
    """sum (-1)^j b_j for nonincreasing b_j >= 0, stopping at the first b_L <= eps."""
    if eps <= 0:
        raise InputError(f"eps must be positive, got {eps}")
    max_terms = get_setting('MAX_TERMS') if max_terms is None else max_terms
    signed = []
    previous = None
    for j in range(max_terms):
        term = b[j]
        if term < 0:
            raise MonotonicityViolation(f"b_{j} = {term} is negative", index=j)
        if previous is not None and term > previous:
            raise MonotonicityViolation(f"b_{j} = {term} exceeds b_{j - 1} = {previous}", index=j)
        if term <= eps:
            return SumResult(math.fsum(signed), j, float(term))
        signed.append(float(term) if j % 2 == 0 else -float(term))
        previous = term
    raise NonConvergenceSuspected(f"Terms stayed above {eps} for {max_terms} terms")


def _padic_threshold(p):
    if p == 2:
        return "2^{-1}"
    return f"{p}^{{-1/{p - 1}}}"


def geometric_sum(x, p=None):
    """1/(1 - x) for |x| < 1 (complex or rational) or |x|_p < 1 (p-adic)."""
    if isinstance(x, PAdic):
        if not x.is_zero and x.valuation < 1:
            raise DomainError(f"|x|_{x.prime} = {x.norm} ≥ 1: terms x^j do not tend to 0")
        one = padic_from_rational(1, x.prime, x.precision)
        return padic_arith('div', one, padic_arith('sub', one, x))
    if p is not None:
        x = as_rational(x)
        if vp(x, p) < 1:
            raise DomainError(f"|x|_{p} = {abs_p(x, p)} ≥ 1: terms x^j do not tend to 0")
        return 1 / (1 - x)
    if isinstance(x, (int, Fraction, str)):
        x = as_rational(x)
        if abs(x) >= 1:
            raise DomainError(f"|z| = {abs(x)} ≥ 1, so |z|^j ≥ 1 for all j")
        return 1 / (1 - x)
    z = _finite_complex(x)
    if abs(z) >= 1:
        raise DomainError(f"|z| = {abs(z)} ≥ 1, so |z|^j ≥ 1 for all j")
    return 1 / (1 - z)


def geometric_certificate(v):
    """Valuation lower bound j -> j*v for the terms x^j with vp(x) = v."""
    return lambda j: j * v


def exp_certificate(v, p):
    """Lower bound for vp(x^n / n!) when vp(x) = v, using vp(n!) < n/(p-1)."""
    slope = Fraction(v * (p - 1) - 1, p - 1)
    return lambda n: math.ceil(n * slope)


def _term_valuation(term, p):
    if isinstance(term, PAdic):
        return term.valuation
    return vp(term, p)


def sum_padic(a, N, vmin=None, max_terms=None):
    """
    Sum a p-adic series exactly modulo p^N.

    Streamed sequences need ``vmin``: a nondecreasing proven lower bound on
    vp(a_j). Every term with vmin(j) < N is summed; each consumed term is
    checked against the bound.
    """
    if a.scalar.name != 'padic':
        raise KindMismatch(f"sum_padic needs a p-adic series, got {a.scalar}")
    p = a.scalar.prime
    max_terms = get_setting('MAX_TERMS') if max_terms is None else max_terms
    if a.is_finite:
        count = a.length
    else:
        if vmin is None:
            raise NoValuationCertificate(
                "A streamed p-adic series needs a valuation bound j -> vmin(j) tending to infinity"
            )
        count = None
        previous = -INFINITY
        for j in range(max_terms):
            bound = vmin(j)
            if bound < previous:
                raise NoValuationCertificate(f"Valuation bound decreases at j = {j}")
            previous = bound
            if bound >= N:
                count = j
                break
        if count is None:
            raise NoValuationCertificate(f"Valuation bound stays below {N} for {max_terms} terms")
        for j in range(count):
            if _term_valuation(a[j], p) < vmin(j):
                raise NoValuationCertificate(
                    f"vp(a_{j}) = {_term_valuation(a[j], p)} is below the claimed bound {vmin(j)}"
                )

    terms = a.prefix(count)
    if any(isinstance(t, PAdic) for t in terms):
        value = _sum_padic_terms(terms, p, N)
    else:
        exact = sum((as_rational(t) for t in terms), Fraction(0))
        v = vp(exact, p)
        if v >= N:
            raise PrecisionExhausted(f"The sum vanishes modulo {p}^{N}")
        value = padic_from_rational(exact, p, N - v)
    logger.debug(f"p-adic sum used {count} terms for precision {p}^{N}")
    return SumResult(value, count, Fraction(0))


def _sum_padic_terms(terms, p, N):
    """
    Sum at one common absolute precision: every term becomes an integer
    modulo p^(A - low), with low the smallest valuation and A the precision all
    terms share (at most N). Partial sums may cancel freely.
    """
    present = [t for t in terms if not (t.is_zero if isinstance(t, PAdic) else t == 0)]
    absolute = min([N] + [t.absolute_precision for t in present if isinstance(t, PAdic)])
    if not present:
        raise PrecisionExhausted(f"The sum vanishes modulo {p}^{absolute}")
    low = min(_term_valuation(t, p) for t in present)
    if absolute <= low:
        raise PrecisionExhausted(f"The sum vanishes modulo {p}^{absolute}")
    modulus = p ** (absolute - low)
    total = 0
    for t in present:
        if isinstance(t, PAdic):
            total += t.unit * p ** (t.valuation - low)
        else:
            scaled = as_rational(t) / Fraction(p) ** low
            total += scaled.numerator * pow(scaled.denominator, -1, modulus)
    total %= modulus
    if total == 0:
        raise PrecisionExhausted(f"The sum vanishes modulo {p}^{absolute}")
    if absolute < N:
        logger.debug(f"Terms only determine the sum modulo {p}^{absolute}")
    return PAdic.from_unit(p, low, total, absolute - low)


class RadiusEstimate(NamedTuple):
    radius: float
    terms_inspected: int
    method: str


def _log_magnitude(x):
    if isinstance(x, Fraction):
        return math.log(abs(x.numerator)) - math.log(x.denominator)
    return math.log(abs(complex(x)))


def radius_estimate(a, J=64):
    """
    Heuristic radius of convergence 1/limsup |a_j|^(1/j) from a_1..a_J.

    When the roots |a_j|^(1/j) decay like a power of j the estimate is +inf;
    estimates above RADIUS_CAP are also reported as +inf.
    """
    if J < 8:
        raise InputError(f"radius_estimate needs J >= 8, got {J}")
    cap = get_setting('RADIUS_CAP')
    points = [(j, _log_magnitude(a[j]) / j) for j in range(1, J + 1) if a[j] != 0]
    if not points:
        return RadiusEstimate(math.inf, J, 'zero-coefficients')
    tail = [(j, r) for j, r in points if j > J // 2] or points[-1:]
    limsup = max(r for _, r in tail)
    if len(tail) >= 2:
        # log-roots falling like -alpha*log(j) mean the roots tend to 0
        slope = np.polyfit(np.log([j for j, _ in tail]), [r for _, r in tail], 1)[0]
        logger.debug(f"Root-test fit over {len(tail)} terms: slope {slope:.4f}")
        if slope <= -0.5:
            return RadiusEstimate(math.inf, J, 'power-decay')
    radius = math.exp(-limsup)
    if radius > cap:
        return RadiusEstimate(math.inf, J, 'cap')
    return RadiusEstimate(radius, J, 'root-test')


def abel_eval(a, r_schedule, bound=None, eps=1e-12):
    """A(r) = sum a_j r^j for each r in an increasing schedule in [0, 1)."""
    bound = a.sup_bound() if bound is None else bound
    if bound is None:
        raise UnboundedCoefficients("No bound on sup |a_j| was supplied or can be inferred")
    schedule = [float(r) for r in r_schedule]
    for k, r in enumerate(schedule):
        if not 0 <= r < 1:
            raise InputError(f"Abel radii must lie in [0, 1), got {r}")
        if k and r <= schedule[k - 1]:
            raise InputError("Abel radii must be strictly increasing")
    results = []
    for r in schedule:
        if a.is_finite:
            value = sum((_finite_complex(t) * r**j for j, t in enumerate(a.terms)), 0j)
            results.append(SumResult(value, a.length, 0.0))
            continue
        total = 0j
        power = 1.0
        j = 0
        while True:
            total += _finite_complex(a[j]) * power
            power *= r
            j += 1
            tail = float(bound) * power / (1 - r)
            if tail < eps:
                break
        results.append(SumResult(total, j, tail))
    return results


def legendre_vp_factorial(n, p):
    """vp(n!) = sum_k floor(n / p^k)."""
    p = prime(p)
    if n < 0:
        raise InputError(f"n must be nonnegative, got {n}")
    total = 0
    power = p
    while power <= n:
        total += n // power
        power *= p
    return total


def exp_complex(z):
    """E(z) = sum z^n/n!, summed after halving z and squaring back."""
    z = _finite_complex(z)
    if abs(z) > 700:
        raise OverflowRisk(f"|z| = {abs(z)} exceeds 700")
    if z == 0:
        return 1 + 0j
    halvings = 0
    while abs(z) > 0.5:
        z /= 2
        halvings += 1
    # With |z| <= 1/2 the tail after term n is at most |term n|.
    total = 1 + 0j
    term = 1 + 0j
    n = 0
    while True:
        n += 1
        term *= z / n
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
    for _ in range(halvings):
        total *= total
    return total


def exp_padic(x, p=None, N=None):
    """p-adic E(x) modulo p^N for |x|_p < p^(-1/(p-1))."""
    if isinstance(x, PAdic):
        p = x.prime if p is None else prime(p)
        if x.prime != p:
            raise KindMismatch(f"{x.prime}-adic argument for a {p}-adic exponential")
        absolute = x.absolute_precision
        x = x.to_rational()
    else:
        if p is None:
            raise InputError("A rational argument needs an explicit prime")
        p = prime(p)
        absolute = INFINITY
        x = as_rational(x)
    N = get_setting('PADIC_PRECISION') if N is None else N
    if x == 0:
        return padic_from_rational(1, p, N)
    v = vp(x, p)
    if v < (2 if p == 2 else 1):
        raise DomainError(f"|x|_{p} = {abs_p(x, p)} ≥ {_padic_threshold(p)}")
    target = int(min(N, absolute))
    terms = CoeffSeq.streamed(lambda n: x**n / math.factorial(n), padic(p))
    return sum_padic(terms, target, vmin=exp_certificate(v, p)).value


def exp_additivity_check(x, y, N=None, p=None):
    """Whether E(x + y) and E(x)E(y) agree modulo p^N."""
    if p is None:
        p = next((t.prime for t in (x, y) if isinstance(t, PAdic)), None)
    ex = exp_padic(x, p, N)
    ey = exp_padic(y, p, N)
    if isinstance(x, PAdic) or isinstance(y, PAdic):
        sx = x if isinstance(x, PAdic) else padic_from_rational(x, p, ex.precision)
        sy = y if isinstance(y, PAdic) else padic_from_rational(y, p, ey.precision)
        total = padic_arith('add', sx, sy)
    else:
        total = as_rational(x) + as_rational(y)
    exy = exp_padic(total, p, N)
    product = padic_arith('mul', ex, ey)
    k = int(min(exy.absolute_precision, product.absolute_precision))
    agree = exy.reduce(k) == product.reduce(k)
    if not agree:
        logger.error(f"E(x+y) and E(x)E(y) differ modulo {p}^{k}")
    return agree


def _coerce_laurent(value):
    if isinstance(value, (int, Fraction, str)):
        return as_rational(value)
    return _finite_complex(value)


@dataclass(frozen=True)
class LaurentSeq:
    """
    Doubly infinite sequence: a finite support plus a bound ``tail`` on the l1
    mass of everything not stored (0 for finitely supported sequences).
    """
    support: tuple = ()
    tail: object = 0

    @classmethod
    def of(cls, mapping, tail=0):
        items = []
        for j, c in mapping.items():
            c = _coerce_laurent(c)
            if c != 0:
                items.append((int(j), c))
        if tail < 0:
            raise InputError(f"Tail bound must be nonnegative, got {tail}")
        return cls(tuple(sorted(items)), tail)

    @classmethod
    def delta(cls, k=0):
        return cls.of({k: 1})

    @classmethod
    def truncate(cls, rule, J, tail):
        """Keep a_j for |j| <= J from an absolutely summable rule, with a proven tail bound."""
        return cls.of({j: rule(j) for j in range(-J, J + 1)}, tail)

    @property
    def coefficients(self):
        return dict(self.support)

    @property
    def is_finite(self):
        return self.tail == 0

    def __getitem__(self, j):
        return self.coefficients.get(j, 0)

    def norm1(self):
        """l1 norm of the stored part."""
        return sum((abs(c) for _, c in self.support), 0)

    def to_json(self):
        return {
            'support': {str(j): str(c) for j, c in self.support},
            'tail': str(self.tail),
        }


def laurent_product(a, b):
    """Convolution c_n = sum_j a_j b_{n-j}; tails combine as |a|t_b + |b|t_a + t_a t_b."""
    product = {}
    for j, x in a.support:
        for l, y in b.support:
            product[j + l] = product.get(j + l, 0) + x * y
    tail = a.norm1() * b.tail + b.norm1() * a.tail + a.tail * b.tail
    return LaurentSeq.of(product, tail)


def laurent_eval(a, z):
    """
    sum a_j z^j on C minus 0, with the omitted l1 mass as the error bound.
    Sequences with a tail are evaluated on |z| = 1 only, where |z^j| = 1.
    """
    z = _finite_complex(z)
    if z == 0:
        raise ZeroArgument("Laurent sequences are evaluated on nonzero arguments")
    on_circle = abs(abs(z) - 1) <= 1e-12
    if not a.is_finite and not on_circle:
        raise OffCircleWithInfiniteSupport(
            f"|z| = {abs(z)}: sequences without finite support are evaluated on |z| = 1 only"
        )
    total = 0j
    for j, c in a.support:
        if j >= 0:
            total += complex(c) * z**j
        elif on_circle:
            total += complex(c) * z.conjugate() ** (-j)
        else:
            total += complex(c) * z**j
    return SumResult(total, len(a.support), a.tail)


def poly_eval_in_algebra(pcoeffs, x):
    """a_n x^n + ... + a_1 x + a_0 e, with e the identity of x's algebra."""
    if isinstance(pcoeffs, CoeffSeq):
        coeffs = list(pcoeffs.terms)
    else:
        coeffs = [as_rational(c) for c in pcoeffs]
    if isinstance(x, Matrix):
        x.require_square()
        identity = Matrix.identity(x.n, x.kind)
        result = Matrix.zeros(x.n, x.kind)
        for c in reversed(coeffs):
            result = (result @ x) + identity.scale(c)
        return result
    x = as_rational(x) if isinstance(x, (int, Fraction, str)) else _finite_complex(x)
    result = Fraction(0) if isinstance(x, Fraction) else 0j
    for c in reversed(coeffs):
        result = result * x + c
    return result
