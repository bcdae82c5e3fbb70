import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np
import pandas as pd

from .conf import get_setting
from .exceptions import NumTheoryError, PrecisionExhausted, UnknownSuite
from .lattice import (
    ConvexRegion,
    PrimeSet,
    covering_point,
    discreteness_gap,
    minkowski_point,
)
from .matrix import Matrix, bareiss_determinant
from .norms import lp_norm
from .operators import (
    basis_quadratic_lp,
    opnorm_l1,
    opnorm_linf,
    random_orthonormal_basis,
    schatten_norm,
    schur_certificate,
    symmetric_eigen,
)
from .scalars import abs_p, padic_distance, vp
from .series import COMPLEX, RATIONAL, CoeffSeq, cauchy_product, padic, sum_complex, sum_padic

logger = logging.getLogger(__name__)

SUITES = ('ultrametric', 'cauchy-product', 'schur', 'schatten', 'lattice')

DEFAULT_TRIALS = {
    'ultrametric': 10_000,
    'cauchy-product': 100,
    'schur': 1_000,
    'schatten': 100,
    'lattice': 1_000,
}

COLUMNS = ['suite', 'check', 'trial', 'ok', 'detail']


def _rational(rng, bound=10**6):
    return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))


@dataclass
class VerificationReport:
    """Per-trial outcomes of one or more suites, aggregated with pandas."""
    seed: int
    frame: pd.DataFrame

    @property
    def passed(self):
        return bool(self.frame['ok'].all())

    def suite_totals(self):
        trials = self.frame.groupby(['suite', 'trial'], sort=False)['ok'].all().reset_index()
        totals = trials.groupby('suite', sort=False)['ok'].agg(['sum', 'count'])
        return totals.rename(columns={'sum': 'passed', 'count': 'total'})

    def check_totals(self):
        totals = self.frame.groupby(['suite', 'check'], sort=False)['ok'].agg(['sum', 'count'])
        return totals.rename(columns={'sum': 'passed', 'count': 'total'})

    def counterexamples(self):
        failures = self.frame[~self.frame['ok']]
        return failures.groupby(['suite', 'check'], sort=False)['detail'].first()

    def to_json(self):
        firsts = self.counterexamples()
        checks = self.check_totals()
        suites = {}
        for suite, row in self.suite_totals().iterrows():
            suites[suite] = {
                'passed': int(row['passed']),
                'total': int(row['total']),
                'checks': {
                    check: {
                        'passed': int(counts['passed']),
                        'total': int(counts['total']),
                        'counterexample': firsts.get((suite, check)),
                    }
                    for (name, check), counts in checks.iterrows()
                    if name == suite
                },
            }
        return {'seed': self.seed, 'passed': self.passed, 'suites': suites}

    def render(self):
        lines = []
        firsts = self.counterexamples()
        for suite, row in self.suite_totals().iterrows():
            lines.append(f"{suite}: {int(row['passed'])}/{int(row['total'])} pass")
        lines.append('')
        lines.append(self.check_totals().to_string())
        for (suite, check), detail in firsts.items():
            lines.append(f"first counterexample [{suite}/{check}]: {detail}")
        return '\n'.join(lines)


class VerificationService:
    """
    Runs the randomized invariant suites. Every suite draws from its own
    generator derived from (seed, suite position), so a suite's outcome does
    not depend on which other suites run with it.
    """

    def __init__(self):
        self.rows = []
        self.runners = {
            'ultrametric': self._ultrametric,
            'cauchy-product': self._cauchy_product,
            'schur': self._schur,
            'schatten': self._schatten,
            'lattice': self._lattice,
        }

    def run(self, suite, seed=None, trials=None):
        if suite != 'all' and suite not in self.runners:
            raise UnknownSuite(f"Unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
        seed = get_setting('SEED') if seed is None else seed
        names = SUITES if suite == 'all' else (suite,)
        self.rows = []
        for name in names:
            rng = np.random.default_rng([seed, SUITES.index(name)])
            count = DEFAULT_TRIALS[name] if trials is None else trials
            logger.info(f"Running suite {name} with {count} trials (seed {seed})")
            self.runners[name](rng, count)
        frame = pd.DataFrame(self.rows, columns=COLUMNS)
        report = VerificationReport(seed, frame)
        if not report.passed:
            logger.warning(f"Verification found {int((~frame['ok']).sum())} failing checks")
        return report

    def _record(self, suite, check, trial, ok, detail=None):
        self.rows.append((suite, check, trial, bool(ok), None if ok else detail))

    def _guarded(self, suite, check, trial, fn):
        """Run one check; a library error counts as a failure with its name as detail."""
        try:
            ok, detail = fn()
        except NumTheoryError as exc:
            logger.error(f"{suite}/{check} trial {trial} raised {exc.code}: {exc}")
            ok, detail = False, f"{exc.code}: {exc}"
        self._record(suite, check, trial, ok, detail)

    def _ultrametric(self, rng, trials):
        primes = (2, 3, 5, 7)
        for trial in range(trials):
            x, y, z = _rational(rng), _rational(rng), _rational(rng)
            text = f"x={x} y={y} z={z}"
            strong = [p for p in primes
                      if padic_distance(x, z, p) > max(padic_distance(x, y, p), padic_distance(y, z, p))]
            self._record('ultrametric', 'strong-triangle', trial, not strong, f"{text} p={strong[:1]}")
            broken = [p for p in primes if abs_p(x * y, p) != abs_p(x, p) * abs_p(y, p)]
            self._record('ultrametric', 'multiplicative', trial, not broken, f"{text} p={broken[:1]}")
            unequal = [p for p in primes
                       if abs_p(x, p) != abs_p(y, p) and abs_p(x + y, p) != max(abs_p(x, p), abs_p(y, p))]
            self._record('ultrametric', 'max-equality', trial, not unequal, f"{text} p={unequal[:1]}")

    def _cauchy_product(self, rng, trials):
        def finite(length):
            return CoeffSeq.finite([_rational(rng, 100) for _ in range(length)], RATIONAL)

        def complex_geometric():
            r = complex(*rng.uniform(-0.35, 0.35, size=2))
            c = complex(*rng.uniform(-1, 1, size=2))
            return c, r

        for trial in range(trials):
            a, b, c = (finite(int(rng.integers(1, 7))) for _ in range(3))
            upto = 12
            ab = cauchy_product(a, b, upto)
            self._record('cauchy-product', 'commutative', trial,
                         ab.prefix(upto + 1) == cauchy_product(b, a, upto).prefix(upto + 1), f"a={a} b={b}")
            left = cauchy_product(ab, c, upto).prefix(upto + 1)
            right = cauchy_product(a, cauchy_product(b, c, upto), upto).prefix(upto + 1)
            self._record('cauchy-product', 'associative', trial, left == right, f"a={a} b={b} c={c}")

            (ca, ra), (cb, rb) = complex_geometric(), complex_geometric()

            def complex_check():
                sa = CoeffSeq.streamed(lambda j: ca * ra**j, COMPLEX)
                sb = CoeffSeq.streamed(lambda j: cb * rb**j, COMPLEX)
                total_a = sum_complex(sa, 1e-13).value
                total_b = sum_complex(sb, 1e-13).value
                terms = cauchy_product(sa, sb, 80).prefix(81)
                total = sum_complex(CoeffSeq.finite(terms, COMPLEX), 1e-13).value
                gap = abs(total - total_a * total_b)
                return gap <= 1e-9, f"ra={ra} rb={rb} gap={gap:.3e}"

            self._guarded('cauchy-product', 'complex-product-of-sums', trial, complex_check)

            p = (2, 3, 5)[trial % 3]

            def padic_check():
                kind = padic(p)
                ia = CoeffSeq.finite([int(rng.integers(1, 10**6)) for _ in range(6)], kind)
                ib = CoeffSeq.finite([int(rng.integers(1, 10**6)) for _ in range(6)], kind)
                prod = CoeffSeq.finite(cauchy_product(ia, ib, 10).prefix(11), kind)
                gap = _padic_total(ia, 12) * _padic_total(ib, 12) - _padic_total(prod, 12)
                return vp(gap, p) >= 12, f"p={p} vp(gap)={vp(gap, p)}"

            self._guarded('cauchy-product', 'padic-product-of-sums', trial, padic_check)

    def _schur(self, rng, trials):
        exponents = (1.5, 2.0, 3.0, 4.0)
        for trial in range(trials):
            n = int(rng.integers(1, 6))
            raw = Matrix.of([[Fraction(int(rng.integers(-100, 101)), 100) for _ in range(n)] for _ in range(n)])
            scale = max(opnorm_l1(raw), opnorm_linf(raw), Fraction(1))
            T = raw.scale(1 / scale)
            A = T.to_numpy()
            self._record('schur', 'certificate', trial, schur_certificate(T), f"T={T}")
            worst = 0.0
            for p in exponents:
                for v in rng.standard_normal((8, n)):
                    worst = max(worst, np.linalg.norm(A @ v, ord=p) - np.linalg.norm(v, ord=p))
            self._record('schur', 'contraction', trial, worst <= 1e-10, f"T={T} excess={worst:.3e}")
            # Extreme points: coordinate vectors for l1, sign patterns for l_inf.
            by_columns = max(lp_norm(T.apply(e), 1) for e in Matrix.identity(n).rows)
            by_signs = max(lp_norm(T.apply(s), 'inf') for s in product((-1, 1), repeat=n))
            self._record('schur', 'exact-l1', trial, by_columns == opnorm_l1(T), f"T={T}")
            self._record('schur', 'exact-linf', trial, by_signs == opnorm_linf(T), f"T={T}")

    def _schatten(self, rng, trials, bases=100):
        for trial in range(trials):
            n = int(rng.integers(1, 7))
            G = rng.standard_normal((n, n))
            A = Matrix.from_numpy((G + G.T) / 2)
            M = A.to_numpy()
            eig = symmetric_eigen(A)
            self._record('schatten', 'residual', trial, eig.residual <= 1e-10, f"residual={eig.residual:.3e}")
            trace_gap = abs(eig.eigenvalues.sum() - np.trace(M)) / max(1.0, abs(np.trace(M)))
            frob = float(np.sum(M**2))
            frob_gap = abs(float(np.sum(eig.eigenvalues**2)) - frob) / max(1.0, frob)
            self._record('schatten', 'moments', trial, trace_gap <= 1e-8 and frob_gap <= 1e-8,
                         f"trace_gap={trace_gap:.3e} frobenius_gap={frob_gap:.3e}")
            for p in (1, 2, 3, 'inf'):
                bound = schatten_norm(A, p)
                at_eigenbasis = basis_quadratic_lp(A, eig.basis, p)
                self._record('schatten', 'eigenbasis-equality', trial, abs(at_eigenbasis - bound) <= 1e-8,
                             f"n={n} p={p} gap={abs(at_eigenbasis - bound):.3e}")
                excess = max(basis_quadratic_lp(A, random_orthonormal_basis(n, rng), p) - bound
                             for _ in range(bases))
                self._record('schatten', 'basis-bound', trial, excess <= 1e-8,
                             f"n={n} p={p} excess={excess:.3e}")

    def _lattice(self, rng, trials):
        pools = ((2,), (3,), (5,), (2, 3), (2, 5), (3, 5), (2, 3, 5))

        def ze_element(E):
            den = math.prod(p ** int(rng.integers(0, 6)) for p in E)
            return Fraction(int(rng.integers(-10**6, 10**6 + 1)), den)

        for trial in range(trials):
            E = PrimeSet.of(pools[int(rng.integers(0, len(pools)))])
            x, y = ze_element(E), ze_element(E)
            if x == y:
                y += 1

            def gap_check():
                gap = discreteness_gap(x, y, E)
                return gap >= 1, f"x={x} y={y} E={E} gap={gap}"

            self._guarded('lattice', 'discreteness', trial, gap_check)
            w = [_rational(rng, 1000) for _ in E]

            def covering_check():
                point = covering_point(x, w, E)
                ok = abs(point - x) < len(E) and all(abs_p(point - t, p) <= 1 for t, p in zip(w, E))
                return ok, f"y={x} w={w} E={E} x={point}"

            self._guarded('lattice', 'covering', trial, covering_check)

        for trial in range(max(trials // 5, 1)):
            n = int(rng.integers(1, 5))
            region = _random_box(rng, n) if trial % 2 == 0 else _random_ellipsoid(rng, n)

            def minkowski_check():
                point = minkowski_point(region, seed=trial)
                inside = any(point) and tuple(Fraction(c) for c in point) in region
                return inside, f"region={region.to_json()} point={point}"

            self._guarded('lattice', 'minkowski', trial, minkowski_check)


def _padic_total(seq, N):
    """The sum as a rational, or 0 when it vanishes modulo p^N."""
    try:
        return sum_padic(seq, N).value.to_rational()
    except PrecisionExhausted:
        return Fraction(0)


def _random_box(rng, n):
    halfwidths = [Fraction(int(rng.integers(300, 3001)), 1000) for _ in range(n)]
    volume = math.prod(halfwidths, start=Fraction(1))
    if volume <= Fraction(1001, 1000):
        halfwidths[-1] *= Fraction(1002, 1000) / volume
    return ConvexRegion.box(halfwidths)


def _random_ellipsoid(rng, n):
    """Diagonally dominant symmetric matrix, scaled until the volume exceeds 2^n (1 + 10^-3)."""
    off = [[Fraction(int(rng.integers(-50, 51)), 100) for _ in range(n)] for _ in range(n)]
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = rows[j][i] = off[i][j]
    for i in range(n):
        rows[i][i] = sum((abs(x) for x in rows[i]), Fraction(0)) + Fraction(int(rng.integers(10, 300)), 100)
    det = bareiss_determinant(rows)
    unit_ball = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    target = (unit_ball / (2**n * 1.002)) ** 2
    shrink = Fraction((target / float(det)) ** (1 / n) * 0.99).limit_denominator(10**6)
    return ConvexRegion.ellipsoid([[shrink * x for x in r] for r in rows])


verification_service = VerificationService()
