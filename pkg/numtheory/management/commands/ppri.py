import argparse
import logging
import math
from fractions import Fraction
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from numtheory import lattice, norms, operators, scalars, series
from numtheory.conf import get_setting
from numtheory.exceptions import NumTheoryError, ParseError, PreconditionViolation, error_names
from numtheory.formats import (
    dumps,
    format_real,
    format_value,
    load_json,
    parse_complex,
    parse_laurent,
    parse_matrix,
    parse_rational,
    parse_rational_list,
    parse_region,
    parse_series,
    parse_vector,
)
from numtheory.verification import SUITES, verification_service

logger = logging.getLogger(__name__)


def _payload(text):
    """Inline text, or the contents of a file when written as @path."""
    if text.startswith('@'):
        try:
            return Path(text[1:]).read_text(encoding='utf-8')
        except OSError as exc:
            raise ParseError(f"Cannot read {text[1:]}: {exc.strerror}") from exc
    return text


def _number(text):
    """Exact rational when possible, otherwise a complex number."""
    try:
        return parse_rational(text)
    except ParseError:
        return parse_complex(text)


NAMED_ORACLES = {
    'l1': lambda v: norms.lp_norm(v, 1),
    'l2': lambda v: norms.lp_norm(v, 2),
    'linf': lambda v: norms.lp_norm(v, 'inf'),
    'sqrt2-form': lambda v: abs(float(v[0]) - math.sqrt(2) * float(v[1])),
    'first-coordinate': lambda v: abs(v[0]),
}

# coordinates each named oracle reads
ORACLE_ARITY = {'sqrt2-form': 2, 'first-coordinate': 1}


class Command(BaseCommand):
    help = 'Exact and certified computations with p-adic numbers, series, norms, operators and lattices'

    def add_arguments(self, parser):
        parser.epilog = (
            'Exit codes: 0 success, 1 domain error, 2 usage or input error. '
            'Error names: ' + ', '.join(error_names()) + '.'
        )
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--json', action='store_true', help='Emit one JSON object')
        common.add_argument('--digits', type=int, default=None,
                            help='p-adic precision N on p-adic commands, significant digits elsewhere')
        groups = parser.add_subparsers(dest='group', required=True)

        def group(name, help_text):
            sub = groups.add_parser(name, help=help_text)
            return sub.add_subparsers(dest='action', required=True)

        def leaf(actions, name, help_text):
            return actions.add_parser(name, help=help_text, parents=[common])

        padic = group('padic', 'p-adic valuations, expansions and arithmetic')
        cmd = leaf(padic, 'expand', 'Digit expansion of a rational in Q_p')
        cmd.add_argument('x')
        cmd.add_argument('--p', type=int, required=True)
        cmd = leaf(padic, 'valuation', 'vp(x)')
        cmd.add_argument('x')
        cmd.add_argument('--p', type=int, required=True)
        cmd = leaf(padic, 'abs', '|x|_p')
        cmd.add_argument('x')
        cmd.add_argument('--p', type=int, required=True)
        cmd = leaf(padic, 'dist', '|x - y|_p')
        cmd.add_argument('x')
        cmd.add_argument('y')
        cmd.add_argument('--p', type=int, required=True)
        cmd = leaf(padic, 'arith', 'Truncated p-adic add/sub/mul/div')
        cmd.add_argument('op', choices=['add', 'sub', 'mul', 'div'])
        cmd.add_argument('a')
        cmd.add_argument('b')
        cmd.add_argument('--p', type=int, required=True)
        cmd = leaf(padic, 'balls', 'Residues whose p^-n balls partition Z_p')
        cmd.add_argument('--p', type=int, required=True)
        cmd.add_argument('--n', type=int, required=True)
        cmd = leaf(padic, 'ball-index', 'Ball of radius p^-n containing x')
        cmd.add_argument('x')
        cmd.add_argument('--p', type=int, required=True)
        cmd.add_argument('--n', type=int, required=True)

        cx = group('cx', 'Complex absolute value and conjugation')
        for name in ('abs', 'conj', 'parts'):
            leaf(cx, name, f'Complex {name}').add_argument('z')

        metric = group('metric', 'Ultrametric on finite sequences')
        cmd = leaf(metric, 'seq-dist', 'rho_n at the first index where x and y differ')
        cmd.add_argument('--x', required=True)
        cmd.add_argument('--y', required=True)
        cmd.add_argument('--rho', default=None, help='Strictly decreasing rationals, default 2^-n')

        ser = group('series', 'Power series, exponentials and Laurent sequences')
        cmd = leaf(ser, 'geometric', '1/(1 - x) for |x| < 1 or |x|_p < 1')
        cmd.add_argument('x')
        cmd.add_argument('--p', type=int, default=None)
        cmd = leaf(ser, 'exp-padic', 'p-adic exponential modulo p^N')
        cmd.add_argument('x')
        cmd.add_argument('--p', type=int, required=True)
        leaf(ser, 'exp-complex', 'Complex exponential').add_argument('z')
        cmd = leaf(ser, 'legendre', 'vp(n!) by Legendre\'s formula')
        cmd.add_argument('n', type=int)
        cmd.add_argument('--p', type=int, required=True)
        cmd = leaf(ser, 'cauchy', 'Cauchy product of two finite series')
        cmd.add_argument('--a', required=True)
        cmd.add_argument('--b', required=True)
        cmd.add_argument('--upto', type=int, required=True)
        cmd = leaf(ser, 'sum', 'Sum of a finite series')
        cmd.add_argument('--series', required=True)
        cmd.add_argument('--eps', type=float, default=1e-12)
        cmd = leaf(ser, 'radius', 'Heuristic radius of convergence')
        cmd.add_argument('--series', required=True)
        cmd.add_argument('--J', type=int, default=64)
        cmd = leaf(ser, 'abel', 'A(r) = sum a_j r^j along an increasing schedule')
        cmd.add_argument('--series', required=True)
        cmd.add_argument('--r', required=True)
        cmd = leaf(ser, 'laurent-product', 'Convolution of two Laurent sequences')
        cmd.add_argument('--a', required=True)
        cmd.add_argument('--b', required=True)
        cmd = leaf(ser, 'laurent-eval', 'sum a_j z^j')
        cmd.add_argument('--a', required=True)
        cmd.add_argument('--z', required=True)

        norm = group('norm', 'lp norms, Hölder, duality and seminorm axioms')
        cmd = leaf(norm, 'lp', '||v||_p')
        cmd.add_argument('--p', required=True)
        cmd.add_argument('--vec', required=True)
        cmd = leaf(norm, 'dual', 'Dual norm of v -> sum v_j w_j with a witness')
        cmd.add_argument('--p', required=True)
        cmd.add_argument('--vec', required=True)
        cmd = leaf(norm, 'holder', 'Pairing and Hölder bound')
        cmd.add_argument('--p', required=True)
        cmd.add_argument('--a', required=True)
        cmd.add_argument('--b', required=True)
        cmd = leaf(norm, 'compare', 'Constant C with ||v||_p <= C ||v||_q')
        cmd.add_argument('--n', type=int, required=True)
        cmd.add_argument('--p', required=True)
        cmd.add_argument('--q', required=True)
        cmd = leaf(norm, 'axioms', 'Randomized seminorm axiom check of a named oracle')
        cmd.add_argument('--oracle', choices=sorted(NAMED_ORACLES), required=True)
        cmd.add_argument('--dim', type=int, required=True)
        cmd.add_argument('--trials', type=int, default=200)
        cmd.add_argument('--seed', type=int, default=None)

        op = group('op', 'Operator norms, eigenvalues and minimal polynomials')
        for name, help_text in (
            ('l1', 'Exact l1 operator norm'),
            ('linf', 'Exact l_inf operator norm'),
            ('schur', 'Schur contraction certificate'),
            ('eigen', 'Symmetric eigendecomposition'),
            ('minpoly', 'Minimal polynomial'),
            ('inverse', 'Inverse as a polynomial in T'),
            ('det', 'Exact determinant'),
            ('unimodular', 'Integer entries and det +-1'),
        ):
            leaf(op, name, help_text).add_argument('--matrix', required=True)
        cmd = leaf(op, 'estimate', 'Sampled lower bound for the p operator norm')
        cmd.add_argument('--matrix', required=True)
        cmd.add_argument('--p', required=True)
        cmd.add_argument('--trials', type=int, default=64)
        cmd.add_argument('--seed', type=int, default=None)
        cmd = leaf(op, 'schatten', 'Schatten p-norm of a self-adjoint matrix')
        cmd.add_argument('--matrix', required=True)
        cmd.add_argument('--p', required=True)
        cmd = leaf(op, 'eigenvalue', 'Whether alpha is an eigenvalue')
        cmd.add_argument('--matrix', required=True)
        cmd.add_argument('--alpha', required=True)
        cmd = leaf(op, 'isometry', 'p-adic isometry test')
        cmd.add_argument('--matrix', required=True)
        cmd.add_argument('--p', type=int, required=True)
        cmd = leaf(op, 'margin', 'Perturbation margin 1/||T^-1||_1 - ||A||_1')
        cmd.add_argument('--matrix', required=True)
        cmd.add_argument('--perturbation', required=True)

        lat = group('lattice', 'Z_E embeddings and lattice points in convex regions')
        cmd = leaf(lat, 'in-ze', 'Membership of x in Z_E')
        cmd.add_argument('x')
        cmd.add_argument('--primes', required=True)
        cmd = leaf(lat, 'embed', 'Place norms of x in Z_E')
        cmd.add_argument('x')
        cmd.add_argument('--primes', required=True)
        for name in ('distance', 'gap'):
            cmd = leaf(lat, name, 'Product distance' if name == 'distance' else 'Discreteness gap')
            cmd.add_argument('x')
            cmd.add_argument('y')
            cmd.add_argument('--primes', required=True)
        cmd = leaf(lat, 'cover', 'Covering point near y and each w_i')
        cmd.add_argument('y')
        cmd.add_argument('--w', required=True)
        cmd.add_argument('--primes', required=True)
        for name in ('pigeonhole', 'minkowski'):
            cmd = leaf(lat, name, 'Pair differing by Z^n' if name == 'pigeonhole' else 'Nonzero lattice point')
            cmd.add_argument('--region', required=True)
            cmd.add_argument('--seed', type=int, default=None)

        verify = groups.add_parser('verify', help='Run invariant suites', parents=[common])
        verify.add_argument('suite', help=', '.join(SUITES + ('all',)))
        verify.add_argument('--seed', type=int, default=None)
        verify.add_argument('--trials', type=int, default=None)

    def handle(self, *args, **options):
        group = options['group']
        action = options.get('action')
        name = group if action is None else f"{group}_{action}".replace('-', '_')
        handler = getattr(self, f"do_{name}")
        try:
            text, result, ok = handler(options)
        except NumTheoryError as exc:
            logger.debug(f"{group} {action or ''} failed with {exc.code}")
            raise CommandError(f"{exc.code}: {exc}", returncode=exc.exit_code) from exc
        if options['json']:
            command = group if action is None else f"{group} {action}"
            self.stdout.write(dumps({'command': command, 'result': result}, self._digits(options)))
        else:
            self.stdout.write(text)
        if not ok:
            raise CommandError('verification failed', returncode=1)

    @staticmethod
    def _digits(options):
        return None if options['group'] in ('padic', 'verify') or options.get('action') == 'exp-padic' \
            else options['digits']

    def _real(self, value, options):
        return format_value(value, self._digits(options))

    # padic

    def do_padic_expand(self, options):
        x = scalars.padic_from_rational(parse_rational(options['x']), options['p'], options['digits'])
        if x.is_zero:
            return 'v=inf digits=[]', x, True
        return f"v={x.valuation} digits=[{','.join(map(str, x.digits))}]", x, True

    def do_padic_valuation(self, options):
        v = scalars.vp(parse_rational(options['x']), options['p'])
        return ('inf' if v == scalars.INFINITY else str(v)), ('inf' if v == scalars.INFINITY else v), True

    def do_padic_abs(self, options):
        value = scalars.abs_p(parse_rational(options['x']), options['p'])
        return str(value), value, True

    def do_padic_dist(self, options):
        value = scalars.padic_distance(parse_rational(options['x']), parse_rational(options['y']), options['p'])
        return str(value), value, True

    def do_padic_arith(self, options):
        p, digits = options['p'], options['digits']
        a = scalars.padic_from_rational(parse_rational(options['a']), p, digits)
        b = scalars.padic_from_rational(parse_rational(options['b']), p, digits)
        value = scalars.padic_arith(options['op'], a, b)
        return str(value), value, True

    def do_padic_balls(self, options):
        residues = scalars.ball_decomposition(options['p'], options['n'])
        return ' '.join(str(r) for r in residues), residues, True

    def do_padic_ball_index(self, options):
        index = scalars.ball_index(parse_rational(options['x']), options['p'], options['n'])
        return str(index), index, True

    # cx

    def do_cx_abs(self, options):
        value = scalars.cx_abs(parse_complex(options['z']))
        return self._real(value, options), value, True

    def do_cx_conj(self, options):
        value = scalars.cx_conj(parse_complex(options['z']))
        return self._real(value, options), value, True

    def do_cx_parts(self, options):
        re, im = scalars.cx_parts(parse_complex(options['z']))
        return f"re={self._real(re, options)} im={self._real(im, options)}", {'re': re, 'im': im}, True

    # metric

    def do_metric_seq_dist(self, options):
        x = parse_rational_list(options['x'])
        y = parse_rational_list(options['y'])
        rho = None if options['rho'] is None else parse_rational_list(options['rho'])
        value = scalars.sequence_ultrametric(x, y, rho)
        return str(value), value, True

    # series

    def do_series_geometric(self, options):
        if options['p'] is not None:
            value = series.geometric_sum(parse_rational(options['x']), options['p'])
        else:
            value = series.geometric_sum(_number(options['x']))
        return self._real(value, options) if isinstance(value, complex) else str(value), value, True

    def do_series_exp_padic(self, options):
        value = series.exp_padic(parse_rational(options['x']), options['p'], options['digits'])
        return str(value), value, True

    def do_series_exp_complex(self, options):
        value = series.exp_complex(parse_complex(options['z']))
        return self._real(value, options), value, True

    def do_series_legendre(self, options):
        value = series.legendre_vp_factorial(options['n'], options['p'])
        return str(value), value, True

    def do_series_cauchy(self, options):
        a = parse_series(_payload(options['a']))
        b = parse_series(_payload(options['b']))
        product = series.cauchy_product(a, b, options['upto'])
        terms = list(product.terms)
        return '[' + ', '.join(self._real(t, options) if isinstance(t, complex) else str(t) for t in terms) + ']', \
            terms, True

    def do_series_sum(self, options):
        a = parse_series(_payload(options['series']))
        if a.scalar.name == 'padic':
            result = series.sum_padic(a, options['digits'] or get_setting('PADIC_PRECISION'))
            value = str(result.value)
        elif a.scalar.name == 'rational':
            result = series.SumResult(sum(a.terms, Fraction(0)), a.length, Fraction(0))
            value = str(result.value)
        else:
            result = series.sum_complex(a, options['eps'])
            value = self._real(result.value, options)
        payload = {
            'value': result.value,
            'terms_used': result.terms_used,
            'error_bound': result.error_bound,
            'certified': result.certified,
        }
        text = f"{value} terms={result.terms_used} error_bound={self._real(result.error_bound, options)}"
        if not result.certified:
            text += ' uncertified'
        return text, payload, True

    def do_series_radius(self, options):
        estimate = series.radius_estimate(parse_series(_payload(options['series'])), options['J'])
        payload = {'radius': estimate.radius, 'method': estimate.method, 'terms_inspected': estimate.terms_inspected}
        return f"{format_real(estimate.radius, self._digits(options))} ({estimate.method})", payload, True

    def do_series_abel(self, options):
        a = parse_series(_payload(options['series']))
        schedule = [float(parse_rational(r)) for r in options['r'].split(',') if r.strip()]
        results = series.abel_eval(a, schedule)
        lines = [f"r={r} A(r)={self._real(res.value, options)}" for r, res in zip(schedule, results)]
        payload = [{'r': r, 'value': res.value, 'error_bound': res.error_bound} for r, res in zip(schedule, results)]
        return '\n'.join(lines), payload, True

    def do_series_laurent_product(self, options):
        product = series.laurent_product(parse_laurent(_payload(options['a'])), parse_laurent(_payload(options['b'])))
        text = ' '.join(f"{j}:{c}" for j, c in product.support) + f" tail<={product.tail}"
        return text, product, True

    def do_series_laurent_eval(self, options):
        result = series.laurent_eval(parse_laurent(_payload(options['a'])), parse_complex(options['z']))
        payload = {'value': result.value, 'error_bound': result.error_bound}
        text = self._real(result.value, options)
        if result.error_bound:
            text += f" error_bound={result.error_bound}"
        return text, payload, True

    # norm

    def do_norm_lp(self, options):
        value = norms.lp_norm(parse_vector(options['vec']), options['p'])
        return self._real(value, options), value, True

    def do_norm_dual(self, options):
        dual = norms.dual_norm(parse_vector(options['vec']), options['p'])
        witness = dual.witness
        text = f"{self._real(dual.value, options)} witness={witness}"
        return text, {'value': dual.value, 'witness': witness, 'degenerate': dual.degenerate}, True

    def do_norm_holder(self, options):
        result = norms.holder_pairing(parse_vector(options['a']), parse_vector(options['b']), options['p'])
        text = f"pairing={self._real(result.pairing, options)} bound={self._real(result.bound, options)}"
        return text, result._asdict(), True

    def do_norm_compare(self, options):
        result = norms.comparison_constant(options['n'], options['p'], options['q'])
        return self._real(result.constant, options), result._asdict(), True

    def do_norm_axioms(self, options):
        needed = ORACLE_ARITY.get(options['oracle'], 1)
        if options['dim'] < needed:
            raise PreconditionViolation(
                f"The {options['oracle']} oracle reads {needed} coordinates, got --dim {options['dim']}"
            )
        report = norms.seminorm_axioms_check(
            NAMED_ORACLES[options['oracle']], options['dim'], options['trials'], options['seed'],
        )
        lines = [f"{c.axiom}: {c.status} ({c.trials} trials)" for c in report.checks]
        return '\n'.join(lines), report, True

    # op

    def _matrix(self, options, key='matrix'):
        return parse_matrix(_payload(options[key]))

    def do_op_l1(self, options):
        value = operators.opnorm_l1(self._matrix(options))
        return self._real(value, options), value, True

    def do_op_linf(self, options):
        value = operators.opnorm_linf(self._matrix(options))
        return self._real(value, options), value, True

    def do_op_schur(self, options):
        value = operators.schur_certificate(self._matrix(options))
        return str(value).lower(), value, True

    def do_op_estimate(self, options):
        estimate = operators.opnorm_estimate(self._matrix(options), options['p'], options['trials'], options['seed'])
        label = 'exact' if estimate.exact else 'lower bound'
        return f"{self._real(estimate.value, options)} ({label})", estimate._asdict(), True

    def do_op_eigen(self, options):
        eig = operators.symmetric_eigen(self._matrix(options))
        values = ', '.join(self._real(float(x), options) for x in eig.eigenvalues)
        return f"eigenvalues=({values}) residual={eig.residual:.3e}", eig, True

    def do_op_schatten(self, options):
        value = operators.schatten_norm(self._matrix(options), options['p'])
        return self._real(value, options), value, True

    def do_op_minpoly(self, options):
        mu = operators.minimal_poly(self._matrix(options))
        return str(mu), mu, True

    def do_op_inverse(self, options):
        inverse = operators.inverse_via_powers(self._matrix(options))
        return str(inverse), inverse, True

    def do_op_det(self, options):
        value = operators.determinant(self._matrix(options))
        return self._real(value, options), value, True

    def do_op_eigenvalue(self, options):
        value = operators.eigenvalue_check(self._matrix(options), parse_rational(options['alpha']))
        return str(value).lower(), value, True

    def do_op_unimodular(self, options):
        value = operators.unimodular_check(self._matrix(options))
        return str(value).lower(), value, True

    def do_op_isometry(self, options):
        value = operators.padic_isometry_check(self._matrix(options), options['p'])
        return str(value).lower(), value, True

    def do_op_margin(self, options):
        value = operators.injectivity_margin(self._matrix(options), self._matrix(options, 'perturbation'))
        return str(value), value, True

    # lattice

    def do_lattice_in_ze(self, options):
        value = lattice.in_ZE(parse_rational(options['x']), lattice.PrimeSet.parse(options['primes']))
        return str(value).lower(), value, True

    def do_lattice_embed(self, options):
        point = lattice.embed(parse_rational(options['x']), lattice.PrimeSet.parse(options['primes']))
        text = ' '.join(f"|x|_{place}={size}" for place, size in point.place_norms().items())
        return text, point, True

    def do_lattice_distance(self, options):
        value = lattice.product_distance(parse_rational(options['x']), parse_rational(options['y']),
                                         lattice.PrimeSet.parse(options['primes']))
        return str(value), value, True

    def do_lattice_gap(self, options):
        value = lattice.discreteness_gap(parse_rational(options['x']), parse_rational(options['y']),
                                         lattice.PrimeSet.parse(options['primes']))
        return str(value), value, True

    def do_lattice_cover(self, options):
        y = parse_rational(options['y'])
        point = lattice.covering_point(y, parse_rational_list(options['w']), lattice.PrimeSet.parse(options['primes']))
        return f"x={point} |x-y|={abs(point - y)}", {'x': point, 'distance': abs(point - y)}, True

    def do_lattice_pigeonhole(self, options):
        x, y = lattice.pigeonhole_pair(parse_region(load_json(_payload(options['region']))))
        text = f"x=({','.join(map(str, x))}) y=({','.join(map(str, y))})"
        return text, {'x': x, 'y': y}, True

    def do_lattice_minkowski(self, options):
        point = lattice.minkowski_point(parse_region(load_json(_payload(options['region']))), options['seed'])
        return '(' + ','.join(map(str, point)) + ')', list(point), True

    # verify

    def do_verify(self, options):
        report = verification_service.run(options['suite'], options['seed'], options['trials'])
        return report.render(), report, report.passed
