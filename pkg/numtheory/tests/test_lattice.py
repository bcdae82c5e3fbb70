import math
from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from numtheory.exceptions import (
    AsymmetricRegion,
    DimensionMismatch,
    InputError,
    LengthMismatch,
    NonConvexRegion,
    NonPrimeModulus,
    NotInZE,
    ParseError,
    PreconditionViolation,
)
from numtheory.lattice import (
    ConvexRegion,
    PrimeSet,
    covering_point,
    discreteness_gap,
    embed,
    in_ZE,
    minkowski_point,
    pigeonhole_pair,
    principal_part,
    product_distance,
    region_from_json,
    register_region,
)
from numtheory.scalars import abs_p

PRIME_SETS = st.sampled_from([(2,), (3,), (5,), (2, 3), (2, 5), (3, 5), (2, 3, 5)])


@st.composite
def ze_elements(draw, primes):
    """Random a / (p1^k1 ... pn^kn)."""
    numerator = draw(st.integers(-10**6, 10**6))
    denominator = 1
    for p in primes:
        denominator *= p ** draw(st.integers(0, 6))
    return Fraction(numerator, denominator)


class PrimeSetTests(SimpleTestCase):

    def test_parse(self):
        E = PrimeSet.parse('{3,2}')
        self.assertEqual(E.primes, (2, 3))
        self.assertEqual(str(E), '{2,3}')
        self.assertIn(3, E)
        self.assertEqual(len(PrimeSet.parse('5')), 1)

    def test_invalid(self):
        with self.assertRaises(ParseError):
            PrimeSet.parse('2,x')
        with self.assertRaises(NonPrimeModulus):
            PrimeSet.parse('2,4')
        with self.assertRaises(InputError):
            PrimeSet.of([])


class EmbeddingTests(SimpleTestCase):

    def test_in_ZE(self):
        self.assertTrue(in_ZE(Fraction(5, 6), [2, 3]))
        self.assertFalse(in_ZE(Fraction(1, 7), [2, 3]))
        self.assertTrue(in_ZE(-12, [5]))

    def test_embed(self):
        point = embed(Fraction(5, 6), [2, 3])
        self.assertEqual(point.place_norms(), {'inf': Fraction(5, 6), 2: 2, 3: 3})
        self.assertEqual(point.to_json(), {'inf': '5/6', '2': '2', '3': '3'})
        self.assertEqual(point.coords[0], ('inf', Fraction(5, 6)))
        self.assertEqual(point.distance(embed(Fraction(1, 3), [2, 3])), 2)
        with self.assertRaises(NotInZE):
            embed(Fraction(1, 7), [2])

    def test_product_distance(self):
        self.assertEqual(product_distance(Fraction(3, 2), 0, [2]), 2)
        self.assertEqual(product_distance(Fraction(7, 4), Fraction(7, 4), [2, 3]), 0)
        self.assertEqual(product_distance(5, 1, [2]), 4)

    def test_discreteness_examples(self):
        self.assertEqual(discreteness_gap(Fraction(1, 2), 0, [2]), 2)
        self.assertEqual(discreteness_gap(1, 0, [2]), 1)
        self.assertEqual(discreteness_gap(Fraction(7, 4), Fraction(7, 4), [2]), 0)
        with self.assertRaises(NotInZE):
            discreteness_gap(Fraction(1, 7), 0, [2])

    @given(st.data(), PRIME_SETS)
    @settings(max_examples=1000, deadline=None)
    def test_distinct_points_are_at_least_one_apart(self, data, E):
        x = data.draw(ze_elements(E))
        y = data.draw(ze_elements(E))
        if x != y:
            self.assertGreaterEqual(discreteness_gap(x, y, E), 1)

    @given(st.integers(-10**6, 10**6), st.integers(0, 8), st.sampled_from([2, 3, 5, 7]))
    @settings(max_examples=300, deadline=None)
    def test_cross_place_law(self, a, k, p):
        x = Fraction(a, p**k)
        if abs_p(x, p) <= 1:
            self.assertEqual(x.denominator, 1)
            self.assertTrue(x == 0 or max(abs(x), abs_p(x, p)) >= 1)

    @given(st.integers(-10**6, 10**6), st.integers(0, 8), st.sampled_from([2, 3, 5, 7]),
           st.sampled_from([2, 3, 5, 7]))
    @settings(max_examples=300, deadline=None)
    def test_other_primes_see_integers(self, a, k, q, p):
        if p != q:
            self.assertLessEqual(abs_p(Fraction(a, q**k), p), 1)


class CoveringTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(covering_point(0, [Fraction(5, 2)], [2]), Fraction(1, 2))
        self.assertEqual(covering_point(Fraction(3, 4), [Fraction(3, 4), Fraction(3, 4)], [2, 3]), Fraction(3, 4))
        self.assertEqual(covering_point(0, [Fraction(1, 2), Fraction(1, 3)], [2, 3]), Fraction(5, 6))

    def test_principal_part(self):
        self.assertEqual(principal_part(Fraction(5, 2), 2), Fraction(1, 2))
        self.assertEqual(principal_part(Fraction(7, 5), 2), 0)
        self.assertEqual(principal_part(Fraction(-1, 9), 3), Fraction(8, 9))

    def test_errors(self):
        with self.assertRaises(LengthMismatch):
            covering_point(0, [1], [2, 3])
        with self.assertRaises(NotInZE):
            covering_point(Fraction(1, 7), [0], [2])

    @given(st.data(), PRIME_SETS)
    @settings(max_examples=300, deadline=None)
    def test_bounds_hold(self, data, E):
        y = data.draw(ze_elements(E))
        w = [Fraction(data.draw(st.integers(-10**6, 10**6)), data.draw(st.integers(1, 10**4))) for _ in E]
        x = covering_point(y, w, E)
        self.assertTrue(in_ZE(x, E))
        self.assertLess(abs(x - y), len(E))
        for target, p in zip(w, E):
            self.assertLessEqual(abs_p(x - target, p), 1)


class RegionTests(SimpleTestCase):

    def test_box(self):
        U = ConvexRegion.box(['11/10', '11/10'])
        self.assertEqual(U.volume_lb, Fraction(121, 25))
        self.assertIn((1, 0), U)
        self.assertNotIn((Fraction(11, 10), 0), U)
        with self.assertRaises(DimensionMismatch):
            (1,) in U

    def test_ellipsoid(self):
        U = ConvexRegion.ellipsoid([['25/36', 0], [0, '25/36']])
        self.assertAlmostEqual(float(U.volume_lb), math.pi * 1.44, places=6)
        self.assertLessEqual(U.volume_lb, Fraction(math.pi * 1.44))
        self.assertIn((1, 0), U)
        self.assertNotIn((1, 1), U)
        with self.assertRaises(InputError):
            ConvexRegion.ellipsoid([[1, 2], [2, 1]])
        with self.assertRaises(InputError):
            ConvexRegion.ellipsoid([[1, 0], [1, 1]])

    def test_cross_polytope(self):
        U = ConvexRegion.cross_polytope(2, 3)
        self.assertEqual(U.volume_lb, Fraction(64, 6))
        self.assertIn((1, 0, 0), U)
        self.assertNotIn((1, 1, 0), U)

    def test_from_json(self):
        U = region_from_json({'type': 'bounds', 'lower': ['0'], 'upper': ['3/2']})
        self.assertEqual(U.volume_lb, Fraction(3, 2))
        self.assertEqual(U.to_json(), {'type': 'bounds', 'lower': ['0'], 'upper': ['3/2'], 'volume_lb': '3/2'})
        U = region_from_json({'type': 'box', 'halfwidths': ['1'], 'volume_lb': '1/2'})
        self.assertEqual(U.volume_lb, Fraction(1, 2))
        with self.assertRaises(ParseError):
            region_from_json({'type': 'torus'})
        with self.assertRaises(ParseError):
            region_from_json({'type': 'box'})

    def test_register_region(self):
        register_region('unit-square', lambda data: ConvexRegion.box(['1', '1']))
        self.assertEqual(region_from_json({'type': 'unit-square'}).volume_lb, 4)


class PigeonholeTests(SimpleTestCase):

    def assertIntegerDifference(self, U, x, y):
        self.assertNotEqual(x, y)
        self.assertIn(x, U)
        self.assertIn(y, U)
        self.assertTrue(all((a - b).denominator == 1 for a, b in zip(x, y)))

    def test_interval(self):
        U = ConvexRegion.bounds(['0'], ['3/2'])
        x, y = pigeonhole_pair(U)
        self.assertEqual((x, y), ((Fraction(1, 32),), (Fraction(33, 32),)))

    def test_square(self):
        U = ConvexRegion.box(['3/5', '3/5'])
        self.assertIntegerDifference(U, *pigeonhole_pair(U))

    def test_ellipse(self):
        U = ConvexRegion.ellipsoid([['1/2', 0], [0, '1/2']])
        self.assertIntegerDifference(U, *pigeonhole_pair(U))

    def test_precondition(self):
        with self.assertRaises(PreconditionViolation):
            pigeonhole_pair(ConvexRegion.box(['1/2']))


class MinkowskiTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(minkowski_point(ConvexRegion.box(['11/10', '11/10'])), (1, 0))
        self.assertEqual(minkowski_point(ConvexRegion.box(['3/2'])), (1,))
        self.assertEqual(minkowski_point(ConvexRegion.ellipsoid([['25/36', 0], [0, '25/36']])), (1, 0))

    def test_precondition(self):
        with self.assertRaises(PreconditionViolation):
            minkowski_point(ConvexRegion.box(['1', '1']))

    def test_rejects_asymmetric_region(self):
        U = region_from_json({'type': 'bounds', 'lower': ['0', '0'], 'upper': ['3', '3']})
        with self.assertRaises(AsymmetricRegion):
            minkowski_point(U, seed=1)

    def test_rejects_non_convex_region(self):
        small, large = Fraction(1, 5), Fraction(2)

        def plus_sign(point):
            x, y = (abs(c) for c in point)
            return (x < large and y < small) or (x < small and y < large)

        U = ConvexRegion(2, plus_sign, ((-large, large), (-large, large)), Fraction(5))
        with self.assertRaises(NonConvexRegion):
            minkowski_point(U, seed=1)

    def test_random_boxes_and_ellipses(self):
        rng = np.random.default_rng(71)
        checked = 0
        while checked < 40:
            n = int(rng.integers(1, 5))
            sizes = [Fraction(int(rng.integers(50, 301)), 100) for _ in range(n)]
            if checked % 2:
                U = ConvexRegion.box(sizes)
            else:
                U = ConvexRegion.ellipsoid([[1 / r**2 if i == j else 0 for j in range(n)] for i, r in enumerate(sizes)])
            if U.volume_lb <= 2**n * Fraction(1001, 1000):
                continue
            point = minkowski_point(U, seed=checked)
            self.assertTrue(any(point))
            self.assertIn(tuple(Fraction(c) for c in point), U)
            checked += 1
