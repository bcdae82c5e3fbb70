import math
from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from numtheory.exceptions import DimensionMismatch, InputError, InvalidExponent, OrderViolation
from numtheory.norms import (
    PExponent,
    Vec,
    comparison_constant,
    dual_norm,
    holder_pairing,
    lp_norm,
    lp_norm_power,
    seminorm_axioms_check,
)


class PExponentTests(SimpleTestCase):

    def test_parse(self):
        self.assertTrue(PExponent.parse('inf').is_infinite)
        self.assertTrue(PExponent.parse('∞').is_infinite)
        self.assertEqual(PExponent.parse('3/2').value, Fraction(3, 2))
        self.assertEqual(PExponent.parse(1.5).value, Fraction(3, 2))
        self.assertEqual(PExponent.parse(2).conjugate.value, 2)
        self.assertTrue(PExponent.parse(1).conjugate.is_infinite)
        self.assertEqual(PExponent.parse('inf').conjugate.value, 1)

    def test_invalid(self):
        for raw in ('1/2', 0, 'abc', float('nan')):
            with self.assertRaises(InvalidExponent):
                PExponent.parse(raw)


class LpNormTests(SimpleTestCase):

    def test_examples(self):
        self.assertAlmostEqual(lp_norm((3, 4), 2), 5.0)
        self.assertEqual(lp_norm((3, 4), 'inf'), 4)
        self.assertEqual(lp_norm((0, 0), 2), 0)
        self.assertEqual(lp_norm((Fraction(1, 2), -2), 1), Fraction(5, 2))

    def test_exact_power_sum(self):
        self.assertEqual(lp_norm_power((3, 4), 2), 25)
        with self.assertRaises(InvalidExponent):
            lp_norm_power((3, 4), '3/2')

    def test_comparison_examples(self):
        self.assertAlmostEqual(comparison_constant(4, 1, 2).constant, 2.0)
        self.assertEqual(comparison_constant(5, 3, 3).constant, 1.0)
        self.assertAlmostEqual(comparison_constant(9, 2, 'inf').constant, 3.0)
        with self.assertRaises(OrderViolation):
            comparison_constant(3, 2, 1)

    @given(st.lists(st.integers(-100, 100), min_size=1, max_size=8),
           st.sampled_from([1, 1.5, 2, 3]), st.sampled_from([3, 4, 'inf']))
    @settings(max_examples=200, deadline=None)
    def test_comparison_holds(self, v, p, q):
        if float(PExponent.parse(p)) > float(PExponent.parse(q)):
            return
        c = comparison_constant(len(v), p, q)
        norm_p, norm_q = float(lp_norm(v, p)), float(lp_norm(v, q))
        self.assertLessEqual(norm_p, c.constant * norm_q * (1 + 1e-12) + 1e-12)
        self.assertLessEqual(norm_q, norm_p * (1 + 1e-12) + 1e-12)


class HolderTests(SimpleTestCase):

    def test_examples(self):
        result = holder_pairing((1, 1), (1, 1), 2)
        self.assertEqual(result.pairing, 2)
        self.assertAlmostEqual(result.bound, 2.0)
        self.assertTrue(result.equality)
        result = holder_pairing((1, 2), (3, 1), 1)
        self.assertEqual((result.pairing, result.bound), (5, 9))
        with self.assertRaises(DimensionMismatch):
            holder_pairing((1, 2), (1, 2, 3), 2)

    @given(st.lists(st.integers(-50, 50), min_size=3, max_size=3),
           st.lists(st.integers(-50, 50), min_size=3, max_size=3),
           st.sampled_from(['1', '3/2', '2', '3', 'inf']))
    @settings(max_examples=200, deadline=None)
    def test_bound_never_violated(self, a, b, p):
        result = holder_pairing(a, b, p)
        self.assertLessEqual(abs(float(result.pairing)), float(result.bound) * (1 + 1e-12) + 1e-12)
        self.assertNotEqual(result.young_holds, False)


class DualNormTests(SimpleTestCase):

    def test_examples(self):
        result = dual_norm((1, -2), 1)
        self.assertEqual(result.value, 2)
        self.assertEqual(result.witness, Vec.of((0, -1)))
        self.assertEqual(str(result.witness), '(0,-1)')
        result = dual_norm((3, 4), 2)
        self.assertAlmostEqual(result.value, 5.0)
        np.testing.assert_allclose(result.witness.to_numpy(), [0.6, 0.8])
        result = dual_norm((0, 0), 2)
        self.assertEqual(result.value, 0)
        self.assertTrue(result.degenerate)

    def test_witness_attains_value(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            n = int(rng.integers(1, 7))
            w = rng.standard_normal(n)
            p = ['1', '3/2', '2', '3', 'inf'][int(rng.integers(0, 5))]
            result = dual_norm(w, p)
            witness = result.witness.to_numpy()
            self.assertLessEqual(lp_norm(witness, p), 1 + 1e-10)
            self.assertGreaterEqual(float(np.dot(w, witness)), (1 - 1e-10) * float(result.value))

    def test_large_weights_near_p_one(self):
        result = dual_norm((10**4, 1), '101/100')
        self.assertAlmostEqual(result.value / 1e4, 1.0, places=12)
        witness = result.witness.to_numpy()
        self.assertTrue(np.all(np.isfinite(witness)))
        self.assertAlmostEqual(lp_norm(witness, '101/100'), 1.0, places=9)
        self.assertAlmostEqual(float(np.dot((10**4, 1), witness)) / 1e4, 1.0, places=9)

    def test_scale_does_not_change_the_witness(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            w = rng.standard_normal(int(rng.integers(1, 6)))
            p = ['1001/1000', '11/10', '3'][int(rng.integers(0, 3))]
            small = dual_norm(w, p)
            large = dual_norm(w * 1e6, p)
            self.assertTrue(math.isfinite(large.value))
            self.assertAlmostEqual(large.value / (1e6 * small.value), 1.0, places=9)
            np.testing.assert_allclose(large.witness.to_numpy(), small.witness.to_numpy(), rtol=1e-9, atol=1e-12)


class SeminormAxiomTests(SimpleTestCase):

    def test_euclidean_norm_passes(self):
        report = seminorm_axioms_check(lambda v: lp_norm(v, 2), 2, trials=100, seed=1, depth=40)
        self.assertTrue(report.is_norm)

    def test_needs_a_dimension_and_trials(self):
        with self.assertRaises(InputError):
            seminorm_axioms_check(lambda v: lp_norm(v, 1), 0)
        with self.assertRaises(InputError):
            seminorm_axioms_check(lambda v: lp_norm(v, 1), 2, trials=0)

    def test_irrational_form_is_a_degenerate_seminorm(self):
        theta = math.sqrt(2)
        report = seminorm_axioms_check(lambda v: abs(float(v[0]) - theta * float(v[1])), 2, seed=1)
        self.assertTrue(report.is_seminorm)
        self.assertFalse(report.is_norm)
        self.assertEqual(report.get('definiteness').status, 'fail')

    def test_squared_norm_fails_triangle(self):
        report = seminorm_axioms_check(lambda v: lp_norm_power(v, 2), 2, trials=50, seed=1, depth=20)
        self.assertEqual(report.get('triangle').status, 'fail')
        self.assertFalse(report.is_seminorm)
