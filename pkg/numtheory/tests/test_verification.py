import pandas as pd
from django.test import SimpleTestCase

from numtheory.exceptions import UnknownSuite
from numtheory.verification import COLUMNS, SUITES, VerificationReport, VerificationService

SMALL_TRIALS = {
    'ultrametric': 200,
    'cauchy-product': 10,
    'schur': 30,
    'schatten': 3,
    'lattice': 20,
}


class VerificationServiceTests(SimpleTestCase):

    def setUp(self):
        self.service = VerificationService()

    def test_each_suite_passes(self):
        for suite in SUITES:
            with self.subTest(suite=suite):
                report = self.service.run(suite, seed=5, trials=SMALL_TRIALS[suite])
                self.assertTrue(report.passed, report.render())
                totals = report.suite_totals()
                self.assertEqual(int(totals.loc[suite, 'total']), SMALL_TRIALS[suite])
                self.assertEqual(int(totals.loc[suite, 'passed']), SMALL_TRIALS[suite])

    def test_same_seed_same_report(self):
        first = self.service.run('schur', seed=9, trials=20).to_json()
        second = VerificationService().run('schur', seed=9, trials=20).to_json()
        self.assertEqual(first, second)

    def test_suites_do_not_depend_on_each_other(self):
        alone = self.service.run('ultrametric', seed=3, trials=50).to_json()['suites']['ultrametric']
        together = self.service.run('all', seed=3, trials=5)
        self.assertEqual(list(together.to_json()['suites']), list(SUITES))
        again = self.service.run('ultrametric', seed=3, trials=50).to_json()['suites']['ultrametric']
        self.assertEqual(alone, again)

    def test_unknown_suite(self):
        with self.assertRaises(UnknownSuite):
            self.service.run('riemann')

    def test_render(self):
        report = self.service.run('ultrametric', seed=1, trials=25)
        self.assertTrue(report.render().startswith('ultrametric: 25/25 pass'))
        payload = report.to_json()
        self.assertEqual(payload['seed'], 1)
        self.assertEqual(payload['suites']['ultrametric']['checks']['strong-triangle'],
                         {'passed': 25, 'total': 25, 'counterexample': None})


class VerificationReportTests(SimpleTestCase):

    def test_failures_are_counted_per_trial(self):
        frame = pd.DataFrame([
            ('schur', 'certificate', 0, True, None),
            ('schur', 'contraction', 0, False, 'T=[[2]]'),
            ('schur', 'certificate', 1, True, None),
            ('schur', 'contraction', 1, True, None),
        ], columns=COLUMNS)
        report = VerificationReport(0, frame)
        self.assertFalse(report.passed)
        self.assertEqual(int(report.suite_totals().loc['schur', 'passed']), 1)
        self.assertEqual(report.counterexamples()[('schur', 'contraction')], 'T=[[2]]')
        self.assertIn('first counterexample [schur/contraction]: T=[[2]]', report.render())
        self.assertEqual(report.to_json()['suites']['schur']['passed'], 1)
