import json
import os
import tempfile
import unittest

import pandas as pd

from medsync.analysis.constants import SWEEP_CSV_FIELDS, SWEEP_ERROR_STATUS
from medsync.analysis.kpi import compute_kpis
from medsync.analysis.sweep import run_scenario, run_sweep, solve_instance, SweepEntry, SweepResult
from medsync.instance.scenario import ScenarioSpec, ScenarioSpecError, apply_scenario
from medsync.modelgen.variables import ModelVariant
from medsync.solver.constants import MILP_OPTIMAL
from medsync.test.fixtures import two_patient_instance


class TestSolveInstance(unittest.TestCase):
    def test_solution_and_stats(self):
        model, result, solution = solve_instance(two_patient_instance(), check=False)
        self.assertEqual(result.status, MILP_OPTIMAL)
        self.assertEqual(solution.status, MILP_OPTIMAL)
        self.assertEqual(solution.solver_stats['nodes'], result.nodes)
        self.assertEqual(len(solution.values), model.num_cols)
        self.assertEqual(solution.violations, [])


class TestRunSweep(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.base = two_patient_instance()
        cls.specs = [ScenarioSpec('base'), ScenarioSpec('ideal', sync_level='ideal100'),
                     ScenarioSpec('too_few', target_patients=1)]
        cls.result = run_sweep(cls.base, cls.specs, progress_bar_disable=True)

    def test_entries_in_request_order(self):
        self.assertEqual(list(self.result.entries), ['base', 'ideal', 'too_few'])
        self.assertEqual(len(self.result), 3)
        self.assertIs(self.result.base, self.result['base'])
        self.assertEqual(self.result.variant, ModelVariant.BASE)

    def test_statuses(self):
        self.assertEqual(self.result['base'].status, MILP_OPTIMAL)
        self.assertEqual(self.result['ideal'].status, MILP_OPTIMAL)
        failed = self.result['too_few']
        self.assertEqual(failed.status, SWEEP_ERROR_STATUS)
        self.assertIsNone(failed.kpis)
        self.assertTrue(failed.message.startswith('ValueError'))

    def test_matches_single_scenario(self):
        instance = apply_scenario(self.base, self.specs[0])
        _, _, solution = solve_instance(instance)
        expected = compute_kpis(instance, solution).total_annual_lfo
        self.assertAlmostEqual(self.result['base'].kpis.total_annual_lfo, expected)
        self.assertAlmostEqual(self.result['base'].kpis.annualization, 6.0)

    def test_full_sync_never_hurts(self):
        self.assertGreaterEqual(self.result['ideal'].kpis.total_annual_lfo,
                                self.result['base'].kpis.total_annual_lfo - 1e-6)

    def test_deltas(self):
        self.assertEqual(self.result.deltas(self.result.base), (0.0, 0.0))
        total, _ = self.result.deltas(self.result['ideal'])
        self.assertGreaterEqual(total, -1e-9)
        self.assertEqual(self.result.deltas(self.result['too_few']), (None, None))

    def test_frame(self):
        df = self.result.to_frame()
        self.assertEqual(list(df.columns), SWEEP_CSV_FIELDS)
        self.assertEqual(df['label'].tolist(), ['base', 'ideal', 'too_few'])
        self.assertTrue(pd.isna(df.loc[2, 'total_annual_lfo']))
        self.assertGreater(df.loc[0, 'columns'], 0)

    def test_save(self):
        with tempfile.TemporaryDirectory() as tmp:
            json_fname, csv_fname = self.result.save(os.path.join(tmp, 'out'))
            with open(json_fname) as f:
                doc = json.load(f)
            self.assertEqual(doc['base'], 'base')
            self.assertEqual([s['label'] for s in doc['scenarios']], ['base', 'ideal', 'too_few'])
            self.assertEqual(doc['scenarios'][0]['total_lfo_delta_pct'], 0.0)
            self.assertEqual(doc['scenarios'][1]['scenario']['sync_level'], 'ideal100')
            self.assertIsNone(doc['scenarios'][2]['kpis'])
            self.assertEqual(len(pd.read_csv(csv_fname)), 3)
            self.assertIn('wall_time', doc['scenarios'][0]['solver'])

    def test_save_without_timings(self):
        rerun = run_sweep(self.base, self.specs, progress_bar_disable=True)
        with tempfile.TemporaryDirectory() as tmp:
            first = self.result.save(os.path.join(tmp, 'a'), timings=False)
            second = rerun.save(os.path.join(tmp, 'b'), timings=False)
            for fname_a, fname_b in zip(first, second):
                with open(fname_a) as fa, open(fname_b) as fb:
                    self.assertEqual(fa.read(), fb.read())
        self.assertIn('wall_time', self.result['base'].solver_stats)

    def test_parallel_matches_serial(self):
        parallel = run_sweep(self.base, self.specs[:2], n_jobs=2, progress_bar_disable=True)
        self.assertEqual(list(parallel.entries), ['base', 'ideal'])
        for label in ('base', 'ideal'):
            self.assertAlmostEqual(parallel[label].kpis.total_annual_lfo,
                                   self.result[label].kpis.total_annual_lfo)

    def test_bad_requests(self):
        self.assertRaises(ValueError, run_sweep, self.base, [], progress_bar_disable=True)
        self.assertRaises(ScenarioSpecError, run_sweep, self.base, [ScenarioSpec('a'), ScenarioSpec('a')],
                          progress_bar_disable=True)
        self.assertRaises(TypeError, run_sweep, 'instance', self.specs, progress_bar_disable=True)
        self.assertRaises(ValueError, run_sweep, self.base, self.specs, 'greedy', progress_bar_disable=True)


class TestSweepEntry(unittest.TestCase):
    def test_run_scenario_hours_variant(self):
        entry = run_scenario(two_patient_instance(), ScenarioSpec('hours'), ModelVariant.HOURS_STAFFING)
        self.assertEqual(entry.status, MILP_OPTIMAL)
        self.assertEqual(entry.kpis.variant, ModelVariant.HOURS_STAFFING)
        self.assertEqual(entry.label, 'hours')

    def test_base_without_kpis(self):
        result = SweepResult([SweepEntry(ScenarioSpec('a'), SWEEP_ERROR_STATUS, message='boom')], ModelVariant.BASE)
        self.assertEqual(result.deltas(result.base), (None, None))
        doc = result.get_as_dict()
        self.assertEqual(doc['variant'], 'base')
        self.assertEqual(doc['scenarios'][0]['message'], 'boom')


if __name__ == '__main__':
    unittest.main()
