import copy
import math
import os
import tempfile
import unittest

from medsync.solver.config import BnbConfig, LpLimits
from medsync.solver.constants import MILP_OPTIMAL
from medsync.solver.statistics import BnbResult, NodeLogEntry, relative_gap


class TestLpLimits(unittest.TestCase):
    def test_defaults(self):
        limits = LpLimits()
        self.assertEqual(limits.max_iterations, 200000)
        self.assertEqual(limits.feasibility_tol, 1e-9)
        self.assertEqual(limits.refactor_frequency, 100)

    def test_invalid_values(self):
        self.assertRaises(ValueError, LpLimits, max_iterations=0)
        self.assertRaises(ValueError, LpLimits, max_iterations=1.5)
        self.assertRaises(ValueError, LpLimits, feasibility_tol=0.0)
        self.assertRaises(ValueError, LpLimits, optimality_tol=0.5)
        self.assertRaises(ValueError, LpLimits, pivot_tol=True)
        self.assertRaises(ValueError, LpLimits, degenerate_streak=-3)

    def test_deepcopy_and_eq(self):
        limits = LpLimits(max_iterations=50)
        limits_copy = copy.deepcopy(limits)
        self.assertEqual(limits, limits_copy)
        self.assertIsNot(limits, limits_copy)
        self.assertNotEqual(limits, LpLimits())


class TestBnbConfig(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test_defaults(self):
        cfg = BnbConfig()
        self.assertEqual(cfg.integrality_tol, 1e-6)
        self.assertEqual(cfg.gap_target, 0.0)
        self.assertEqual(cfg.branching_rule, 'structured_priority')
        self.assertEqual(cfg.node_selection, 'best_bound')
        self.assertEqual(cfg.lp_limits, LpLimits())
        self.assertTrue(cfg.presolve)

    def test_invalid_values(self):
        self.assertRaises(ValueError, BnbConfig, integrality_tol=0.1)
        self.assertRaises(ValueError, BnbConfig, gap_target=-1e-3)
        self.assertRaises(ValueError, BnbConfig, gap_target=0.5)
        self.assertRaises(ValueError, BnbConfig, node_limit=0)
        self.assertRaises(ValueError, BnbConfig, time_limit=0)
        self.assertRaises(ValueError, BnbConfig, branching_rule='random')
        self.assertRaises(ValueError, BnbConfig, node_selection='breadth_first')
        self.assertRaises(TypeError, BnbConfig, lp_limits={'max_iterations': 10})
        self.assertRaises(TypeError, BnbConfig, presolve='yes')
        self.assertRaises(TypeError, BnbConfig, node_log_path=3)
        self.assertRaises(ValueError, BnbConfig, log_frequency=0)

    def test_save_load(self):
        cfg = BnbConfig(gap_target=1e-4, node_limit=500, branching_rule='most_fractional',
                        node_selection='depth_first_dive', lp_limits=LpLimits(max_iterations=1000))
        fname = os.path.join(self.tmp.name, 'bnb.cfg')
        cfg.save(fname)
        self.assertEqual(BnbConfig.load(fname), cfg)

    def test_deepcopy(self):
        cfg = BnbConfig(time_limit=30.0)
        cfg_copy = copy.deepcopy(cfg)
        self.assertEqual(cfg, cfg_copy)
        self.assertIsNot(cfg.lp_limits, cfg_copy.lp_limits)
        self.assertIn('time_limit', str(cfg))


class TestStatistics(unittest.TestCase):
    def test_relative_gap(self):
        self.assertAlmostEqual(relative_gap(110.0, 100.0), 0.1)
        self.assertAlmostEqual(relative_gap(0.5, 0.0), 0.5)
        self.assertAlmostEqual(relative_gap(-99.0, -100.0), 0.01)
        self.assertEqual(relative_gap(100.0, 100.0 + 1e-12), 0.0)
        self.assertIsNone(relative_gap(None, 1.0))
        self.assertIsNone(relative_gap(1.0, None))

    def test_result_gap(self):
        result = BnbResult(MILP_OPTIMAL, objective=-43624.82, bound=-43624.82)
        self.assertEqual(result.gap, 0.0)
        self.assertFalse(result.has_incumbent)
        self.assertIn('optimal', str(result))

    def test_invalid_status(self):
        self.assertRaises(ValueError, BnbResult, 'solved')

    def test_node_log_entry(self):
        entry = NodeLogEntry(3, 1, 2, math.inf, None, 'branched')
        self.assertEqual(entry.get_as_dict(), dict(node_id=3, parent_id=1, depth=2, bound='inf', incumbent='',
                                                   action='branched'))
        self.assertRaises(ValueError, NodeLogEntry, 0, None, 0, 1.0, None, 'skipped')


if __name__ == '__main__':
    unittest.main()
