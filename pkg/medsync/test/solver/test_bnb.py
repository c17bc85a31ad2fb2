import csv
import json
import os
import tempfile
import unittest

import numpy as np
import scipy.sparse as sp
from numpy.random import RandomState

from medsync.instance.io import load_bundled_instance
from medsync.instance.random_instances import random_small_instance
from medsync.modelgen.builder import build
from medsync.modelgen.milp_model import MilpModel
from medsync.modelgen.solution import extract_solution
from medsync.modelgen.variables import ColumnKind, VarKind
from medsync.solver.bnb import solve_milp, select_branching_column, column_classes, OTHER_RANK
from medsync.solver.config import BnbConfig
from medsync.solver.constants import MILP_OPTIMAL, MILP_INFEASIBLE, MILP_LIMIT, MILP_UNBOUNDED, NODE_LOG_FIELDS
from medsync.solver.oracle import brute_force_oracle
from medsync.test.fixtures import knapsack_model, single_patient_instance, two_patient_instance, BASE_EMPLOYEES, \
    RUN_SLOW


def _assignment_model():
    """2x2 assignment, totally unimodular: maximize 4 x00 + x01 + 2 x10 + 3 x11"""
    rows = [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]]
    return MilpModel(sp.csr_matrix(np.array(rows, dtype=float)), ['E'] * 4, [1.0] * 4, [4.0, 1.0, 2.0, 3.0],
                     [0.0] * 4, [1.0] * 4, [ColumnKind.BINARY] * 4, ['x00', 'x01', 'x10', 'x11'],
                     ['worker0', 'worker1', 'job0', 'job1'], name='assignment')


def _two_class_model():
    """Root relaxation has O_... = 1.5 and X_... = 0.5; the O column comes first"""
    return MilpModel(sp.csr_matrix([[2.0, 0.0], [0.0, 2.0]]), ['L', 'L'], [3.0, 1.0], [1.0, 1.0],
                     [0.0, 0.0], [3.0, 1.0], [ColumnKind.INTEGER, ColumnKind.BINARY],
                     ['O_c0_k0_p0_w0', 'X_a0_d0_p0_w0'], ['o_cap', 'x_cap'], name='two_class')


class TestSolveMilp(unittest.TestCase):
    def test_knapsack(self):
        result = solve_milp(knapsack_model())
        self.assertEqual(result.status, MILP_OPTIMAL)
        self.assertAlmostEqual(result.objective, 9.0)
        np.testing.assert_allclose(result.values, [1.0, 1.0, 0.0])
        self.assertAlmostEqual(result.gap, 0.0)
        self.assertAlmostEqual(result.root_bound, 5.0 + 3.0 + 4.0 * 2.0 / 3.0)
        self.assertGreater(result.nodes, 1)

    def test_knapsack_every_configuration(self):
        for rule in ('most_fractional', 'structured_priority'):
            for selection in ('best_bound', 'depth_first_dive'):
                for presolve in (True, False):
                    cfg = BnbConfig(branching_rule=rule, node_selection=selection, presolve=presolve)
                    result = solve_milp(knapsack_model(), cfg)
                    self.assertEqual(result.status, MILP_OPTIMAL)
                    self.assertAlmostEqual(result.objective, 9.0)

    def test_totally_unimodular_model_needs_one_node(self):
        result = solve_milp(_assignment_model())
        self.assertEqual(result.status, MILP_OPTIMAL)
        self.assertAlmostEqual(result.objective, 7.0)
        self.assertEqual(result.nodes, 1)
        self.assertEqual(result.branching_log, [])

    def test_zero_need_patient(self):
        model = build(single_patient_instance(), check=False)
        result = solve_milp(model)
        wages = [wage for _, _, _, wage in BASE_EMPLOYEES]
        expected = -(1.65 + wages[0] * 126.667 * 4 + wages[1] * 126.667 * 4)
        self.assertEqual(result.status, MILP_OPTIMAL)
        self.assertAlmostEqual(result.objective, expected, places=6)

    def test_all_period_orders_forced(self):
        model = build(single_patient_instance(needs=((1, 0), (0, 1)), sigma=4), check=False)
        result = solve_milp(model)
        solution = extract_solution(model, result.values, result.status)
        np.testing.assert_array_equal(solution.x.sum(axis=(0, 1))[0], [1, 1, 1, 1])

    def test_no_capacity_is_infeasible(self):
        model = build(single_patient_instance(needs=((1, 0), (0, 0)), capacities=[0, 0, 0, 0]), check=False)
        for presolve in (True, False):
            result = solve_milp(model, BnbConfig(presolve=presolve))
            self.assertEqual(result.status, MILP_INFEASIBLE)
            self.assertIsNone(result.values)
            self.assertIsNone(result.objective)

    def test_unbounded(self):
        model = MilpModel(sp.csr_matrix([[-1.0]]), ['L'], [0.0], [1.0], [0.0], [np.inf], [ColumnKind.INTEGER],
                          ['y'], ['r'], name='unbounded')
        self.assertEqual(solve_milp(model).status, MILP_UNBOUNDED)

    def test_node_limit_without_incumbent(self):
        result = solve_milp(knapsack_model(), BnbConfig(node_limit=1))
        self.assertEqual(result.status, MILP_LIMIT)
        self.assertIsNone(result.values)
        self.assertGreaterEqual(result.bound, 9.0)

    def test_gap_target(self):
        result = solve_milp(knapsack_model(), BnbConfig(gap_target=1e-2))
        self.assertEqual(result.status, MILP_OPTIMAL)
        self.assertLessEqual(result.gap, 1e-2)
        self.assertAlmostEqual(result.objective, 9.0)

    def test_deterministic(self):
        model = build(two_patient_instance(), check=False)
        first, second = solve_milp(model), solve_milp(model)
        np.testing.assert_array_equal(first.values, second.values)
        self.assertEqual(first.nodes, second.nodes)
        self.assertEqual(first.lp_iterations, second.lp_iterations)

    def test_incumbent_is_feasible_and_bounded(self):
        model = build(two_patient_instance(), check=False)
        result = solve_milp(model, BnbConfig(keep_node_log=True))
        self.assertEqual(model.check_feasible(result.values), [])
        self.assertLessEqual(result.objective, result.bound + 1e-9)
        self.assertLessEqual(result.objective, result.root_bound + 1e-9)
        bounds = {entry.node_id: entry.bound for entry in result.node_log}
        for entry in result.node_log:
            if entry.parent_id is not None and entry.node_id in bounds:
                self.assertLessEqual(entry.bound, bounds[entry.parent_id] + 1e-9)
            if entry.incumbent is not None and entry.action != 'pruned_infeasible':
                self.assertLessEqual(entry.incumbent, result.root_bound + 1e-9)

    def test_disabled_pruning_keeps_optimum(self):
        for seed in range(10):
            model = build(random_small_instance(RandomState(seed), max_patients=2, max_modes=1, max_employees=1,
                                                max_need=1), check=False)
            pruned = solve_milp(model)
            unpruned = solve_milp(model, BnbConfig(disable_pruning=True))
            self.assertEqual(pruned.status, unpruned.status)
            if pruned.status == MILP_OPTIMAL:
                self.assertAlmostEqual(pruned.objective, unpruned.objective, places=6)
                self.assertGreaterEqual(unpruned.nodes, pruned.nodes)

    def test_matches_enumeration_on_random_instances(self):
        sizes = []
        for seed in range(100):
            instance = random_small_instance(RandomState(seed), max_patients=4, max_modes=1, max_employees=1,
                                             periods=2, max_rho=3, max_need=1, max_capacity=8)
            sizes.append(instance.num_patients)
            model = build(instance, check=False)
            result = solve_milp(model)
            oracle = brute_force_oracle(model)
            self.assertEqual(result.status, oracle.status, msg='seed %d' % seed)
            if oracle.status == MILP_OPTIMAL:
                self.assertAlmostEqual(result.objective, oracle.objective, delta=1e-6, msg='seed %d' % seed)
        self.assertEqual(max(sizes), 4)

    @unittest.skipUnless(RUN_SLOW, "set MEDSYNC_RUN_SLOW_TESTS=1 to run")
    def test_matches_enumeration_on_larger_random_instances(self):
        for seed in range(100):
            model = build(random_small_instance(RandomState(1000 + seed), max_patients=4, max_modes=2,
                                                max_employees=2), check=False)
            result = solve_milp(model)
            oracle = brute_force_oracle(model, limit=128, node_limit=20000000)
            self.assertEqual(result.status, oracle.status, msg='seed %d' % seed)
            if oracle.status == MILP_OPTIMAL:
                self.assertAlmostEqual(result.objective, oracle.objective, delta=1e-6, msg='seed %d' % seed)

    @unittest.skipUnless(RUN_SLOW, "set MEDSYNC_RUN_SLOW_TESTS=1 to run")
    def test_base_case(self):
        model = build(load_bundled_instance())
        result = solve_milp(model)
        self.assertEqual(result.status, MILP_OPTIMAL)
        self.assertAlmostEqual(result.objective, -130874.47 / 3, delta=0.05)
        self.assertLessEqual(result.gap, 1e-6)

    def test_rejects_wrong_types(self):
        self.assertRaises(TypeError, solve_milp, 'model')
        self.assertRaises(TypeError, solve_milp, knapsack_model(), config={'presolve': False})


class TestBranching(unittest.TestCase):
    def test_structured_priority_prefers_orders(self):
        result = solve_milp(_two_class_model(), BnbConfig(presolve=False))
        self.assertEqual(result.branching_log[0].var_class, 'X')
        self.assertEqual(result.branching_log[0].name, 'X_a0_d0_p0_w0')
        self.assertAlmostEqual(result.objective, 1.0)

    def test_most_fractional_takes_lowest_index_on_ties(self):
        result = solve_milp(_two_class_model(), BnbConfig(presolve=False, branching_rule='most_fractional'))
        self.assertEqual(result.branching_log[0].var_class, 'O')
        self.assertEqual(result.branching_log[0].column, 0)

    def test_select_branching_column(self):
        x = np.array([0.5, 0.3, 0.9, 2.5])
        fractional = np.array([True, True, True, True])
        self.assertEqual(select_branching_column(x, fractional, 'most_fractional'), 0)
        ranks = np.array([3, 0, 0, OTHER_RANK])
        self.assertEqual(select_branching_column(x, fractional, 'structured_priority', ranks), 1)
        self.assertRaises(ValueError, select_branching_column, x, np.zeros(4, dtype=bool), 'most_fractional')

    def test_column_classes_of_built_model(self):
        model = build(two_patient_instance(), check=False)
        ranks, labels = column_classes(model)
        self.assertEqual(labels[0], 'X')
        self.assertEqual(labels[-1], 'M')
        start, stop = model.var_map.block(VarKind.X)
        self.assertTrue(np.all(ranks[start:stop] == 0))
        start, stop = model.var_map.block(VarKind.O)
        self.assertTrue(np.all(ranks[start:stop] == 3))

    def test_column_classes_from_names(self):
        ranks, labels = column_classes(knapsack_model())
        self.assertEqual(labels, ['other'] * 3)
        self.assertTrue(np.all(ranks == OTHER_RANK))


class TestSolverOutput(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test_node_log_csv(self):
        fname = os.path.join(self.tmp.name, 'nodes.csv')
        result = solve_milp(knapsack_model(), BnbConfig(node_log_path=fname))
        self.assertEqual(result.node_log, [])
        with open(fname) as f:
            reader = csv.DictReader(f)
            self.assertEqual(reader.fieldnames, NODE_LOG_FIELDS)
            rows = list(reader)
        self.assertEqual(rows[0]['node_id'], '0')
        self.assertEqual(rows[0]['parent_id'], '')
        self.assertEqual(rows[0]['action'], 'branched')
        self.assertTrue(any(r['action'] == 'integral' for r in rows))
        self.assertEqual(len(rows), len({r['node_id'] for r in rows}))

    def test_summary_json(self):
        fname = os.path.join(self.tmp.name, 'summary.json')
        result = solve_milp(knapsack_model())
        result.save_summary_to_json(fname)
        with open(fname) as f:
            summary = json.load(f)
        self.assertEqual(summary['status'], MILP_OPTIMAL)
        self.assertAlmostEqual(summary['objective'], 9.0)
        self.assertEqual(summary['nodes'], result.nodes)
        self.assertEqual(summary['model_stats']['columns'], 3)


if __name__ == '__main__':
    unittest.main()
