import unittest

import numpy as np
import scipy.sparse as sp

from medsync.modelgen.builder import build
from medsync.modelgen.milp_model import MilpModel
from medsync.modelgen.variables import ColumnKind, VarKind, VarRef
from medsync.solver.bnb import solve_milp
from medsync.solver.config import BnbConfig
from medsync.solver.constants import MILP_OPTIMAL
from medsync.solver.oracle import brute_force_oracle
from medsync.solver.presolve import presolve, InfeasibleModelError, PRESOLVE_ACTIONS
from medsync.test.fixtures import knapsack_model, single_patient_instance, two_patient_instance


def _binary_model(rows, senses, rhs, objective, name='toy'):
    n = len(objective)
    return MilpModel(sp.csr_matrix(np.array(rows, dtype=float)), senses, rhs, objective, [0.0] * n, [1.0] * n,
                     [ColumnKind.BINARY] * n, ['x%d' % j for j in range(n)],
                     ['r%d' % i for i in range(len(rhs))], name=name)


class TestPresolve(unittest.TestCase):
    def test_forced_binaries_are_fixed(self):
        # x0 >= 1 forces x0 = 1, then x0 + x1 <= 1 forces x1 = 0
        model = _binary_model([[1, 0], [1, 1]], ['G', 'L'], [1, 1], [1, 1])
        reduced, log = presolve(model)
        np.testing.assert_array_equal(reduced.lower, [1.0, 0.0])
        np.testing.assert_array_equal(reduced.upper, [1.0, 0.0])
        self.assertEqual(reduced.num_rows, 0)
        self.assertEqual(reduced.num_cols, 2)
        fixes = [e for e in log if e.kind == 'fix']
        self.assertEqual([(e.column, e.row) for e in fixes], [('x0', 'r0'), ('x1', 'r1')])
        self.assertEqual(sorted(e.row for e in log if e.kind == 'redundant'), ['r0', 'r1'])
        self.assertTrue(all(e.kind in PRESOLVE_ACTIONS for e in log))

    def test_input_model_is_unchanged(self):
        model = _binary_model([[1, 0], [1, 1]], ['G', 'L'], [1, 1], [1, 1])
        presolve(model)
        np.testing.assert_array_equal(model.lower, [0.0, 0.0])
        self.assertEqual(model.num_rows, 2)

    def test_integer_bounds_are_rounded(self):
        # 2y <= 5 with y integer gives y <= 2
        model = MilpModel(sp.csr_matrix([[2.0]]), ['L'], [5.0], [1.0], [0.0], [10.0], [ColumnKind.INTEGER],
                          ['y'], ['r'])
        reduced, log = presolve(model)
        self.assertEqual(reduced.upper[0], 2.0)
        self.assertEqual(log[0].kind, 'bound')
        self.assertEqual(log[0].old, (0.0, 10.0))
        self.assertEqual(log[0].new, (0.0, 2.0))

    def test_empty_violated_row(self):
        matrix = sp.csr_matrix((np.array([0.0, 1.0]), (np.array([0, 1]), np.array([0, 0]))), shape=(2, 1))
        model = MilpModel(matrix, ['L', 'L'], [-1.0, 1.0], [1.0], [0.0], [1.0], [ColumnKind.BINARY], ['x'],
                          ['empty', 'r'])
        with self.assertRaises(InfeasibleModelError) as cm:
            presolve(model)
        self.assertEqual(cm.exception.row, 'empty')

    def test_unreachable_row(self):
        model = _binary_model([[1, 1]], ['G'], [3], [1, 1])
        self.assertRaises(InfeasibleModelError, presolve, model)

    def test_inverted_bounds(self):
        model = MilpModel(sp.csr_matrix([[1.0]]), ['L'], [5.0], [1.0], [2.0], [1.0], [ColumnKind.INTEGER],
                          ['y'], ['r'])
        with self.assertRaises(InfeasibleModelError) as cm:
            presolve(model)
        self.assertEqual(cm.exception.column, 'y')

    def test_coefficient_tightening(self):
        # y0 + y1 - 10 x <= 0 with y <= 1: the big-M of x shrinks to 2
        model = MilpModel(sp.csr_matrix([[1.0, 1.0, -10.0]]), ['L'], [0.0], [1.0, 1.0, -1.0],
                          [0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [ColumnKind.INTEGER] * 2 + [ColumnKind.BINARY],
                          ['y0', 'y1', 'x'], ['cover'])
        reduced, log = presolve(model)
        self.assertEqual(reduced.matrix[0, 2], -2.0)
        entry = [e for e in log if e.kind == 'coefficient'][0]
        self.assertEqual((entry.row, entry.column, entry.old, entry.new), ('cover', 'x', -10.0, -2.0))

    def test_equality_rows_keep_coefficients(self):
        model = MilpModel(sp.csr_matrix([[1.0, 1.0, -10.0]]), ['E'], [0.0], [1.0, 1.0, -1.0],
                          [0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [ColumnKind.INTEGER] * 2 + [ColumnKind.BINARY],
                          ['y0', 'y1', 'x'], ['cover'])
        reduced, log = presolve(model)
        self.assertFalse([e for e in log if e.kind == 'coefficient'])

    def test_zero_need_fixes_deliveries(self):
        # the patient needs nothing of the cooled class
        model = build(single_patient_instance(needs=((0, 0), (2, 1))), check=False)
        reduced, _ = presolve(model)
        for k in range(2):
            for w in range(4):
                j = model.var_map.index(VarRef(VarKind.O, 0, k, 0, w))
                self.assertEqual(reduced.upper[j], 0.0)
        self.assertNotIn('cooled_cover_p0_w0', reduced.row_names)

    def test_big_m_shrinks_to_patient_needs(self):
        model = build(two_patient_instance(), check=False)
        _, log = presolve(model)
        new = {(e.row, e.column): e.new for e in log if e.kind == 'coefficient'}
        # patient 0 needs 3 cooled items and 1 non-cooled item over the horizon
        self.assertEqual(new[('cooled_cover_p0_w0', 'X_a0_d0_p0_w0')], -3.0)
        self.assertEqual(new[('noncooled_cover_p0_w1', 'X_a1_d2_p0_w1')], -1.0)

    def test_optimum_unchanged(self):
        for model in (knapsack_model(), build(two_patient_instance(), check=False)):
            with_presolve = solve_milp(model, BnbConfig(presolve=True))
            without_presolve = solve_milp(model, BnbConfig(presolve=False))
            self.assertEqual(with_presolve.status, MILP_OPTIMAL)
            self.assertAlmostEqual(with_presolve.objective, without_presolve.objective, places=6)

    def test_oracle_agrees_on_reduced_model(self):
        model = build(single_patient_instance(needs=((1, 0), (0, 1)), periods=2), check=False)
        reduced, _ = presolve(model)
        self.assertAlmostEqual(brute_force_oracle(reduced).objective, brute_force_oracle(model).objective,
                               places=6)

    def test_rejects_wrong_type(self):
        self.assertRaises(TypeError, presolve, 'model')


if __name__ == '__main__':
    unittest.main()
