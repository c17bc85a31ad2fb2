import unittest

import numpy as np
import scipy.sparse as sp

from medsync.modelgen.milp_model import MilpModel, ModelError
from medsync.modelgen.variables import ColumnKind
from medsync.solver.lp_problem import LpProblem
from medsync.test.fixtures import knapsack_model


def _model(**changes):
    fields = dict(matrix=sp.csr_matrix([[1.0, 2.0], [1.0, 0.0]]), senses=['L', 'G'], rhs=[4.0, 1.0],
                  objective=[1.0, 1.0], lower=[0.0, 0.0], upper=[1.0, 5.0],
                  kinds=[ColumnKind.BINARY, ColumnKind.INTEGER], col_names=['x', 'y'], row_names=['r0', 'r1'])
    fields.update(changes)
    return MilpModel(**fields)


class TestValidate(unittest.TestCase):
    def test_valid_model(self):
        _model().validate()
        knapsack_model().validate()

    def test_length_mismatch(self):
        self.assertRaises(ModelError, _model(rhs=[4.0]).validate)
        self.assertRaises(ModelError, _model(col_names=['x']).validate)

    def test_bad_sense(self):
        self.assertRaises(ModelError, _model(senses=['L', '>']).validate)

    def test_duplicate_names(self):
        with self.assertRaises(ModelError) as cm:
            _model(col_names=['x', 'x']).validate()
        self.assertIn('duplicate column names', str(cm.exception))
        self.assertRaises(ModelError, _model(row_names=['r', 'r']).validate)

    def test_empty_names(self):
        self.assertRaises(ModelError, _model(row_names=['r0', '']).validate)
        self.assertRaises(ModelError, _model(col_names=['x', 'y' * 300]).validate)

    def test_empty_row(self):
        with self.assertRaises(ModelError) as cm:
            _model(matrix=sp.csr_matrix([[1.0, 2.0], [0.0, 0.0]])).validate()
        self.assertIn('r1', str(cm.exception))

    def test_bounds(self):
        self.assertRaises(ModelError, _model(lower=[0.0, 6.0]).validate)
        self.assertRaises(ModelError, _model(upper=[2.0, 5.0]).validate)
        self.assertRaises(ModelError, _model(lower=[0.0, np.inf], upper=[1.0, np.inf]).validate)
        self.assertRaises(ModelError, _model(upper=[1.0, np.nan]).validate)
        _model(upper=[1.0, np.inf]).validate()

    def test_non_finite_data(self):
        self.assertRaises(ModelError, _model(rhs=[np.inf, 1.0]).validate)
        self.assertRaises(ModelError, _model(matrix=sp.csr_matrix([[1.0, np.nan], [1.0, 0.0]])).validate)

    def test_invalid_kind(self):
        self.assertRaises(ModelError, _model(kinds=[ColumnKind.BINARY, 'integer']).validate)


class TestMilpModel(unittest.TestCase):
    def test_check_feasible(self):
        model = _model()
        self.assertEqual(model.check_feasible([1.0, 1.0]), [])
        problems = model.check_feasible([0.0, 2.5])
        self.assertEqual(len(problems), 3)
        self.assertIn('y = 2.5 is not integral', problems)
        self.assertTrue(any(p.startswith('r0: activity 5.0 <= 4.0') for p in problems))
        self.assertTrue(any(p.startswith('r1') for p in problems))
        self.assertTrue(model.check_feasible([2.0, 0.0])[0].startswith('x = 2.0 outside'))
        self.assertEqual(model.check_feasible([1.0]), ['expected 2 values, got (1,)'])

    def test_objective_and_activity(self):
        model = knapsack_model()
        self.assertEqual(model.objective_value([1, 1, 0]), 9.0)
        np.testing.assert_array_equal(model.row_activity([1, 1, 1]), [6.0])

    def test_masks(self):
        model = _model(kinds=[ColumnKind.BINARY, ColumnKind.CONTINUOUS])
        np.testing.assert_array_equal(model.integer_mask, [True, False])
        np.testing.assert_array_equal(model.binary_mask, [True, False])
        self.assertFalse(ColumnKind.CONTINUOUS.is_integer)
        self.assertTrue(ColumnKind.INTEGER.is_integer)

    def test_size_stats(self):
        stats = _model().size_stats()
        self.assertEqual(stats, dict(rows=2, columns=2, nonzeros=3, binary_columns=1, integer_columns=1,
                                     continuous_columns=0))

    def test_replace(self):
        model = _model()
        changed = model.replace(rhs=[3.0, 1.0], name='changed')
        self.assertEqual(changed.rhs[0], 3.0)
        self.assertEqual(model.rhs[0], 4.0)
        self.assertEqual(changed.name, 'changed')
        self.assertRaises(ValueError, model.replace, cost=[1.0])

    def test_equality(self):
        self.assertEqual(_model(), _model())
        self.assertNotEqual(_model(), _model(objective=[1.0, 2.0]))
        self.assertNotEqual(_model(), _model(matrix=sp.csr_matrix([[1.0, 3.0], [1.0, 0.0]])))
        self.assertNotEqual(_model(), knapsack_model())
        self.assertNotEqual(_model(), 'model')

    def test_lp_relaxation_is_cached(self):
        model = knapsack_model()
        lp = model.to_lp_problem()
        self.assertIsInstance(lp, LpProblem)
        self.assertIs(model.to_lp_problem(), lp)

    def test_str(self):
        self.assertEqual(str(knapsack_model()), 'MilpModel[knapsack: 1 rows, 3 columns (3 integer), 3 nonzeros]')


if __name__ == '__main__':
    unittest.main()
