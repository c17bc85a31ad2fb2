import unittest

import numpy as np

from medsync.instance.entities import DeliveryMode, PatientType
from medsync.instance.io import load_bundled_instance
from medsync.modelgen.builder import build, objective_coefficient
from medsync.modelgen.milp_model import ModelError
from medsync.modelgen.variables import ModelVariant, VarKind, VarRef
from medsync.solver.bnb import solve_milp
from medsync.solver.constants import MILP_OPTIMAL
from medsync.test.fixtures import base_parameter_instance, two_patient_instance


class TestBuildBaseCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.instance = load_bundled_instance()
        cls.model = build(cls.instance)

    def test_size(self):
        self.assertEqual(self.model.num_cols, 14410)
        self.assertEqual(self.model.num_rows, 3857)
        stats = self.model.size_stats()
        self.assertEqual(stats['columns_X'], 3 * 4 * 225 * 4)
        self.assertEqual(stats['columns_O'], 2 * 2 * 225 * 4)
        self.assertEqual(stats['columns_m'], 8)
        self.assertEqual(stats['columns_M'], 2)
        self.assertEqual(stats['binary_columns'], 10800)
        self.assertEqual(stats['continuous_columns'], 0)

    def test_row_blocks_in_order(self):
        prefixes = [name.rsplit('_p', 1)[0] if '_p' in name else name.split('_e')[0].split('_d')[0]
                    for name in self.model.row_names]
        first = {}
        for i, prefix in enumerate(prefixes):
            first.setdefault(prefix, i)
        self.assertEqual(sorted(first, key=first.get),
                         ['one_order', 'cooled_cover', 'noncooled_cover', 'demand_c0_k0', 'demand_c0_k1',
                          'demand_c1_k0', 'demand_c1_k1', 'min_orders', 'capacity', 'staff_hours', 'staff_max'])
        self.assertEqual(self.model.row_names[0], 'one_order_p0_w0')
        self.assertEqual(self.model.row_names[-1], 'staff_max_e1_w3')

    def test_column_names_round_trip(self):
        for j in (0, 1234, 10800, 14399, 14409):
            ref = VarRef.from_name(self.model.col_names[j])
            self.assertEqual(self.model.var_map.index(ref), j)
        self.assertEqual(self.model.col_names[0], 'X_a0_d0_p0_w0')
        self.assertEqual(self.model.col_names[-1], 'M_e1')

    def test_metadata(self):
        self.assertEqual(self.model.metadata['variant'], 'base')
        self.assertEqual(self.model.metadata['periods'], 4)
        self.assertAlmostEqual(self.model.metadata['annualization'], 3.0)

    def test_variants(self):
        relaxed = build(self.instance, ModelVariant.RELAXED_ORDERS)
        self.assertEqual(relaxed.num_cols, 14410)
        demand_rows = [i for i, name in enumerate(relaxed.row_names) if name.startswith('demand_')]
        self.assertTrue(all(relaxed.senses[i] == 'G' for i in demand_rows))
        self.assertTrue(all(self.model.senses[i] == 'E' for i in demand_rows))

        hours = build(self.instance, 'hours_staffing')
        self.assertEqual(hours.num_cols, 10800 + 3600 + 8)
        self.assertEqual(hours.num_rows, 3857 - 8)
        self.assertEqual(hours.var_map.kinds(), [VarKind.X, VarKind.O, VarKind.HOURS])
        self.assertEqual(hours.size_stats()['continuous_columns'], 8)
        self.assertFalse(any(name.startswith('staff_max') for name in hours.row_names))
        h = hours.var_map.index(VarRef(VarKind.HOURS, 1, 2))
        self.assertEqual(hours.objective[h], -40.0)

    def test_salaries_in_objective(self):
        self.assertAlmostEqual(objective_coefficient(self.model, VarRef(VarKind.M_BIG, 0)), -33.0 * 126.667 * 4)
        self.assertEqual(objective_coefficient(self.model, VarRef(VarKind.M_SMALL, 0, 0)), 0.0)


class TestBuildSmall(unittest.TestCase):
    def setUp(self):
        patients = [PatientType(0, [[1, 0], [0, 0]], 10, 1), PatientType(1, [[0, 1], [0, 0]], 5, 1)]
        self.model = build(base_parameter_instance(patients, periods=2), check=False)

    def test_objective_coefficients(self):
        self.assertAlmostEqual(objective_coefficient(self.model, VarRef(VarKind.X, 1, 3, 0, 1)), -16.50)
        self.assertEqual(objective_coefficient(self.model, VarRef(VarKind.O, 0, 0, 1, 0)), 0.0)
        self.assertAlmostEqual(objective_coefficient(self.model, VarRef(VarKind.O, 0, 1, 1, 1)), 39.70)

    def test_unknown_reference(self):
        self.assertRaises(KeyError, objective_coefficient, self.model, VarRef(VarKind.X, 0, 0, 5, 0))
        self.assertRaises(KeyError, objective_coefficient, self.model, VarRef(VarKind.HOURS, 0, 0))

    def test_cooling_compatibility_rows(self):
        i = self.model.row_names.index('cooled_cover_p0_w1')
        row = self.model.matrix.getrow(i)
        coefs = {self.model.col_names[j]: v for j, v in zip(row.indices, row.data)}
        self.assertEqual(coefs['O_c0_k0_p0_w1'], 1.0)
        self.assertEqual(coefs['X_a0_d2_p0_w1'], -15.0)
        self.assertEqual(coefs['X_a2_d0_p0_w1'], -15.0)
        self.assertNotIn('X_a1_d0_p0_w1', coefs)

    def test_staff_hours_rows(self):
        i = self.model.row_names.index('staff_hours_e0_w0')
        row = self.model.matrix.getrow(i)
        coefs = {self.model.col_names[j]: v for j, v in zip(row.indices, row.data)}
        self.assertAlmostEqual(coefs['X_a2_d1_p0_w0'], 0.1779 * 10)
        self.assertAlmostEqual(coefs['m_e0_w0'], -126.667)

    def test_order_bounds(self):
        j = self.model.var_map.index(VarRef(VarKind.O, 0, 0, 0, 1))
        self.assertEqual(self.model.upper[j], 1.0)
        self.assertTrue(self.model.kinds[j].is_integer)

    def test_invalid_instance_is_rejected(self):
        patients = [PatientType(0, [[1, 0], [0, 0]], 1, 1)]
        instance = base_parameter_instance(patients, periods=2, big_m=0)
        self.assertRaises(ModelError, build, instance)
        self.assertEqual(build(instance, check=False).metadata['patient_types'], 1)

    def test_wrong_types(self):
        self.assertRaises(TypeError, build, 'instance')
        self.assertRaises(ValueError, build, two_patient_instance(), 'greedy')


class TestModelProperties(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.instance = two_patient_instance()
        cls.base = solve_milp(build(cls.instance, check=False))

    def test_revenue_is_constant(self):
        model = build(self.instance, check=False)
        start, stop = model.var_map.block(VarKind.O)
        revenue = float(np.dot(model.objective[start:stop], self.base.values[start:stop]))
        fees = self.instance.costs.fees
        expected = sum(self.instance.needs[c, k, p] * fees[k] * self.instance.rho[p]
                       for c in range(2) for k in range(2) for p in range(2))
        self.assertAlmostEqual(revenue, expected)

    def test_relaxations_dominate(self):
        self.assertEqual(self.base.status, MILP_OPTIMAL)
        for variant in (ModelVariant.RELAXED_ORDERS, ModelVariant.HOURS_STAFFING):
            result = solve_milp(build(self.instance, variant, check=False))
            self.assertEqual(result.status, MILP_OPTIMAL)
            self.assertGreaterEqual(result.objective, self.base.objective - 1e-6)

    def test_lower_sync_requirement_never_hurts(self):
        patients = [p.replace(sigma=1) for p in self.instance.patients]
        relaxed = solve_milp(build(self.instance.replace(patients=patients), check=False))
        self.assertGreaterEqual(relaxed.objective, self.base.objective - 1e-6)

    def test_more_capacity_never_hurts(self):
        modes = [DeliveryMode(m.id, m.name, m.capacity + 5) for m in self.instance.delivery_modes]
        relaxed = solve_milp(build(self.instance.replace(delivery_modes=modes), check=False))
        self.assertGreaterEqual(relaxed.objective, self.base.objective - 1e-6)

    def test_cooled_content_travels_cooled(self):
        model = build(self.instance, check=False)
        x_start, x_stop = model.var_map.block(VarKind.X)
        o_start, o_stop = model.var_map.block(VarKind.O)
        x = self.base.values[x_start:x_stop].reshape(3, 4, 2, 2)
        o = self.base.values[o_start:o_stop].reshape(2, 2, 2, 2)
        for p in range(2):
            for w in range(2):
                if o[0, :, p, w].sum() > 0:
                    self.assertEqual(x[[0, 2], :, p, w].sum(), 1)
                if o[1, :, p, w].sum() > 0:
                    self.assertEqual(x[[1, 2], :, p, w].sum(), 1)


if __name__ == '__main__':
    unittest.main()
