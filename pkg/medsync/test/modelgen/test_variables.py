import unittest

from medsync.modelgen.variables import ModelVariant, VarKind, VarMap, VarRef


class TestVarRef(unittest.TestCase):
    def test_names(self):
        self.assertEqual(VarRef(VarKind.X, 0, 3, 12, 2).name, 'X_a0_d3_p12_w2')
        self.assertEqual(VarRef(VarKind.O, 1, 0, 224, 3).name, 'O_c1_k0_p224_w3')
        self.assertEqual(VarRef(VarKind.M_SMALL, 1, 0).name, 'm_e1_w0')
        self.assertEqual(VarRef(VarKind.M_BIG, 1).name, 'M_e1')
        self.assertEqual(VarRef(VarKind.HOURS, 0, 3).name, 'H_e0_w3')

    def test_parse(self):
        for ref in (VarRef(VarKind.X, 2, 1, 7, 0), VarRef(VarKind.M_BIG, 0), VarRef(VarKind.M_SMALL, 0, 1)):
            self.assertEqual(VarRef.from_name(ref.name), ref)

    def test_parse_rejects_other_names(self):
        for name in ('x1', 'X_a0_d0_p0', 'M_w0', 'Q_e0', 'X_a0_d0_p0_wx', 'cap'):
            self.assertRaises(ValueError, VarRef.from_name, name)

    def test_wrong_arity(self):
        self.assertRaises(ValueError, VarRef, VarKind.X, 0, 0)

    def test_hash_and_eq(self):
        self.assertEqual(len({VarRef(VarKind.M_BIG, 0), VarRef(VarKind.M_BIG, 0), VarRef(VarKind.M_BIG, 1)}), 2)
        self.assertNotEqual(VarRef(VarKind.M_SMALL, 0, 0), VarRef(VarKind.HOURS, 0, 0))

    def test_variant_from_str(self):
        self.assertIs(ModelVariant.from_str('relaxed_orders'), ModelVariant.RELAXED_ORDERS)
        self.assertIs(ModelVariant.from_str(ModelVariant.BASE), ModelVariant.BASE)
        self.assertRaises(ValueError, ModelVariant.from_str, 'hours')


class TestVarMap(unittest.TestCase):
    def setUp(self):
        self.vmap = VarMap()
        for e in range(2):
            for w in range(3):
                self.vmap.add(VarRef(VarKind.M_SMALL, e, w))
        for e in range(2):
            self.vmap.add(VarRef(VarKind.M_BIG, e))

    def test_blocks(self):
        self.assertEqual(len(self.vmap), 8)
        self.assertEqual(self.vmap.block(VarKind.M_SMALL), (0, 6))
        self.assertEqual(self.vmap.block(VarKind.M_BIG), (6, 8))
        self.assertEqual(self.vmap.block(VarKind.X), (0, 0))
        self.assertEqual(self.vmap.kinds(), [VarKind.M_SMALL, VarKind.M_BIG])

    def test_lookup(self):
        self.assertEqual(self.vmap.index(VarRef(VarKind.M_SMALL, 1, 2)), 5)
        self.assertEqual(self.vmap.ref(7), VarRef(VarKind.M_BIG, 1))
        self.assertIn(VarRef(VarKind.M_BIG, 0), self.vmap)
        self.assertRaises(KeyError, self.vmap.index, VarRef(VarKind.M_BIG, 2))

    def test_duplicates_and_gaps(self):
        self.assertRaises(ValueError, self.vmap.add, VarRef(VarKind.M_BIG, 0))
        self.assertRaises(ValueError, self.vmap.add, VarRef(VarKind.M_SMALL, 2, 0))

    def test_from_names(self):
        names = [self.vmap.ref(j).name for j in range(len(self.vmap))]
        self.assertEqual(VarMap.from_names(names), self.vmap)
        self.assertIsNone(VarMap.from_names(names + ['slack']))
        self.assertIsNone(VarMap.from_names(['m_e0_w0', 'M_e0', 'm_e0_w1']))


if __name__ == '__main__':
    unittest.main()
