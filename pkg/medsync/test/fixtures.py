"""
Small hand-made instances shared by the unit tests.
"""
import os

from medsync.instance.entities import CostSchedule, DeliveryMode, EmployeeType, PatientType
from medsync.instance.instance import Instance

BASE_TRANSPORT = [[16.62, 3.00, 13.62, 1.65],
                  [11.64, 3.00, 8.64, 1.65],
                  [17.32, 3.01, 14.32, 1.66]]
BASE_MODES = [('truck', 6950), ('hubs', 271), ('bike', 120), ('pickup', 253)]
BASE_EMPLOYEES = [('pharmaceutical_employee', [0.1293, 0.1477, 0.1779], 126.667, 33.00),
                  ('pharmacy_technician', [0.0233, 0.0233, 0.0233], 126.667, 40.00)]

# full base-case solves take minutes
RUN_SLOW = os.environ.get('MEDSYNC_RUN_SLOW_TESTS') == '1'


def base_parameter_instance(patients, periods=4, capacities=None, big_m=15):
    """
    Builds an instance with the bundled cost, mode and employee parameters and the given patient types
    """
    caps = capacities if capacities is not None else [c for _, c in BASE_MODES]
    modes = [DeliveryMode(d, name, caps[d]) for d, (name, _) in enumerate(BASE_MODES)]
    employees = [EmployeeType(e, name, u, theta, wage) for e, (name, u, theta, wage) in enumerate(BASE_EMPLOYEES)]
    return Instance(patients, CostSchedule(BASE_TRANSPORT, [0.0, 7.94]), modes, employees, periods, big_m, big_m)


def single_patient_instance(needs=((0, 0), (0, 0)), rho=1, sigma=1, periods=4, capacities=None):
    return base_parameter_instance([PatientType(0, needs, rho, sigma)], periods=periods, capacities=capacities)


def two_patient_instance():
    patients = [PatientType(0, [[1, 2], [0, 1]], 2, 2),
                PatientType(1, [[0, 0], [3, 1]], 3, 1)]
    return base_parameter_instance(patients, periods=2)


def knapsack_model():
    """
    maximize 5x1 + 4x2 + 3x3  s.t.  2x1 + 3x2 + x3 <= 5,  x binary
    """
    import scipy.sparse as sp
    from medsync.modelgen.milp_model import MilpModel
    from medsync.modelgen.variables import ColumnKind
    return MilpModel(sp.csr_matrix([[2.0, 3.0, 1.0]]), ['L'], [5.0], [5.0, 4.0, 3.0],
                     [0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [ColumnKind.BINARY] * 3,
                     ['x1', 'x2', 'x3'], ['cap'], name='knapsack')
