import logging

import numpy as np
from numpy.random import RandomState

from .entities import CostSchedule, DeliveryMode, EmployeeType, PatientType, TransportCooling
from .instance import Instance

logger = logging.getLogger(__name__)

"""
Generates small random instances, used to cross-check the branch-and-bound solver against exhaustive enumeration.
"""


def random_small_instance(random_state: RandomState, max_patients: int = 3, max_modes: int = 2,
                          max_employees: int = 2, periods: int = 2, max_rho: int = 3, max_need: int = 2,
                          max_capacity: int = 4) -> Instance:
    """
    Draws a small instance.  Capacities are drawn from [0, max_capacity], so some instances are infeasible.
    The instance is not validated; build models from it with check=False.
    :param random_state: a numpy RandomState, the only source of randomness
    :param max_patients: maximum number of patient types
    :param max_modes: maximum number of delivery modes
    :param max_employees: maximum number of employee types
    :param periods: number of periods in the horizon
    :param max_rho: maximum patient count per type
    :param max_need: maximum value of each medication-need entry
    :param max_capacity: maximum per-period capacity of a delivery mode
    :return: the random Instance
    """
    if not isinstance(random_state, RandomState):
        msg = "random_state must be a numpy.random.RandomState, got type {}".format(type(random_state))
        logger.error(msg)
        raise TypeError(msg)
    if min(max_patients, max_modes, max_employees, periods, max_rho, max_need) < 1 or max_capacity < 0:
        msg = "random instance size parameters must be positive"
        logger.error(msg)
        raise ValueError(msg)

    num_patients = random_state.randint(1, max_patients + 1)
    num_modes = random_state.randint(1, max_modes + 1)
    num_employees = random_state.randint(1, max_employees + 1)

    patients = []
    for p in range(num_patients):
        needs = random_state.randint(0, max_need + 1, size=(2, 2))
        if needs.sum() == 0:
            needs[random_state.randint(0, 2), random_state.randint(0, 2)] = 1
        rho = random_state.randint(1, max_rho + 1)
        sigma = random_state.randint(1, min(2, periods) + 1)
        patients.append(PatientType(p, needs, rho, sigma))

    modes = [DeliveryMode(d, 'mode%d' % d, random_state.randint(0, max_capacity + 1)) for d in range(num_modes)]
    transport = np.round(random_state.uniform(1.0, 20.0, size=(len(TransportCooling), num_modes)), 2)
    fees = [0.0, round(float(random_state.uniform(1.0, 10.0)), 2)]

    employees = []
    for e in range(num_employees):
        hours = np.round(random_state.uniform(0.05, 0.5, size=len(TransportCooling)), 3)
        max_hours = float(random_state.choice([1.0, 2.0]))
        wage = round(float(random_state.uniform(1.0, 5.0)), 2)
        employees.append(EmployeeType(e, 'employee%d' % e, hours, max_hours, wage))

    big_m = max(p.total_needs for p in patients)
    instance = Instance(patients, CostSchedule(transport, fees), modes, employees, periods, big_m, big_m,
                        periods_per_year=periods)
    logger.debug("Generated random %s", instance)
    return instance
