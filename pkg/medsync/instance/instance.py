import logging
from typing import Sequence

import numpy as np

from .entities import CostSchedule, DeliveryMode, EmployeeType, PatientType

logger = logging.getLogger(__name__)

"""
Defines the Instance, the complete data of one planning problem.
"""


class Instance:
    """
    Full problem data: patient types, cost schedule, delivery modes, employee types and the horizon.
    Instances are never mutated; use replace() to derive a modified copy.
    """
    def __init__(self, patients: Sequence[PatientType], costs: CostSchedule,
                 delivery_modes: Sequence[DeliveryMode], employees: Sequence[EmployeeType],
                 periods: int, big_m1: int, big_m2: int, periods_per_year: int = 12):
        """
        :param patients: patient types, indexed by their position
        :param costs: transport costs and prescription line fees
        :param delivery_modes: delivery modes, indexed by their position
        :param employees: employee types, indexed by their position
        :param periods: number of periods in the planning horizon
        :param big_m1: big-M linking cooled medication content to cooled-capable transport
        :param big_m2: big-M linking non-cooled medication content to non-cooled-capable transport
        :param periods_per_year: number of periods in one year, defines the annualization factor
        """
        self.patients = tuple(patients)
        self.costs = costs
        self.delivery_modes = tuple(delivery_modes)
        self.employees = tuple(employees)
        self.periods = int(periods)
        self.big_m1 = int(big_m1)
        self.big_m2 = int(big_m2)
        self.periods_per_year = int(periods_per_year)

        if not isinstance(costs, CostSchedule):
            msg = "costs must be a CostSchedule, got type {}".format(type(costs))
            logger.error(msg)
            raise TypeError(msg)
        for group, cls in ((self.patients, PatientType), (self.delivery_modes, DeliveryMode),
                           (self.employees, EmployeeType)):
            for item in group:
                if not isinstance(item, cls):
                    msg = "expected {} objects, got type {}".format(cls.__name__, type(item))
                    logger.error(msg)
                    raise TypeError(msg)

    @property
    def annualization(self) -> float:
        """Factor converting horizon quantities into annual quantities"""
        return self.periods_per_year / self.periods

    @property
    def num_patients(self) -> int:
        return len(self.patients)

    @property
    def rho(self) -> np.ndarray:
        return np.array([p.rho for p in self.patients], dtype=np.int64)

    @property
    def sigma(self) -> np.ndarray:
        return np.array([p.sigma for p in self.patients], dtype=np.int64)

    @property
    def needs(self) -> np.ndarray:
        """Array of shape (|C|, |K|, |P|) with the medication needs of every patient type"""
        if not self.patients:
            return np.zeros((2, 2, 0), dtype=np.int64)
        return np.stack([p.needs for p in self.patients], axis=-1)

    @property
    def capacities(self) -> np.ndarray:
        return np.array([d.capacity for d in self.delivery_modes], dtype=np.int64)

    def horizon_salaries(self) -> np.ndarray:
        """Salary of one full-time employee of each type over the horizon"""
        return np.array([e.horizon_salary(self.periods) for e in self.employees], dtype=float)

    def replace(self, **changes) -> 'Instance':
        """
        Creates a copy of this instance with the given fields replaced
        :param changes: keyword arguments naming constructor parameters
        :return: the new Instance
        """
        fields = dict(patients=self.patients, costs=self.costs, delivery_modes=self.delivery_modes,
                      employees=self.employees, periods=self.periods, big_m1=self.big_m1,
                      big_m2=self.big_m2, periods_per_year=self.periods_per_year)
        unknown = set(changes) - set(fields)
        if unknown:
            msg = "unknown Instance fields: {}".format(sorted(unknown))
            logger.error(msg)
            raise ValueError(msg)
        fields.update(changes)
        return Instance(**fields)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return False
        return self.patients == other.patients and self.costs == other.costs and \
            self.delivery_modes == other.delivery_modes and self.employees == other.employees and \
            (self.periods, self.big_m1, self.big_m2, self.periods_per_year) == \
            (other.periods, other.big_m1, other.big_m2, other.periods_per_year)

    def __str__(self):
        return "Instance[|P|=%d, sum(rho)=%d, |D|=%d, |E|=%d, |W|=%d]" % (
            self.num_patients, int(self.rho.sum()) if self.patients else 0, len(self.delivery_modes),
            len(self.employees), self.periods)
