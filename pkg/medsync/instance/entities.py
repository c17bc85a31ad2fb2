import enum
import logging
from typing import Sequence

import numpy as np

from .constants import COOLING_CLASS_LABELS, TRANSPORT_COOLING_LABELS, MEDICATION_CLASS_LABELS

logger = logging.getLogger(__name__)

"""
Domain types of a medication-delivery planning instance: cooling classes, delivery modes, employee types,
patient types and the cost schedule.  All array-valued fields are stored read-only; transforms create new
objects instead of mutating existing ones.
"""


class CoolingClass(enum.IntEnum):
    """Cooling requirement of a medication"""
    COOLED_MED = 0
    NON_COOLED_MED = 1

    @property
    def label(self) -> str:
        return COOLING_CLASS_LABELS[self.value]

    @property
    def display_name(self) -> str:
        return 'Cooled medication' if self is CoolingClass.COOLED_MED else 'Non-cooled medication'


class TransportCooling(enum.IntEnum):
    """Cooling mode of a delivered order batch"""
    COOLED = 0
    NON_COOLED = 1
    COMBINATION = 2

    @property
    def label(self) -> str:
        return TRANSPORT_COOLING_LABELS[self.value]

    @property
    def display_name(self) -> str:
        return {TransportCooling.COOLED: 'Cooled transportation',
                TransportCooling.NON_COOLED: 'Non-cooled transportation',
                TransportCooling.COMBINATION: 'Combination transportation'}[self]


class MedicationClass(enum.IntEnum):
    """Fee class of a medication"""
    NO_FEE = 0
    FEE = 1

    @property
    def label(self) -> str:
        return MEDICATION_CLASS_LABELS[self.value]


""" Transport coolings able to carry each medication cooling class """
COMPATIBLE_TRANSPORT = {
    CoolingClass.COOLED_MED: (TransportCooling.COOLED, TransportCooling.COMBINATION),
    CoolingClass.NON_COOLED_MED: (TransportCooling.NON_COOLED, TransportCooling.COMBINATION),
}


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


class DeliveryMode:
    """
    A physical delivery channel with a per-period capacity (orders per period)
    """
    def __init__(self, mode_id: int, name: str, capacity: int):
        """
        :param mode_id: index of the mode in the instance
        :param name: human readable name, e.g. 'truck'
        :param capacity: maximum number of orders delivered with this mode in one period
        """
        self.id = int(mode_id)
        self.name = str(name)
        self.capacity = int(capacity)

    def __eq__(self, other):
        return isinstance(other, DeliveryMode) and \
            (self.id, self.name, self.capacity) == (other.id, other.name, other.capacity)

    def __str__(self):
        return "d%d:%s[%d]" % (self.id, self.name, self.capacity)


class EmployeeType:
    """
    A class of employee handling orders.  Handling hours depend on the transport cooling of the order.
    """
    def __init__(self, employee_id: int, name: str, handling_hours: Sequence[float], max_hours: float,
                 hourly_wage: float):
        """
        :param employee_id: index of the employee type in the instance
        :param name: human readable name
        :param handling_hours: hours needed per order for each transport cooling, in TransportCooling order
        :param max_hours: maximum hours one employee of this type works per period
        :param hourly_wage: wage per hour
        """
        self.id = int(employee_id)
        self.name = str(name)
        self.handling_hours = _frozen(handling_hours, float)
        self.max_hours = float(max_hours)
        self.hourly_wage = float(hourly_wage)

        if self.handling_hours.shape != (len(TransportCooling),):
            msg = "handling_hours of employee type {} must have one entry per transport cooling, got shape {}" \
                .format(self.name, self.handling_hours.shape)
            logger.error(msg)
            raise ValueError(msg)

    def horizon_salary(self, periods: int) -> float:
        """
        Cost of one full-time employee of this type over the planning horizon
        :param periods: number of periods in the horizon
        :return: hourly wage x max hours per period x periods
        """
        return self.hourly_wage * self.max_hours * periods

    def __eq__(self, other):
        return isinstance(other, EmployeeType) and self.id == other.id and self.name == other.name and \
            np.array_equal(self.handling_hours, other.handling_hours) and \
            self.max_hours == other.max_hours and self.hourly_wage == other.hourly_wage

    def __str__(self):
        return "e%d:%s" % (self.id, self.name)


class PatientType:
    """
    An aggregated class of patients sharing one medication-need matrix and ordering behavior
    """
    def __init__(self, patient_id: int, needs, rho: int, sigma: int):
        """
        :param patient_id: index of the patient type in the instance
        :param needs: 2x2 matrix of unique medicines needed over the horizon, indexed [cooling class][med class]
        :param rho: number of patients of this type
        :param sigma: minimum number of orders over the horizon
        """
        self.id = int(patient_id)
        self.needs = _frozen(needs, np.int64)
        self.rho = int(rho)
        self.sigma = int(sigma)

        if self.needs.shape != (len(CoolingClass), len(MedicationClass)):
            msg = "needs of patient type p{} must be a {}x{} matrix, got shape {}".format(
                self.id, len(CoolingClass), len(MedicationClass), self.needs.shape)
            logger.error(msg)
            raise ValueError(msg)

    @property
    def total_needs(self) -> int:
        return int(self.needs.sum())

    def needs_of(self, cooling: CoolingClass) -> int:
        return int(self.needs[cooling].sum())

    def replace(self, patient_id: int = None, rho: int = None, sigma: int = None) -> 'PatientType':
        return PatientType(self.id if patient_id is None else patient_id, self.needs,
                           self.rho if rho is None else rho,
                           self.sigma if sigma is None else sigma)

    def __eq__(self, other):
        return isinstance(other, PatientType) and self.id == other.id and \
            np.array_equal(self.needs, other.needs) and self.rho == other.rho and self.sigma == other.sigma

    def __str__(self):
        return "p%d[rho=%d, sigma=%d]" % (self.id, self.rho, self.sigma)


class CostSchedule:
    """
    Transport costs per order (by transport cooling and delivery mode) and prescription line fees
    """
    def __init__(self, transport_costs, fees: Sequence[float]):
        """
        :param transport_costs: matrix indexed [transport cooling][delivery mode] of cost per order
        :param fees: prescription line fee per medication class, in MedicationClass order
        """
        self.transport_costs = _frozen(transport_costs, float)
        self.fees = _frozen(fees, float)

        if self.transport_costs.ndim != 2 or self.transport_costs.shape[0] != len(TransportCooling):
            msg = "transport_costs must have one row per transport cooling, got shape {}".format(
                self.transport_costs.shape)
            logger.error(msg)
            raise ValueError(msg)
        if self.fees.shape != (len(MedicationClass),):
            msg = "fees must have one entry per medication class, got shape {}".format(self.fees.shape)
            logger.error(msg)
            raise ValueError(msg)

    def __eq__(self, other):
        return isinstance(other, CostSchedule) and \
            np.array_equal(self.transport_costs, other.transport_costs) and np.array_equal(self.fees, other.fees)
