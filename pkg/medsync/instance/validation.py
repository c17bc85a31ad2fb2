import logging
import math
from typing import List

import numpy as np

from .entities import TransportCooling, MedicationClass
from .instance import Instance

logger = logging.getLogger(__name__)

"""
Checks every invariant of an Instance and reports violations as data.
"""


class Violation:
    """
    One broken invariant, located by a dotted path into the instance
    """
    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message

    def __eq__(self, other):
        return isinstance(other, Violation) and (self.path, self.message) == (other.path, other.message)

    def __repr__(self):
        return "Violation(%r, %r)" % (self.path, self.message)

    def __str__(self):
        return "%s: %s" % (self.path, self.message)


def validate(instance: Instance) -> List[Violation]:
    """
    Validates an instance against all of its invariants
    :param instance: the Instance to check
    :return: a list of Violation objects, empty iff the instance is valid
    """
    violations = []
    violations.extend(_check_horizon(instance))
    violations.extend(_check_patients(instance))
    violations.extend(_check_delivery_modes(instance))
    violations.extend(_check_employees(instance))
    violations.extend(_check_costs(instance))
    for v in violations:
        logger.debug("instance violation %s", v)
    return violations


def _check_horizon(instance: Instance) -> List[Violation]:
    out = []
    if instance.periods < 1:
        out.append(Violation('meta.periods', "number of periods must be >= 1"))
    if instance.periods_per_year < 1:
        out.append(Violation('meta.periods_per_year', "periods per year must be >= 1"))
    if instance.big_m1 < 1:
        out.append(Violation('meta.big_m1', "big-M M1 must be >= 1"))
    if instance.big_m2 < 1:
        out.append(Violation('meta.big_m2', "big-M M2 must be >= 1"))
    return out


def _check_patients(instance: Instance) -> List[Violation]:
    out = []
    if not instance.patients:
        return [Violation('patients', "no patient types")]
    for idx, p in enumerate(instance.patients):
        path = 'patients[p%d]' % p.id
        if p.id != idx:
            out.append(Violation(path, "patient id %d does not match its position %d" % (p.id, idx)))
        if p.sigma < 1:
            out.append(Violation(path + '.sigma', "σ must be ≥ 1"))
        if p.rho < 0:
            out.append(Violation(path + '.rho', "ρ must be ≥ 0"))
        if np.any(p.needs < 0):
            out.append(Violation(path + '.q', "medication needs must be ≥ 0"))
        if p.rho > 0 and p.total_needs == 0:
            out.append(Violation(path + '.q', "patient type has no medication needs"))
        if p.total_needs > instance.big_m1 or p.total_needs > instance.big_m2:
            out.append(Violation('meta.big_m', "big-M too small for patient p%d" % p.id))
    return out


def _check_delivery_modes(instance: Instance) -> List[Violation]:
    out = []
    if not instance.delivery_modes:
        return [Violation('delivery_modes', "no delivery modes")]
    for idx, d in enumerate(instance.delivery_modes):
        if d.id != idx:
            out.append(Violation('delivery_modes[%s]' % d.name,
                                 "delivery mode id %d does not match its position %d" % (d.id, idx)))
        if d.capacity < 0:
            out.append(Violation('delivery_modes[%s].capacity' % d.name, "capacity must be ≥ 0"))
    if instance.patients and instance.periods >= 1:
        required = int(math.ceil(float(np.dot(instance.rho, instance.sigma)) / instance.periods))
        if max(d.capacity for d in instance.delivery_modes) < required:
            out.append(Violation('delivery_modes',
                                 "no delivery mode can carry the average per-period load of %d orders" % required))
    return out


def _check_employees(instance: Instance) -> List[Violation]:
    out = []
    if not instance.employees:
        return [Violation('employees', "no employee types")]
    for idx, e in enumerate(instance.employees):
        path = 'employees[%s]' % e.name
        if e.id != idx:
            out.append(Violation(path, "employee id %d does not match its position %d" % (e.id, idx)))
        if np.any(e.handling_hours <= 0):
            out.append(Violation(path + '.u', "handling hours must be > 0"))
        if e.max_hours <= 0:
            out.append(Violation(path + '.theta', "θ must be > 0"))
        if e.hourly_wage <= 0:
            out.append(Violation(path + '.hourly_wage', "hourly wage must be > 0"))
    return out


def _check_costs(instance: Instance) -> List[Violation]:
    out = []
    t = instance.costs.transport_costs
    if t.shape != (len(TransportCooling), len(instance.delivery_modes)):
        out.append(Violation('transport_costs', "expected a %dx%d cost matrix, got %s" % (
            len(TransportCooling), len(instance.delivery_modes), t.shape)))
    elif np.any(t <= 0):
        out.append(Violation('transport_costs', "transport costs must be > 0"))
    fees = instance.costs.fees
    if fees[MedicationClass.NO_FEE] != 0:
        out.append(Violation('fees.k0', "fee of k0 must be 0"))
    if fees[MedicationClass.FEE] <= 0:
        out.append(Violation('fees.k1', "fee of k1 must be > 0"))
    return out
