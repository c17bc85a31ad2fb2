import logging
import math
from collections import OrderedDict
from typing import List, Optional

import numpy as np
import pandas as pd

from .constants import LFO_ELEMENT_LABELS
from ..instance.entities import TransportCooling
from ..instance.instance import Instance
from ..modelgen.solution import StructuredSolution
from ..modelgen.variables import ModelVariant

logger = logging.getLogger(__name__)

"""
Key performance indicators of a delivery plan: annual LFO and its elements, order counts and staffing.
"""


class KpiReport:
    """
    Annualized KPIs of one solved instance.  Costs are stored as positive amounts; the total LFO is the
    prescription line fee minus transportation and handling costs.
    """
    def __init__(self, status: str, variant: ModelVariant, annualization: float, orders_per_cooling,
                 orders_per_mode, employees, annual_transport_cost: float, annual_handling_cost: float,
                 annual_prescription_fee: float, mode_names: List[str] = None, employee_names: List[str] = None):
        """
        :param status: solver status of the solution
        :param variant: model variant the solution belongs to
        :param annualization: factor that converted horizon quantities into annual ones
        :param orders_per_cooling: annual orders per transport cooling, in TransportCooling order; rounded to
            whole orders
        :param orders_per_mode: annual orders per delivery mode; rounded to whole orders
        :param employees: employees hired per employee type
        :param annual_transport_cost: annual transportation cost
        :param annual_handling_cost: annual handling (staffing) cost
        :param annual_prescription_fee: annual prescription line fee revenue
        :param mode_names: names of the delivery modes
        :param employee_names: names of the employee types
        """
        self.status = status
        self.variant = variant
        self.annualization = float(annualization)
        self.orders_per_cooling = np.rint(np.asarray(orders_per_cooling, dtype=float)).astype(np.int64)
        self.orders_per_mode = np.rint(np.asarray(orders_per_mode, dtype=float)).astype(np.int64)
        self.employees = np.asarray(employees, dtype=np.int64)
        self.annual_transport_cost = float(annual_transport_cost)
        self.annual_handling_cost = float(annual_handling_cost)
        self.annual_prescription_fee = float(annual_prescription_fee)
        self.mode_names = list(mode_names) if mode_names is not None else \
            ['d%d' % d for d in range(len(self.orders_per_mode))]
        self.employee_names = list(employee_names) if employee_names is not None else \
            ['e%d' % e for e in range(len(self.employees))]

    @property
    def annual_orders(self) -> int:
        return int(self.orders_per_mode.sum())

    @property
    def total_annual_lfo(self) -> float:
        return self.annual_prescription_fee - self.annual_transport_cost - self.annual_handling_cost

    @property
    def lfo_per_order(self) -> Optional[float]:
        """None when the plan has no orders"""
        if self.annual_orders <= 0:
            return None
        return self.total_annual_lfo / self.annual_orders

    def lfo_elements(self, per_order: bool = False) -> OrderedDict:
        """
        :param per_order: divide every element by the annual number of orders
        :return: signed LFO elements keyed by the summary table labels; None values when per_order is
            requested for a plan without orders
        """
        values = [-self.annual_transport_cost, -self.annual_handling_cost, self.annual_prescription_fee,
                  self.total_annual_lfo]
        if per_order:
            orders = self.annual_orders
            values = [v / orders if orders > 0 else None for v in values]
        return OrderedDict(zip(LFO_ELEMENT_LABELS, values))

    def improvement_over(self, reference_annual_lfo: float) -> float:
        """
        :param reference_annual_lfo: annual LFO of a reference practice, e.g. the pharmacy's realized LFO
        :return: improvement of this plan over the reference, in percent of the reference's magnitude
        """
        if reference_annual_lfo == 0:
            msg = "reference annual LFO must be nonzero"
            logger.error(msg)
            raise ValueError(msg)
        return (self.total_annual_lfo - reference_annual_lfo) / abs(reference_annual_lfo) * 100.0

    def get_as_dict(self) -> dict:
        return OrderedDict(
            status=self.status, variant=self.variant.value, annualization=self.annualization,
            total_annual_lfo=self.total_annual_lfo, lfo_per_order=self.lfo_per_order,
            annual_orders=self.annual_orders,
            annual_transport_cost=self.annual_transport_cost, annual_handling_cost=self.annual_handling_cost,
            annual_prescription_fee=self.annual_prescription_fee,
            orders_per_cooling=OrderedDict((a.display_name, int(self.orders_per_cooling[a]))
                                           for a in TransportCooling),
            orders_per_mode=OrderedDict(zip(self.mode_names, self.orders_per_mode.tolist())),
            employees=OrderedDict(zip(self.employee_names, self.employees.tolist())))

    def summary_tables(self) -> OrderedDict:
        """
        :return: the LFO table (annual and per order), the order table and the employee table as DataFrames
        """
        annual, per_order = self.lfo_elements(), self.lfo_elements(per_order=True)
        lfo = pd.DataFrame({'Annual': list(annual.values()), 'Per order': list(per_order.values())},
                           index=list(annual.keys()))
        orders = pd.DataFrame(
            {'Annual orders': [self.annual_orders] + self.orders_per_cooling.tolist() + self.orders_per_mode.tolist()},
            index=['Total'] + [a.display_name for a in TransportCooling] + self.mode_names)
        employees = pd.DataFrame({'Employees': self.employees.tolist()}, index=self.employee_names)
        return OrderedDict(lfo=lfo, orders=orders, employees=employees)

    def __str__(self):
        tables = self.summary_tables()
        with pd.option_context('display.float_format', '{:,.2f}'.format):
            return '\n\n'.join(t.to_string() for t in tables.values())


def _require_values(solution: StructuredSolution, instance: Instance) -> None:
    if not isinstance(instance, Instance):
        msg = "Expected an Instance, got {}".format(type(instance))
        logger.error(msg)
        raise TypeError(msg)
    if not isinstance(solution, StructuredSolution):
        msg = "Expected a StructuredSolution, got {}".format(type(solution))
        logger.error(msg)
        raise TypeError(msg)
    if not solution.has_values:
        msg = "solution with status {} carries no values".format(solution.status)
        logger.error(msg)
        raise ValueError(msg)


def _plan_arrays(instance: Instance, solution: StructuredSolution):
    """x and o as float arrays; instances without patients have neither block"""
    num_a, num_d, num_p, num_w = len(TransportCooling), len(instance.delivery_modes), instance.num_patients, \
        instance.periods
    x = np.zeros((num_a, num_d, num_p, num_w)) if solution.x is None else solution.x.astype(float)
    o = np.zeros((2, 2, num_p, num_w)) if solution.o is None else solution.o.astype(float)
    return x, o


def compute_kpis(instance: Instance, solution: StructuredSolution) -> KpiReport:
    """
    Computes the annualized KPIs of a solution
    :param instance: the instance the solved model was built from
    :param solution: a StructuredSolution with values
    :return: the KpiReport
    """
    _require_values(solution, instance)
    if solution.violations:
        logger.warning("computing KPIs of a solution with %d violations", len(solution.violations))
    ann = instance.annualization
    rho = instance.rho.astype(float)
    x, o = _plan_arrays(instance, solution)
    # orders per (a, d) over the horizon
    orders = np.einsum('adpw,p->ad', x, rho)
    transport = float(np.sum(orders * instance.costs.transport_costs)) * ann
    fee = float(np.einsum('ckpw,k,p->', o, instance.costs.fees, rho)) * ann

    wages = np.array([e.hourly_wage for e in instance.employees])
    if solution.variant is ModelVariant.HOURS_STAFFING:
        hours = np.asarray(solution.staff_per_period, dtype=float)
        handling = float(np.sum(hours.sum(axis=1) * wages)) * ann
        theta = np.array([e.max_hours for e in instance.employees])
        employees = [int(math.ceil(h / t - 1e-9)) if t > 0 else 0 for h, t in zip(hours.max(axis=1), theta)]
    else:
        employees = np.asarray(solution.staff_total).astype(np.int64)
        handling = float(np.dot(employees, instance.horizon_salaries())) * ann

    report = KpiReport(solution.status, solution.variant, ann, orders.sum(axis=1) * ann, orders.sum(axis=0) * ann,
                       employees, transport, handling, fee, [d.name for d in instance.delivery_modes],
                       [e.name for e in instance.employees])
    logger.debug("KPIs: annual LFO %.2f over %d orders", report.total_annual_lfo, report.annual_orders)
    return report


def employee_hours_report(instance: Instance, solution: StructuredSolution) -> pd.DataFrame:
    """
    Required handling hours per employee type and period.
    :param instance: the instance the solved model was built from
    :param solution: a StructuredSolution with values, of any variant
    :return: DataFrame with columns employee, period, required_hours, staffed_hours, slack, staff_cost.
        staffed_hours is m x max hours for the variants with employee counts and the paid hours for the
        hours-based variant; staff_cost is only filled for the hours-based variant.
    """
    _require_values(solution, instance)
    u = np.array([e.handling_hours for e in instance.employees], dtype=float)
    rho = instance.rho.astype(float)
    # hours per (e, w)
    x, _ = _plan_arrays(instance, solution)
    required = np.einsum('adpw,ea,p->ew', x, u, rho)
    staff = np.asarray(solution.staff_per_period, dtype=float)
    hours_based = solution.variant is ModelVariant.HOURS_STAFFING
    rows = []
    for e, emp in enumerate(instance.employees):
        for w in range(instance.periods):
            staffed = staff[e, w] if hours_based else staff[e, w] * emp.max_hours
            rows.append((emp.name, w, required[e, w], staffed, staffed - required[e, w],
                         staff[e, w] * emp.hourly_wage if hours_based else np.nan))
    return pd.DataFrame(rows, columns=['employee', 'period', 'required_hours', 'staffed_hours', 'slack',
                                       'staff_cost'])
