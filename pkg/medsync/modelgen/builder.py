import logging
import math
from typing import Union

import numpy as np
import scipy.sparse as sp

from .milp_model import MilpModel, ModelError
from .variables import ColumnKind, ModelVariant, VarKind, VarMap, VarRef
from ..instance.entities import COMPATIBLE_TRANSPORT, CoolingClass, MedicationClass, TransportCooling
from ..instance.instance import Instance
from ..instance.validation import validate

logger = logging.getLogger(__name__)

"""
Builds the delivery-planning MILP for an instance.

Columns, in this order, each block in lexicographic key order:
    X(a,d,p,w)  binary, one order of patient type p in period w with transport cooling a and delivery mode d
    O(c,k,p,w)  integer, medicines of cooling class c and fee class k delivered to p in period w
    m(e,w)      integer, employees of type e working in period w          (base, relaxed_orders)
    M(e)        integer, employees of type e hired over the horizon       (base, relaxed_orders)
    H(e,w)      continuous, hours worked by employee type e in period w   (hours_staffing)

Rows, in this order:
    one_order_p_w          sum_{a,d} X <= 1
    cooled_cover_p_w       sum_k O_c0 - M1 sum_{a in {a0,a2}, d} X <= 0
    noncooled_cover_p_w    sum_k O_c1 - M2 sum_{a in {a1,a2}, d} X <= 0
    demand_c_k_p           sum_w O = q   (>= q for relaxed_orders)
    min_orders_p           sum_{a,d,w} X >= sigma
    capacity_d_w           sum_{a,p} rho X <= delta
    staff_hours_e_w        sum_{a,d,p} u rho X - theta m <= 0   (- H for hours_staffing)
    staff_max_e_w          m - M <= 0                           (base, relaxed_orders)
"""


class _Rows:
    """Accumulates sparse rows in COO form"""
    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []
        self.senses, self.rhs, self.names = [], [], []

    def add(self, name: str, cols, vals, sense: str, rhs: float) -> None:
        keep = [(j, v) for j, v in zip(cols, vals) if v != 0]
        if not keep:
            # only capacity rows of instances whose counts are all zero end up here
            logger.debug("skipping vacuous row %s", name)
            return
        i = len(self.names)
        for j, v in keep:
            self.rows.append(i)
            self.cols.append(j)
            self.vals.append(float(v))
        self.senses.append(sense)
        self.rhs.append(float(rhs))
        self.names.append(name)

    def matrix(self, num_cols: int) -> sp.csr_matrix:
        return sp.coo_matrix((self.vals, (self.rows, self.cols)), shape=(len(self.names), num_cols)).tocsr()


def build(instance: Instance, variant: Union[ModelVariant, str] = ModelVariant.BASE, check: bool = True) \
        -> MilpModel:
    """
    Builds the MILP of an instance
    :param instance: the Instance to model
    :param variant: a ModelVariant or one of medsync.modelgen.constants.VALID_VARIANTS
    :param check: if True, the instance must pass validation first
    :return: the validated MilpModel
    """
    variant = ModelVariant.from_str(variant)
    if not isinstance(instance, Instance):
        msg = "Expected an Instance, got type {}".format(type(instance))
        logger.error(msg)
        raise TypeError(msg)
    if check:
        violations = validate(instance)
        if violations:
            msg = "cannot build a model of an invalid instance: {}".format('; '.join(map(str, violations)))
            logger.error(msg)
            raise ModelError(msg)

    num_a, num_c, num_k = len(TransportCooling), len(CoolingClass), len(MedicationClass)
    num_p, num_d, num_e, num_w = instance.num_patients, len(instance.delivery_modes), len(instance.employees), \
        instance.periods
    rho = instance.rho.astype(float)
    sigma = instance.sigma
    needs = instance.needs
    transport = instance.costs.transport_costs
    fees = instance.costs.fees
    hours = np.array([e.handling_hours for e in instance.employees], dtype=float)  # [e][a]
    theta = np.array([e.max_hours for e in instance.employees], dtype=float)
    wages = np.array([e.hourly_wage for e in instance.employees], dtype=float)
    salaries = instance.horizon_salaries()
    # per-period handling hours if every patient ordered with the slowest transport cooling
    max_load = rho.sum() * hours.max(axis=1) if num_e else np.zeros(0)
    staff_ub = np.array([math.ceil(max_load[e] / theta[e] - 1e-9) if max_load[e] > 0 else 0
                         for e in range(num_e)], dtype=float)

    var_map = VarMap()
    objective, lower, upper, kinds = [], [], [], []

    def add_column(ref: VarRef, obj: float, lb: float, ub: float, kind: ColumnKind) -> None:
        var_map.add(ref)
        objective.append(obj)
        lower.append(lb)
        upper.append(ub)
        kinds.append(kind)

    for a in range(num_a):
        for d in range(num_d):
            for p in range(num_p):
                for w in range(num_w):
                    add_column(VarRef(VarKind.X, a, d, p, w), -transport[a, d] * rho[p], 0.0, 1.0,
                               ColumnKind.BINARY)
    for c in range(num_c):
        for k in range(num_k):
            for p in range(num_p):
                for w in range(num_w):
                    add_column(VarRef(VarKind.O, c, k, p, w), fees[k] * rho[p], 0.0, float(needs[c, k, p]),
                               ColumnKind.INTEGER)
    if variant is ModelVariant.HOURS_STAFFING:
        for e in range(num_e):
            for w in range(num_w):
                add_column(VarRef(VarKind.HOURS, e, w), -wages[e], 0.0, float(max_load[e]),
                           ColumnKind.CONTINUOUS)
    else:
        for e in range(num_e):
            for w in range(num_w):
                add_column(VarRef(VarKind.M_SMALL, e, w), 0.0, 0.0, staff_ub[e], ColumnKind.INTEGER)
        for e in range(num_e):
            add_column(VarRef(VarKind.M_BIG, e), -salaries[e], 0.0, staff_ub[e], ColumnKind.INTEGER)

    def x(a, d, p, w):
        return var_map.index(VarRef(VarKind.X, a, d, p, w))

    def o(c, k, p, w):
        return var_map.index(VarRef(VarKind.O, c, k, p, w))

    rows = _Rows()
    for p in range(num_p):
        for w in range(num_w):
            cols = [x(a, d, p, w) for a in range(num_a) for d in range(num_d)]
            rows.add('one_order_p%d_w%d' % (p, w), cols, [1.0] * len(cols), 'L', 1.0)
    for cooling, label, big_m in ((CoolingClass.COOLED_MED, 'cooled', instance.big_m1),
                                  (CoolingClass.NON_COOLED_MED, 'noncooled', instance.big_m2)):
        compatible = COMPATIBLE_TRANSPORT[cooling]
        for p in range(num_p):
            for w in range(num_w):
                cols = [o(cooling, k, p, w) for k in range(num_k)]
                vals = [1.0] * num_k
                for a in compatible:
                    for d in range(num_d):
                        cols.append(x(a, d, p, w))
                        vals.append(-float(big_m))
                rows.add('%s_cover_p%d_w%d' % (label, p, w), cols, vals, 'L', 0.0)
    demand_sense = 'G' if variant is ModelVariant.RELAXED_ORDERS else 'E'
    for c in range(num_c):
        for k in range(num_k):
            for p in range(num_p):
                cols = [o(c, k, p, w) for w in range(num_w)]
                rows.add('demand_c%d_k%d_p%d' % (c, k, p), cols, [1.0] * num_w, demand_sense,
                         float(needs[c, k, p]))
    for p in range(num_p):
        cols = [x(a, d, p, w) for a in range(num_a) for d in range(num_d) for w in range(num_w)]
        rows.add('min_orders_p%d' % p, cols, [1.0] * len(cols), 'G', float(sigma[p]))
    for d, mode in enumerate(instance.delivery_modes):
        for w in range(num_w):
            cols = [x(a, d, p, w) for a in range(num_a) for p in range(num_p)]
            vals = [rho[p] for a in range(num_a) for p in range(num_p)]
            rows.add('capacity_d%d_w%d' % (d, w), cols, vals, 'L', float(mode.capacity))
    for e in range(num_e):
        for w in range(num_w):
            cols = [x(a, d, p, w) for a in range(num_a) for d in range(num_d) for p in range(num_p)]
            vals = [hours[e, a] * rho[p] for a in range(num_a) for d in range(num_d) for p in range(num_p)]
            if variant is ModelVariant.HOURS_STAFFING:
                cols.append(var_map.index(VarRef(VarKind.HOURS, e, w)))
                vals.append(-1.0)
            else:
                cols.append(var_map.index(VarRef(VarKind.M_SMALL, e, w)))
                vals.append(-theta[e])
            rows.add('staff_hours_e%d_w%d' % (e, w), cols, vals, 'L', 0.0)
    if variant is not ModelVariant.HOURS_STAFFING:
        for e in range(num_e):
            for w in range(num_w):
                rows.add('staff_max_e%d_w%d' % (e, w), [var_map.index(VarRef(VarKind.M_SMALL, e, w)),
                                                        var_map.index(VarRef(VarKind.M_BIG, e))],
                         [1.0, -1.0], 'L', 0.0)

    col_names = [var_map.ref(j).name for j in range(len(var_map))]
    model = MilpModel(rows.matrix(len(var_map)), rows.senses, rows.rhs, objective, lower, upper, kinds,
                      col_names, rows.names, name='medsync_%s' % variant.value, var_map=var_map,
                      metadata=dict(variant=variant.value, periods=num_w, annualization=instance.annualization,
                                    patient_types=num_p))
    model.validate()
    logger.info("Built %s", model)
    return model


def objective_coefficient(model: MilpModel, ref: VarRef) -> float:
    """
    :param model: a model produced by build()
    :param ref: a structured variable of the model
    :return: the signed objective coefficient of the variable
    """
    if model.var_map is None:
        msg = "model {} carries no variable map".format(model.name)
        logger.error(msg)
        raise KeyError(msg)
    return float(model.objective[model.var_map.index(ref)])
