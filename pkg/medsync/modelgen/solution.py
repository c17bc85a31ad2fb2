import logging
from typing import List, Optional

import numpy as np

from .constants import INTEGRALITY_TOL, FEASIBILITY_TOL
from .milp_model import MilpModel
from .variables import VarKind, ModelVariant

logger = logging.getLogger(__name__)

"""
Maps a raw solution vector back onto the structured decision variables of a built model.
"""


class IntegralityError(ValueError):
    """Raised when a raw vector cannot be read as an integer solution of the model"""
    pass


class StructuredSolution:
    """
    Solution values arranged by variable family, together with the solver outcome that produced them.
    When no solution is available (e.g. the model is infeasible) all value fields are None.
    """
    def __init__(self, status: str, variant: ModelVariant, objective: Optional[float] = None,
                 values: Optional[np.ndarray] = None, x: Optional[np.ndarray] = None, o: Optional[np.ndarray] = None,
                 staff_per_period: Optional[np.ndarray] = None, staff_total: Optional[np.ndarray] = None,
                 violations: List[str] = (), solver_stats: dict = None, metadata: dict = None):
        """
        :param status: solver status, e.g. 'optimal'
        :param variant: the ModelVariant of the model
        :param objective: objective value per horizon
        :param values: the (rounded) raw column values
        :param x: order indicators indexed [a][d][p][w]
        :param o: delivered medicines indexed [c][k][p][w]
        :param staff_per_period: employees (hours for the hours_staffing variant) indexed [e][w]
        :param staff_total: employees hired over the horizon indexed [e]; None for hours_staffing
        :param violations: constraint violations of the values, empty for a feasible point
        :param solver_stats: bound, gap, node and iteration counts, timings
        :param metadata: model metadata such as the annualization factor
        """
        self.status = status
        self.variant = variant
        self.objective = objective
        self.values = values
        self.x = x
        self.o = o
        self.staff_per_period = staff_per_period
        self.staff_total = staff_total
        self.violations = list(violations)
        self.solver_stats = dict(solver_stats) if solver_stats else {}
        self.metadata = dict(metadata) if metadata else {}

    @property
    def has_values(self) -> bool:
        return self.values is not None

    @property
    def is_feasible(self) -> bool:
        return self.has_values and not self.violations

    @property
    def annualization(self) -> float:
        return float(self.metadata.get('annualization', 1.0))

    @staticmethod
    def empty(status: str, model: MilpModel, solver_stats: dict = None) -> 'StructuredSolution':
        return StructuredSolution(status, ModelVariant.from_str(model.metadata.get('variant', 'base')),
                                  solver_stats=solver_stats, metadata=model.metadata)

    def __str__(self):
        if not self.has_values:
            return "StructuredSolution[%s, no values]" % self.status
        return "StructuredSolution[%s, objective=%.2f, %s]" % (
            self.status, self.objective, 'feasible' if self.is_feasible else
            '%d violations' % len(self.violations))


def extract_solution(model: MilpModel, values, status: str = 'unknown', solver_stats: dict = None,
                     integrality_tol: float = INTEGRALITY_TOL) -> StructuredSolution:
    """
    Rounds integer columns and arranges the values by variable family
    :param model: a model produced by medsync.modelgen.builder.build
    :param values: raw vector with one value per column
    :param status: solver status to carry along
    :param solver_stats: solver statistics to carry along
    :param integrality_tol: maximum distance of integer columns to the nearest integer
    :return: the StructuredSolution; its violations list is filled by checking the model's rows and bounds
    """
    if model.var_map is None:
        msg = "model {} carries no variable map".format(model.name)
        logger.error(msg)
        raise ValueError(msg)
    raw = np.asarray(values, dtype=float).reshape(-1)
    if raw.shape[0] != model.num_cols:
        msg = "expected {} values, got {}".format(model.num_cols, raw.shape[0])
        logger.error(msg)
        raise IntegralityError(msg)
    mask = model.integer_mask
    rounded = np.round(raw)
    off = mask & (np.abs(raw - rounded) > integrality_tol)
    if np.any(off):
        j = int(np.argmax(off))
        msg = "column {} = {} violates integrality ({} columns off)".format(model.col_names[j], raw[j],
                                                                          int(off.sum()))
        logger.error(msg)
        raise IntegralityError(msg)
    clean = np.where(mask, rounded, raw)
    # avoid negative zeros in reports
    clean[clean == 0] = 0.0

    vmap = model.var_map
    blocks = {}
    for kind in vmap.kinds():
        start, stop = vmap.block(kind)
        shape = tuple(max(vmap.ref(j).key[i] for j in range(start, stop)) + 1
                      for i in range(len(kind.index_labels)))
        blocks[kind] = clean[start:stop].reshape(shape)

    variant = ModelVariant.from_str(model.metadata.get('variant', 'base'))
    x = blocks.get(VarKind.X)
    o = blocks.get(VarKind.O)
    if variant is ModelVariant.HOURS_STAFFING:
        staff_per_period, staff_total = blocks.get(VarKind.HOURS), None
    else:
        staff_per_period, staff_total = blocks.get(VarKind.M_SMALL), blocks.get(VarKind.M_BIG)
    violations = model.check_feasible(clean, tol=FEASIBILITY_TOL, integrality_tol=integrality_tol)
    if violations:
        logger.warning("solution of %s violates %d constraints, first: %s", model.name, len(violations),
                       violations[0])
    return StructuredSolution(status, variant, model.objective_value(clean), clean,
                              None if x is None else x.astype(np.int64),
                              None if o is None else o.astype(np.int64),
                              staff_per_period, staff_total, violations, solver_stats, model.metadata)
