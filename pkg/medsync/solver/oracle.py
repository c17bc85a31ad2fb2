import logging
import math
from typing import Optional

import numpy as np

from ..modelgen.milp_model import MilpModel
from .config import LpLimits
from .constants import LP_OPTIMAL, LP_UNBOUNDED, MILP_OPTIMAL, MILP_INFEASIBLE, MILP_UNBOUNDED
from .presolve import presolve, InfeasibleModelError
from .simplex import solve_lp

logger = logging.getLogger(__name__)

"""
Exhaustive enumeration of the integer columns of a small MILP.  Used as an independent check of the
branch-and-bound solver: it shares presolve and, for continuous remainders, the LP solver, but no tree search.
"""

# row slack accepted during enumeration
_ROW_TOL = 1e-6


class EnumerationTooLargeError(ValueError):
    """Raised when a model has too many free integer columns, or too many nodes, to enumerate"""
    pass


class OracleResult:
    """
    Outcome of an enumeration
    """
    def __init__(self, status: str, objective: Optional[float] = None, values: Optional[np.ndarray] = None,
                 nodes: int = 0):
        self.status = status
        self.objective = objective
        self.values = values
        self.nodes = nodes

    def __str__(self):
        obj = 'none' if self.objective is None else '%.6f' % self.objective
        return "OracleResult[%s, objective=%s, %d nodes]" % (self.status, obj, self.nodes)


class _Enumerator:
    def __init__(self, model: MilpModel, order: np.ndarray, node_limit: int):
        self.model = model
        self.order = order
        self.node_limit = node_limit
        csc = model.matrix.tocsc()
        self.col_rows = [csc.indices[csc.indptr[j]:csc.indptr[j + 1]] for j in order]
        self.col_coefs = [csc.data[csc.indptr[j]:csc.indptr[j + 1]] for j in order]
        self.check_upper = np.isin(model.senses, ['L', 'E'])
        self.check_lower = np.isin(model.senses, ['G', 'E'])

        lower, upper = model.lower, model.upper
        a = model.matrix
        pos, neg = a.maximum(0), a.minimum(0)
        with np.errstate(invalid='ignore'):
            self.min_act = np.asarray(_dot(pos, lower) + _dot(neg, upper)).ravel()
            self.max_act = np.asarray(_dot(pos, upper) + _dot(neg, lower)).ravel()
        c = model.objective
        with np.errstate(invalid='ignore'):
            col_best = np.where(c >= 0, c * upper, c * lower)
        col_best = np.where(c == 0, 0.0, col_best)
        self.col_best = col_best
        self._group_equality_rows()
        self.free_best = float(col_best[order][self.group_of[order] < 0].sum())
        self.rest_best = 0.0

        self.values = model.lower.copy()
        self.continuous = np.flatnonzero(~model.integer_mask & (model.lower < model.upper))
        self.best_obj = -math.inf
        self.best = None
        self.nodes = 0
        self.unbounded = False

    def _group_equality_rows(self) -> None:
        """
        Groups free columns of positive cost under an equality row with nonnegative coefficients and columns.  The
        row's rhs caps the group: sum(c_j x_j) <= max(c_j / a_j) * sum(a_j x_j) <= max(c_j / a_j) * cap.
        """
        model = self.model
        a = model.matrix.tocsr()
        num_cols = model.num_cols
        self.group_of = np.full(num_cols, -1, dtype=np.int64)
        self.group_coef = np.zeros(num_cols)
        row_group, rows, ratios = {}, [], []
        for depth, j in enumerate(self.order):
            if model.objective[j] <= 0 or model.lower[j] < 0:
                continue
            for i, coef in zip(self.col_rows[depth], self.col_coefs[depth]):
                if model.senses[i] != 'E' or coef <= 0:
                    continue
                if i not in row_group:
                    cols = a.indices[a.indptr[i]:a.indptr[i + 1]]
                    if np.any(a.data[a.indptr[i]:a.indptr[i + 1]] < 0) or np.any(model.lower[cols] < 0):
                        continue
                    row_group[i] = len(rows)
                    rows.append(i)
                    ratios.append(0.0)
                g = row_group[i]
                self.group_of[j], self.group_coef[j] = g, coef
                ratios[g] = max(ratios[g], model.objective[j] / coef)
                break

        self.group_ratio = np.array(ratios, dtype=float)
        self.group_cap = np.zeros(len(rows))
        self.group_best = np.zeros(len(rows))
        for g, i in enumerate(rows):
            cols = a.indices[a.indptr[i]:a.indptr[i + 1]]
            coefs = a.data[a.indptr[i]:a.indptr[i + 1]]
            others = self.group_of[cols] != g
            self.group_cap[g] = model.rhs[i] - float(np.dot(coefs[others], model.lower[cols[others]]))
            self.group_best[g] = float(self.col_best[cols[~others]].sum())

    def bound(self, fixed_obj: float, free_best: float) -> float:
        """Upper bound on the objective of any completion of the current partial assignment"""
        capped = np.minimum(self.group_best, self.group_ratio * np.maximum(self.group_cap, 0.0))
        return fixed_obj + free_best + self.rest_best + float(capped.sum())

    def feasible_rows(self, rows: np.ndarray) -> bool:
        lo_ok = ~self.check_upper[rows] | (self.min_act[rows] <= self.model.rhs[rows] + _ROW_TOL)
        hi_ok = ~self.check_lower[rows] | (self.max_act[rows] >= self.model.rhs[rows] - _ROW_TOL)
        return bool(np.all(lo_ok & hi_ok))

    def search(self, depth: int, fixed_obj: float, free_best: float) -> None:
        if self.unbounded:
            return
        if self.bound(fixed_obj, free_best) <= self.best_obj + 1e-9:
            return
        if depth == len(self.order):
            self.leaf(fixed_obj)
            return
        j = self.order[depth]
        rows, coefs = self.col_rows[depth], self.col_coefs[depth]
        lo, up = self.model.lower[j], self.model.upper[j]
        c = self.model.objective[j]
        min_c = np.where(coefs > 0, coefs * lo, coefs * up)
        max_c = np.where(coefs > 0, coefs * up, coefs * lo)
        g = self.group_of[j]
        if g >= 0:
            self.group_best[g] -= self.col_best[j]
            child_free_best = free_best
        else:
            child_free_best = free_best - self.col_best[j]
        for v in range(int(lo), int(up) + 1):
            self.nodes += 1
            if self.nodes > self.node_limit:
                raise EnumerationTooLargeError("enumeration exceeded {} nodes".format(self.node_limit))
            contrib = coefs * v
            self.min_act[rows] += contrib - min_c
            self.max_act[rows] += contrib - max_c
            if self.feasible_rows(rows):
                self.values[j] = v
                if g >= 0:
                    self.group_cap[g] -= self.group_coef[j] * v
                self.search(depth + 1, fixed_obj + c * v, child_free_best)
                if g >= 0:
                    self.group_cap[g] += self.group_coef[j] * v
            self.min_act[rows] -= contrib - min_c
            self.max_act[rows] -= contrib - max_c
        if g >= 0:
            self.group_best[g] += self.col_best[j]
        self.values[j] = lo

    def leaf(self, fixed_obj: float) -> None:
        if len(self.continuous) == 0:
            if self.model.check_feasible(self.values, tol=_ROW_TOL):
                return
            obj = self.model.objective_value(self.values)
            candidate = self.values.copy()
        else:
            lower, upper = self.model.lower.copy(), self.model.upper.copy()
            integer = self.model.integer_mask
            lower[integer] = upper[integer] = self.values[integer]
            result = solve_lp(self.model.to_lp_problem().with_bounds(lower, upper), LpLimits())
            if result.status == LP_UNBOUNDED:
                self.unbounded = True
                return
            if result.status != LP_OPTIMAL:
                return
            obj, candidate = result.objective, result.x
        if obj > self.best_obj:
            self.best_obj, self.best = obj, candidate


def _dot(matrix, vector: np.ndarray) -> np.ndarray:
    """Sparse product that treats 0 * inf as 0"""
    coo = matrix.tocoo()
    keep = coo.data != 0
    prod = coo.data[keep] * vector[coo.col[keep]]
    out = np.zeros(matrix.shape[0])
    np.add.at(out, coo.row[keep], prod)
    return out


def brute_force_oracle(model: MilpModel, limit: int = 64, node_limit: int = 2000000) -> OracleResult:
    """
    Finds the exact optimum of a small MILP by enumerating every integer assignment
    :param model: the MilpModel to maximize
    :param limit: maximum number of integer columns left free after presolve
    :param node_limit: maximum number of partial assignments visited
    :return: the OracleResult
    """
    if not isinstance(model, MilpModel):
        msg = "Expected a MilpModel, got type {}".format(type(model))
        logger.error(msg)
        raise TypeError(msg)
    try:
        work, _ = presolve(model)
    except InfeasibleModelError as e:
        logger.debug("oracle: presolve proved infeasibility: %s", e)
        return OracleResult(MILP_INFEASIBLE)

    integer = work.integer_mask
    free = np.flatnonzero(integer & (work.lower < work.upper))
    if len(free) > limit:
        msg = "model {} has {} free integer columns, more than the enumeration limit {}".format(
            model.name, len(free), limit)
        logger.error(msg)
        raise EnumerationTooLargeError(msg)
    if not np.all(np.isfinite(work.lower[free])) or not np.all(np.isfinite(work.upper[free])):
        msg = "model {} has integer columns with infinite bounds".format(model.name)
        logger.error(msg)
        raise EnumerationTooLargeError(msg)

    # columns sharing rows are assigned together, so row checks fail early
    csc = work.matrix.tocsc()
    first_row = np.array([csc.indices[csc.indptr[j]:csc.indptr[j + 1]].min()
                          if csc.indptr[j + 1] > csc.indptr[j] else work.num_rows for j in free], dtype=np.int64)
    order = free[np.lexsort((free, first_row))]

    # fixed integer columns hold their value, every other column starts at its lower bound
    enum = _Enumerator(work, order, node_limit)
    fixed = np.flatnonzero(integer & (work.lower == work.upper))
    fixed_obj = float(np.dot(work.objective[fixed], work.lower[fixed]))
    rest = np.setdiff1d(np.arange(work.num_cols), np.concatenate([order, fixed]))
    enum.rest_best = float(enum.col_best[rest].sum())
    if enum.feasible_rows(np.arange(work.num_rows)):
        enum.search(0, fixed_obj, enum.free_best)

    if enum.unbounded:
        return OracleResult(MILP_UNBOUNDED, nodes=enum.nodes)
    if enum.best is None:
        return OracleResult(MILP_INFEASIBLE, nodes=enum.nodes)
    result = OracleResult(MILP_OPTIMAL, enum.best_obj, enum.best, enum.nodes)
    logger.debug("oracle on %s: %s", model.name, result)
    return result
