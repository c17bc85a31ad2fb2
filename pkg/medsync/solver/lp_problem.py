import logging
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .constants import VALID_LP_STATUSES, LP_OPTIMAL

logger = logging.getLogger(__name__)

"""
Linear programs in bounded-variable form, simplex bases and LP results.
"""


class _ComputationalForm:
    """
    The equality form [A | I] (x, s) = b shared by all bound variants of one LpProblem.  Slack s_i carries the
    row sense in its bounds: 'L' -> [0, inf), 'G' -> (-inf, 0], 'E' -> [0, 0].
    """
    def __init__(self, matrix: sp.csr_matrix, senses: np.ndarray, rhs: np.ndarray, objective: np.ndarray):
        m, n = matrix.shape
        self.m, self.n = m, n
        self.full = sp.hstack([matrix, sp.identity(m, format='csr')], format='csc')
        self.full.sort_indices()
        self.full_t = self.full.T.tocsr()
        self.b = rhs.astype(float)
        self.cost = np.concatenate([objective.astype(float), np.zeros(m)])
        self.slack_lower = np.where(senses == 'G', -np.inf, 0.0)
        self.slack_upper = np.where(senses == 'L', np.inf, 0.0)


class LpProblem:
    """
    maximize objective.x  s.t.  matrix.x (senses) rhs,  lower <= x <= upper
    """
    def __init__(self, matrix, senses, rhs, objective, lower, upper, _form: '_ComputationalForm' = None):
        """
        :param matrix: sparse constraint matrix
        :param senses: 'L', 'G' or 'E' per row
        :param rhs: right-hand side per row
        :param objective: objective coefficients (maximized)
        :param lower: lower bounds, -np.inf allowed
        :param upper: upper bounds, np.inf allowed
        """
        self.matrix = sp.csr_matrix(matrix, dtype=float)
        self.senses = np.asarray(senses, dtype='<U1')
        self.rhs = np.asarray(rhs, dtype=float)
        self.objective = np.asarray(objective, dtype=float)
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self._form = _form

        m, n = self.matrix.shape
        if self.senses.shape != (m,) or self.rhs.shape != (m,) or self.objective.shape != (n,) or \
                self.lower.shape != (n,) or self.upper.shape != (n,):
            msg = "LpProblem arrays do not match a {}x{} matrix".format(m, n)
            logger.error(msg)
            raise ValueError(msg)
        if not np.all(np.isfinite(self.matrix.data)) or not np.all(np.isfinite(self.rhs)) or \
                not np.all(np.isfinite(self.objective)):
            msg = "LpProblem coefficients must be finite"
            logger.error(msg)
            raise ValueError(msg)

    @property
    def num_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def form(self) -> _ComputationalForm:
        if self._form is None:
            self._form = _ComputationalForm(self.matrix, self.senses, self.rhs, self.objective)
        return self._form

    def with_bounds(self, lower, upper) -> 'LpProblem':
        """
        :return: the same LP with other column bounds; the computational form is shared
        """
        return LpProblem(self.matrix, self.senses, self.rhs, self.objective, lower, upper, _form=self.form)

    def full_bounds(self):
        """:return: lower and upper bounds of the structural and slack variables"""
        form = self.form
        return np.concatenate([self.lower, form.slack_lower]), np.concatenate([self.upper, form.slack_upper])

    def primal_residual(self, x: np.ndarray) -> float:
        """
        :return: the largest violation of a row or column bound by x
        """
        act = self.matrix.dot(x)
        viol = np.zeros(self.num_rows)
        viol = np.where(self.senses == 'L', np.maximum(act - self.rhs, 0.0), viol)
        viol = np.where(self.senses == 'G', np.maximum(self.rhs - act, 0.0), viol)
        viol = np.where(self.senses == 'E', np.abs(act - self.rhs), viol)
        bound_viol = np.maximum(np.maximum(self.lower - x, x - self.upper), 0.0)
        return float(max(viol.max(initial=0.0), bound_viol.max(initial=0.0)))


class LpBasis:
    """
    A simplex basis: the basic variable of every row and the status of every structural and slack variable.
    Variable j < n is column j; variable n + i is the slack of row i.
    """
    def __init__(self, head, status):
        self.head = np.array(head, dtype=np.int64)
        self.status = np.array(status, dtype=np.int8)

    def copy(self) -> 'LpBasis':
        return LpBasis(self.head, self.status)

    def __eq__(self, other):
        return isinstance(other, LpBasis) and np.array_equal(self.head, other.head) and \
            np.array_equal(self.status, other.status)

    def __repr__(self):
        return "LpBasis(%d rows, %d variables)" % (len(self.head), len(self.status))


class LpResult:
    """
    Outcome of an LP solve
    """
    def __init__(self, status: str, x: Optional[np.ndarray] = None, objective: Optional[float] = None,
                 duals: Optional[np.ndarray] = None, reduced_costs: Optional[np.ndarray] = None,
                 iterations: int = 0, basis: Optional[LpBasis] = None, cold_start_fallback: bool = False,
                 message: str = ''):
        """
        :param status: one of medsync.solver.constants.VALID_LP_STATUSES
        :param x: primal values of the structural columns
        :param objective: objective value of x
        :param duals: row duals y, with reduced costs d = c - A^T y
        :param reduced_costs: reduced costs of the structural columns
        :param iterations: simplex iterations performed
        :param basis: the final basis, None if it cannot seed a warm start
        :param cold_start_fallback: True when a warm start was requested but a cold solve was performed
        :param message: diagnostic text
        """
        if status not in VALID_LP_STATUSES:
            msg = "unknown LP status {!r}".format(status)
            logger.error(msg)
            raise ValueError(msg)
        self.status = status
        self.x = x
        self.objective = objective
        self.duals = duals
        self.reduced_costs = reduced_costs
        self.iterations = iterations
        self.basis = basis
        self.cold_start_fallback = cold_start_fallback
        self.message = message

    @property
    def is_optimal(self) -> bool:
        return self.status == LP_OPTIMAL

    def __str__(self):
        obj = '' if self.objective is None else ', objective=%.9g' % self.objective
        return "LpResult[%s%s, %d iterations%s]" % (self.status, obj, self.iterations,
                                                   ', cold start fallback' if self.cold_start_fallback else '')
