import logging
from collections import Counter
from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .constants import VALID_SENSES, FEASIBILITY_TOL, INTEGRALITY_TOL, MAX_NAME_LENGTH
from .variables import ColumnKind, VarMap
from ..solver.lp_problem import LpProblem

logger = logging.getLogger(__name__)

"""
Defines MilpModel, a maximization MILP over a sparse constraint matrix.
"""


class ModelError(ValueError):
    """Raised when a model breaks one of its structural invariants"""
    pass


class MilpModel:
    """
    maximize objective.x  s.t.  matrix.x (senses) rhs,  lower <= x <= upper,  x_j integer where kinds[j] says so.
    Models are treated as immutable; use replace() to derive a modified copy.
    """
    def __init__(self, matrix, senses: Sequence[str], rhs: Sequence[float], objective: Sequence[float],
                 lower: Sequence[float], upper: Sequence[float], kinds: Sequence[ColumnKind],
                 col_names: Sequence[str], row_names: Sequence[str], name: str = 'model',
                 var_map: Optional[VarMap] = None, metadata: dict = None):
        """
        :param matrix: constraint matrix with one row per constraint, converted to scipy CSR
        :param senses: one of 'L', 'G', 'E' per row
        :param rhs: right-hand side per row
        :param objective: objective coefficient per column (maximized)
        :param lower: lower bound per column
        :param upper: upper bound per column, np.inf allowed
        :param kinds: ColumnKind per column
        :param col_names: unique column names
        :param row_names: unique row names
        :param name: model name
        :param var_map: optional VarMap linking structured variables to columns
        :param metadata: free-form information carried along (variant, annualization factor, ...)
        """
        self.matrix = sp.csr_matrix(matrix, dtype=float)
        self.matrix.sort_indices()
        self.senses = np.array(list(senses), dtype='<U1')
        self.rhs = np.asarray(rhs, dtype=float).reshape(-1)
        self.objective = np.asarray(objective, dtype=float).reshape(-1)
        self.lower = np.asarray(lower, dtype=float).reshape(-1)
        self.upper = np.asarray(upper, dtype=float).reshape(-1)
        self.kinds = list(kinds)
        self.col_names = list(col_names)
        self.row_names = list(row_names)
        self.name = name
        self.var_map = var_map
        self.metadata = dict(metadata) if metadata else {}

        self._lp = None

    @property
    def num_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    @property
    def integer_mask(self) -> np.ndarray:
        return np.array([k.is_integer for k in self.kinds], dtype=bool)

    @property
    def binary_mask(self) -> np.ndarray:
        return np.array([k is ColumnKind.BINARY for k in self.kinds], dtype=bool)

    def validate(self) -> None:
        """
        Checks the structural invariants of the model, raising ModelError on the first violation
        """
        m, n = self.matrix.shape
        for label, arr, size in (('senses', self.senses, m), ('rhs', self.rhs, m), ('row_names', self.row_names, m),
                                 ('objective', self.objective, n), ('lower', self.lower, n),
                                 ('upper', self.upper, n), ('kinds', self.kinds, n), ('col_names', self.col_names, n)):
            if len(arr) != size:
                self._fail("{} has length {}, expected {}".format(label, len(arr), size))
        bad_senses = set(self.senses.tolist()) - set(VALID_SENSES)
        if bad_senses:
            self._fail("unknown row senses {}".format(sorted(bad_senses)))
        if not np.all(np.isfinite(self.matrix.data)):
            self._fail("constraint matrix has non-finite coefficients")
        if not np.all(np.isfinite(self.rhs)) or not np.all(np.isfinite(self.objective)):
            self._fail("rhs and objective must be finite")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)) or np.any(self.lower == np.inf) or \
                np.any(self.upper == -np.inf):
            self._fail("invalid column bounds")
        if np.any(self.lower > self.upper):
            j = int(np.argmax(self.lower > self.upper))
            self._fail("column {} has lower bound above upper bound".format(self.col_names[j]))
        for j, kind in enumerate(self.kinds):
            if not isinstance(kind, ColumnKind):
                self._fail("column {} has invalid kind {!r}".format(self.col_names[j], kind))
            if kind is ColumnKind.BINARY and (self.lower[j] < 0 or self.upper[j] > 1):
                self._fail("binary column {} must have bounds within [0, 1]".format(self.col_names[j]))
        row_counts = np.diff(self.matrix.indptr)
        if np.any(row_counts == 0):
            self._fail("row {} is empty".format(self.row_names[int(np.argmin(row_counts))]))
        for label, names in (('column', self.col_names), ('row', self.row_names)):
            dups = [nm for nm, cnt in Counter(names).items() if cnt > 1]
            if dups:
                self._fail("duplicate {} names: {}".format(label, sorted(dups)[:5]))
            too_long = [nm for nm in names if not nm or len(nm) > MAX_NAME_LENGTH]
            if too_long:
                self._fail("{} names must have 1 to {} characters".format(label, MAX_NAME_LENGTH))

    def _fail(self, msg: str):
        msg = "model {}: {}".format(self.name, msg)
        logger.error(msg)
        raise ModelError(msg)

    def objective_value(self, values) -> float:
        return float(np.dot(self.objective, np.asarray(values, dtype=float)))

    def row_activity(self, values) -> np.ndarray:
        return self.matrix.dot(np.asarray(values, dtype=float))

    def check_feasible(self, values, tol: float = FEASIBILITY_TOL,
                       integrality_tol: float = INTEGRALITY_TOL) -> List[str]:
        """
        Checks a candidate point against bounds, rows and integrality
        :param values: one value per column
        :param tol: absolute tolerance for bounds and rows
        :param integrality_tol: maximum distance of integer columns to the nearest integer
        :return: descriptions of every violation; empty iff the point is feasible
        """
        x = np.asarray(values, dtype=float)
        if x.shape != (self.num_cols,):
            return ["expected {} values, got {}".format(self.num_cols, x.shape)]
        problems = []
        for j in np.flatnonzero((x < self.lower - tol) | (x > self.upper + tol)):
            problems.append("{} = {} outside [{}, {}]".format(self.col_names[j], x[j], self.lower[j], self.upper[j]))
        frac = np.abs(x - np.round(x))
        for j in np.flatnonzero(self.integer_mask & (frac > integrality_tol)):
            problems.append("{} = {} is not integral".format(self.col_names[j], x[j]))
        act = self.row_activity(x)
        violated = ((self.senses == 'L') & (act > self.rhs + tol)) | \
                   ((self.senses == 'G') & (act < self.rhs - tol)) | \
                   ((self.senses == 'E') & (np.abs(act - self.rhs) > tol))
        for i in np.flatnonzero(violated):
            problems.append("{}: activity {} {} {}".format(self.row_names[i], act[i],
                                                           {'L': '<=', 'G': '>=', 'E': '='}[self.senses[i]],
                                                           self.rhs[i]))
        return problems

    def size_stats(self) -> dict:
        """
        :return: number of rows, nonzeros and columns, in total and per variable kind
        """
        stats = dict(rows=self.num_rows, columns=self.num_cols, nonzeros=self.nnz,
                     binary_columns=int(self.binary_mask.sum()),
                     integer_columns=int((self.integer_mask & ~self.binary_mask).sum()),
                     continuous_columns=int((~self.integer_mask).sum()))
        if self.var_map is not None:
            for kind in self.var_map.kinds():
                start, stop = self.var_map.block(kind)
                stats['columns_' + kind.prefix] = stop - start
        return stats

    def to_lp_problem(self) -> LpProblem:
        """
        :return: the LP relaxation (integrality dropped); cached, the model is immutable
        """
        if self._lp is None:
            self._lp = LpProblem(self.matrix, self.senses, self.rhs, self.objective, self.lower, self.upper)
        return self._lp

    def replace(self, **changes) -> 'MilpModel':
        fields = dict(matrix=self.matrix, senses=self.senses, rhs=self.rhs, objective=self.objective,
                      lower=self.lower, upper=self.upper, kinds=self.kinds, col_names=self.col_names,
                      row_names=self.row_names, name=self.name, var_map=self.var_map, metadata=self.metadata)
        unknown = set(changes) - set(fields)
        if unknown:
            msg = "unknown MilpModel fields: {}".format(sorted(unknown))
            logger.error(msg)
            raise ValueError(msg)
        fields.update(changes)
        return MilpModel(**fields)

    def __eq__(self, other):
        """
        Coefficient-for-coefficient equality of rows, columns, bounds, kinds and names
        """
        if not isinstance(other, MilpModel) or self.matrix.shape != other.matrix.shape:
            return False
        diff = self.matrix != other.matrix
        return diff.nnz == 0 and np.array_equal(self.senses, other.senses) and \
            np.array_equal(self.rhs, other.rhs) and np.array_equal(self.objective, other.objective) and \
            np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper) and \
            self.kinds == other.kinds and self.col_names == other.col_names and self.row_names == other.row_names

    def __str__(self):
        return "MilpModel[%s: %d rows, %d columns (%d integer), %d nonzeros]" % (
            self.name, self.num_rows, self.num_cols, int(self.integer_mask.sum()), self.nnz)
