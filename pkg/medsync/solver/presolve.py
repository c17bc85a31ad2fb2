import logging
from typing import List, Tuple

import numpy as np

from ..modelgen.milp_model import MilpModel

logger = logging.getLogger(__name__)

"""
MILP presolve: bound propagation over rows with integer rounding, coefficient tightening of binaries, and removal of
redundant rows.  The column set is never changed, so a solution of the reduced model is a solution of the input.
"""

""" Kinds of presolve log entries """
PRESOLVE_ACTIONS = ['bound', 'fix', 'coefficient', 'redundant']

# relative size a continuous bound must move by to be accepted
_CONTINUOUS_STEP = 1e-6
# slack when rounding implied bounds of integer columns
_ROUNDING_EPS = 1e-9


class InfeasibleModelError(ValueError):
    """Raised when presolve proves that a model has no feasible point"""
    def __init__(self, message: str, row: str = None, column: str = None):
        super().__init__(message)
        self.row = row
        self.column = column


class PresolveLogEntry:
    """
    One presolve reduction.  For bound/fix entries old and new are (lower, upper) pairs, for coefficient entries
    they are the coefficient of column in row, for redundant rows both are None.
    """
    def __init__(self, kind: str, row: str, column: str = None, old=None, new=None):
        self.kind = kind
        self.row = row
        self.column = column
        self.old = old
        self.new = new

    def get_as_dict(self) -> dict:
        return dict(kind=self.kind, row=self.row, column=self.column, old=self.old, new=self.new)

    def __repr__(self):
        if self.kind == 'redundant':
            return "PresolveLogEntry(redundant row %s)" % self.row
        return "PresolveLogEntry(%s %s: %s -> %s by row %s)" % (self.kind, self.column, self.old, self.new, self.row)


def _fail(message: str, row: str = None, column: str = None):
    logger.info("presolve proved infeasibility: %s", message)
    raise InfeasibleModelError(message, row, column)


class _Presolver:
    def __init__(self, model: MilpModel, tol: float):
        self.model = model
        self.tol = tol
        self.A = model.matrix.copy().tocsr()
        self.A.eliminate_zeros()
        self.A.sort_indices()
        self.lower = model.lower.copy()
        self.upper = model.upper.copy()
        self.integer = model.integer_mask
        self.active = np.ones(model.num_rows, dtype=bool)
        self.log = []  # type: List[PresolveLogEntry]

    def orientations(self, i: int):
        """Yields (sign, rhs) such that sign * row_i <= rhs is implied by row i"""
        sense, b = self.model.senses[i], self.model.rhs[i]
        if sense in ('L', 'E'):
            yield 1.0, b
        if sense in ('G', 'E'):
            yield -1.0, -b

    def activity_bounds(self, a: np.ndarray, cols: np.ndarray):
        lb, ub = self.lower[cols], self.upper[cols]
        with np.errstate(invalid='ignore'):
            lo_c = np.where(a > 0, a * lb, a * ub)
            hi_c = np.where(a > 0, a * ub, a * lb)
        return lo_c, hi_c

    def process_row(self, i: int) -> bool:
        start, stop = self.A.indptr[i], self.A.indptr[i + 1]
        cols = self.A.indices[start:stop]
        name = self.model.row_names[i]
        changed = False
        if len(cols) == 0:
            sense, b = self.model.senses[i], self.model.rhs[i]
            if (sense == 'L' and b < -self.tol) or (sense == 'G' and b > self.tol) or \
                    (sense == 'E' and abs(b) > self.tol):
                _fail("empty row {} cannot satisfy its right-hand side {}".format(name, b), row=name)
            self.drop(i)
            return True

        redundant = True
        for sign, b in self.orientations(i):
            a = sign * self.A.data[start:stop]
            lo_c, hi_c = self.activity_bounds(a, cols)
            lo_inf = np.isinf(lo_c)
            min_fin = float(lo_c[~lo_inf].sum())
            n_inf = int(lo_inf.sum())
            feas_tol = 1e-6 * max(1.0, abs(b))
            if n_inf == 0 and min_fin > b + feas_tol:
                _fail("row {} needs activity {} but can reach at least {}".format(name, b, min_fin), row=name)
            hi_inf = np.isinf(hi_c)
            if hi_inf.any() or float(hi_c.sum()) > b + self.tol:
                redundant = False

            if n_inf == 0:
                residual = min_fin - lo_c
            elif n_inf == 1:
                residual = np.where(lo_inf, min_fin, np.inf)
            else:
                continue
            with np.errstate(invalid='ignore', over='ignore'):
                implied = (b - residual) / a
            for pos in np.flatnonzero(np.isfinite(implied)):
                changed |= self.tighten(cols[pos], a[pos] > 0, implied[pos], name)

            if self.model.senses[i] != 'E':
                changed |= self.tighten_coefficients(i, sign, b, cols, a, start)
        if redundant:
            self.drop(i)
            return True
        return changed

    def tighten(self, j: int, is_upper: bool, value: float, row: str) -> bool:
        lb, ub = self.lower[j], self.upper[j]
        if self.integer[j]:
            value = np.floor(value + _ROUNDING_EPS) if is_upper else np.ceil(value - _ROUNDING_EPS)
            step = 0.5
        else:
            step = _CONTINUOUS_STEP * max(1.0, abs(value))
        if is_upper:
            if not value < ub - step:
                return False
            new = (lb, float(value))
        else:
            if not value > lb + step:
                return False
            new = (float(value), ub)
        if new[0] > new[1] + self.tol:
            col = self.model.col_names[j]
            _fail("row {} forces column {} outside its bounds [{}, {}]".format(row, col, lb, ub), row=row,
                  column=col)
        if self.integer[j] and new[0] > new[1]:
            new = (new[1], new[1])
        self.lower[j], self.upper[j] = new
        kind = 'fix' if new[0] == new[1] else 'bound'
        self.log.append(PresolveLogEntry(kind, row, self.model.col_names[j], (float(lb), float(ub)), new))
        return True

    def tighten_coefficients(self, i: int, sign: float, b: float, cols: np.ndarray, a: np.ndarray,
                             start: int) -> bool:
        """
        For a binary x_j with a_j < 0 in sign * row <= b: if the largest activity U of the other columns lies
        strictly between b and b - a_j, a_j can be raised to b - U without changing the integer points.
        """
        lo_c, hi_c = self.activity_bounds(a, cols)
        if np.any(np.isinf(hi_c)):
            return False
        max_act = float(hi_c.sum())
        changed = False
        binary = self.integer[cols] & (self.lower[cols] == 0.0) & (self.upper[cols] == 1.0)
        for pos in np.flatnonzero(binary & (a < 0)):
            # x_j contributes nothing at its maximum, so the others reach max_act
            others = max_act
            if b + self.tol < others < b - a[pos] - self.tol:
                new = b - others
                j = cols[pos]
                self.A.data[start + pos] = sign * new
                self.log.append(PresolveLogEntry('coefficient', self.model.row_names[i], self.model.col_names[j],
                                                 float(sign * a[pos]), float(sign * new)))
                changed = True
        return changed

    def drop(self, i: int) -> None:
        self.active[i] = False
        self.log.append(PresolveLogEntry('redundant', self.model.row_names[i]))

    def run(self, max_passes: int) -> MilpModel:
        for n_pass in range(max_passes):
            changed = False
            for i in np.flatnonzero(self.active):
                changed |= self.process_row(i)
            logger.debug("presolve pass %d: %d log entries, %d rows left", n_pass + 1, len(self.log),
                         int(self.active.sum()))
            if not changed:
                break
        keep = np.flatnonzero(self.active)
        self.A.eliminate_zeros()
        return self.model.replace(matrix=self.A[keep], senses=self.model.senses[keep], rhs=self.model.rhs[keep],
                                  row_names=[self.model.row_names[i] for i in keep], lower=self.lower,
                                  upper=self.upper, name=self.model.name + '_presolved')


def presolve(model: MilpModel, max_passes: int = 20, tol: float = 1e-9) -> Tuple[MilpModel, List[PresolveLogEntry]]:
    """
    Reduces a model by bound propagation, binary coefficient tightening and removal of redundant rows
    :param model: the MilpModel to reduce
    :param max_passes: maximum number of sweeps over the rows
    :param tol: tolerance on activities
    :return: the reduced model, with the same columns, and the log of every reduction
    """
    if not isinstance(model, MilpModel):
        msg = "Expected a MilpModel, got type {}".format(type(model))
        logger.error(msg)
        raise TypeError(msg)
    bad = np.flatnonzero(model.lower > model.upper)
    if len(bad):
        col = model.col_names[bad[0]]
        _fail("column {} has lower bound above upper bound".format(col), column=col)
    presolver = _Presolver(model, tol)
    reduced = presolver.run(max_passes)
    counts = {k: sum(1 for e in presolver.log if e.kind == k) for k in PRESOLVE_ACTIONS}
    logger.info("Presolve of %s: %s", model.name, ', '.join('%d %s' % (counts[k], k) for k in PRESOLVE_ACTIONS))
    return reduced, presolver.log
