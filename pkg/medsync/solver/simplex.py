import logging
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .basis import BasisFactorization, SingularBasisError
from .config import LpLimits
from .constants import BASIC, AT_LOWER, AT_UPPER, FREE_ZERO, LP_OPTIMAL, LP_INFEASIBLE, LP_UNBOUNDED, \
    LP_ITERATION_LIMIT, LP_NUMERICAL_FAILURE
from .lp_problem import LpProblem, LpResult, LpBasis

logger = logging.getLogger(__name__)

"""
Bounded-variable revised simplex.  solve_lp runs a two-phase primal simplex from a slack basis; warm_solve
re-optimizes from a previous basis with the dual simplex after bounds changed.
"""

# steps shorter than this count as degenerate
_DEGENERATE_STEP = 1e-12
# the row residual is checked for drift every this many iterations
_DRIFT_CHECK_EVERY = 10


class _Outcome(Exception):
    """Internal signal ending a simplex loop with a status"""
    def __init__(self, status: str, message: str = ''):
        super().__init__(message)
        self.status = status
        self.message = message


class _Simplex:
    """
    Working state of one solve over the variables [structural | slack | artificial]
    """
    def __init__(self, problem: LpProblem, limits: LpLimits, art_rows=None, art_signs=None):
        form = problem.form
        self.problem = problem
        self.limits = limits
        self.m, self.n = form.m, form.n
        self.num_core = form.m + form.n
        self.b = form.b
        lo, up = problem.full_bounds()
        if art_rows is not None and len(art_rows):
            arts = sp.csc_matrix((np.asarray(art_signs, dtype=float),
                                  (np.asarray(art_rows), np.arange(len(art_rows)))), shape=(self.m, len(art_rows)))
            self.A = sp.hstack([form.full, arts], format='csc')
            self.A.sort_indices()
            self.AT = self.A.T.tocsr()
            lo = np.concatenate([lo, np.zeros(len(art_rows))])
            up = np.concatenate([up, np.full(len(art_rows), np.inf)])
        else:
            self.A, self.AT = form.full, form.full_t
        self.lo, self.up = lo, up
        self.num_vars = len(lo)
        self.cost = np.concatenate([form.cost, np.zeros(self.num_vars - self.num_core)])
        self.x = np.zeros(self.num_vars)
        self.status = np.full(self.num_vars, AT_LOWER, dtype=np.int8)
        self.head = np.zeros(self.m, dtype=np.int64)
        self.factor = None  # type: Optional[BasisFactorization]
        self.iterations = 0
        self._degenerate_run = 0
        self.bland = False

    def column(self, j: int) -> np.ndarray:
        col = np.zeros(self.m)
        start, stop = self.A.indptr[j], self.A.indptr[j + 1]
        col[self.A.indices[start:stop]] = self.A.data[start:stop]
        return col

    def place_nonbasic(self, j: int, prefer_upper: bool = False) -> None:
        """Puts nonbasic variable j on a finite bound, or at zero if it is free"""
        lo, up = self.lo[j], self.up[j]
        if prefer_upper and np.isfinite(up) or not np.isfinite(lo) and np.isfinite(up):
            self.status[j], self.x[j] = AT_UPPER, up
        elif np.isfinite(lo):
            self.status[j], self.x[j] = AT_LOWER, lo
        else:
            self.status[j], self.x[j] = FREE_ZERO, 0.0

    def refactor(self) -> None:
        self.factor = BasisFactorization(self.A[:, self.head])

    def recompute_basic(self) -> float:
        """
        Recomputes the basic values from the nonbasic ones
        :return: the largest change of a basic value
        """
        x_nb = self.x.copy()
        x_nb[self.head] = 0.0
        xb = self.factor.ftran(self.b - self.A.dot(x_nb))
        drift = float(np.max(np.abs(xb - self.x[self.head]), initial=0.0))
        self.x[self.head] = xb
        return drift

    def refresh(self) -> None:
        self.refactor()
        drift = self.recompute_basic()
        if drift > self.limits.drift_tol:
            logger.debug("basic values drifted by %g before refactorization", drift)

    def after_pivot(self) -> None:
        if self.factor.num_updates >= self.limits.refactor_frequency:
            self.refresh()
        elif self.iterations % _DRIFT_CHECK_EVERY == 0:
            residual = float(np.max(np.abs(self.b - self.A.dot(self.x)), initial=0.0))
            if residual > self.limits.drift_tol:
                self.refresh()

    def note_step(self, step: float) -> None:
        if step <= _DEGENERATE_STEP:
            self._degenerate_run += 1
            if not self.bland and self._degenerate_run >= self.limits.degenerate_streak:
                logger.debug("switching to Bland's rule after %d degenerate pivots", self._degenerate_run)
                self.bland = True
        else:
            self._degenerate_run = 0
            self.bland = False

    def reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        y = self.factor.btran(cost[self.head])
        return cost - self.AT.dot(y)

    def pivot(self, r: int, q: int, alpha: np.ndarray, leaving_status: int) -> None:
        leaving = self.head[r]
        self.status[leaving] = leaving_status
        self.x[leaving] = self.lo[leaving] if leaving_status == AT_LOWER else self.up[leaving]
        self.head[r] = q
        self.status[q] = BASIC
        self.factor.update(r, alpha)

    def primal(self, cost: np.ndarray) -> None:
        """
        Primal simplex iterations from a primal feasible basis; maximizes cost.x.  Ends by raising _Outcome.
        """
        lim = self.limits
        movable = self.up > self.lo
        while True:
            if self.iterations >= lim.max_iterations:
                raise _Outcome(LP_ITERATION_LIMIT, "iteration limit reached in primal simplex")
            d = self.reduced_costs(cost)
            eligible = movable & (((self.status == AT_LOWER) & (d > lim.optimality_tol)) |
                                  ((self.status == AT_UPPER) & (d < -lim.optimality_tol)) |
                                  ((self.status == FREE_ZERO) & (np.abs(d) > lim.optimality_tol)))
            if not eligible.any():
                raise _Outcome(LP_OPTIMAL)
            if self.bland:
                q = int(np.flatnonzero(eligible)[0])
            else:
                q = int(np.argmax(np.where(eligible, np.abs(d), -1.0)))
            direction = 1.0 if d[q] > 0 else -1.0
            alpha = self.factor.ftran(self.column(q))
            delta = -direction * alpha

            head = self.head
            xb, lb, ub = self.x[head], self.lo[head], self.up[head]
            ratios = np.full(self.m, np.inf)
            dec = (delta < -lim.pivot_tol) & np.isfinite(lb)
            inc = (delta > lim.pivot_tol) & np.isfinite(ub)
            ratios[dec] = (xb[dec] - lb[dec]) / -delta[dec]
            ratios[inc] = (ub[inc] - xb[inc]) / delta[inc]
            ratios = np.maximum(ratios, 0.0)
            t_row = float(ratios.min(initial=np.inf))
            t_flip = self.up[q] - self.lo[q]

            self.iterations += 1
            if np.isfinite(t_flip) and t_flip <= t_row:
                self.x[head] += delta * t_flip
                if self.status[q] == AT_LOWER:
                    self.status[q], self.x[q] = AT_UPPER, self.up[q]
                else:
                    self.status[q], self.x[q] = AT_LOWER, self.lo[q]
                self.note_step(t_flip)
                self.after_pivot()
                continue
            if not np.isfinite(t_row):
                raise _Outcome(LP_UNBOUNDED, "column {} improves without limit".format(q))

            ties = np.flatnonzero(ratios <= t_row + 1e-12)
            if self.bland:
                r = int(ties[np.argmin(head[ties])])
            else:
                r = int(ties[np.argmax(np.abs(alpha[ties]))])
            leaving_status = AT_LOWER if delta[r] < 0 else AT_UPPER
            self.x[head] += delta * t_row
            entering_value = self.x[q] + direction * t_row
            self.pivot(r, q, alpha, leaving_status)
            self.x[q] = entering_value
            self.note_step(t_row)
            self.after_pivot()

    def dual(self, cost: np.ndarray) -> None:
        """
        Dual simplex iterations from a dual feasible basis until the basic values are within bounds.  After a streak
        of zero dual steps the leaving row and the entering column are chosen by smallest index (Bland).
        Returns normally on primal feasibility, raises _Outcome otherwise.
        """
        lim = self.limits
        movable = self.up > self.lo
        while True:
            head = self.head
            xb, lb, ub = self.x[head], self.lo[head], self.up[head]
            infeas = np.maximum(np.maximum(lb - xb, xb - ub), 0.0)
            rows = np.flatnonzero(infeas > lim.feasibility_tol)
            if not rows.size:
                return
            if self.bland:
                r = int(rows[np.argmin(head[rows])])
            else:
                r = int(rows[np.argmax(infeas[rows])])
            if self.iterations >= lim.max_iterations:
                raise _Outcome(LP_ITERATION_LIMIT, "iteration limit reached in dual simplex")
            leaving = head[r]
            if xb[r] < lb[r]:
                target, s, leaving_status = lb[r], 1.0, AT_LOWER
            else:
                target, s, leaving_status = ub[r], -1.0, AT_UPPER

            unit = np.zeros(self.m)
            unit[r] = 1.0
            alpha_row = self.AT.dot(self.factor.btran(unit))
            d = self.reduced_costs(cost)
            nonbasic = (self.status != BASIC) & movable & (np.abs(alpha_row) > lim.pivot_tol)
            direction = np.where(self.status == AT_UPPER, -1.0, 1.0)
            free = self.status == FREE_ZERO
            direction[free] = -s * np.sign(alpha_row[free])
            eligible = nonbasic & (s * alpha_row * direction < 0)
            if not eligible.any():
                raise _Outcome(LP_INFEASIBLE, "row {} cannot reach its bound".format(r))
            cand = np.flatnonzero(eligible)
            ratios = np.abs(d[cand]) / np.abs(alpha_row[cand])
            best = ratios.min()
            ties = cand[ratios <= best + 1e-12]
            if self.bland:
                q = int(ties.min())
            else:
                q = int(ties[np.argmax(np.abs(alpha_row[ties]))])

            alpha = self.factor.ftran(self.column(q))
            if abs(alpha[r]) <= lim.pivot_tol:
                logger.debug("unstable dual pivot on row %d, refactorizing", r)
                self.refresh()
                continue
            step = (self.x[leaving] - target) / alpha[r]
            self.iterations += 1
            self.x[head] -= alpha * step
            entering_value = self.x[q] + step
            self.pivot(r, q, alpha, leaving_status)
            self.x[q] = entering_value
            # a zero dual step leaves the objective unchanged
            self.note_step(best)
            self.after_pivot()

    def result(self, status: str, message: str = '', cold_start_fallback: bool = False) -> LpResult:
        n = self.n
        x = self.x[:n].copy()
        objective = float(np.dot(self.problem.objective, x))
        duals = reduced = None
        if self.factor is not None and status in (LP_OPTIMAL, LP_ITERATION_LIMIT):
            duals = self.factor.btran(self.cost[self.head])
            reduced = self.problem.objective - self.AT[:n].dot(duals)
        basis = None
        if np.all(self.head < self.num_core):
            basis = LpBasis(self.head, self.status[:self.num_core])
        return LpResult(status, x, objective, duals, reduced, self.iterations, basis, cold_start_fallback, message)


def _check_problem(problem: LpProblem, limits: Optional[LpLimits]) -> LpLimits:
    if not isinstance(problem, LpProblem):
        msg = "Expected an LpProblem, got type {}".format(type(problem))
        logger.error(msg)
        raise TypeError(msg)
    if limits is None:
        return LpLimits()
    if not isinstance(limits, LpLimits):
        msg = "limits must be of type LpLimits, got type {}".format(type(limits))
        logger.error(msg)
        raise TypeError(msg)
    return limits


def _trivially_infeasible(problem: LpProblem) -> bool:
    return bool(np.any(problem.lower > problem.upper))


def solve_lp(problem: LpProblem, limits: LpLimits = None) -> LpResult:
    """
    Solves an LP with the two-phase primal revised simplex, starting from the slack basis
    :param problem: the LpProblem to maximize
    :param limits: LpLimits; if None, a default LpLimits object is constructed
    :return: the LpResult
    """
    limits = _check_problem(problem, limits)
    if _trivially_infeasible(problem):
        return LpResult(LP_INFEASIBLE, message="a column has lower bound above upper bound")
    form = problem.form
    m, n = form.m, form.n

    # nonbasic structurals on a bound, slacks basic where that is feasible, artificials elsewhere
    probe = _Simplex(problem, limits)
    for j in range(n):
        probe.place_nonbasic(j)
    slack = form.b - problem.matrix.dot(probe.x[:n])
    s_lo, s_up = form.slack_lower, form.slack_upper
    tol = limits.feasibility_tol
    below, above = slack < s_lo - tol, slack > s_up + tol
    art_rows = np.flatnonzero(below | above)
    art_signs = np.where(below[art_rows], -1.0, 1.0)

    lp = _Simplex(problem, limits, art_rows, art_signs)
    lp.x[:n], lp.status[:n] = probe.x[:n], probe.status[:n]
    head = np.arange(n, n + m)
    lp.x[n:n + m] = slack
    for k, i in enumerate(art_rows):
        bound = s_lo[i] if below[i] else s_up[i]
        lp.status[n + i], lp.x[n + i] = (AT_LOWER if below[i] else AT_UPPER), bound
        lp.x[n + m + k] = abs(slack[i] - bound)
        head[i] = n + m + k
    lp.status[head] = BASIC
    lp.head = head

    try:
        lp.refresh()
        if len(art_rows):
            phase1_cost = np.zeros(lp.num_vars)
            phase1_cost[lp.num_core:] = -1.0
            try:
                lp.primal(phase1_cost)
            except _Outcome as outcome:
                if outcome.status != LP_OPTIMAL:
                    return lp.result(outcome.status if outcome.status == LP_ITERATION_LIMIT
                                     else LP_NUMERICAL_FAILURE, outcome.message)
            lp.refresh()
            infeasibility = float(lp.x[lp.num_core:].sum())
            scale = max(1.0, float(np.max(np.abs(form.b), initial=0.0)))
            if infeasibility > 10 * tol * scale:
                logger.debug("phase 1 ended with infeasibility %g", infeasibility)
                return lp.result(LP_INFEASIBLE, "phase 1 infeasibility {:.3g}".format(infeasibility))
            _drop_artificials(lp)
        try:
            lp.primal(lp.cost)
        except _Outcome as outcome:
            if outcome.status == LP_OPTIMAL:
                lp.refresh()
            return lp.result(outcome.status, outcome.message)
    except SingularBasisError as e:
        logger.warning("LP solve failed: %s", e)
        return lp.result(LP_NUMERICAL_FAILURE, str(e))


def _drop_artificials(lp: _Simplex) -> None:
    """
    Fixes artificials at zero and pivots the basic ones out where some other column can replace them
    """
    core = lp.num_core
    lp.up[core:] = 0.0
    lp.x[core:] = 0.0
    nonbasic_arts = np.flatnonzero(lp.status[core:] != BASIC) + core
    lp.status[nonbasic_arts] = AT_LOWER
    for r in np.flatnonzero(lp.head >= core):
        unit = np.zeros(lp.m)
        unit[r] = 1.0
        row = lp.AT.dot(lp.factor.btran(unit))
        row[core:] = 0.0
        row[lp.head] = 0.0
        q = int(np.argmax(np.abs(row)))
        if abs(row[q]) <= 1e-7:
            logger.debug("row %d is redundant, its artificial stays basic at zero", r)
            continue
        alpha = lp.factor.ftran(lp.column(q))
        value = lp.x[q]
        lp.pivot(r, q, alpha, AT_LOWER)
        lp.x[q] = value
    lp.refresh()


def warm_solve(problem: LpProblem, basis: Optional[LpBasis], limits: LpLimits = None) -> LpResult:
    """
    Re-optimizes an LP from a basis of the same rows and columns, typically after bounds changed.  Uses the dual
    simplex, then polishes with primal iterations.  Falls back to solve_lp when the basis is unusable.
    :param problem: the LpProblem to maximize
    :param basis: an LpBasis from an earlier result on the same matrix
    :param limits: LpLimits; if None, a default LpLimits object is constructed
    :return: the LpResult, with cold_start_fallback set if a cold solve was performed
    """
    limits = _check_problem(problem, limits)
    if _trivially_infeasible(problem):
        return LpResult(LP_INFEASIBLE, message="a column has lower bound above upper bound")
    reason = _basis_problem(problem, basis)
    if reason is not None:
        return _fallback(problem, limits, reason)

    lp = _Simplex(problem, limits)
    lp.head = basis.head.copy()
    lp.status = basis.status.copy()
    for j in np.flatnonzero(lp.status != BASIC):
        lp.place_nonbasic(j, prefer_upper=lp.status[j] == AT_UPPER)
    try:
        lp.refactor()
        d = lp.reduced_costs(lp.cost)
        tol = limits.optimality_tol
        for j in np.flatnonzero(lp.status != BASIC):
            if lp.up[j] <= lp.lo[j]:
                continue
            wrong = (lp.status[j] == AT_LOWER and d[j] > tol) or (lp.status[j] == AT_UPPER and d[j] < -tol) or \
                (lp.status[j] == FREE_ZERO and abs(d[j]) > tol)
            if not wrong:
                continue
            target_upper = d[j] > 0
            bound = lp.up[j] if target_upper else lp.lo[j]
            if not np.isfinite(bound):
                return _fallback(problem, limits, "basis is not dual feasible under the new bounds")
            lp.status[j], lp.x[j] = (AT_UPPER, bound) if target_upper else (AT_LOWER, bound)
        lp.recompute_basic()
        try:
            lp.dual(lp.cost)
            lp.primal(lp.cost)
        except _Outcome as outcome:
            if outcome.status == LP_OPTIMAL:
                lp.refresh()
            return lp.result(outcome.status, outcome.message)
    except SingularBasisError as e:
        return _fallback(problem, limits, str(e), lp.iterations)


def _basis_problem(problem: LpProblem, basis) -> Optional[str]:
    m, n = problem.num_rows, problem.num_cols
    if not isinstance(basis, LpBasis):
        return "no basis given"
    if basis.head.shape != (m,) or basis.status.shape != (m + n,):
        return "basis has the wrong dimensions"
    if m and (basis.head.min() < 0 or basis.head.max() >= m + n):
        return "basis refers to unknown variables"
    if len(np.unique(basis.head)) != m:
        return "basis repeats a variable"
    if not np.all(basis.status[basis.head] == BASIC) or int(np.sum(basis.status == BASIC)) != m:
        return "basis statuses are inconsistent"
    if not np.all(np.isin(basis.status, [BASIC, AT_LOWER, AT_UPPER, FREE_ZERO])):
        return "basis has unknown statuses"
    return None


def _fallback(problem: LpProblem, limits: LpLimits, reason: str, spent: int = 0) -> LpResult:
    logger.debug("warm start not possible (%s), solving from scratch", reason)
    result = solve_lp(problem, limits)
    result.cold_start_fallback = True
    result.iterations += spent
    result.message = (reason + '; ' + result.message).rstrip('; ')
    return result
