import heapq
import logging
import math
import time
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..modelgen.milp_model import MilpModel
from ..modelgen.variables import VarKind, VarRef
from .config import BnbConfig
from .constants import LP_INFEASIBLE, LP_UNBOUNDED, MILP_OPTIMAL, MILP_FEASIBLE_GAP_LIMIT, MILP_INFEASIBLE, \
    MILP_LIMIT, MILP_UNBOUNDED
from .lp_problem import LpBasis, LpResult
from .presolve import presolve, InfeasibleModelError
from .simplex import solve_lp, warm_solve
from .statistics import BnbResult, BranchRecord, NodeLogEntry, relative_gap, write_node_log

logger = logging.getLogger(__name__)

"""
LP-based branch-and-bound for maximization MILPs.  Node relaxations are re-optimized from the parent's basis with
the dual simplex.  The incumbent is always checked against the rows of the model that was passed in.
"""

""" Branching priority of the structured variable families, lower goes first """
CLASS_RANKS = {VarKind.X: 0, VarKind.M_BIG: 1, VarKind.M_SMALL: 2, VarKind.O: 3}
OTHER_RANK = 4
# absolute floor of the pruning tolerance
_PRUNE_EPS = 1e-9


class _Node:
    __slots__ = ('node_id', 'parent_id', 'depth', 'bound', 'changes', 'basis', 'seq')

    def __init__(self, node_id: int, parent_id: Optional[int], depth: int, bound: float,
                 changes: Dict[int, Tuple[float, float]], basis: Optional[LpBasis]):
        self.node_id = node_id
        self.parent_id = parent_id
        self.depth = depth
        self.bound = bound
        # cumulative (lower, upper) overrides along the path from the root
        self.changes = changes
        self.basis = basis


def column_classes(model: MilpModel) -> Tuple[np.ndarray, List[str]]:
    """
    Assigns every column its structured family
    :param model: the MilpModel
    :return: the branching rank per column and the family label per column ('other' for unstructured names)
    """
    ranks = np.full(model.num_cols, OTHER_RANK, dtype=np.int64)
    labels = ['other'] * model.num_cols
    if model.var_map is not None and len(model.var_map) == model.num_cols:
        for kind in model.var_map.kinds():
            start, stop = model.var_map.block(kind)
            ranks[start:stop] = CLASS_RANKS.get(kind, OTHER_RANK)
            labels[start:stop] = [kind.prefix] * (stop - start)
        return ranks, labels
    for j, name in enumerate(model.col_names):
        try:
            kind = VarRef.from_name(name).kind
        except ValueError:
            continue
        ranks[j] = CLASS_RANKS.get(kind, OTHER_RANK)
        labels[j] = kind.prefix
    return ranks, labels


def select_branching_column(x: np.ndarray, fractional: np.ndarray, rule: str,
                            ranks: np.ndarray = None) -> int:
    """
    Picks the column to branch on
    :param x: LP values
    :param fractional: mask of integer columns with a fractional value
    :param rule: 'most_fractional' or 'structured_priority'
    :param ranks: branching rank per column, required by structured_priority
    :return: the column index; ties go to the lowest index
    """
    candidates = np.flatnonzero(fractional)
    if len(candidates) == 0:
        msg = "no fractional column to branch on"
        logger.error(msg)
        raise ValueError(msg)
    if rule == 'structured_priority':
        cand_ranks = ranks[candidates]
        candidates = candidates[cand_ranks == cand_ranks.min()]
    frac = x[candidates] - np.floor(x[candidates])
    score = np.minimum(frac, 1.0 - frac)
    return int(candidates[int(np.argmax(score))])


class _Search:
    def __init__(self, model: MilpModel, work: MilpModel, config: BnbConfig, presolve_reductions: int,
                 start_time: float):
        self.model = model
        self.work = work
        self.config = config
        self.presolve_reductions = presolve_reductions
        self.start_time = start_time
        self.lp = work.to_lp_problem()
        self.integer = work.integer_mask
        self.ranks, self.labels = column_classes(work)

        self.incumbent = None       # type: Optional[np.ndarray]
        self.incumbent_obj = -math.inf
        self.stack = []             # type: List[_Node]
        self.heap = []              # type: List[Tuple[float, int, _Node]]
        self.unresolved = []        # type: List[float]
        self.num_created = 0
        self.num_pushed = 0
        self.nodes = 0
        self.lp_iterations = 0
        self.root_bound = None
        self.branching_log = []     # type: List[BranchRecord]
        self.node_log = []          # type: List[NodeLogEntry]

    # --- open node container -------------------------------------------------------------------------------------

    @property
    def use_heap(self) -> bool:
        return self.config.node_selection == 'best_bound' and self.incumbent is not None

    def push(self, node: _Node) -> None:
        node.seq = self.num_pushed
        self.num_pushed += 1
        if self.use_heap:
            heapq.heappush(self.heap, (-node.bound, node.seq, node))
        else:
            self.stack.append(node)

    def pop(self) -> _Node:
        if self.heap:
            return heapq.heappop(self.heap)[2]
        return self.stack.pop()

    def has_open(self) -> bool:
        return bool(self.heap) or bool(self.stack)

    def switch_to_heap(self) -> None:
        for node in self.stack:
            heapq.heappush(self.heap, (-node.bound, node.seq, node))
        self.stack = []

    def open_bound(self) -> float:
        bound = -math.inf
        if self.heap:
            bound = -self.heap[0][0]
        if self.stack:
            bound = max(bound, max(node.bound for node in self.stack))
        return bound

    def global_bound(self) -> float:
        bound = max([self.incumbent_obj, self.open_bound()] + self.unresolved)
        return bound

    # --- node processing -----------------------------------------------------------------------------------------

    def prune_tol(self) -> float:
        return max(self.config.gap_target, _PRUNE_EPS) * max(1.0, abs(self.incumbent_obj))

    def dominated(self, bound: float) -> bool:
        if self.config.disable_pruning or self.incumbent is None:
            return False
        return bound <= self.incumbent_obj + self.prune_tol()

    def record(self, node: _Node, bound: float, action: str) -> None:
        if self.config.keep_node_log or self.config.node_log_path is not None:
            incumbent = self.incumbent_obj if self.incumbent is not None else None
            self.node_log.append(NodeLogEntry(node.node_id, node.parent_id, node.depth, bound, incumbent, action))

    def node_bounds(self, node: _Node) -> Tuple[np.ndarray, np.ndarray]:
        lower, upper = self.work.lower.copy(), self.work.upper.copy()
        for j, (lo, up) in node.changes.items():
            lower[j], upper[j] = lo, up
        return lower, upper

    def solve_node(self, node: _Node) -> LpResult:
        lower, upper = self.node_bounds(node)
        problem = self.lp.with_bounds(lower, upper)
        limits = self.config.lp_limits
        if node.basis is not None:
            result = warm_solve(problem, node.basis, limits)
        else:
            result = solve_lp(problem, limits)
        self.lp_iterations += result.iterations
        self.nodes += 1
        return result

    def offer(self, candidate: np.ndarray, source: str) -> bool:
        """Accepts candidate as the new incumbent if it is feasible for the input model and improves"""
        problems = self.model.check_feasible(candidate)
        if problems:
            logger.debug("%s candidate rejected: %s", source, problems[0])
            return False
        obj = self.model.objective_value(candidate)
        if self.incumbent is not None and obj <= self.incumbent_obj:
            return False
        first = self.incumbent is None
        self.incumbent, self.incumbent_obj = candidate, obj
        logger.info("new incumbent %.6f from %s after %d nodes", obj, source, self.nodes)
        if first and self.config.node_selection == 'best_bound':
            self.switch_to_heap()
        return True

    def round_solution(self, x: np.ndarray) -> np.ndarray:
        candidate = x.copy()
        candidate[self.integer] = np.round(candidate[self.integer])
        return candidate

    def process(self, node: _Node) -> Optional[str]:
        """
        Solves one node and branches or prunes it
        :return: a MILP status when the whole search must stop, else None
        """
        if self.dominated(node.bound):
            self.record(node, node.bound, 'pruned_bound')
            return None
        result = self.solve_node(node)
        if result.status == LP_INFEASIBLE:
            self.record(node, node.bound, 'pruned_infeasible')
            return None
        if result.status == LP_UNBOUNDED:
            self.record(node, math.inf, 'unbounded')
            if node.parent_id is None:
                return MILP_UNBOUNDED
            # a restriction of a bounded relaxation cannot be unbounded; keep the node's bound open
            self.unresolved.append(node.bound)
            return None
        if not result.is_optimal:
            logger.warning("LP of node %d ended with status %s: %s", node.node_id, result.status, result.message)
            self.unresolved.append(node.bound)
            self.record(node, node.bound, 'lp_limit')
            return None

        bound = min(result.objective, node.bound)
        if node.parent_id is None:
            self.root_bound = result.objective
        if self.dominated(bound):
            self.record(node, bound, 'pruned_bound')
            return None

        x = result.x
        frac = np.abs(x - np.round(x))
        fractional = self.integer & (frac > self.config.integrality_tol)
        if not fractional.any():
            candidate = self.round_solution(x)
            if self.model.check_feasible(candidate):
                # integral relaxation that the input model rejects numerically
                self.unresolved.append(bound)
                self.record(node, bound, 'lp_limit')
                return None
            self.offer(candidate, 'integral relaxation')
            self.record(node, bound, 'integral')
            return None

        if self.incumbent is None:
            self.offer(self.round_solution(x), 'LP rounding')
            if self.dominated(bound):
                self.record(node, bound, 'pruned_bound')
                return None

        j = select_branching_column(x, fractional, self.config.branching_rule, self.ranks)
        self.branching_log.append(BranchRecord(node.node_id, j, self.work.col_names[j], self.labels[j], float(x[j])))
        lower, upper = self.node_bounds(node)
        down_changes = dict(node.changes)
        down_changes[j] = (lower[j], float(np.floor(x[j])))
        up_changes = dict(node.changes)
        up_changes[j] = (float(np.ceil(x[j])), upper[j])
        down = self.child(node, bound, down_changes, result.basis)
        up = self.child(node, bound, up_changes, result.basis)
        # the child on the rounding side is explored first
        first, second = (up, down) if x[j] - np.floor(x[j]) >= 0.5 else (down, up)
        if self.use_heap:
            self.push(first)
            self.push(second)
        else:
            self.push(second)
            self.push(first)
        self.record(node, bound, 'branched')
        return None

    def child(self, parent: _Node, bound: float, changes, basis) -> _Node:
        self.num_created += 1
        return _Node(self.num_created - 1, parent.node_id, parent.depth + 1, bound, changes, basis)

    # --- main loop -----------------------------------------------------------------------------------------------

    def elapsed(self) -> float:
        return time.time() - self.start_time

    def run(self) -> BnbResult:
        cfg = self.config
        self.num_created = 1
        self.push(_Node(0, None, 0, math.inf, {}, None))
        limited = False
        while self.has_open():
            if self.nodes >= cfg.node_limit or self.elapsed() >= cfg.time_limit:
                limited = True
                logger.info("stopping search: %s limit reached",
                            'node' if self.nodes >= cfg.node_limit else 'time')
                break
            if cfg.gap_target > 0 and self.incumbent is not None:
                gap = relative_gap(self.global_bound(), self.incumbent_obj)
                if gap <= cfg.gap_target:
                    logger.info("stopping search: gap %.3g within target %.3g", gap, cfg.gap_target)
                    break
            status = self.process(self.pop())
            if status is not None:
                return self.finish(status, message="root relaxation is unbounded")
            if self.nodes and self.nodes % cfg.log_frequency == 0:
                inc = '%.6f' % self.incumbent_obj if self.incumbent is not None else 'none'
                logger.info("nodes %d, open %d, incumbent %s, bound %.6f, %.1fs", self.nodes,
                            len(self.heap) + len(self.stack), inc, self.global_bound(), self.elapsed())

        bound = self.global_bound()
        if self.incumbent is None:
            if limited or self.unresolved:
                return self.finish(MILP_LIMIT, bound=bound, message="no incumbent found within the limits")
            return self.finish(MILP_INFEASIBLE, message="every node was pruned without an integer solution")
        gap = relative_gap(bound, self.incumbent_obj)
        if gap <= cfg.gap_target + 1e-12 or (not limited and not self.unresolved and not self.has_open()):
            return self.finish(MILP_OPTIMAL, bound=max(bound, self.incumbent_obj))
        return self.finish(MILP_FEASIBLE_GAP_LIMIT, bound=bound)

    def finish(self, status: str, bound: float = None, message: str = '') -> BnbResult:
        objective = self.incumbent_obj if self.incumbent is not None else None
        if self.config.node_log_path is not None:
            write_node_log(self.node_log, self.config.node_log_path)
        result = BnbResult(status, values=self.incumbent, objective=objective, bound=bound, nodes=self.nodes,
                           lp_iterations=self.lp_iterations, wall_time=self.elapsed(), root_bound=self.root_bound,
                           presolve_reductions=self.presolve_reductions, branching_log=self.branching_log,
                           node_log=self.node_log if self.config.keep_node_log else [],
                           model_stats=self.model.size_stats(), message=message)
        logger.info("Solved %s: %s", self.model.name, result)
        return result


def solve_milp(model: MilpModel, config: BnbConfig = None) -> BnbResult:
    """
    Maximizes a MILP by LP-based branch-and-bound
    :param model: the MilpModel to solve
    :param config: BnbConfig; if None, a default BnbConfig object is constructed
    :return: the BnbResult; values refer to the columns of model
    """
    if not isinstance(model, MilpModel):
        msg = "Expected a MilpModel, got type {}".format(type(model))
        logger.error(msg)
        raise TypeError(msg)
    if config is None:
        config = BnbConfig()
    elif not isinstance(config, BnbConfig):
        msg = "config must be of type BnbConfig, got type {}".format(type(config))
        logger.error(msg)
        raise TypeError(msg)
    start_time = time.time()
    model.validate()
    logger.info("Solving %s with %s", model, config)

    work, reductions = model, 0
    if config.presolve:
        try:
            work, presolve_log = presolve(model)
        except InfeasibleModelError as e:
            result = BnbResult(MILP_INFEASIBLE, wall_time=time.time() - start_time,
                               model_stats=model.size_stats(), message=str(e))
            logger.info("Solved %s: %s", model.name, result)
            return result
        reductions = len(presolve_log)
    return _Search(model, work, config, reductions, start_time).run()
