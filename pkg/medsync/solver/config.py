import copy
import logging
from typing import Optional

import cloudpickle as pickle

from .constants import VALID_BRANCHING_RULES, VALID_NODE_SELECTIONS, MAX_TOLERANCE

logger = logging.getLogger(__name__)

"""
Defines the configurations of the LP and branch-and-bound solvers.
"""


def _check_tolerance(name: str, value) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0 < value <= MAX_TOLERANCE:
        msg = "{} must be a number in (0, {}], got {!r}".format(name, MAX_TOLERANCE, value)
        logger.error(msg)
        raise ValueError(msg)


def _check_positive_int(name: str, value) -> None:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        msg = "{} must be a positive integer, got {!r}".format(name, value)
        logger.error(msg)
        raise ValueError(msg)


class LpLimits:
    """
    Tolerances and limits of the revised simplex solver
    """
    def __init__(self, max_iterations: int = 200000, feasibility_tol: float = 1e-9, optimality_tol: float = 1e-9,
                 pivot_tol: float = 1e-11, refactor_frequency: int = 100, drift_tol: float = 1e-8,
                 degenerate_streak: int = 50):
        """
        :param max_iterations: maximum number of simplex iterations of one solve
        :param feasibility_tol: allowed violation of bounds and rows
        :param optimality_tol: allowed reduced cost of the wrong sign
        :param pivot_tol: entries of smaller magnitude are never pivoted on
        :param refactor_frequency: number of basis updates between LU refactorizations
        :param drift_tol: a refactorization is forced when recomputed basic values drift by more than this
        :param degenerate_streak: number of consecutive degenerate pivots after which Bland's rule is used
        """
        self.max_iterations = max_iterations
        self.feasibility_tol = feasibility_tol
        self.optimality_tol = optimality_tol
        self.pivot_tol = pivot_tol
        self.refactor_frequency = refactor_frequency
        self.drift_tol = drift_tol
        self.degenerate_streak = degenerate_streak

        self.validate()

    def validate(self) -> None:
        _check_positive_int('max_iterations', self.max_iterations)
        _check_tolerance('feasibility_tol', self.feasibility_tol)
        _check_tolerance('optimality_tol', self.optimality_tol)
        _check_tolerance('pivot_tol', self.pivot_tol)
        _check_tolerance('drift_tol', self.drift_tol)
        _check_positive_int('refactor_frequency', self.refactor_frequency)
        _check_positive_int('degenerate_streak', self.degenerate_streak)

    def get_cfg_as_dict(self) -> dict:
        return dict(max_iterations=self.max_iterations, feasibility_tol=self.feasibility_tol,
                    optimality_tol=self.optimality_tol, pivot_tol=self.pivot_tol,
                    refactor_frequency=self.refactor_frequency, drift_tol=self.drift_tol,
                    degenerate_streak=self.degenerate_streak)

    def __deepcopy__(self, memodict={}):
        return LpLimits(**self.get_cfg_as_dict())

    def __eq__(self, other):
        return isinstance(other, LpLimits) and self.get_cfg_as_dict() == other.get_cfg_as_dict()

    def __str__(self):
        return "LpLimits" + str(self.get_cfg_as_dict())


class BnbConfig:
    """
    Configuration of a branch-and-bound solve
    """
    def __init__(self, integrality_tol: float = 1e-6, gap_target: float = 0.0, node_limit: int = 1000000,
                 time_limit: float = 600.0, branching_rule: str = 'structured_priority',
                 node_selection: str = 'best_bound', lp_limits: LpLimits = None, presolve: bool = True,
                 disable_pruning: bool = False, node_log_path: Optional[str] = None, keep_node_log: bool = False,
                 log_frequency: int = 500):
        """
        :param integrality_tol: maximum distance to the nearest integer for a value to count as integral
        :param gap_target: relative gap at which the search stops; 0 proves optimality
        :param node_limit: maximum number of nodes to explore
        :param time_limit: maximum wall time in seconds
        :param branching_rule: one of medsync.solver.constants.VALID_BRANCHING_RULES
        :param node_selection: one of medsync.solver.constants.VALID_NODE_SELECTIONS
        :param lp_limits: LpLimits of the node relaxations; if None, a default LpLimits object is constructed
        :param presolve: if True, the model is presolved before the search
        :param disable_pruning: debug mode, explores every node that is not LP-infeasible or integral
        :param node_log_path: if not None, the node log is written to this CSV file
        :param keep_node_log: if True, the node log is kept in memory on the result
        :param log_frequency: progress is logged every this many nodes
        """
        self.integrality_tol = integrality_tol
        self.gap_target = gap_target
        self.node_limit = node_limit
        self.time_limit = time_limit
        self.branching_rule = branching_rule
        self.node_selection = node_selection
        if lp_limits is None:
            lp_limits = LpLimits()
        self.lp_limits = lp_limits
        self.presolve = presolve
        self.disable_pruning = disable_pruning
        self.node_log_path = node_log_path
        self.keep_node_log = keep_node_log
        self.log_frequency = log_frequency

        self.validate()

    def validate(self) -> None:
        _check_tolerance('integrality_tol', self.integrality_tol)
        if isinstance(self.gap_target, bool) or not isinstance(self.gap_target, (int, float)) or \
                not 0 <= self.gap_target <= MAX_TOLERANCE:
            msg = "gap_target must be a number in [0, {}], got {!r}".format(MAX_TOLERANCE, self.gap_target)
            logger.error(msg)
            raise ValueError(msg)
        _check_positive_int('node_limit', self.node_limit)
        if isinstance(self.time_limit, bool) or not isinstance(self.time_limit, (int, float)) or \
                self.time_limit <= 0:
            msg = "time_limit must be a positive number, got {!r}".format(self.time_limit)
            logger.error(msg)
            raise ValueError(msg)
        if self.branching_rule not in VALID_BRANCHING_RULES:
            msg = "branching_rule must be one of {}, got {!r}".format(VALID_BRANCHING_RULES, self.branching_rule)
            logger.error(msg)
            raise ValueError(msg)
        if self.node_selection not in VALID_NODE_SELECTIONS:
            msg = "node_selection must be one of {}, got {!r}".format(VALID_NODE_SELECTIONS, self.node_selection)
            logger.error(msg)
            raise ValueError(msg)
        if not isinstance(self.lp_limits, LpLimits):
            msg = "lp_limits must be of type LpLimits, got type {}".format(type(self.lp_limits))
            logger.error(msg)
            raise TypeError(msg)
        for name in ('presolve', 'disable_pruning', 'keep_node_log'):
            if not isinstance(getattr(self, name), bool):
                msg = "{} must be a bool".format(name)
                logger.error(msg)
                raise TypeError(msg)
        if self.node_log_path is not None and not isinstance(self.node_log_path, str):
            msg = "node_log_path must be None or a str"
            logger.error(msg)
            raise TypeError(msg)
        _check_positive_int('log_frequency', self.log_frequency)

    def get_cfg_as_dict(self) -> dict:
        return dict(integrality_tol=self.integrality_tol, gap_target=self.gap_target, node_limit=self.node_limit,
                    time_limit=self.time_limit, branching_rule=self.branching_rule,
                    node_selection=self.node_selection, lp_limits=self.lp_limits.get_cfg_as_dict(),
                    presolve=self.presolve, disable_pruning=self.disable_pruning,
                    node_log_path=self.node_log_path, keep_node_log=self.keep_node_log,
                    log_frequency=self.log_frequency)

    def __deepcopy__(self, memodict={}):
        d = self.get_cfg_as_dict()
        d['lp_limits'] = copy.deepcopy(self.lp_limits)
        return BnbConfig(**d)

    def __eq__(self, other):
        return isinstance(other, BnbConfig) and self.get_cfg_as_dict() == other.get_cfg_as_dict()

    def __str__(self):
        return "BnbConfig" + str(self.get_cfg_as_dict())

    def save(self, fname: str) -> None:
        """
        Saves the configuration to a file
        :param fname: the filename to save the config to
        :return: None
        """
        with open(fname, 'wb') as f:
            pickle.dump(self, f)

    @staticmethod
    def load(fname: str) -> 'BnbConfig':
        """
        Loads a configuration from disk
        :param fname: the filename where the config is stored
        :return: the loaded configuration
        """
        with open(fname, 'rb') as f:
            loaded_cfg = pickle.load(f)
        return loaded_cfg
