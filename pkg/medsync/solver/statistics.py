import csv
import json
import logging
import math
from typing import List, Optional

import numpy as np

from .constants import VALID_MILP_STATUSES, NODE_ACTIONS, NODE_LOG_FIELDS

logger = logging.getLogger(__name__)

"""
Contains the statistics collected while solving a MILP by branch-and-bound.
"""


def relative_gap(bound: Optional[float], objective: Optional[float]) -> Optional[float]:
    """
    :return: (bound - objective) / max(1, |objective|), None if either value is missing
    """
    if bound is None or objective is None:
        return None
    return max(0.0, (bound - objective) / max(1.0, abs(objective)))


class NodeLogEntry:
    """
    One processed branch-and-bound node
    """
    def __init__(self, node_id: int, parent_id: Optional[int], depth: int, bound: float,
                 incumbent: Optional[float], action: str):
        if action not in NODE_ACTIONS:
            msg = "unknown node action {!r}".format(action)
            logger.error(msg)
            raise ValueError(msg)
        self.node_id = node_id
        self.parent_id = parent_id
        self.depth = depth
        self.bound = bound
        self.incumbent = incumbent
        self.action = action

    def get_as_dict(self) -> dict:
        return dict(node_id=self.node_id, parent_id='' if self.parent_id is None else self.parent_id,
                    depth=self.depth, bound=_fmt(self.bound), incumbent=_fmt(self.incumbent), action=self.action)


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return ''
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return repr(float(value))


class BranchRecord:
    """
    One branching decision: the column chosen at a node and its fractional LP value
    """
    def __init__(self, node_id: int, column: int, name: str, var_class: str, value: float):
        self.node_id = node_id
        self.column = column
        self.name = name
        self.var_class = var_class
        self.value = value

    def get_as_dict(self) -> dict:
        return dict(node_id=self.node_id, column=self.column, name=self.name, var_class=self.var_class,
                    value=self.value)


class BnbResult:
    """
    Outcome and statistics of a branch-and-bound solve.  The values refer to the columns of the model that was
    passed to the solver.
    """
    def __init__(self, status: str, values: Optional[np.ndarray] = None, objective: Optional[float] = None,
                 bound: Optional[float] = None, nodes: int = 0, lp_iterations: int = 0, wall_time: float = 0.0,
                 root_bound: Optional[float] = None, presolve_reductions: int = 0,
                 branching_log: List[BranchRecord] = None, node_log: List[NodeLogEntry] = None,
                 model_stats: dict = None, message: str = ''):
        """
        :param status: one of medsync.solver.constants.VALID_MILP_STATUSES
        :param values: incumbent column values, None without incumbent
        :param objective: incumbent objective
        :param bound: best proven upper bound on the optimum (maximization)
        :param nodes: number of nodes whose LP was solved
        :param lp_iterations: simplex iterations over all nodes
        :param wall_time: seconds spent in the solve
        :param root_bound: objective of the root LP relaxation
        :param presolve_reductions: number of presolve log entries
        :param branching_log: every branching decision, in order
        :param node_log: every processed node, kept when configured
        :param model_stats: size statistics of the solved model
        :param message: diagnostic text
        """
        if status not in VALID_MILP_STATUSES:
            msg = "unknown MILP status {!r}".format(status)
            logger.error(msg)
            raise ValueError(msg)
        self.status = status
        self.values = values
        self.objective = objective
        self.bound = bound
        self.nodes = nodes
        self.lp_iterations = lp_iterations
        self.wall_time = wall_time
        self.root_bound = root_bound
        self.presolve_reductions = presolve_reductions
        self.branching_log = branching_log if branching_log is not None else []
        self.node_log = node_log if node_log is not None else []
        self.model_stats = dict(model_stats) if model_stats else {}
        self.message = message

    @property
    def gap(self) -> Optional[float]:
        return relative_gap(self.bound, self.objective)

    @property
    def has_incumbent(self) -> bool:
        return self.values is not None

    def get_summary(self) -> dict:
        """
        :return: JSON-serializable summary of the solve, without the column values
        """
        return dict(status=self.status, objective=self.objective, bound=self.bound, gap=self.gap,
                    nodes=self.nodes, lp_iterations=self.lp_iterations, wall_time=self.wall_time,
                    root_bound=self.root_bound, presolve_reductions=self.presolve_reductions,
                    branchings=len(self.branching_log), model_stats=self.model_stats, message=self.message)

    def save_summary_to_json(self, json_fname: str) -> None:
        summary_dict = self.get_summary()
        with open(json_fname, 'w') as fp:
            json.dump(summary_dict, fp, indent=2)
        logger.info("Wrote solver summary to %s" % (json_fname,))

    def save_node_log(self, fname: str) -> None:
        """
        Saves the node log as a CSV file with columns node_id, parent_id, depth, bound, incumbent, action
        :param fname: filename to save the node log to
        :return: None
        """
        write_node_log(self.node_log, fname)

    def __str__(self):
        obj = 'none' if self.objective is None else '%.6f' % self.objective
        return "BnbResult[%s, objective=%s, gap=%s, nodes=%d, %.2fs]" % (
            self.status, obj, 'n/a' if self.gap is None else '%.3g' % self.gap, self.nodes, self.wall_time)


def write_node_log(entries: List[NodeLogEntry], fname: str) -> None:
    with open(fname, 'w', newline='') as output_file:
        dict_writer = csv.DictWriter(output_file, NODE_LOG_FIELDS)
        dict_writer.writeheader()
        for entry in entries:
            dict_writer.writerow(entry.get_as_dict())
    logger.info("Wrote node log with %d entries to %s" % (len(entries), fname))
