import datetime
import io
import json
import logging
from collections import OrderedDict
from typing import List

import numpy as np
import pandas as pd

import medsync
from .constants import VALID_SOLUTION_FORMATS
from ..modelgen.solution import StructuredSolution
from ..modelgen.variables import ModelVariant, VarKind, VarRef

logger = logging.getLogger(__name__)

"""
Writes structured solutions as JSON documents or CSV tables.
"""

SOLUTION_CSV_FIELDS = ['variable', 'family', 'index', 'value']
SOLVER_FIELDS = ['bound', 'gap', 'nodes', 'lp_iterations', 'root_bound', 'presolve_reductions', 'model_stats',
                 'message']


def _families(solution: StructuredSolution) -> List[tuple]:
    if solution.variant is ModelVariant.HOURS_STAFFING:
        staff = [(VarKind.HOURS, solution.staff_per_period)]
    else:
        staff = [(VarKind.M_SMALL, solution.staff_per_period), (VarKind.M_BIG, solution.staff_total)]
    return [(kind, arr) for kind, arr in [(VarKind.X, solution.x), (VarKind.O, solution.o)] + staff
            if arr is not None]


def _number(value):
    value = float(value)
    return int(value) if value.is_integer() else value


def solution_as_dict(solution: StructuredSolution, timestamp: bool = True) -> OrderedDict:
    """
    :param solution: the StructuredSolution to convert
    :param timestamp: whether to record the writing time and the solve wall time under metadata; leave them out
        to compare outputs
    :return: an ordered, JSON-serializable dictionary; value fields are left out when there are no values
    """
    doc = OrderedDict()
    doc['status'] = solution.status
    doc['variant'] = solution.variant.value
    if solution.has_values:
        doc['objective'] = solution.objective
        doc['annualization'] = solution.annualization
        doc['annual_lfo'] = solution.objective * solution.annualization
        doc['feasible'] = solution.is_feasible
    doc['solver'] = OrderedDict((k, solution.solver_stats[k]) for k in SOLVER_FIELDS if k in solution.solver_stats)
    if solution.has_values:
        for kind, arr in _families(solution):
            doc[kind.prefix] = np.asarray(arr).tolist()
        doc['violations'] = list(solution.violations)
    meta = OrderedDict(medsync_version=medsync.__version__)
    if timestamp:
        meta['written_at'] = datetime.datetime.now().isoformat(timespec='seconds')
        if 'wall_time' in solution.solver_stats:
            meta['wall_time'] = solution.solver_stats['wall_time']
    doc['metadata'] = meta
    return doc


def solution_as_frame(solution: StructuredSolution) -> pd.DataFrame:
    """
    :return: one row per nonzero variable with its name, family, index tuple and value
    """
    rows = []
    if solution.has_values:
        for kind, arr in _families(solution):
            arr = np.asarray(arr)
            for key in zip(*np.nonzero(arr)):
                ref = VarRef(kind, *key)
                rows.append((ref.name, kind.prefix, ' '.join(str(int(k)) for k in key), _number(arr[key])))
    return pd.DataFrame(rows, columns=SOLUTION_CSV_FIELDS)


def write_solution(solution: StructuredSolution, fmt: str = 'json', timestamp: bool = True) -> str:
    """
    Serializes a structured solution
    :param solution: the StructuredSolution
    :param fmt: one of VALID_SOLUTION_FORMATS
    :param timestamp: record the writing time and wall time (JSON only)
    :return: the JSON document or CSV table as text
    """
    if not isinstance(solution, StructuredSolution):
        msg = "Expected a StructuredSolution, got {}".format(type(solution))
        logger.error(msg)
        raise TypeError(msg)
    if fmt not in VALID_SOLUTION_FORMATS:
        msg = "format must be one of {}, got {!r}".format(VALID_SOLUTION_FORMATS, fmt)
        logger.error(msg)
        raise ValueError(msg)
    if fmt == 'json':
        return json.dumps(solution_as_dict(solution, timestamp), indent=2)
    buf = io.StringIO()
    solution_as_frame(solution).to_csv(buf, index=False)
    return buf.getvalue()


def save_solution(solution: StructuredSolution, fname: str, fmt: str = 'json', timestamp: bool = True) -> None:
    text = write_solution(solution, fmt, timestamp)
    with open(fname, 'w') as fp:
        fp.write(text)
    logger.info("Wrote %s solution to %s" % (fmt, fname))
