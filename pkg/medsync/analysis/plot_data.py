import logging
import os
from typing import Dict

import pandas as pd

from .constants import LFO_ELEMENT_LABELS, MAX_EMPLOYEE_THRESHOLDS, PLOT_DATA_FNAMES
from .kpi import employee_hours_report
from .sweep import SweepResult
from ..instance.entities import TransportCooling
from ..instance.instance import Instance
from ..modelgen.solution import StructuredSolution

logger = logging.getLogger(__name__)

"""
Tables behind the scenario comparison charts.  Charts themselves are not rendered here.
"""


def _solved(result: SweepResult):
    return [e for e in result.entries.values() if e.kpis is not None]


def lfo_elements(result: SweepResult, per_order: bool = False) -> pd.DataFrame:
    """
    :return: one row per solved scenario with the signed LFO elements, annual or per order
    """
    rows = [[e.label] + list(e.kpis.lfo_elements(per_order).values()) for e in _solved(result)]
    return pd.DataFrame(rows, columns=['label'] + LFO_ELEMENT_LABELS)


def percent_deltas(result: SweepResult) -> pd.DataFrame:
    rows = [(e.label,) + result.deltas(e) for e in _solved(result)]
    return pd.DataFrame(rows, columns=['label', 'total_lfo_delta_pct', 'lfo_per_order_delta_pct'])


def delivery_mode_split(result: SweepResult) -> pd.DataFrame:
    solved = _solved(result)
    names = solved[0].kpis.mode_names if solved else []
    rows = [[e.label] + e.kpis.orders_per_mode.tolist() for e in solved]
    return pd.DataFrame(rows, columns=['label'] + names)


def transport_cooling_split(result: SweepResult) -> pd.DataFrame:
    rows = [[e.label] + e.kpis.orders_per_cooling.tolist() for e in _solved(result)]
    return pd.DataFrame(rows, columns=['label'] + [a.display_name for a in TransportCooling])


def employees_per_type(result: SweepResult) -> pd.DataFrame:
    solved = _solved(result)
    names = solved[0].kpis.employee_names if solved else []
    rows = [[e.label] + e.kpis.employees.tolist() for e in solved]
    return pd.DataFrame(rows, columns=['label'] + names)


def hours_against_thresholds(instance: Instance, solution: StructuredSolution,
                             max_employees: int = MAX_EMPLOYEE_THRESHOLDS) -> pd.DataFrame:
    """
    Required hours per employee type and period next to the hours that one to max_employees employees cover
    """
    report = employee_hours_report(instance, solution)
    theta = {e.name: e.max_hours for e in instance.employees}
    for n in range(1, max_employees + 1):
        report['threshold_%d' % n] = report['employee'].map(theta) * n
    return report[['employee', 'period', 'required_hours'] +
                  ['threshold_%d' % n for n in range(1, max_employees + 1)]]


def write_plot_data(result: SweepResult, output_dir: str) -> Dict[str, str]:
    """
    Writes every per-scenario plot table as CSV
    :return: table name -> written path
    """
    os.makedirs(output_dir, exist_ok=True)
    tables = dict(lfo_elements=lfo_elements(result), lfo_per_order_elements=lfo_elements(result, per_order=True),
                  percent_deltas=percent_deltas(result), delivery_modes=delivery_mode_split(result),
                  transport_cooling=transport_cooling_split(result), employees=employees_per_type(result))
    paths = {}
    for name, df in tables.items():
        paths[name] = os.path.join(output_dir, PLOT_DATA_FNAMES[name])
        df.to_csv(paths[name], index=False)
    logger.info("Wrote %d plot tables to %s" % (len(paths), output_dir))
    return paths
