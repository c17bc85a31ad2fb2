import json
import logging
import os
from collections import OrderedDict
from typing import Optional, Sequence, Tuple, Union

import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from .constants import SWEEP_ERROR_STATUS, SWEEP_CSV_FIELDS, SWEEP_JSON_FNAME, SWEEP_CSV_FNAME
from .kpi import KpiReport, compute_kpis
from ..instance.instance import Instance
from ..instance.scenario import ScenarioSpec, apply_scenario, check_unique_labels
from ..modelgen.builder import build
from ..modelgen.milp_model import MilpModel
from ..modelgen.solution import StructuredSolution, extract_solution
from ..modelgen.variables import ModelVariant
from ..solver.bnb import solve_milp
from ..solver.config import BnbConfig
from ..solver.statistics import BnbResult

logger = logging.getLogger(__name__)

"""
Runs what-if scenarios: every scenario is applied to a base instance, built, solved and summarized by its KPIs.
"""


def solve_instance(instance: Instance, variant: Union[ModelVariant, str] = ModelVariant.BASE,
                   config: BnbConfig = None, check: bool = True) \
        -> Tuple[MilpModel, BnbResult, StructuredSolution]:
    """
    Builds and solves the model of an instance
    :param instance: the Instance
    :param variant: model variant to build
    :param config: solver configuration, defaults to BnbConfig()
    :param check: validate the instance before building
    :return: the model, the raw solver result and the structured solution (without values when the solver
        found no incumbent)
    """
    model = build(instance, variant, check=check)
    result = solve_milp(model, config)
    stats = result.get_summary()
    if result.has_incumbent:
        solution = extract_solution(model, result.values, result.status, stats)
    else:
        solution = StructuredSolution.empty(result.status, model, stats)
    return model, result, solution


class SweepEntry:
    """Outcome of one scenario of a sweep"""
    def __init__(self, spec: ScenarioSpec, status: str, kpis: Optional[KpiReport] = None,
                 solver_stats: dict = None, message: str = ''):
        self.spec = spec
        self.status = status
        self.kpis = kpis
        self.solver_stats = dict(solver_stats) if solver_stats else {}
        self.message = message

    @property
    def label(self) -> str:
        return self.spec.label

    def get_as_dict(self) -> OrderedDict:
        return OrderedDict(label=self.label, scenario=self.spec.get_cfg_as_dict(), status=self.status,
                           kpis=None if self.kpis is None else self.kpis.get_as_dict(),
                           solver=dict(self.solver_stats), message=self.message)


def _percent_delta(value: Optional[float], reference: Optional[float]) -> Optional[float]:
    if value is None or reference is None or reference == 0:
        return None
    return (value - reference) / abs(reference) * 100.0


class SweepResult:
    """
    Entries of a sweep in request order.  Percent deltas are computed against the first entry, the base scenario.
    """
    def __init__(self, entries: Sequence[SweepEntry], variant: ModelVariant):
        self.entries = OrderedDict((e.label, e) for e in entries)
        self.variant = variant

    @property
    def base(self) -> SweepEntry:
        return next(iter(self.entries.values()))

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, label: str) -> SweepEntry:
        return self.entries[label]

    def deltas(self, entry: SweepEntry) -> Tuple[Optional[float], Optional[float]]:
        """
        :return: percent change of the total annual LFO and of the LFO per order relative to the base entry
        """
        base = self.base.kpis
        if entry.kpis is None or base is None:
            return None, None
        return (_percent_delta(entry.kpis.total_annual_lfo, base.total_annual_lfo),
                _percent_delta(entry.kpis.lfo_per_order, base.lfo_per_order))

    def to_frame(self, timings: bool = True) -> pd.DataFrame:
        """
        :param timings: fill the wall_time column; leave it empty to compare outputs
        :return: one row per scenario with the columns of medsync.analysis.constants.SWEEP_CSV_FIELDS
        """
        rows = []
        for entry in self.entries.values():
            kpis, stats = entry.kpis, entry.solver_stats
            size = stats.get('model_stats') or {}
            total_delta, per_order_delta = self.deltas(entry)
            row = dict(label=entry.label, status=entry.status, total_lfo_delta_pct=total_delta,
                       lfo_per_order_delta_pct=per_order_delta, message=entry.message,
                       rows=size.get('rows'), columns=size.get('columns'), nonzeros=size.get('nonzeros'))
            for key in ('objective', 'bound', 'gap', 'nodes'):
                row[key] = stats.get(key)
            if timings:
                row['wall_time'] = stats.get('wall_time')
            if kpis is not None:
                row.update(total_annual_lfo=kpis.total_annual_lfo, lfo_per_order=kpis.lfo_per_order,
                           annual_orders=kpis.annual_orders, annual_transport_cost=kpis.annual_transport_cost,
                           annual_handling_cost=kpis.annual_handling_cost,
                           annual_prescription_fee=kpis.annual_prescription_fee)
            rows.append(row)
        return pd.DataFrame(rows, columns=SWEEP_CSV_FIELDS)

    def get_as_dict(self, timings: bool = True) -> OrderedDict:
        scenarios = []
        for entry in self.entries.values():
            doc = entry.get_as_dict()
            if not timings:
                doc['solver'].pop('wall_time', None)
            doc['total_lfo_delta_pct'], doc['lfo_per_order_delta_pct'] = self.deltas(entry)
            scenarios.append(doc)
        return OrderedDict(variant=self.variant.value, base=self.base.label, scenarios=scenarios)

    def save(self, output_dir: str, timings: bool = True) -> Tuple[str, str]:
        """
        Writes the sweep as one JSON document and one CSV table
        :param output_dir: existing or new directory
        :param timings: record solve wall times; identical sweeps then write identical files without them
        :return: paths of the JSON and CSV files
        """
        os.makedirs(output_dir, exist_ok=True)
        json_fname = os.path.join(output_dir, SWEEP_JSON_FNAME)
        csv_fname = os.path.join(output_dir, SWEEP_CSV_FNAME)
        with open(json_fname, 'w') as fp:
            json.dump(self.get_as_dict(timings), fp, indent=2)
        self.to_frame(timings).to_csv(csv_fname, index=False)
        logger.info("Wrote sweep of %d scenarios to %s and %s" % (len(self), json_fname, csv_fname))
        return json_fname, csv_fname


def run_scenario(base: Instance, spec: ScenarioSpec, variant: Union[ModelVariant, str] = ModelVariant.BASE,
                 config: BnbConfig = None) -> SweepEntry:
    """
    Applies, builds, solves and summarizes one scenario.  Exceptions are recorded in the entry.
    """
    try:
        instance = apply_scenario(base, spec)
        _, result, solution = solve_instance(instance, variant, config)
        kpis = compute_kpis(instance, solution) if solution.has_values else None
        logger.info("%s: %s", spec.label, result)
        return SweepEntry(spec, result.status, kpis, result.get_summary(), result.message)
    except Exception as e:
        logger.exception(e)
        logger.error("scenario %s failed", spec.label)
        return SweepEntry(spec, SWEEP_ERROR_STATUS, message="{}: {}".format(type(e).__name__, e))


def run_sweep(base: Instance, specs: Sequence[ScenarioSpec], variant: Union[ModelVariant, str] = ModelVariant.BASE,
              config: BnbConfig = None, n_jobs: int = 1, progress_bar_disable: bool = False) -> SweepResult:
    """
    Runs a list of scenarios against a base instance
    :param base: the base Instance
    :param specs: non-empty list of ScenarioSpec with unique labels; the first one is the comparison base
    :param variant: model variant used for every scenario
    :param config: solver configuration shared by all scenarios
    :param n_jobs: number of parallel joblib workers, -1 for all cores
    :param progress_bar_disable: turn off the tqdm progress bar
    :return: the SweepResult, entries in the order of specs
    """
    if not isinstance(base, Instance):
        msg = "Expected an Instance, got {}".format(type(base))
        logger.error(msg)
        raise TypeError(msg)
    specs = list(specs)
    if not specs:
        msg = "a sweep needs at least one scenario"
        logger.error(msg)
        raise ValueError(msg)
    check_unique_labels(specs)
    variant = ModelVariant.from_str(variant)
    loop = tqdm(specs, desc='Scenarios', disable=progress_bar_disable)
    if n_jobs == 1:
        entries = []
        for spec in loop:
            loop.set_postfix_str(spec.label)
            entries.append(run_scenario(base, spec, variant, config))
    else:
        entries = Parallel(n_jobs=n_jobs)(delayed(run_scenario)(base, spec, variant, config) for spec in loop)
    # workers may finish out of order
    order = {spec.label: i for i, spec in enumerate(specs)}
    entries = sorted(entries, key=lambda e: order[e.label])
    return SweepResult(entries, variant)
