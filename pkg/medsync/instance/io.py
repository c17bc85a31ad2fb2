import logging
import os
from typing import List, Sequence

import numpy as np
import pandas as pd

from .constants import REQUIRED_FILES, MONEY_DECIMALS, MONEY_TOL, TRANSPORT_COOLING_COLUMNS, BUNDLED_DATA_DIR, \
    MEDICATION_CLASS_LABELS, BUNDLED_PATIENT_TYPES, BUNDLED_RHO_TOTAL, BUNDLED_SIGMA_RHO_TOTAL
from .entities import CostSchedule, DeliveryMode, EmployeeType, PatientType
from .instance import Instance
from .validation import validate

logger = logging.getLogger(__name__)

"""
Reads and writes instance directories made of six CSV files.
"""


class InstanceDataError(ValueError):
    """
    Raised when an instance directory cannot be turned into a valid Instance
    """
    def __init__(self, message: str, file: str = None, line: int = None, field: str = None,
                 problems: Sequence[str] = ()):
        self.file = file
        self.line = line
        self.field = field
        self.problems = list(problems) if problems else [message]
        location = ''
        if file is not None:
            location = file
            if line is not None:
                location += ':%d' % line
            if field is not None:
                location += ' [%s]' % field
            location += ': '
        super().__init__(location + message)


def _fail(message: str, file: str = None, line: int = None, field: str = None, problems=()):
    err = InstanceDataError(message, file, line, field, problems)
    logger.error(str(err))
    raise err


def _read_table(data_dir: str, fname: str) -> pd.DataFrame:
    path = os.path.join(data_dir, fname)
    try:
        df = pd.read_csv(path, encoding='utf-8', skipinitialspace=True, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        _fail("file is empty", fname)
    except pd.errors.ParserError as e:
        _fail("malformed CSV: {}".format(e), fname)
    df.columns = [c.strip() for c in df.columns]
    missing = [c for c in REQUIRED_FILES[fname] if c not in df.columns]
    if missing:
        _fail("missing columns {}".format(missing), fname, 1)
    return df


def _cell(df: pd.DataFrame, fname: str, row_idx: int, column: str, kind: str):
    """
    Converts one cell, reporting the file line (header is line 1) and field on failure
    """
    raw = str(df.iloc[row_idx][column]).strip()
    line = row_idx + 2
    try:
        if kind == 'int':
            value = float(raw)
            if not value.is_integer():
                raise ValueError
            return int(value)
        value = float(raw)
    except ValueError:
        _fail("expected {} value, got {!r}".format('an integer' if kind == 'int' else 'a numeric', raw),
              fname, line, column)
    if not np.isfinite(value):
        _fail("value must be finite, got {!r}".format(raw), fname, line, column)
    if kind == 'money' and abs(round(value, MONEY_DECIMALS) - value) > MONEY_TOL:
        _fail("monetary value must have at most {} decimals, got {!r}".format(MONEY_DECIMALS, raw),
              fname, line, column)
    return value


def load_instance(data_dir: str) -> Instance:
    """
    Loads and validates an instance from a directory of CSV files
    :param data_dir: directory containing patients.csv, transport_costs.csv, capacities.csv, employees.csv,
        fees.csv and meta.csv
    :return: the validated Instance
    """
    if not os.path.isdir(data_dir):
        _fail("instance directory {} does not exist".format(data_dir))
    missing = [f for f in REQUIRED_FILES if not os.path.isfile(os.path.join(data_dir, f))]
    if missing:
        _fail("missing files: {}".format(', '.join(missing)), problems=['missing file ' + f for f in missing])

    patients = _load_patients(data_dir)
    modes, transport = _load_modes(data_dir)
    employees = _load_employees(data_dir)
    fees = _load_fees(data_dir)
    periods, big_m1, big_m2, periods_per_year = _load_meta(data_dir)

    instance = Instance(patients, CostSchedule(transport, fees), modes, employees, periods, big_m1, big_m2,
                        periods_per_year)
    violations = validate(instance)
    if violations:
        _fail("instance violates {} invariant(s): {}".format(len(violations), '; '.join(map(str, violations))),
              problems=[str(v) for v in violations])
    logger.info("Loaded %s from %s", instance, data_dir)
    return instance


def _load_patients(data_dir: str) -> List[PatientType]:
    fname = 'patients.csv'
    df = _read_table(data_dir, fname)
    if len(df) == 0:
        _fail("no patient types", fname)
    patients = []
    for i in range(len(df)):
        pid = _cell(df, fname, i, 'p', 'int')
        if pid != i:
            _fail("patient ids must be 0..|P|-1 in order, got {}".format(pid), fname, i + 2, 'p')
        needs = [[_cell(df, fname, i, 'q_c0k0', 'int'), _cell(df, fname, i, 'q_c0k1', 'int')],
                 [_cell(df, fname, i, 'q_c1k0', 'int'), _cell(df, fname, i, 'q_c1k1', 'int')]]
        patients.append(PatientType(pid, needs, _cell(df, fname, i, 'rho', 'int'),
                                    _cell(df, fname, i, 'sigma', 'int')))
    return patients


def _load_modes(data_dir: str):
    cost_name, cap_name = 'transport_costs.csv', 'capacities.csv'
    costs_df = _read_table(data_dir, cost_name)
    caps_df = _read_table(data_dir, cap_name)
    if len(costs_df) == 0:
        _fail("no delivery modes", cost_name)
    capacities = {}
    for i in range(len(caps_df)):
        name = str(caps_df.iloc[i]['delivery_mode']).strip()
        if name in capacities:
            _fail("duplicate delivery mode {!r}".format(name), cap_name, i + 2, 'delivery_mode')
        capacities[name] = _cell(caps_df, cap_name, i, 'delta_per_period', 'int')
    modes, transport = [], []
    for i in range(len(costs_df)):
        name = str(costs_df.iloc[i]['delivery_mode']).strip()
        if name not in capacities:
            _fail("delivery mode {!r} has no capacity in {}".format(name, cap_name), cost_name, i + 2,
                  'delivery_mode')
        modes.append(DeliveryMode(i, name, capacities.pop(name)))
        transport.append([_cell(costs_df, cost_name, i, col, 'money') for col in TRANSPORT_COOLING_COLUMNS])
    if capacities:
        _fail("capacities given for unknown delivery modes {}".format(sorted(capacities)), cap_name)
    # stored as [transport cooling][delivery mode]
    return modes, np.array(transport, dtype=float).T


def _load_employees(data_dir: str) -> List[EmployeeType]:
    fname = 'employees.csv'
    df = _read_table(data_dir, fname)
    if len(df) == 0:
        _fail("no employee types", fname)
    employees = []
    for i in range(len(df)):
        hours = [_cell(df, fname, i, 'u_' + col, 'float') for col in TRANSPORT_COOLING_COLUMNS]
        employees.append(EmployeeType(i, str(df.iloc[i]['name']).strip(), hours,
                                      _cell(df, fname, i, 'theta', 'float'),
                                      _cell(df, fname, i, 'hourly_wage', 'money')))
    return employees


def _load_fees(data_dir: str) -> List[float]:
    fname = 'fees.csv'
    df = _read_table(data_dir, fname)
    fees = {}
    for i in range(len(df)):
        label = str(df.iloc[i]['med_class']).strip()
        if label not in MEDICATION_CLASS_LABELS:
            _fail("unknown medication class {!r}".format(label), fname, i + 2, 'med_class')
        fees[label] = _cell(df, fname, i, 'fee', 'money')
    missing = [k for k in MEDICATION_CLASS_LABELS if k not in fees]
    if missing:
        _fail("missing fees for medication classes {}".format(missing), fname)
    return [fees[k] for k in MEDICATION_CLASS_LABELS]


def _load_meta(data_dir: str):
    fname = 'meta.csv'
    df = _read_table(data_dir, fname)
    if len(df) != 1:
        _fail("expected exactly one data row, got {}".format(len(df)), fname)
    return tuple(_cell(df, fname, 0, col, 'int') for col in REQUIRED_FILES[fname])


def save_instance(instance: Instance, data_dir: str) -> None:
    """
    Writes an instance as the six CSV files understood by load_instance
    :param instance: the Instance to write
    :param data_dir: output directory, created if needed
    """
    os.makedirs(data_dir, exist_ok=True)
    pd.DataFrame([{'p': p.id, 'q_c0k0': p.needs[0, 0], 'q_c0k1': p.needs[0, 1], 'q_c1k0': p.needs[1, 0],
                   'q_c1k1': p.needs[1, 1], 'rho': p.rho, 'sigma': p.sigma} for p in instance.patients],
                 columns=REQUIRED_FILES['patients.csv']).to_csv(os.path.join(data_dir, 'patients.csv'), index=False)
    t = instance.costs.transport_costs
    pd.DataFrame([dict(delivery_mode=d.name, **{col: '%.2f' % t[a, d.id]
                                                for a, col in enumerate(TRANSPORT_COOLING_COLUMNS)})
                  for d in instance.delivery_modes], columns=REQUIRED_FILES['transport_costs.csv']) \
        .to_csv(os.path.join(data_dir, 'transport_costs.csv'), index=False)
    pd.DataFrame([{'delivery_mode': d.name, 'delta_per_period': d.capacity} for d in instance.delivery_modes],
                 columns=REQUIRED_FILES['capacities.csv']).to_csv(os.path.join(data_dir, 'capacities.csv'),
                                                                  index=False)
    pd.DataFrame([{'name': e.name, 'u_cooled': repr(float(e.handling_hours[0])),
                   'u_non_cooled': repr(float(e.handling_hours[1])),
                   'u_combination': repr(float(e.handling_hours[2])),
                   'theta': repr(e.max_hours), 'hourly_wage': '%.2f' % e.hourly_wage} for e in instance.employees],
                 columns=REQUIRED_FILES['employees.csv']).to_csv(os.path.join(data_dir, 'employees.csv'),
                                                                 index=False)
    pd.DataFrame([{'med_class': k, 'fee': '%.2f' % instance.costs.fees[i]}
                  for i, k in enumerate(MEDICATION_CLASS_LABELS)],
                 columns=REQUIRED_FILES['fees.csv']).to_csv(os.path.join(data_dir, 'fees.csv'), index=False)
    pd.DataFrame([{'periods': instance.periods, 'big_m1': instance.big_m1, 'big_m2': instance.big_m2,
                   'periods_per_year': instance.periods_per_year}],
                 columns=REQUIRED_FILES['meta.csv']).to_csv(os.path.join(data_dir, 'meta.csv'), index=False)
    logger.info("Saved %s to %s", instance, data_dir)


def load_bundled_instance() -> Instance:
    """
    Loads the base dataset shipped with the package and checks its published totals
    :return: the validated base Instance
    """
    instance = load_instance(BUNDLED_DATA_DIR)
    rho_total = int(instance.rho.sum())
    sigma_rho_total = int(np.dot(instance.rho, instance.sigma))
    if instance.num_patients != BUNDLED_PATIENT_TYPES or rho_total != BUNDLED_RHO_TOTAL or \
            sigma_rho_total != BUNDLED_SIGMA_RHO_TOTAL:
        _fail("bundled dataset totals changed: |P|={}, sum(rho)={}, sum(sigma*rho)={}".format(
            instance.num_patients, rho_total, sigma_rho_total), 'patients.csv')
    return instance
