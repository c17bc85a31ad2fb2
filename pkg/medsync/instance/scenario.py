import json
import logging
from typing import List, Optional, Sequence

from .constants import VALID_SYNC_LEVELS, VALID_PATIENT_FILTERS, VALID_HORIZON_MONTHS, HORIZON_MONTHS_TO_PERIODS, \
    BUNDLED_SCENARIOS_FILE
from .instance import Instance
from .scenario_transforms import PatientScaling, SyncLevelAdjustment, OnlyK0Filter, HorizonChange, \
    PatientDisaggregation
from .utils import process_transform_list

logger = logging.getLogger(__name__)

"""
Defines scenario specifications and applies them to instances.
"""


class ScenarioSpecError(ValueError):
    """Raised for malformed scenario documents"""
    pass


class ScenarioSpec:
    """
    One what-if scenario: an optional patient total, a synchronization level, a patient filter and a horizon
    """
    def __init__(self, label: str = 'base', target_patients: Optional[int] = None, sync_level: str = 'base77',
                 patient_filter: str = 'all', horizon_months: Optional[int] = None, disaggregate: bool = False):
        """
        :param label: name of the scenario, unique within a sweep
        :param target_patients: if not None, patient counts are rescaled to sum to this value
        :param sync_level: one of medsync.instance.constants.VALID_SYNC_LEVELS
        :param patient_filter: one of medsync.instance.constants.VALID_PATIENT_FILTERS
        :param horizon_months: None keeps the horizon of the instance, otherwise one of
            medsync.instance.constants.VALID_HORIZON_MONTHS
        :param disaggregate: if True, every patient type is split into individual patients
        """
        self.label = label
        self.target_patients = target_patients
        self.sync_level = sync_level
        self.patient_filter = patient_filter
        self.horizon_months = horizon_months
        self.disaggregate = disaggregate

        self.validate()

    def validate(self) -> None:
        if not isinstance(self.label, str) or not self.label:
            msg = "scenario label must be a non-empty string"
            logger.error(msg)
            raise ScenarioSpecError(msg)
        if self.target_patients is not None and \
                (isinstance(self.target_patients, bool) or not isinstance(self.target_patients, int) or
                 self.target_patients < 1):
            msg = "target_patients must be None or a positive integer, got {!r}".format(self.target_patients)
            logger.error(msg)
            raise ScenarioSpecError(msg)
        if self.sync_level not in VALID_SYNC_LEVELS:
            msg = "sync_level must be one of {}, got {!r}".format(VALID_SYNC_LEVELS, self.sync_level)
            logger.error(msg)
            raise ScenarioSpecError(msg)
        if self.patient_filter not in VALID_PATIENT_FILTERS:
            msg = "patient_filter must be one of {}, got {!r}".format(VALID_PATIENT_FILTERS, self.patient_filter)
            logger.error(msg)
            raise ScenarioSpecError(msg)
        if self.horizon_months is not None and self.horizon_months not in VALID_HORIZON_MONTHS:
            msg = "horizon_months must be None or one of {}, got {!r}".format(VALID_HORIZON_MONTHS,
                                                                               self.horizon_months)
            logger.error(msg)
            raise ScenarioSpecError(msg)
        if not isinstance(self.disaggregate, bool):
            msg = "disaggregate must be a bool"
            logger.error(msg)
            raise ScenarioSpecError(msg)

    def transforms(self) -> list:
        """
        :return: the InstanceTransform objects realizing this scenario, in application order
        """
        xforms = []
        if self.target_patients is not None:
            xforms.append(PatientScaling(self.target_patients))
        if self.sync_level != 'base77':
            xforms.append(SyncLevelAdjustment(self.sync_level))
        if self.patient_filter == 'only_k0':
            xforms.append(OnlyK0Filter())
        if self.horizon_months is not None:
            xforms.append(HorizonChange(HORIZON_MONTHS_TO_PERIODS[self.horizon_months]))
        if self.disaggregate:
            xforms.append(PatientDisaggregation())
        return xforms

    def get_cfg_as_dict(self) -> dict:
        return dict(label=self.label, target_patients=self.target_patients, sync_level=self.sync_level,
                    patient_filter=self.patient_filter, horizon_months=self.horizon_months,
                    disaggregate=self.disaggregate)

    @staticmethod
    def from_dict(d: dict) -> 'ScenarioSpec':
        if not isinstance(d, dict):
            msg = "scenario entries must be JSON objects, got {}".format(type(d).__name__)
            logger.error(msg)
            raise ScenarioSpecError(msg)
        known = {'label', 'target_patients', 'sync_level', 'patient_filter', 'horizon_months', 'disaggregate'}
        unknown = set(d) - known
        if unknown:
            msg = "unknown scenario fields: {}".format(sorted(unknown))
            logger.error(msg)
            raise ScenarioSpecError(msg)
        return ScenarioSpec(**d)

    def __deepcopy__(self, memodict={}):
        return ScenarioSpec(**self.get_cfg_as_dict())

    def __eq__(self, other):
        return isinstance(other, ScenarioSpec) and self.get_cfg_as_dict() == other.get_cfg_as_dict()

    def __str__(self):
        return "Scenario[%s: patients=%s, sync=%s, filter=%s, months=%s%s]" % (
            self.label, 'as-is' if self.target_patients is None else self.target_patients, self.sync_level,
            self.patient_filter, 'as-is' if self.horizon_months is None else self.horizon_months,
            ', disaggregated' if self.disaggregate else '')


def apply_scenario(instance: Instance, spec: ScenarioSpec) -> Instance:
    """
    Applies a scenario to an instance
    :param instance: a valid Instance
    :param spec: the ScenarioSpec to realize
    :return: a new Instance; the input is left untouched
    """
    if not isinstance(spec, ScenarioSpec):
        msg = "Expected a ScenarioSpec, got type {}".format(type(spec))
        logger.error(msg)
        raise TypeError(msg)
    return process_transform_list(instance, spec.transforms())


def check_unique_labels(specs: Sequence[ScenarioSpec]) -> None:
    seen = set()
    for spec in specs:
        if spec.label in seen:
            msg = "duplicate scenario label {!r}".format(spec.label)
            logger.error(msg)
            raise ScenarioSpecError(msg)
        seen.add(spec.label)


def load_scenario_specs(path: str) -> List[ScenarioSpec]:
    """
    Reads scenario specifications from a JSON document, either a list of objects or {"scenarios": [...]}
    :param path: path to the JSON file
    :return: list of ScenarioSpec in document order
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        msg = "cannot read scenario file {}: {}".format(path, e)
        logger.error(msg)
        raise ScenarioSpecError(msg)
    entries = doc.get('scenarios') if isinstance(doc, dict) else doc
    if not isinstance(entries, list) or not entries:
        msg = "scenario file {} must contain a non-empty list of scenarios".format(path)
        logger.error(msg)
        raise ScenarioSpecError(msg)
    specs = [ScenarioSpec.from_dict(e) for e in entries]
    check_unique_labels(specs)
    return specs


def save_scenario_specs(specs: Sequence[ScenarioSpec], path: str) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump({'scenarios': [s.get_cfg_as_dict() for s in specs]}, f, indent=2)


def case_study_specs() -> List[ScenarioSpec]:
    """
    :return: the 24 case-study scenarios bundled with the package, scenario 0 being the base case
    """
    return load_scenario_specs(BUNDLED_SCENARIOS_FILE)


def base_spec() -> ScenarioSpec:
    """
    :return: scenario 0 of the case study, the four-month base case
    """
    return ScenarioSpec(label='scenario_0', horizon_months=4)
