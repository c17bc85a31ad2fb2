import logging

import numpy as np

from .constants import VALID_SYNC_LEVELS
from .entities import MedicationClass
from .instance import Instance
from .transform_interface import InstanceTransform

logger = logging.getLogger(__name__)

"""
Instance transforms behind the what-if scenarios: patient scaling, synchronization level, patient filtering,
horizon length, and patient disaggregation.
"""


def largest_remainder_scaling(weights: np.ndarray, target: int) -> np.ndarray:
    """
    Scales non-negative integer weights proportionally so they sum to target exactly.  Every entry receives the
    floor of its exact share; the leftover units go to the largest fractional remainders, ties to the lowest index.
    :param weights: non-negative integer weights with a positive sum
    :param target: the required total
    :return: integer array summing to target
    """
    weights = np.asarray(weights, dtype=np.int64)
    total = int(weights.sum())
    if total <= 0:
        msg = "cannot scale weights with a non-positive total"
        logger.error(msg)
        raise ValueError(msg)
    exact = weights.astype(float) * target / total
    scaled = np.floor(exact).astype(np.int64)
    leftover = int(target - scaled.sum())
    if leftover > 0:
        remainders = exact - scaled
        # stable sort on the negated remainder keeps lower indices first among ties
        order = np.argsort(-remainders, kind='stable')
        scaled[order[:leftover]] += 1
    return scaled


class PatientScaling(InstanceTransform):
    """
    Rescales the patient counts so that their sum equals a target
    """
    def __init__(self, target: int):
        """
        :param target: required sum of patient counts after scaling
        """
        if not isinstance(target, (int, np.integer)) or target < 1:
            msg = "target patient total must be a positive integer, got {}".format(target)
            logger.error(msg)
            raise ValueError(msg)
        self.target = int(target)

    def do(self, instance: Instance) -> Instance:
        rho = instance.rho
        surviving = int(np.count_nonzero(rho))
        if self.target < surviving:
            msg = "target patient total {} is smaller than the {} surviving patient types".format(
                self.target, surviving)
            logger.error(msg)
            raise ValueError(msg)
        scaled = largest_remainder_scaling(rho, self.target)
        return instance.replace(patients=[p.replace(rho=int(r)) for p, r in zip(instance.patients, scaled)])

    def __str__(self):
        return "PatientScaling[%d]" % self.target


class SyncLevelAdjustment(InstanceTransform):
    """
    Changes the minimum number of orders of every patient type to reflect a synchronization level
    """
    def __init__(self, level: str):
        """
        :param level: one of medsync.instance.constants.VALID_SYNC_LEVELS
        """
        if level not in VALID_SYNC_LEVELS:
            msg = "sync level must be one of {}, got {!r}".format(VALID_SYNC_LEVELS, level)
            logger.error(msg)
            raise ValueError(msg)
        self.level = level

    def do(self, instance: Instance) -> Instance:
        if self.level == 'base77':
            return instance
        if self.level == 'ideal100':
            patients = [p.replace(sigma=1) for p in instance.patients]
        else:
            patients = [p.replace(sigma=max(1, p.sigma - 1)) for p in instance.patients]
        return instance.replace(patients=patients)

    def __str__(self):
        return "SyncLevelAdjustment[%s]" % self.level


class OnlyK0Filter(InstanceTransform):
    """
    Removes patients without any fee-free (k0) medication by setting their count to zero
    """
    def do(self, instance: Instance) -> Instance:
        patients = []
        for p in instance.patients:
            if p.needs[:, MedicationClass.NO_FEE].sum() == 0:
                patients.append(p.replace(rho=0))
            else:
                patients.append(p)
        return instance.replace(patients=patients)

    def __str__(self):
        return "OnlyK0Filter"


class HorizonChange(InstanceTransform):
    """
    Changes the number of periods in the horizon; per-period parameters stay as they are
    """
    def __init__(self, periods: int):
        if not isinstance(periods, (int, np.integer)) or periods < 1:
            msg = "periods must be a positive integer, got {}".format(periods)
            logger.error(msg)
            raise ValueError(msg)
        self.periods = int(periods)

    def do(self, instance: Instance) -> Instance:
        if instance.periods == self.periods:
            return instance
        return instance.replace(periods=self.periods)

    def __str__(self):
        return "HorizonChange[%d]" % self.periods


class PatientDisaggregation(InstanceTransform):
    """
    Replaces each patient type by rho individual patients (rho = 1 each), so that every patient decides on
    its own orders.  Types with a zero count are dropped.
    """
    def do(self, instance: Instance) -> Instance:
        patients = []
        for p in instance.patients:
            for _ in range(p.rho):
                patients.append(p.replace(patient_id=len(patients), rho=1))
        logger.info("Disaggregated %d patient types into %d patients", instance.num_patients, len(patients))
        return instance.replace(patients=patients)

    def __str__(self):
        return "PatientDisaggregation"
