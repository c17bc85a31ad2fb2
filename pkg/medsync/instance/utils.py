import logging
from typing import Iterable

from .instance import Instance
from .transform_interface import InstanceTransform

logger = logging.getLogger(__name__)

"""
Contains general utilities helpful for instance generation
"""


def process_transform_list(instance: Instance, transforms: Iterable[InstanceTransform]) -> Instance:
    """
    Processes a list of transformations in a serial fashion
    :param instance: input Instance which should be transformed by the list of transformations
    :param transforms: a list of InstanceTransform objects
    :return: The transformed Instance
    """
    for xform in transforms:
        logger.info("Applying:%s to instance: %s" % (str(xform), str(instance)))
        instance = xform.do(instance)
    return instance
