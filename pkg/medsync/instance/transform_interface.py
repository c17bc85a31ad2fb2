from abc import ABC, abstractmethod

from .instance import Instance

"""
Defines a generic InstanceTransform object.
"""


class InstanceTransform(ABC):
    """
    An InstanceTransform is defined as an operation mapping an Instance to a new Instance.
    """
    @abstractmethod
    def do(self, instance: Instance) -> Instance:
        """
        Perform the specified transformation
        :param instance: the input Instance to be transformed; it is never modified
        :return: the transformed Instance
        """
        pass
