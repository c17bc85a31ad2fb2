import enum
import logging
import re
from typing import Dict, List, Tuple

from .constants import VALID_VARIANTS

logger = logging.getLogger(__name__)

"""
Column kinds, structured variable references and the variable map linking them to column indices.
"""


class ModelVariant(enum.Enum):
    """Which formulation the builder emits"""
    BASE = 'base'
    RELAXED_ORDERS = 'relaxed_orders'
    HOURS_STAFFING = 'hours_staffing'

    @staticmethod
    def from_str(name: str) -> 'ModelVariant':
        if isinstance(name, ModelVariant):
            return name
        if name not in VALID_VARIANTS:
            msg = "variant must be one of {}, got {!r}".format(VALID_VARIANTS, name)
            logger.error(msg)
            raise ValueError(msg)
        return ModelVariant(name)


class ColumnKind(enum.Enum):
    """Domain of a column"""
    BINARY = 'binary'
    INTEGER = 'integer'
    CONTINUOUS = 'continuous'

    @property
    def is_integer(self) -> bool:
        return self is not ColumnKind.CONTINUOUS


class VarKind(enum.Enum):
    """
    Structured variable families.  The value is (name prefix, index labels).
    """
    X = ('X', ('a', 'd', 'p', 'w'))
    O = ('O', ('c', 'k', 'p', 'w'))
    M_SMALL = ('m', ('e', 'w'))
    M_BIG = ('M', ('e',))
    HOURS = ('H', ('e', 'w'))

    @property
    def prefix(self) -> str:
        return self.value[0]

    @property
    def index_labels(self) -> Tuple[str, ...]:
        return self.value[1]


_PREFIX_TO_KIND = {k.prefix: k for k in VarKind}
_NAME_RE = re.compile(r'^([A-Za-z]+)((?:_[a-z]\d+)+)$')


class VarRef:
    """
    A structured reference to one decision variable, e.g. X(a=0, d=3, p=12, w=2)
    """
    def __init__(self, kind: VarKind, *key: int):
        if len(key) != len(kind.index_labels):
            msg = "{} needs {} indices, got {}".format(kind.name, len(kind.index_labels), len(key))
            logger.error(msg)
            raise ValueError(msg)
        self.kind = kind
        self.key = tuple(int(k) for k in key)

    @property
    def name(self) -> str:
        return self.kind.prefix + ''.join('_%s%d' % (lbl, k) for lbl, k in zip(self.kind.index_labels, self.key))

    @staticmethod
    def from_name(name: str) -> 'VarRef':
        """
        Parses a column name such as X_a0_d3_p12_w2 back into a VarRef
        :param name: the column name
        :return: the VarRef, or raises ValueError if the name is not a structured name
        """
        match = _NAME_RE.match(name)
        kind = _PREFIX_TO_KIND.get(match.group(1)) if match else None
        if kind is None:
            raise ValueError("not a structured variable name: {!r}".format(name))
        parts = match.group(2).split('_')[1:]
        labels = tuple(part[0] for part in parts)
        if labels != kind.index_labels:
            raise ValueError("not a structured variable name: {!r}".format(name))
        return VarRef(kind, *[int(part[1:]) for part in parts])

    def __eq__(self, other):
        return isinstance(other, VarRef) and self.kind is other.kind and self.key == other.key

    def __hash__(self):
        return hash((self.kind, self.key))

    def __repr__(self):
        return "VarRef(%s)" % self.name


class VarMap:
    """
    Bijection between VarRefs and column indices.  Columns of one kind form a contiguous block.
    """
    def __init__(self):
        self._index = {}    # type: Dict[VarRef, int]
        self._refs = []     # type: List[VarRef]
        self._blocks = {}   # type: Dict[VarKind, Tuple[int, int]]

    def add(self, ref: VarRef) -> int:
        if ref in self._index:
            msg = "duplicate variable {}".format(ref.name)
            logger.error(msg)
            raise ValueError(msg)
        col = len(self._refs)
        start, _ = self._blocks.get(ref.kind, (col, col))
        if ref.kind in self._blocks and self._blocks[ref.kind][1] != col:
            msg = "columns of kind {} must be contiguous".format(ref.kind.name)
            logger.error(msg)
            raise ValueError(msg)
        self._blocks[ref.kind] = (start, col + 1)
        self._index[ref] = col
        self._refs.append(ref)
        return col

    def index(self, ref: VarRef) -> int:
        try:
            return self._index[ref]
        except KeyError:
            msg = "unknown variable {}".format(ref.name)
            logger.error(msg)
            raise KeyError(msg)

    def ref(self, col: int) -> VarRef:
        return self._refs[col]

    def block(self, kind: VarKind) -> Tuple[int, int]:
        """:return: the half-open column range [start, stop) of a kind; (0, 0) if absent"""
        return self._blocks.get(kind, (0, 0))

    def kinds(self) -> List[VarKind]:
        return [k for k in VarKind if k in self._blocks]

    def __contains__(self, ref):
        return ref in self._index

    def __len__(self):
        return len(self._refs)

    def __eq__(self, other):
        return isinstance(other, VarMap) and self._refs == other._refs

    @staticmethod
    def from_names(names: List[str]) -> 'VarMap':
        """
        Rebuilds a variable map from column names, as read back from a file
        :return: the VarMap, or None when some name is not structured or blocks are not contiguous
        """
        vmap = VarMap()
        try:
            for name in names:
                vmap.add(VarRef.from_name(name))
        except (ValueError, KeyError):
            return None
        return vmap
