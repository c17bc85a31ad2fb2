import logging
import re
from typing import Dict, List, Tuple

import numpy as np
import scipy.sparse as sp

from .constants import OBJECTIVE_ROW_NAME, RHS_SET_NAME, BOUND_SET_NAME, VALUE_BOUND_TYPES, FLAG_BOUND_TYPES, \
    FIXED_NAME_WIDTH, FIXED_NUMBER_WIDTH, FREE_FORM_DIGITS
from ..modelgen.constants import MAX_NAME_LENGTH
from ..modelgen.milp_model import MilpModel
from ..modelgen.variables import ColumnKind, VarMap

logger = logging.getLogger(__name__)

"""
Reads and writes MilpModels in MPS format.

The writer emits NAME, OBJSENSE (always MAX), ROWS, COLUMNS with INTORG/INTEND markers around integer
columns, RHS and BOUNDS.  Binary columns get BV bounds, every integer column gets an explicit upper bound.
The reader splits lines on whitespace, so it accepts the free-form and fixed-field layouts alike, as long as
names contain no blanks.  RANGES is not supported.
"""

_SECTIONS = ['NAME', 'OBJSENSE', 'ROWS', 'COLUMNS', 'RHS', 'BOUNDS', 'ENDATA']
_BLANKS = re.compile(r'\s+')


class MpsParseError(ValueError):
    """Raised for malformed MPS text; line is the 1-based line number of the offending line"""
    def __init__(self, msg: str, line: int):
        super().__init__("line {}: {}".format(line, msg))
        self.line = line


def _free_number(value: float) -> str:
    return '%.*g' % (FREE_FORM_DIGITS, value)


def _fixed_number(value: float) -> str:
    for digits in range(FIXED_NUMBER_WIDTH, 0, -1):
        text = '%.*g' % (digits, value)
        if len(text) <= FIXED_NUMBER_WIDTH:
            return text
    return text


def _sanitize_names(names: List[str], free_form: bool, generated: str) -> List[str]:
    """
    Makes names writable: blanks become '_' in free form; in fixed-field form names wider than a field are
    replaced by a generated name built from the position.  Raises ValueError when two names collide.
    """
    out = []
    for i, name in enumerate(names):
        new = _BLANKS.sub('_', name.strip()) if name.strip() else generated % i
        if not free_form and len(new) > FIXED_NAME_WIDTH:
            new = generated % i
        if new != name:
            logger.debug("renamed %r to %r", name, new)
        out.append(new)
    seen = set()
    for name in out:
        if name in seen:
            msg = "name {!r} occurs more than once after sanitization".format(name)
            logger.error(msg)
            raise ValueError(msg)
        if len(name) > MAX_NAME_LENGTH:
            msg = "name {}... exceeds {} characters".format(name[:20], MAX_NAME_LENGTH)
            logger.error(msg)
            raise ValueError(msg)
        seen.add(name)
    return out


class _LineWriter:
    def __init__(self, free_form: bool):
        self.free_form = free_form
        self.lines = []

    def header(self, text: str) -> None:
        self.lines.append(text)

    def comment(self, text: str) -> None:
        self.lines.append('* ' + text)

    def entry(self, code: str, name1: str, name2: str = '', value: float = None) -> None:
        if self.free_form:
            fields = [f for f in (name1, name2) if f]
            if value is not None:
                fields.append(_free_number(value))
            self.lines.append((' %s ' % code if code else '    ') + ' '.join(fields))
        else:
            line = ' ' + code.ljust(2) + ' ' + name1.ljust(FIXED_NAME_WIDTH) + '  ' + name2.ljust(FIXED_NAME_WIDTH)
            if value is not None:
                line += '  ' + _fixed_number(value).rjust(FIXED_NUMBER_WIDTH)
            self.lines.append(line.rstrip())

    def marker(self, name: str, kind: str) -> None:
        if self.free_form:
            self.lines.append("    %s 'MARKER' '%s'" % (name, kind))
        else:
            self.lines.append("    " + name.ljust(FIXED_NAME_WIDTH) + "  'MARKER'" + ' ' * 17 + "'%s'" % kind)

    def text(self) -> str:
        return '\n'.join(self.lines) + '\n'


def write_mps(model: MilpModel, free_form: bool = True) -> str:
    """
    Serializes a model to MPS text
    :param model: a valid MilpModel
    :param free_form: True for free-form MPS with full names and 17 significant digits; False for the
        fixed-field layout, where names wider than 8 characters are replaced by C0000012 / R0000034 style
        names and numbers are rounded to fit a 12 character field
    :return: the MPS document
    """
    if not isinstance(model, MilpModel):
        msg = "Expected a MilpModel, got {}".format(type(model))
        logger.error(msg)
        raise TypeError(msg)
    model.validate()
    col_names = _sanitize_names(model.col_names, free_form, 'C%07d')
    row_names = _sanitize_names(model.row_names, free_form, 'R%07d')
    obj_name = OBJECTIVE_ROW_NAME
    while obj_name in row_names:
        obj_name += '_'

    out = _LineWriter(free_form)
    out.header('NAME' + (' ' if free_form else ' ' * 10) + _BLANKS.sub('_', model.name))
    out.header('OBJSENSE')
    out.header('    MAX')
    out.header('ROWS')
    out.entry('N', obj_name)
    for sense, name in zip(model.senses, row_names):
        out.entry(str(sense), name)

    out.header('COLUMNS')
    csc = model.matrix.tocsc()
    csc.sort_indices()
    in_block = False
    num_markers = 0
    for j, name in enumerate(col_names):
        is_int = model.kinds[j].is_integer
        if is_int != in_block:
            out.marker('MARKER%d' % num_markers, 'INTORG' if is_int else 'INTEND')
            num_markers += 1
            in_block = is_int
        # the objective entry is always written so that empty columns survive a round trip
        out.entry('', name, obj_name, float(model.objective[j]))
        for ptr in range(csc.indptr[j], csc.indptr[j + 1]):
            out.entry('', name, row_names[csc.indices[ptr]], float(csc.data[ptr]))
    if in_block:
        out.marker('MARKER%d' % num_markers, 'INTEND')

    out.header('RHS')
    out.comment('objective sense: maximize')
    for i in np.flatnonzero(model.rhs != 0):
        out.entry('', RHS_SET_NAME, row_names[i], float(model.rhs[i]))

    out.header('BOUNDS')
    for j, name in enumerate(col_names):
        for code, value in _bound_entries(model.kinds[j], float(model.lower[j]), float(model.upper[j])):
            out.entry(code, BOUND_SET_NAME, name, value)
    out.header('ENDATA')
    logger.debug("wrote %s as MPS (%d lines)", model.name, len(out.lines))
    return out.text()


def _bound_entries(kind: ColumnKind, lower: float, upper: float) -> List[Tuple[str, float]]:
    if kind is ColumnKind.BINARY:
        entries = [('BV', None)]
        if lower != 0:
            entries.append(('LO', lower))
        if upper != 1:
            entries.append(('UP', upper))
        return entries
    if lower == upper:
        return [('FX', lower)]
    entries = []
    if lower == -np.inf:
        entries.append(('FR', None) if upper == np.inf else ('MI', None))
    elif lower != 0:
        entries.append(('LO', lower))
    if upper != np.inf:
        entries.append(('UP', upper))
    elif kind.is_integer and lower != -np.inf:
        # some readers give integer columns an upper bound of 1 by default
        entries.append(('PL', None))
    return entries


class _Reader:
    """Accumulates the sections of one MPS document"""
    def __init__(self):
        self.name = 'model'
        self.maximize = False
        self.obj_name = None
        self.row_index = {}       # type: Dict[str, int]
        self.row_names = []
        self.senses = []
        self.free_rows = set()
        self.col_index = {}       # type: Dict[str, int]
        self.col_names = []
        self.kinds = []
        self.objective = []
        self.entries = {}         # type: Dict[Tuple[int, int], float]
        self.rhs = {}             # type: Dict[int, float]
        self.bounds = {}          # type: Dict[int, List[float]]
        self.in_marker = False

    def row(self, tokens: List[str], lineno: int) -> None:
        if len(tokens) != 2:
            raise MpsParseError("expected a row type and a row name", lineno)
        sense, name = tokens[0].upper(), tokens[1]
        if sense == 'N':
            if self.obj_name is None:
                self.obj_name = name
            else:
                logger.warning("ignoring additional free row %s", name)
                self.free_rows.add(name)
            return
        if sense not in ('L', 'G', 'E'):
            raise MpsParseError("unknown row type {!r}".format(tokens[0]), lineno)
        if name in self.row_index or name == self.obj_name:
            raise MpsParseError("duplicate row {!r}".format(name), lineno)
        self.row_index[name] = len(self.row_names)
        self.row_names.append(name)
        self.senses.append(sense)

    def column(self, tokens: List[str], lineno: int) -> None:
        if len(tokens) >= 3 and tokens[1] == "'MARKER'":
            if tokens[2] == "'INTORG'":
                self.in_marker = True
            elif tokens[2] == "'INTEND'":
                self.in_marker = False
            else:
                raise MpsParseError("unknown marker {}".format(tokens[2]), lineno)
            return
        if len(tokens) not in (3, 5):
            raise MpsParseError("expected a column name and one or two (row, value) pairs", lineno)
        name = tokens[0]
        if name in self.col_index:
            j = self.col_index[name]
            if j != len(self.col_names) - 1:
                raise MpsParseError("entries of column {!r} are not contiguous".format(name), lineno)
        else:
            j = len(self.col_names)
            self.col_index[name] = j
            self.col_names.append(name)
            self.kinds.append(ColumnKind.INTEGER if self.in_marker else ColumnKind.CONTINUOUS)
            self.objective.append(0.0)
        for k in range(1, len(tokens), 2):
            row, value = tokens[k], _parse_number(tokens[k + 1], lineno)
            if row == self.obj_name:
                self.objective[j] = value
            elif row in self.free_rows:
                continue
            elif row in self.row_index:
                key = (self.row_index[row], j)
                if key in self.entries:
                    raise MpsParseError("duplicate entry for column {!r} in row {!r}".format(name, row), lineno)
                self.entries[key] = value
            else:
                raise MpsParseError("unknown row {!r}".format(row), lineno)

    def right_hand_side(self, tokens: List[str], lineno: int) -> None:
        pairs = tokens[1:] if len(tokens) % 2 == 1 else tokens
        if not pairs:
            raise MpsParseError("expected (row, value) pairs", lineno)
        for k in range(0, len(pairs), 2):
            row, value = pairs[k], _parse_number(pairs[k + 1], lineno)
            if row == self.obj_name:
                logger.warning("ignoring objective constant %s", value)
            elif row in self.free_rows:
                continue
            elif row in self.row_index:
                self.rhs[self.row_index[row]] = value
            else:
                raise MpsParseError("unknown row {!r}".format(row), lineno)

    def bound(self, tokens: List[str], lineno: int) -> None:
        code, rest = tokens[0].upper(), tokens[1:]
        if code in VALUE_BOUND_TYPES:
            if len(rest) not in (2, 3):
                raise MpsParseError("bound {} needs a column and a value".format(code), lineno)
            name, value = rest[-2], _parse_number(rest[-1], lineno)
        elif code in FLAG_BOUND_TYPES:
            if len(rest) not in (1, 2):
                raise MpsParseError("bound {} needs a column".format(code), lineno)
            name, value = rest[-1], None
        elif code == 'BV':
            if len(rest) == 3 or (len(rest) == 2 and rest[0] in self.col_index and rest[1] not in self.col_index):
                name = rest[-2]
            elif len(rest) in (1, 2):
                name = rest[-1]
            else:
                raise MpsParseError("bound BV needs a column", lineno)
            value = None
        else:
            raise MpsParseError("unknown bound type {!r}".format(tokens[0]), lineno)
        if name not in self.col_index:
            raise MpsParseError("unknown column {!r}".format(name), lineno)
        j = self.col_index[name]
        lo_up = self.bounds.setdefault(j, [0.0, np.inf])
        if code == 'UP':
            if value < 0 and lo_up[0] == 0:
                logger.warning("negative upper bound on %s makes its lower bound -inf", name)
                lo_up[0] = -np.inf
            lo_up[1] = value
        elif code == 'LO':
            lo_up[0] = value
        elif code == 'FX':
            lo_up[0] = lo_up[1] = value
        elif code in ('LI', 'UI'):
            self.kinds[j] = ColumnKind.INTEGER
            lo_up[0 if code == 'LI' else 1] = value
        elif code == 'FR':
            lo_up[0], lo_up[1] = -np.inf, np.inf
        elif code == 'MI':
            lo_up[0] = -np.inf
        elif code == 'PL':
            lo_up[1] = np.inf
        elif code == 'BV':
            self.kinds[j] = ColumnKind.BINARY
            lo_up[0], lo_up[1] = 0.0, 1.0

    def model(self) -> MilpModel:
        m, n = len(self.row_names), len(self.col_names)
        keys = sorted(self.entries)
        rows = [i for i, _ in keys]
        cols = [j for _, j in keys]
        vals = [self.entries[k] for k in keys]
        matrix = sp.coo_matrix((vals, (rows, cols)), shape=(m, n)).tocsr()
        rhs = np.zeros(m)
        for i, value in self.rhs.items():
            rhs[i] = value
        lower, upper = np.zeros(n), np.full(n, np.inf)
        for j, (lo, up) in self.bounds.items():
            lower[j], upper[j] = lo, up
        objective = np.array(self.objective, dtype=float)
        if not self.maximize:
            objective = -objective
        return MilpModel(matrix, self.senses, rhs, objective, lower, upper, self.kinds, self.col_names,
                         self.row_names, name=self.name, var_map=VarMap.from_names(self.col_names))


def _parse_number(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MpsParseError("expected a number, got {!r}".format(token), lineno)
    if not np.isfinite(value) and abs(value) != np.inf:
        raise MpsParseError("expected a number, got {!r}".format(token), lineno)
    return value


def read_mps(text: str) -> MilpModel:
    """
    Parses MPS text into a maximization MilpModel; a minimization objective is negated
    :param text: the MPS document
    :return: the MilpModel; its variable map is restored when every column has a structured name
    """
    reader = _Reader()
    section = None
    handlers = dict(ROWS=reader.row, COLUMNS=reader.column, RHS=reader.right_hand_side, BOUNDS=reader.bound)
    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip() or raw.lstrip().startswith('*'):
            continue
        tokens = raw.split()
        if not raw[0].isspace():
            keyword = tokens[0].upper()
            if keyword == 'ENDATA':
                if reader.obj_name is None:
                    raise MpsParseError("missing objective row", lineno)
                model = reader.model()
                logger.debug("read MPS model %s", model)
                return model
            if keyword not in _SECTIONS:
                raise MpsParseError("unsupported section {!r}".format(tokens[0]), lineno)
            section = keyword
            if keyword == 'NAME':
                reader.name = tokens[1] if len(tokens) > 1 else reader.name
            elif keyword == 'OBJSENSE' and len(tokens) > 1:
                reader.maximize = _objective_sense(tokens[1], lineno)
            continue
        if section == 'OBJSENSE':
            reader.maximize = _objective_sense(tokens[0], lineno)
        elif section in handlers:
            handlers[section](tokens, lineno)
        else:
            raise MpsParseError("data line outside of a section", lineno)
    raise MpsParseError("missing ENDATA", len(lines) + 1)


def _objective_sense(token: str, lineno: int) -> bool:
    token = token.upper()
    if token in ('MAX', 'MAXIMIZE'):
        return True
    if token in ('MIN', 'MINIMIZE'):
        return False
    raise MpsParseError("unknown objective sense {!r}".format(token), lineno)


def save_mps(model: MilpModel, fname: str, free_form: bool = True) -> None:
    with open(fname, 'w') as fp:
        fp.write(write_mps(model, free_form))
    logger.info("Wrote %s to %s" % (model, fname))


def load_mps(fname: str) -> MilpModel:
    with open(fname, 'r') as fp:
        return read_mps(fp.read())
