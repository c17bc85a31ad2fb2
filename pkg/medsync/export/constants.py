""" Output formats understood by write_solution """
VALID_SOLUTION_FORMATS = ['json', 'csv']

""" Name of the objective row written to MPS files, suffixed with '_' until it is unique """
OBJECTIVE_ROW_NAME = 'OBJ'

""" Set names used in the RHS and BOUNDS sections """
RHS_SET_NAME = 'RHS'
BOUND_SET_NAME = 'BND'

""" Bound types understood by the MPS reader """
VALUE_BOUND_TYPES = ['UP', 'LO', 'FX', 'LI', 'UI']
FLAG_BOUND_TYPES = ['FR', 'MI', 'PL']

""" Width of a name field in fixed-field MPS """
FIXED_NAME_WIDTH = 8

""" Width of a number field in fixed-field MPS """
FIXED_NUMBER_WIDTH = 12

""" Significant digits of numbers in free-form MPS; enough to reproduce every float exactly """
FREE_FORM_DIGITS = 17
