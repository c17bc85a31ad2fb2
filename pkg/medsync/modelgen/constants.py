""" Model variants that the builder can produce """
VALID_VARIANTS = ['base', 'relaxed_orders', 'hours_staffing']

""" Row senses of a MilpModel: less-or-equal, greater-or-equal, equal """
VALID_SENSES = ['L', 'G', 'E']

""" Values of integer and binary columns may deviate this much from the nearest integer """
INTEGRALITY_TOL = 1e-6

""" Bound and row tolerance used when checking a candidate solution """
FEASIBILITY_TOL = 1e-6

""" Maximum length of row and column names, shared with the MPS writer """
MAX_NAME_LENGTH = 255
