import os

""" Short labels of the two medication cooling classes, in model index order """
COOLING_CLASS_LABELS = ['c0', 'c1']

""" Short labels of the three transport cooling classes, in model index order """
TRANSPORT_COOLING_LABELS = ['a0', 'a1', 'a2']

""" Short labels of the two medication (fee) classes, in model index order """
MEDICATION_CLASS_LABELS = ['k0', 'k1']

""" Column names of the transport cooling classes as they appear in the CSV files """
TRANSPORT_COOLING_COLUMNS = ['cooled', 'non_cooled', 'combination']

""" Synchronization levels understood by the scenario transforms """
VALID_SYNC_LEVELS = ['base77', 'realistic87', 'ideal100']

""" Patient filters understood by the scenario transforms """
VALID_PATIENT_FILTERS = ['all', 'only_k0']

""" Planning horizons (in months) understood by the scenario transforms; maps to the number of periods """
VALID_HORIZON_MONTHS = [4, 6]
HORIZON_MONTHS_TO_PERIODS = {4: 4, 6: 6}

""" Files that make up an instance directory, and the header each must carry """
REQUIRED_FILES = {
    'patients.csv': ['p', 'q_c0k0', 'q_c0k1', 'q_c1k0', 'q_c1k1', 'rho', 'sigma'],
    'transport_costs.csv': ['delivery_mode', 'cooled', 'non_cooled', 'combination'],
    'capacities.csv': ['delivery_mode', 'delta_per_period'],
    'employees.csv': ['name', 'u_cooled', 'u_non_cooled', 'u_combination', 'theta', 'hourly_wage'],
    'fees.csv': ['med_class', 'fee'],
    'meta.csv': ['periods', 'big_m1', 'big_m2', 'periods_per_year'],
}

""" Environment variable naming the default instance directory """
DATA_DIR_ENV_VAR = 'MEDSYNC_DATA_DIR'

RESOURCES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'resources')
BUNDLED_DATA_DIR = os.path.join(RESOURCES_DIR, 'base')
BUNDLED_SCENARIOS_FILE = os.path.join(RESOURCES_DIR, 'case_study_scenarios.json')

""" Monetary values are validated to this many decimal places on ingest """
MONEY_DECIMALS = 2

""" Absolute tolerance used for all monetary comparisons """
MONEY_TOL = 1e-6

""" Expected totals of the bundled dataset, checked at ingest """
BUNDLED_PATIENT_TYPES = 225
BUNDLED_RHO_TOTAL = 6950
BUNDLED_SIGMA_RHO_TOTAL = 7580
