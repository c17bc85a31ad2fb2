""" Row labels of the KPI summary table """
LFO_ELEMENT_LABELS = ['Transportation cost', 'Handling cost', 'Prescription line fee', 'Total LFO']

""" Pharmacy's realized annual LFO before synchronized ordering, used as the default reference """
REFERENCE_ANNUAL_LFO = -197208.23

""" Highest number of employees per type for which the hours report lists a threshold """
MAX_EMPLOYEE_THRESHOLDS = 4

""" Status recorded for a scenario whose pipeline raised an exception """
SWEEP_ERROR_STATUS = 'error'

""" Columns of the per-scenario sweep CSV """
SWEEP_CSV_FIELDS = ['label', 'status', 'total_annual_lfo', 'lfo_per_order', 'annual_orders',
                    'annual_transport_cost', 'annual_handling_cost', 'annual_prescription_fee',
                    'total_lfo_delta_pct', 'lfo_per_order_delta_pct', 'objective', 'bound', 'gap', 'nodes',
                    'wall_time', 'rows', 'columns', 'nonzeros', 'message']

""" File names written by SweepResult.save and write_plot_data """
SWEEP_JSON_FNAME = 'sweep.json'
SWEEP_CSV_FNAME = 'sweep.csv'
PLOT_DATA_FNAMES = dict(lfo_elements='lfo_elements.csv', lfo_per_order_elements='lfo_per_order_elements.csv',
                        percent_deltas='percent_deltas.csv', delivery_modes='delivery_modes.csv',
                        transport_cooling='transport_cooling.csv', employees='employees.csv')
