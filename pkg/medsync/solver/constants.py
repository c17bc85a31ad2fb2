""" Statuses of an LP solve """
LP_OPTIMAL = 'optimal'
LP_INFEASIBLE = 'infeasible'
LP_UNBOUNDED = 'unbounded'
LP_ITERATION_LIMIT = 'iteration_limit'
LP_NUMERICAL_FAILURE = 'numerical_failure'
VALID_LP_STATUSES = [LP_OPTIMAL, LP_INFEASIBLE, LP_UNBOUNDED, LP_ITERATION_LIMIT, LP_NUMERICAL_FAILURE]

""" Statuses of a branch-and-bound solve """
MILP_OPTIMAL = 'optimal'
MILP_FEASIBLE_GAP_LIMIT = 'feasible_gap_limit'
MILP_INFEASIBLE = 'infeasible'
MILP_LIMIT = 'limit'
MILP_UNBOUNDED = 'unbounded'
VALID_MILP_STATUSES = [MILP_OPTIMAL, MILP_FEASIBLE_GAP_LIMIT, MILP_INFEASIBLE, MILP_LIMIT, MILP_UNBOUNDED]

""" Branching rules understood by the branch-and-bound solver """
VALID_BRANCHING_RULES = ['most_fractional', 'structured_priority']

""" Node selection strategies understood by the branch-and-bound solver """
VALID_NODE_SELECTIONS = ['best_bound', 'depth_first_dive']

""" Status codes of simplex variables """
BASIC = 0
AT_LOWER = 1
AT_UPPER = 2
FREE_ZERO = 3

""" Node log actions """
NODE_ACTIONS = ['branched', 'integral', 'pruned_bound', 'pruned_infeasible', 'lp_limit', 'unbounded']

""" Columns of the node log CSV """
NODE_LOG_FIELDS = ['node_id', 'parent_id', 'depth', 'bound', 'incumbent', 'action']

""" Largest tolerance accepted by the solver configuration """
MAX_TOLERANCE = 1e-2
