import argparse
import json
import logging
import logging.config
import os
import sys
from typing import List, Optional, Tuple

from numpy.random import RandomState

from . import __version__
from .analysis import plot_data
from .analysis.constants import REFERENCE_ANNUAL_LFO, MAX_EMPLOYEE_THRESHOLDS, SWEEP_ERROR_STATUS
from .analysis.kpi import compute_kpis, employee_hours_report
from .analysis.sweep import run_sweep, solve_instance
from .export.mps import save_mps
from .export.solution_writer import save_solution
from .instance.constants import DATA_DIR_ENV_VAR, BUNDLED_DATA_DIR, BUNDLED_SCENARIOS_FILE, VALID_HORIZON_MONTHS
from .instance.instance import Instance
from .instance.io import InstanceDataError, load_instance
from .instance.random_instances import random_small_instance
from .instance.scenario import ScenarioSpec, ScenarioSpecError, apply_scenario, load_scenario_specs
from .instance.validation import validate
from .modelgen.builder import build
from .modelgen.constants import VALID_VARIANTS
from .modelgen.milp_model import ModelError
from .solver.config import BnbConfig
from .solver.constants import MILP_INFEASIBLE, MILP_UNBOUNDED, VALID_BRANCHING_RULES, VALID_NODE_SELECTIONS
from .solver.statistics import BnbResult

logger = logging.getLogger(__name__)

"""
Command line front end: validate instance data, solve one scenario, run a scenario sweep, export the model as MPS,
and write the staffing report.
"""

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_SOLVER_LIMIT = 2
EXIT_INTERNAL_ERROR = 3

ERROR_PREFIX = 'medsync:error'
LOG_FNAME = 'medsync.log'
DEFAULT_OUTPUT_DIR = 'medsync_output'

# --sync percentage -> synchronization level
SYNC_LEVELS = {77: 'base77', 87: 'realistic87', 100: 'ideal100'}


class CliError(Exception):
    """
    An error with a known category and exit code
    """
    def __init__(self, category: str, message: str, exit_code: int = EXIT_DATA_ERROR):
        super().__init__(message)
        self.category = category
        self.exit_code = exit_code


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError('usage', message)


def setup_logging(verbosity: int = 0, output_dir: Optional[str] = None) -> None:
    """
    Configures the medsync loggers: a console handler whose level follows the verbosity and, when an output
    directory is given, a rotating log file inside it
    :param verbosity: 0 for warnings, 1 for info, 2 or more for debug messages on the console
    :param output_dir: directory for medsync.log, created if needed; None logs to the console only
    """
    console_level = 'WARNING' if verbosity <= 0 else ('INFO' if verbosity == 1 else 'DEBUG')
    handlers = {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'basic',
            'level': console_level,
            'stream': 'ext://sys.stderr',
        }
    }
    if output_dir is not None:
        os.makedirs(output_dir, exist_ok=True)
        handlers['file'] = {
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': os.path.join(output_dir, LOG_FNAME),
            'maxBytes': 1 * 1024 * 1024,
            'backupCount': 5,
            'formatter': 'detailed',
            'level': 'DEBUG' if verbosity >= 2 else 'INFO',
        }
    logging.config.dictConfig({
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'basic': {
                'format': '%(message)s',
            },
            'detailed': {
                'format': '[%(asctime)s] %(levelname)s in %(module)s: %(message)s',
            },
        },
        'handlers': handlers,
        'loggers': {
            'medsync': {
                'handlers': list(handlers),
                'level': 'DEBUG',
                'propagate': False,
            },
        },
    })


def default_data_dir() -> str:
    return os.environ.get(DATA_DIR_ENV_VAR) or BUNDLED_DATA_DIR


def scenario_from_args(args: argparse.Namespace) -> ScenarioSpec:
    """
    Composes the scenario shorthand flags into a ScenarioSpec
    """
    return ScenarioSpec(label=args.label, target_patients=args.patients, sync_level=SYNC_LEVELS[args.sync],
                        patient_filter='only_k0' if args.only_k0 else 'all', horizon_months=args.months,
                        disaggregate=args.disaggregate)


def config_from_args(args: argparse.Namespace) -> BnbConfig:
    try:
        return BnbConfig(gap_target=args.gap, node_limit=args.node_limit, time_limit=args.time_limit,
                         branching_rule=args.branching, node_selection=args.node_selection,
                         presolve=not args.no_presolve, node_log_path=args.node_log)
    except (ValueError, TypeError) as e:
        raise CliError('usage', "invalid solver option: {}".format(e))


def prepare_instance(args: argparse.Namespace) -> Tuple[Instance, bool]:
    """
    Loads the data directory and applies the scenario flags, or generates a random test instance
    :return: the instance and whether it has to pass validation before it is built
    """
    spec = scenario_from_args(args)
    if args.random_instance:
        if spec != ScenarioSpec(label=spec.label):
            raise CliError('usage', "scenario flags cannot be combined with --random-instance")
        instance = random_small_instance(RandomState(args.seed))
        logger.info("Generated %s from seed %d", instance, args.seed)
        return instance, False
    base = load_instance(args.data)
    try:
        return apply_scenario(base, spec), True
    except ValueError as e:
        raise CliError('scenario', "{}: {}".format(spec.label, e))


def check_outcome(result: BnbResult) -> None:
    """
    Maps a solve without a usable incumbent to its error category and exit code
    """
    if result.has_incumbent:
        return
    if result.status == MILP_INFEASIBLE:
        raise CliError('infeasible', "the model is infeasible; the instance cannot be served")
    if result.status == MILP_UNBOUNDED:
        raise CliError('internal', "the model relaxation is unbounded", EXIT_INTERNAL_ERROR)
    raise CliError('limit', "solver stopped with status {} before finding a plan: {}".format(
        result.status, result.message), EXIT_SOLVER_LIMIT)


def _report_violations(label: str, instance: Instance) -> int:
    violations = validate(instance)
    for v in violations:
        print("%s: %s" % (label, v))
    if not violations:
        print("%s: valid, %s" % (label, instance))
    return len(violations)


def cmd_validate(args: argparse.Namespace) -> int:
    if args.random_instance:
        problems = _report_violations('random(seed=%d)' % args.seed, random_small_instance(RandomState(args.seed)))
    else:
        try:
            base = load_instance(args.data)
        except InstanceDataError as e:
            for problem in e.problems:
                print(problem)
            raise
        specs = load_scenario_specs(args.scenarios) if args.scenarios else [scenario_from_args(args)]
        problems, failed = 0, []
        for spec in specs:
            try:
                instance = apply_scenario(base, spec)
            except ValueError as e:
                print("%s: %s" % (spec.label, e))
                failed.append("{}: {}".format(spec.label, e))
                continue
            problems += _report_violations(spec.label, instance)
        if failed:
            raise CliError('scenario', '; '.join(failed))
    if problems:
        raise CliError('data', "{} violation(s) found".format(problems))
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    instance, check = prepare_instance(args)
    _, result, solution = solve_instance(instance, args.variant, config_from_args(args), check)
    check_outcome(result)
    report = compute_kpis(instance, solution)

    os.makedirs(args.output_dir, exist_ok=True)
    save_solution(solution, os.path.join(args.output_dir, 'solution.json'), 'json', not args.no_timestamp)
    save_solution(solution, os.path.join(args.output_dir, 'solution.csv'), 'csv')
    with open(os.path.join(args.output_dir, 'kpis.json'), 'w') as fp:
        json.dump(report.get_as_dict(), fp, indent=2)

    print(result)
    print("Annual LFO: {:,.2f} over {:,d} orders".format(report.total_annual_lfo, report.annual_orders))
    print()
    print(report)
    if args.reference_lfo is not None:
        print()
        print("Improvement over reference annual LFO {:,.2f}: {:.2f}%".format(
            args.reference_lfo, report.improvement_over(args.reference_lfo)))
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    instance, check = prepare_instance(args)
    _, result, solution = solve_instance(instance, args.variant, config_from_args(args), check)
    check_outcome(result)
    report = compute_kpis(instance, solution)

    os.makedirs(args.output_dir, exist_ok=True)
    for name, df in report.summary_tables().items():
        df.to_csv(os.path.join(args.output_dir, 'kpi_%s.csv' % name))
    hours = employee_hours_report(instance, solution)
    hours.to_csv(os.path.join(args.output_dir, 'employee_hours.csv'), index=False)
    plot_data.hours_against_thresholds(instance, solution, args.max_employees) \
        .to_csv(os.path.join(args.output_dir, 'hours_thresholds.csv'), index=False)

    print(report)
    print()
    print(hours.to_string(index=False, float_format='{:,.4f}'.format))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    base = load_instance(args.data)
    specs = load_scenario_specs(args.scenarios)
    result = run_sweep(base, specs, args.variant, config_from_args(args), n_jobs=args.jobs,
                       progress_bar_disable=args.no_progress)
    result.save(args.output_dir, timings=not args.no_timestamp)
    plot_data.write_plot_data(result, os.path.join(args.output_dir, 'plot_data'))

    columns = ['label', 'status', 'total_annual_lfo', 'lfo_per_order', 'total_lfo_delta_pct']
    print(result.to_frame()[columns].to_string(index=False, float_format='{:,.2f}'.format))
    failed = [e.label for e in result.entries.values() if e.kpis is None]
    if failed:
        errored = [e.label for e in result.entries.values() if e.status == SWEEP_ERROR_STATUS]
        raise CliError('sweep', "{} of {} scenario(s) without a plan: {}".format(
            len(failed), len(result), ', '.join(failed)),
            EXIT_DATA_ERROR if errored else EXIT_SOLVER_LIMIT)
    return EXIT_OK


def cmd_export_mps(args: argparse.Namespace) -> int:
    instance, check = prepare_instance(args)
    model = build(instance, args.variant, check=check)
    os.makedirs(args.output_dir, exist_ok=True)
    fname = os.path.join(args.output_dir, args.filename)
    save_mps(model, fname, free_form=not args.fixed)
    print("%s: %d rows, %d columns" % (fname, model.num_rows, model.num_cols))
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='Log progress to the console; repeat for debug messages')


def _add_data(parser: argparse.ArgumentParser, allow_random: bool = True) -> None:
    parser.add_argument('--data', type=str, default=default_data_dir(),
                        help='Directory with the instance CSV files (default: $%s or the bundled base case)'
                             % DATA_DIR_ENV_VAR)
    if allow_random:
        parser.add_argument('--random-instance', action='store_true',
                            help='Use a small random instance instead of the data directory')
        parser.add_argument('--seed', type=int, default=1234, help='Seed of --random-instance')


def _add_scenario(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--label', type=str, default='cli', help='Scenario label')
    parser.add_argument('--sync', type=int, choices=sorted(SYNC_LEVELS), default=77,
                        help='Synchronization level in percent')
    parser.add_argument('--patients', type=int, default=None, help='Rescale the patient counts to this total')
    parser.add_argument('--only-k0', action='store_true', help='Keep only patients with fee-free medication')
    parser.add_argument('--months', type=int, choices=VALID_HORIZON_MONTHS, default=None,
                        help='Horizon in months, default: as in the data')
    parser.add_argument('--disaggregate', action='store_true',
                        help='Split every patient type into individual patients')


def _add_solver(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--variant', type=str, choices=VALID_VARIANTS, default='base', help='Model variant')
    parser.add_argument('--time-limit', type=float, default=600.0, help='Solver wall time limit in seconds')
    parser.add_argument('--node-limit', type=int, default=1000000, help='Branch-and-bound node limit')
    parser.add_argument('--gap', type=float, default=0.0, help='Relative gap at which the search stops')
    parser.add_argument('--branching', type=str, choices=VALID_BRANCHING_RULES, default='structured_priority')
    parser.add_argument('--node-selection', type=str, choices=VALID_NODE_SELECTIONS, default='best_bound')
    parser.add_argument('--no-presolve', action='store_true')
    parser.add_argument('--node-log', type=str, default=None, help='Write the node log to this CSV file')


def _add_output(parser: argparse.ArgumentParser, timestamp: bool = True) -> None:
    parser.add_argument('--output-dir', type=str, default=DEFAULT_OUTPUT_DIR,
                        help='Directory for result files and %s' % LOG_FNAME)
    if timestamp:
        parser.add_argument('--no-timestamp', action='store_true',
                            help='Leave out write times and wall times so identical runs write identical files')


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog='medsync', description='Pharmacy delivery planning with synchronized '
                                                         'medication orders')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    subparsers = parser.add_subparsers(dest='command', parser_class=_ArgumentParser)
    subparsers.required = True

    p = subparsers.add_parser('validate', help='Check instance data and scenarios')
    _add_common(p)
    _add_data(p)
    _add_scenario(p)
    p.add_argument('--scenarios', type=str, default=None, help='Validate every scenario of this JSON file')
    p.set_defaults(func=cmd_validate, output_dir=None)

    p = subparsers.add_parser('solve', help='Solve one scenario and print its KPIs')
    _add_common(p)
    _add_data(p)
    _add_scenario(p)
    _add_solver(p)
    _add_output(p)
    p.add_argument('--reference-lfo', type=float, nargs='?', const=REFERENCE_ANNUAL_LFO, default=None,
                   help='Print the improvement over this annual LFO (default reference: %.2f)'
                        % REFERENCE_ANNUAL_LFO)
    p.set_defaults(func=cmd_solve)

    p = subparsers.add_parser('sweep', help='Solve a list of scenarios and compare them')
    _add_common(p)
    _add_data(p, allow_random=False)
    _add_solver(p)
    _add_output(p)
    p.add_argument('--scenarios', type=str, default=BUNDLED_SCENARIOS_FILE, help='Scenario JSON file')
    p.add_argument('--jobs', type=int, default=-1, help='Parallel scenario solves, -1 for all cores')
    p.add_argument('--no-progress', action='store_true', help='Disable the progress bar')
    p.set_defaults(func=cmd_sweep)

    p = subparsers.add_parser('export-mps', help='Write the model of one scenario as an MPS file')
    _add_common(p)
    _add_data(p)
    _add_scenario(p)
    p.add_argument('--variant', type=str, choices=VALID_VARIANTS, default='base', help='Model variant')
    p.add_argument('--fixed', action='store_true', help='Write fixed-field instead of free-form MPS')
    p.add_argument('--filename', type=str, default='model.mps', help='Name of the MPS file')
    _add_output(p, timestamp=False)
    p.set_defaults(func=cmd_export_mps)

    p = subparsers.add_parser('report', help='Solve one scenario and write the KPI and staffing tables')
    _add_common(p)
    _add_data(p)
    _add_scenario(p)
    _add_solver(p)
    _add_output(p, timestamp=False)
    p.add_argument('--max-employees', type=int, default=MAX_EMPLOYEE_THRESHOLDS,
                   help='Largest employee count listed as an hours threshold')
    p.set_defaults(func=cmd_report)
    return parser


def _fail(category: str, message: str, exit_code: int) -> int:
    print("%s:%s: %s" % (ERROR_PREFIX, category, message), file=sys.stderr)
    return exit_code


def main(argv: Optional[List[str]] = None) -> int:
    """
    Runs one medsync command
    :param argv: command line arguments without the program name; defaults to sys.argv[1:]
    :return: the process exit code
    """
    try:
        args = build_parser().parse_args(argv)
    except CliError as e:
        return _fail(e.category, str(e), e.exit_code)
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else EXIT_OK

    try:
        setup_logging(args.verbose, args.output_dir)
        logger.debug("medsync %s: %s", __version__, vars(args))
        return args.func(args)
    except CliError as e:
        return _fail(e.category, str(e), e.exit_code)
    except InstanceDataError as e:
        return _fail('data', str(e), EXIT_DATA_ERROR)
    except ScenarioSpecError as e:
        return _fail('scenario', str(e), EXIT_DATA_ERROR)
    except ModelError as e:
        return _fail('model', str(e), EXIT_DATA_ERROR)
    except OSError as e:
        return _fail('io', str(e), EXIT_DATA_ERROR)
    except Exception as e:
        logger.exception(e)
        return _fail('internal', "{}: {}".format(type(e).__name__, e), EXIT_INTERNAL_ERROR)


if __name__ == '__main__':
    sys.exit(main())
