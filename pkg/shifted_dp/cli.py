""" Solve average cost optimal control problems with shifted Bellman operators.

Subcommands:

    list      builtin problems with a description and a topic tag
    solve     iterate T, T_hat, T_check or an alpha shifted operator and
              write trace.csv, report.json and psi_final.csv
    check     dissipativity, strict dissipativity, shifted Bellman residual
              of a saved function, or the brute force DP oracle
    simulate  closed loop trajectory under the greedy policy of a saved
              function (or a constant input), written to trajectory.csv

Exit codes: 0 converged / check passed, 1 usage or input error, 2 period
two oscillation, 3 diverged, 4 iteration limit, 5 check failed.
"""
import argparse
import inspect
import os
import sys

import simplejson as json

from .bellman import OperatorError
from .catalog import BUILTINS, builtin, builtin_names
from .dissipativity import DissipativityError, check_dissipativity, \
        check_strict_dissipativity, terminal_from_storage
from .exprlang import ExprError, parse
from .lib.csv_io import read_grid_function, write_grid_function, \
        write_trace, write_trajectory
from .lib.utils import eprint
from .oracle import BudgetError, DEFAULT_COARSE_CONTROLS, \
        DEFAULT_COARSE_NODES, DEFAULT_TOL, check_oracle, coarsen
from .problem import ConfigError, GridFunction, ProblemError, load_config, \
        simulate
from .solve import CONVERGED, DIVERGED, IterationError, IterationOptions, \
        MAXITER, OPERATORS, PERIOD2, greedy_policy, iterate, \
        iterate_normalized, make_operator, residual_shifted_BE

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 5

STATUS_EXIT = {
    CONVERGED: EXIT_OK,
    PERIOD2: 2,
    DIVERGED: 3,
    MAXITER: 4,
}

DEFAULT_RESIDUAL_THRESHOLD = 1e-6

ERRORS = (ExprError, ProblemError, OperatorError, DissipativityError,
          BudgetError, IterationError, OSError)


class ArgumentParser(argparse.ArgumentParser):
    """ Usage errors exit with status 1. """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '{}: error: {}\n'.format(self.prog, message))


def _parse_param(text):
    key, sep, value = text.partition('=')
    if not sep or not key:
        raise argparse.ArgumentTypeError(
            'expected key=value, got {!r}'.format(text))
    try:
        return key, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            '{}: {!r} is not a number'.format(key, value))


def _add_problem_arguments(parser):
    parser.add_argument(
        '--problem',
        required=True,
        help="Builtin problem name or path to a JSON problem file.")
    parser.add_argument(
        '--grid-nodes',
        type=int,
        nargs='+',
        help="Grid nodes per dimension (one value applies to every "
        "dimension).")
    parser.add_argument(
        '--control-samples',
        type=int,
        help="Control samples per node.")
    parser.add_argument(
        '--discount', type=float, help="Discount factor in (0, 1].")
    parser.add_argument(
        '--param',
        type=_parse_param,
        action='append',
        default=[],
        help="Builtin model parameter, e.g. eps=0.2 (repeatable).")


def _grid_nodes(args):
    if args.grid_nodes is None:
        return None
    if len(args.grid_nodes) == 1:
        return args.grid_nodes[0]
    return args.grid_nodes


def load_problem(args):
    """ ProblemSpec from --problem plus the grid, control and discount
    flags. """
    nodes = _grid_nodes(args)
    if args.problem in BUILTINS:
        factory = BUILTINS[args.problem].factory
        accepted = inspect.signature(factory).parameters
        overrides = dict(args.param)
        if nodes is not None:
            overrides['grid_nodes'] = nodes
        if args.control_samples is not None:
            overrides['control_samples'] = args.control_samples
        if args.discount is not None and 'gamma' in accepted:
            overrides['gamma'] = args.discount
        spec = builtin(args.problem, **overrides)
    else:
        if not os.path.exists(args.problem):
            raise ConfigError('"{}" is neither a builtin ({}) nor a file'.
                              format(args.problem, ', '.join(
                                  builtin_names())))
        if args.param:
            raise ConfigError('--param applies to builtin problems only')
        spec = load_config(args.problem)
        if nodes is not None:
            spec = spec.with_grid(nodes)
        if args.control_samples is not None:
            spec = spec.replace(
                control=spec.control.replace(samples=args.control_samples))

    if args.discount is not None and spec.discount != args.discount:
        spec = spec.replace(discount=args.discount)
    spec.sampled()
    return spec


def initial_function(spec, init, storage=None):
    """ zero, neg-storage, a candidate label or an expression in x. """
    if init == 'zero':
        return GridFunction.constant(spec.grid, 0.0)
    if init == 'neg-storage':
        return terminal_from_storage(spec, storage)
    if init in spec.candidates:
        return spec.candidate(init)
    return GridFunction.from_expr(spec.grid, parse(init, dim=spec.dim))


def _write_json(path, data):
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, sort_keys=True, indent=2, ignore_nan=True)
        f.write('\n')


def _print_json(data):
    print(json.dumps(data, sort_keys=True, indent=2, ignore_nan=True))


def cmd_list(args):
    for name in builtin_names():
        entry = BUILTINS[name]
        print('{:<20} {:<16} {}'.format(name, entry.tag, entry.description))
    return EXIT_OK


def cmd_solve(args):
    spec = load_problem(args)
    reference = None
    if args.trace_v is not None:
        reference = spec.candidate(args.trace_v)

    opts = IterationOptions(
        tol=args.tol,
        tol_residual=args.tol_residual,
        max_iter=args.max_iter,
        reference=reference,
        verbose=args.verbose)

    if args.normalized:
        report, trace = iterate_normalized(spec, args.storage, opts)
    else:
        operator = make_operator(args.operator, args.alpha, args.alpha_mode)
        psi0 = initial_function(spec, args.init, args.storage)
        report, trace = iterate(spec, psi0, operator, opts)

    os.makedirs(args.out, exist_ok=True)
    write_trace(os.path.join(args.out, 'trace.csv'), trace)
    summary = report.to_json()
    summary['problem'] = spec.name
    if trace.monotone_violation is not None:
        summary['monotone_violation'] = trace.monotone_violation
    if trace.supersolution_violation is not None:
        summary['supersolution_violation'] = trace.supersolution_violation
    _write_json(os.path.join(args.out, 'report.json'), summary)
    if report.psi is not None:
        write_grid_function(
            os.path.join(args.out, 'psi_final.csv'), report.psi)

    print('{}: {} after {} iterations, c_infty={:.12g}, residual={:.3g}'.
          format(spec.name, report.status, report.iterations,
                 report.c_infty, report.residual))
    return STATUS_EXIT[report.status]


def _check_result(data, passed):
    data['pass'] = bool(passed)
    _print_json(data)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_check(args):
    spec = load_problem(args)

    if args.residual:
        if args.psi is None:
            raise ConfigError('--residual needs --psi')
        psi = read_grid_function(args.psi, spec.grid)
        c, residual = residual_shifted_BE(spec, psi)
        return _check_result({
            'check': 'residual',
            'c': c,
            'residual': residual,
            'threshold': args.threshold,
        }, residual <= args.threshold)

    if args.oracle:
        coarse = coarsen(spec, args.coarse_nodes, args.coarse_controls)
        psi = initial_function(coarse, args.init, args.storage)
        report = check_oracle(coarse, psi, args.k, args.oracle_tol)
        return _check_result({
            'check': 'oracle',
            'k': report.k,
            'max_gap': report.max_gap,
            'nodes': report.nodes,
            'controls': report.controls,
            'tolerance': args.oracle_tol,
        }, report.passed)

    if args.strict:
        xe, ue = args.xe, args.ue
        if xe is None or ue is None:
            if spec.equilibrium is None:
                raise ConfigError('--strict needs --xe and --ue')
            xe, ue = spec.equilibrium
        report = check_strict_dissipativity(spec, args.storage, xe, ue,
                                            args.alpha_fn)
        data = report.to_json()
        data['check'] = 'strict-dissipativity'
        return _check_result(data, report.passed)

    shift = args.shift
    if shift is None:
        shift = spec.shift_c if spec.shift_c is not None else 0.0
    report = check_dissipativity(spec, args.storage, shift)
    data = report.to_json()
    data['check'] = 'dissipativity'
    return _check_result(data, report.passed)


def cmd_simulate(args):
    spec = load_problem(args)
    if args.constant_u is not None:
        policy = args.constant_u
    elif args.policy is not None:
        policy = parse(args.policy, dim=spec.dim)
    elif args.psi is not None:
        policy = greedy_policy(spec, read_grid_function(args.psi, spec.grid))
    else:
        raise ConfigError('simulate needs --psi, --policy or --constant-u')

    trajectory = simulate(spec, policy, args.x0, args.steps)
    os.makedirs(args.out, exist_ok=True)
    write_trajectory(os.path.join(args.out, 'trajectory.csv'), trajectory)
    print('{}: final state {}, running average {:.12g}'.format(
        spec.name, trajectory.states[-1].tolist(),
        trajectory.running_average[-1]))
    return EXIT_OK


def build_parser():
    parser = ArgumentParser(
        prog='solver',
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    p = subparsers.add_parser('list', help="List builtin problems.")
    p.set_defaults(func=cmd_list)

    p = subparsers.add_parser('solve', help="Run an iteration.")
    _add_problem_arguments(p)
    p.add_argument(
        '--operator',
        choices=OPERATORS,
        default='t-hat',
        help="Operator to iterate.")
    p.add_argument(
        '--alpha',
        type=float,
        help="Weight of the max in the alpha shifted operator.")
    p.add_argument(
        '--alpha-mode',
        choices=('min', 'max'),
        default='max',
        help="Pointwise min or max of the alpha shifted operator.")
    p.add_argument(
        '--init',
        default='zero',
        help="zero, neg-storage, a candidate label or an expression in x.")
    p.add_argument(
        '--storage',
        help="Storage label or expression for neg-storage and --normalized.")
    p.add_argument(
        '--normalized',
        action='store_true',
        help="Normalised min-shifted iteration from minus the storage.")
    p.add_argument('--tol', type=float, default=1e-9, help="Sup-delta tol.")
    p.add_argument(
        '--tol-residual',
        type=float,
        default=1e-8,
        help="Residual required for convergence of shifted operators.")
    p.add_argument(
        '--max-iter', type=int, default=10000, help="Iteration limit.")
    p.add_argument(
        '--trace-v',
        help="Candidate label; adds V_k against it to the trace.")
    p.add_argument('--out', default='.', help="Output directory.")
    p.add_argument(
        '--verbose', action='store_true', help="Progress bar and timing.")
    p.set_defaults(func=cmd_solve)

    p = subparsers.add_parser('check', help="Run a certificate check.")
    _add_problem_arguments(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument(
        '--strict',
        action='store_true',
        help="Strict dissipativity about (xe, ue).")
    mode.add_argument(
        '--residual',
        action='store_true',
        help="Shifted Bellman residual of --psi.")
    mode.add_argument(
        '--oracle',
        action='store_true',
        help="Brute force comparison of T^k on a coarse grid.")
    p.add_argument('--storage', help="Storage label or expression.")
    p.add_argument(
        '--shift', type=float, help="Shift c (default: the problem's).")
    p.add_argument('--xe', type=float, nargs='+', help="Equilibrium state.")
    p.add_argument('--ue', type=float, help="Equilibrium input.")
    p.add_argument(
        '--alpha-fn',
        default='0',
        help="Comparison function in r = |x - xe|.")
    p.add_argument('--psi', help="CSV grid function (x1[,x2],value).")
    p.add_argument(
        '--threshold',
        type=float,
        default=DEFAULT_RESIDUAL_THRESHOLD,
        help="Largest accepted residual.")
    p.add_argument('--k', type=int, default=3, help="Oracle horizon.")
    p.add_argument(
        '--init',
        default='zero',
        help="Oracle terminal penalty, as solve --init.")
    p.add_argument(
        '--coarse-nodes',
        type=int,
        default=DEFAULT_COARSE_NODES,
        help="Oracle grid nodes per dimension.")
    p.add_argument(
        '--coarse-controls',
        type=int,
        default=DEFAULT_COARSE_CONTROLS,
        help="Oracle control samples.")
    p.add_argument(
        '--oracle-tol',
        type=float,
        default=DEFAULT_TOL,
        help="Largest accepted oracle gap.")
    p.set_defaults(func=cmd_check)

    p = subparsers.add_parser('simulate', help="Simulate a closed loop.")
    _add_problem_arguments(p)
    p.add_argument('--psi', help="CSV grid function; its greedy policy.")
    p.add_argument('--policy', help="Feedback law as an expression in x.")
    p.add_argument('--constant-u', type=float, help="Constant input.")
    p.add_argument('--x0', type=float, nargs='+', required=True)
    p.add_argument('--steps', type=int, default=100)
    p.add_argument('--out', default='.', help="Output directory.")
    p.set_defaults(func=cmd_simulate)

    return parser


def run(argv=None):
    """ Parse argv and run a subcommand; returns the exit status. """
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ERRORS as e:
        eprint('error: {}'.format(e))
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
