""" Iteration drivers for the Bellman operator and its shifted variants.

iterate() runs T, T_hat, T_check or an alpha shifted operator from an
initial grid function until the sequence settles, oscillates with period
two (plain T only), diverges or runs out of iterations.  Every step is
recorded in an IterationTrace:

    k          step index
    c_k        c(psi_k, T psi_k)
    W_k        d(psi_k, T psi_k), zero exactly at shifted fixed points
    sup_delta  max |psi_{k+1} - psi_k|
    min_diff   min of psi_k - T psi_k
    max_diff   max of psi_k - T psi_k
    V_k        max - min of psi_k - psi_ref (only with a reference)

iterate_normalized() runs psi_{k+1} = (T_hat psi_k) - min(T_hat psi_k) from
psi_0 = -lambda and tracks the monotonicity the storage function guarantees.
"""
from collections import deque, namedtuple
import datetime

import numpy as np

from .bellman import OperatorError, apply_T, bellman_values, \
        shifted_step, _check_alpha, _require_undiscounted, \
        _pair_from_diff
from .exprlang import ExprError
from .lib.progressbar_utils import iteration_bar
from .lib.utils import log
from .problem import GridFunction, GridMismatchError

DEBUG = False

CONVERGED = 'converged'
PERIOD2 = 'period2'
DIVERGED = 'diverged'
MAXITER = 'maxiter'
STATUSES = (CONVERGED, PERIOD2, DIVERGED, MAXITER)

OPERATORS = ('t', 't-hat', 't-check', 'alpha')

TRACE_COLUMNS = ('k', 'c_k', 'W_k', 'sup_delta', 'min_diff', 'max_diff')


class IterationError(RuntimeError):
    """ An expression failed while iterating.

    Args:
        step (int): Iteration index at which it failed.
        cause (Exception): The original error.

    """

    def __init__(self, step, cause):
        self.step = step
        self.cause = cause
        super(IterationError, self).__init__('step {}: {}'.format(
            step, cause))


IterationOptions = namedtuple(
    'IterationOptions', 'tol tol_residual max_iter divergence_bound '
    'growth_window period2_factor reference verbose')
IterationOptions.__new__.__defaults__ = (1e-9, 1e-8, 10000, 1e12, 50, 10.0,
                                         None, False)


class Operator(namedtuple('Operator', 'kind alpha mode')):
    """ Which map an iteration applies.

    Args:
        kind (str): "t", "t-hat", "t-check" or "alpha".
        alpha (float): Convex weight of the max in the shift (0.5 for the
            plain shifted operators).
        mode (str): "min" or "max" for the shifted kinds, None for "t".

    """

    def label(self):
        if self.kind == 'alpha':
            return 'alpha({:g},{})'.format(self.alpha, self.mode)
        return self.kind

    @property
    def shifted(self):
        return self.kind != 't'


def make_operator(kind, alpha=None, mode='max'):
    if kind == 't':
        return Operator('t', None, None)
    elif kind == 't-hat':
        return Operator('t-hat', 0.5, 'min')
    elif kind == 't-check':
        return Operator('t-check', 0.5, 'max')
    elif kind == 'alpha':
        if alpha is None:
            raise OperatorError('the alpha operator needs a weight')
        _check_alpha(alpha)
        if mode not in ('min', 'max'):
            raise OperatorError('alpha mode must be "min" or "max"')
        return Operator('alpha', float(alpha), mode)
    raise OperatorError('unknown operator {!r}, expected one of {}'.format(
        kind, ', '.join(OPERATORS)))


def _as_operator(operator):
    if isinstance(operator, Operator):
        return operator
    return make_operator(operator)


class TraceRow(
        namedtuple('TraceRow', 'k c_k W_k sup_delta min_diff max_diff V_k')):
    pass


class IterationTrace(object):
    """ Per step record of an iteration run. """

    def __init__(self, operator_label, with_reference=False):
        self.operator = operator_label
        self.with_reference = with_reference
        self.rows = []
        # Largest breach of psi_{k+1} >= psi_k and of T psi_k >= psi_k + c
        # in the rotated coordinates of iterate_normalized.
        self.monotone_violation = None
        self.supersolution_violation = None

    def append(self, row):
        self.rows.append(row)
        if DEBUG:
            print(row)

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def header(self):
        return TRACE_COLUMNS + (('V_k', ) if self.with_reference else ())


class SolveReport(
        namedtuple(
            'SolveReport', 'psi c_infty status residual iterations wall_time '
            'bound_only operator')):
    """ Result of an iteration run.

    Args:
        psi (GridFunction): Final iterate.
        c_infty (float): Last recorded shift c(psi_k, T psi_k).
        status (str): converged, period2, diverged or maxiter.
        residual (float): d(psi, T psi) of the final iterate.
        iterations (int): Steps taken.
        wall_time (float): Seconds.
        bound_only (bool): The run did not converge, so -c_infty only
            bounds the optimal average cost.
        operator (str): Operator label.

    """

    def to_json(self):
        return {
            'status': self.status,
            'c_infty': self.c_infty,
            'residual': self.residual,
            'iterations': self.iterations,
            'average_cost': -self.c_infty,
            'bound_only': self.bound_only,
            'operator': self.operator,
            'wall_time': self.wall_time,
        }


ShiftedResidual = namedtuple('ShiftedResidual', 'c residual')

AverageCostEstimate = namedtuple('AverageCostEstimate', 'value bound_only')

UniquenessReport = namedtuple('UniquenessReport',
                              'max_distance shift_spread reports')


def _distance(a, b):
    diff = a - b
    return 0.5 * (float(np.max(diff)) - float(np.min(diff)))


class _GrowthDetector(object):
    """ Flags sustained linear growth of the normalised range.

    Increments over a full window must stay above the floor and within 1%
    of each other, and must not decrease.
    """

    def __init__(self, window, floor):
        self.window = window
        self.floor = floor
        self.increments = deque(maxlen=window)
        self.last = None

    def update(self, value):
        if self.last is not None:
            self.increments.append(value - self.last)
        self.last = value
        if len(self.increments) < self.window:
            return False
        inc = np.array(self.increments)
        top = np.max(inc)
        return bool(
            np.all(inc > self.floor) and np.min(inc) >= 0.99 * top
            and np.all(np.diff(inc) >= -1e-9 * top))


def _diverging(values, bound):
    return (not np.all(np.isfinite(values))
            or float(np.max(np.abs(values))) > bound
            or float(np.max(values) - np.min(values)) > bound)


def _reference_values(spec, opts):
    if opts.reference is None:
        return None
    if not spec.grid.same_as(opts.reference.grid):
        raise GridMismatchError('reference is not on the problem grid')
    return opts.reference.values


def _run(spec, psi0, operator, opts, normalized=False, storage=None,
         rotation_shift=None):
    if operator.shifted:
        _require_undiscounted(spec)
    if not spec.grid.same_as(psi0.grid):
        raise GridMismatchError('initial function is not on the problem grid')

    reference = _reference_values(spec, opts)
    label = 'normalized' if normalized else operator.label()
    trace = IterationTrace(label, with_reference=reference is not None)
    if normalized:
        trace.monotone_violation = 0.0
        trace.supersolution_violation = 0.0 if rotation_shift is not None \
            else None

    start = datetime.datetime.now()
    if opts.verbose:
        log('{}: iterating {} on {} nodes'.format(spec.name, label,
                                                     spec.grid.size))

    values = np.array(psi0.values)
    previous = None
    prev_c = None
    growth = _GrowthDetector(opts.growth_window, 10 * opts.tol)
    status = MAXITER
    k = 0

    with iteration_bar(opts.max_iter, opts.verbose) as bar:
        for k in range(opts.max_iter):
            try:
                if operator.shifted:
                    new, tv, pair = shifted_step(spec, values, operator.mode,
                                                 operator.alpha)
                else:
                    tv = bellman_values(spec, values)
                    pair = _pair_from_diff(values - tv)
                    new = tv
            except ExprError as e:
                raise IterationError(k, e)

            if normalized:
                new = new - np.min(new)
                rotated = values + storage - np.min(values + storage)
                rotated_new = new + storage - np.min(new + storage)
                trace.monotone_violation = max(
                    trace.monotone_violation,
                    float(np.max(rotated - rotated_new)))
                if rotation_shift is not None:
                    trace.supersolution_violation = max(
                        trace.supersolution_violation,
                        rotation_shift + pair.max_diff)

            sup_delta = float(np.max(np.abs(new - values)))
            v_k = None
            if reference is not None:
                diff = values - reference
                v_k = float(np.max(diff) - np.min(diff))

            trace.append(
                TraceRow(
                    k=k,
                    c_k=pair.c,
                    W_k=pair.d,
                    sup_delta=sup_delta,
                    min_diff=pair.min_diff,
                    max_diff=pair.max_diff,
                    V_k=v_k))
            bar.update(k + 1)

            if operator.shifted:
                stable = prev_c is not None and \
                    abs(pair.c - prev_c) <= opts.tol
                if sup_delta <= opts.tol and stable and \
                        pair.d <= opts.tol_residual:
                    status = CONVERGED
            elif sup_delta <= opts.tol:
                status = CONVERGED
            elif previous is not None and \
                    _distance(new, previous) <= opts.tol and \
                    _distance(new, values) > opts.period2_factor * opts.tol:
                status = PERIOD2

            if status == MAXITER:
                if _diverging(new, opts.divergence_bound) or growth.update(
                        float(np.max(new) - np.min(new))):
                    status = DIVERGED

            previous = values
            prev_c = pair.c
            values = new
            if status != MAXITER:
                break

    psi = GridFunction(spec.grid, values) if np.all(
        np.isfinite(values)) else None
    residual = float('inf')
    if psi is not None:
        residual = _distance(values, bellman_values(spec, values))

    c_infty = trace.rows[-1].c_k if trace.rows else 0.0
    wall_time = (datetime.datetime.now() - start).total_seconds()
    report = SolveReport(
        psi=psi,
        c_infty=c_infty,
        status=status,
        residual=residual,
        iterations=k + 1 if trace.rows else 0,
        wall_time=wall_time,
        bound_only=status != CONVERGED,
        operator=label)

    if opts.verbose:
        log('{}: {} after {} iterations, shift {:.12g}, residual {:.3g}, '
             '{:.2f}s'.format(spec.name, status, report.iterations, c_infty,
                              residual, wall_time))

    return report, trace


def iterate(spec, psi0, operator='t-hat', opts=None):
    """ Iterate an operator from psi0.

    Arguments
    ---------
    spec : ProblemSpec
    psi0 : GridFunction on spec.grid
    operator : str or Operator
        "t", "t-hat", "t-check", or an Operator from make_operator.
    opts : IterationOptions

    Returns
    -------
    (SolveReport, IterationTrace)

    """
    return _run(spec, psi0, _as_operator(operator), opts or IterationOptions())


def iterate_normalized(spec, storage=None, opts=None, shift=None):
    """ Normalised min-shifted iteration from psi_0 = -lambda.

    The trace records, in the rotated coordinates psi_k + lambda (up to a
    constant), the largest decrease between consecutive iterates
    (monotone_violation) and, when the shift c is known (argument or
    spec.shift_c), the largest breach of T psi_k >= psi_k + c
    (supersolution_violation).  Both stay <= 0 up to rounding when lambda
    certifies c.
    """
    if isinstance(storage, GridFunction):
        lam = storage
    else:
        lam = GridFunction.from_expr(spec.grid, spec.resolve_storage(storage))
    if shift is None:
        shift = spec.shift_c
    psi0 = GridFunction(spec.grid, -lam.values + np.max(lam.values))
    return _run(
        spec,
        psi0,
        make_operator('t-hat'),
        opts or IterationOptions(),
        normalized=True,
        storage=lam.values,
        rotation_shift=shift)


def residual_shifted_BE(spec, psi):
    """ Best constant c in T psi = psi + c and the sup norm gap d(psi, T psi).

    c is the midpoint of the extrema of T psi - psi, i.e. -c(psi, T psi).
    """
    tv = bellman_values(spec, psi.values)
    pair = _pair_from_diff(psi.values - tv)
    return ShiftedResidual(c=-pair.c, residual=pair.d)


def average_cost_estimate(report):
    """ -c_infty; flagged bound_only unless the run converged. """
    return AverageCostEstimate(
        value=-report.c_infty, bound_only=report.status != CONVERGED)


def greedy_policy(spec, psi):
    """ Per node minimising control of l(x, u) + gamma psi(f(x, u)). """
    _, policy = apply_T(spec, psi)
    return policy


def lyapunov_V(psi, reference):
    """ max - min over nodes of psi - reference. """
    if not psi.grid.same_as(reference.grid):
        raise GridMismatchError('grid functions live on different grids')
    diff = psi.values - reference.values
    return float(np.max(diff) - np.min(diff))


def finite_horizon_values(spec, psi, horizon):
    """ [psi, T psi, ..., T^horizon psi]. """
    values = [psi]
    for _ in range(horizon):
        values.append(
            GridFunction(spec.grid, bellman_values(spec, values[-1].values)))
    return values


def is_monotone(sequence, direction='nondecreasing', slack=1e-9):
    """ Nodewise monotonicity of a sequence of grid functions. """
    assert direction in ('nondecreasing', 'nonincreasing'), direction
    for a, b in zip(sequence, sequence[1:]):
        step = b.values - a.values
        if direction == 'nonincreasing':
            step = -step
        if np.min(step) < -slack:
            return False
    return True


def compare_limits(spec, initial_conditions, operator='t-hat', opts=None):
    """ Run iterate from several initialisations and compare the limits.

    Returns
    -------
    UniquenessReport with the largest pairwise d between final iterates,
    the spread (max - min) of the limiting shifts and the individual
    reports.
    """
    reports = [
        iterate(spec, psi0, operator, opts)[0] for psi0 in initial_conditions
    ]
    finals = [r.psi.values for r in reports if r.psi is not None]
    max_distance = 0.0
    for i in range(len(finals)):
        for j in range(i + 1, len(finals)):
            max_distance = max(max_distance, _distance(finals[i], finals[j]))
    shifts = [r.c_infty for r in reports]
    return UniquenessReport(
        max_distance=max_distance,
        shift_spread=max(shifts) - min(shifts),
        reports=reports)
