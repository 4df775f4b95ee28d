""" Bellman operator and its shifted variants on sampled problems.

For a grid function psi the Bellman operator is

    T psi(x) = min_u l(x, u) + gamma * psi(f(x, u))

with the minimum over the control samples of each node and psi read through
multilinear interpolation.  Built on it:

 - shift_pair: c and d functionals of a difference psi1 - psi2, extrema
   taken over grid nodes.
 - apply_T_hat / apply_T_check: min{psi, T psi + c(psi, T psi)} and the max
   counterpart.
 - apply_alpha_shift: the same with c replaced by a convex combination
   alpha * max + (1 - alpha) * min.
 - normalize, rotated_cost, apply_T_tilde: helpers for the iteration
   started from a negated storage function.
 - min_formula_check: the closed form of T_hat^k psi as a minimum over
   plain Bellman iterates, used as a correctness oracle.

"""
from collections import namedtuple
import functools
import itertools

import numpy as np

from .exprlang import BinaryOp, Constant, as_expr
from .problem import ControlTable, GridFunction, GridMismatchError, \
        ProblemError

MIN_FORMULA_MAX_K = 6


class OperatorError(ValueError):
    pass


class ShiftPair(namedtuple('ShiftPair', 'max_diff min_diff c d')):
    """ Extrema of psi1 - psi2 over grid nodes.

    Args:
        max_diff (float): max over nodes of psi1 - psi2.
        min_diff (float): min over nodes of psi1 - psi2.
        c (float): max_diff / 2 + min_diff / 2, the translation minimising
            the sup norm of psi1 - psi2 - c.
        d (float): max_diff / 2 - min_diff / 2, that minimal sup norm.

    """

    def alpha_shift(self, alpha):
        return alpha * self.max_diff + (1.0 - alpha) * self.min_diff


def _pair_from_diff(diff):
    max_diff = float(np.max(diff))
    min_diff = float(np.min(diff))
    return ShiftPair(
        max_diff=max_diff,
        min_diff=min_diff,
        c=0.5 * max_diff + 0.5 * min_diff,
        d=0.5 * max_diff - 0.5 * min_diff)


def _check_same_grid(psi1, psi2):
    if not psi1.grid.same_as(psi2.grid):
        raise GridMismatchError('grid functions live on different grids')


def shift_pair(psi1, psi2):
    """ c(psi1, psi2) and d(psi1, psi2). """
    _check_same_grid(psi1, psi2)
    return _pair_from_diff(psi1.values - psi2.values)


def _check_grid(spec, psi):
    if not spec.grid.same_as(psi.grid):
        raise GridMismatchError('{}: grid function is not on the problem '
                                'grid'.format(spec.name))


def q_values(spec, values):
    """ l(x, u) + gamma * psi(f(x, u)) for every node and control sample. """
    sampled = spec.sampled()
    continuation = sampled.transition @ values
    return sampled.costs + spec.discount * continuation.reshape(
        sampled.costs.shape)


def bellman_values(spec, values):
    """ T applied to a raw node value array. """
    return np.min(q_values(spec, values), axis=1)


def apply_T(spec, psi):
    """ Bellman operator with the minimising control per node.

    Ties go to the smallest control sample.

    Returns
    -------
    (T psi as GridFunction, ControlTable of argmin controls)

    """
    _check_grid(spec, psi)
    q = q_values(spec, psi.values)
    best = np.argmin(q, axis=1)
    rows = np.arange(q.shape[0])
    controls = spec.sampled().controls[rows, best]
    return GridFunction(spec.grid, q[rows, best]), ControlTable(
        spec.grid, controls)


def _require_undiscounted(spec):
    if spec.discount != 1.0:
        raise OperatorError(
            '{}: shifted Bellman operators need discount 1, got {}'.format(
                spec.name, spec.discount))


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise OperatorError(
            'alpha must lie strictly inside (0, 1), got {}'.format(alpha))


def shifted_step(spec, values, mode='min', alpha=0.5):
    """ One shifted Bellman step on a raw value array.

    Returns
    -------
    (new values, T values, ShiftPair of values against T values)

    """
    tv = bellman_values(spec, values)
    pair = _pair_from_diff(values - tv)
    shift = pair.alpha_shift(alpha)
    if mode == 'min':
        new = np.minimum(values, tv + shift)
    else:
        assert mode == 'max', mode
        new = np.maximum(values, tv + shift)
    return new, tv, pair


def apply_T_hat(spec, psi):
    """ min-shifted operator: min{psi, T psi + c(psi, T psi)}. """
    _require_undiscounted(spec)
    _check_grid(spec, psi)
    new, _, _ = shifted_step(spec, psi.values, 'min')
    return GridFunction(spec.grid, new)


def apply_T_check(spec, psi):
    """ max-shifted operator: max{psi, T psi + c(psi, T psi)}. """
    _require_undiscounted(spec)
    _check_grid(spec, psi)
    new, _, _ = shifted_step(spec, psi.values, 'max')
    return GridFunction(spec.grid, new)


def apply_alpha_shift(spec, psi, alpha, mode):
    """ Shifted operator with c replaced by alpha max + (1 - alpha) min.

    alpha = 0.5 gives apply_T_hat (mode "min") or apply_T_check ("max").
    """
    _check_alpha(alpha)
    if mode not in ('min', 'max'):
        raise OperatorError('mode must be "min" or "max", got {!r}'.format(
            mode))
    _require_undiscounted(spec)
    _check_grid(spec, psi)
    new, _, _ = shifted_step(spec, psi.values, mode, alpha)
    return GridFunction(spec.grid, new)


def normalize(psi):
    """ psi minus its minimum over the nodes. """
    return GridFunction(psi.grid, psi.values - np.min(psi.values))


def _rotation_shift(spec, shift):
    if shift is not None:
        return float(shift)
    if spec.shift_c is not None:
        return spec.shift_c
    if spec.equilibrium is not None:
        xe, ue = spec.equilibrium
        return spec.evaluate_cost(xe, ue)
    raise OperatorError(
        '{}: rotation needs a shift c or an equilibrium'.format(spec.name))


@functools.lru_cache(maxsize=16)
def _rotated_spec(spec, storage, shift):
    composed = storage.substitute({
        'x{}'.format(d + 1): f
        for d, f in enumerate(spec.dynamics)
    })
    cost = BinaryOp(
        '-',
        BinaryOp('+', BinaryOp('-', spec.cost, Constant(shift)), storage),
        composed)
    # lambda(f(x, u)) is read on the grid the way the Bellman operator reads
    # psi(f(x, u)).
    successor_term = storage if spec.successor_term is None else \
        BinaryOp('+', spec.successor_term, storage)
    return spec.replace(
        name='{} (rotated)'.format(spec.name),
        cost=cost,
        successor_term=successor_term,
        shift_c=0.0,
        storage=as_expr(0.0),
        equilibrium=spec.equilibrium)


def rotated_cost(spec, storage=None, shift=None):
    """ Problem with stage cost l(x,u) - c + lambda(x) - lambda(f(x,u)).

    Arguments
    ---------
    spec : ProblemSpec
    storage : Expr, str or None
        Storage function lambda; a label from spec.storages, expression
        text, or None for the spec default.
    shift : float or None
        Constant c; defaults to spec.shift_c, then to l(x_e, u_e) when the
        spec carries an equilibrium.

    """
    try:
        storage = spec.resolve_storage(storage)
    except ProblemError as e:
        raise OperatorError(str(e))
    return _rotated_spec(spec, storage, _rotation_shift(spec, shift))


def apply_T_tilde(spec, psi, storage=None, shift=None):
    """ Bellman operator of the rotated problem. """
    rotated = rotated_cost(spec, storage, shift)
    tpsi, _ = apply_T(rotated, psi)
    return tpsi


def tilde_identity(spec, psi, storage=None, shift=None, k=1):
    """ T^k(psi - lambda) + lambda - k c, which equals the k-th rotated
    iterate of psi. """
    lam = GridFunction.from_expr(spec.grid, spec.resolve_storage(storage))
    c = _rotation_shift(spec, shift)
    values = psi.values - lam.values
    for _ in range(k):
        values = bellman_values(spec, values)
    return GridFunction(spec.grid, values + lam.values - k * c)


def min_formula_gap(spec, psi, k):
    """ Largest nodewise gap between T_hat^k psi and its closed form.

    The closed form is the minimum over tau = 0..k of
    T^tau psi + (smallest sum of tau shifts c(T_hat^s psi, T T_hat^s psi)
    over tau-subsets s of {0, ..., k-1}), with subsets enumerated directly.
    """
    if k < 0:
        raise OperatorError('k must be nonnegative')
    if k > MIN_FORMULA_MAX_K:
        raise OperatorError('min formula check limited to k <= {}'.format(
            MIN_FORMULA_MAX_K))
    _require_undiscounted(spec)
    _check_grid(spec, psi)

    shifts = []
    hat = psi.values
    for _ in range(k):
        hat, _, pair = shifted_step(spec, hat, 'min')
        shifts.append(pair.c)

    plain = [psi.values]
    for _ in range(k):
        plain.append(bellman_values(spec, plain[-1]))

    rhs = None
    for tau in range(k + 1):
        best = min(
            sum(subset) for subset in itertools.combinations(shifts, tau))
        candidate = plain[tau] + best
        rhs = candidate if rhs is None else np.minimum(rhs, candidate)

    return float(np.max(np.abs(hat - rhs)))


def min_formula_check(spec, psi, k, tol=1e-9):
    return min_formula_gap(spec, psi, k) <= tol
