""" Sampled dissipation certificates for storage functions.

A storage function lambda certifies the shift c when

    lambda(f(x, u)) <= lambda(x) + l(x, u) - c

for every state and feasible input.  The checks here sweep every grid node
and control sample of a ProblemSpec; a pass means "passed on N samples",
not a proof.  lambda(f(x, u)) is read through the same successor
interpolation the Bellman operator uses.
"""
from collections import namedtuple

import numpy as np

from .exprlang import Expr, as_expr, parse
from .problem import GridFunction

# Violations up to this size still pass.
DEFAULT_TOL = 1e-9

EQUILIBRIUM_TOL = 1e-9


class DissipativityError(ValueError):
    pass


class EquilibriumError(DissipativityError):
    pass


class ComparisonFunctionError(DissipativityError):
    pass


class DissipativityReport(
        namedtuple(
            'DissipativityReport',
            'passed worst_violation worst_x worst_u samples min_margin '
            'mean_margin shift')):
    """ Outcome of a dissipation sweep.

    Args:
        passed (bool): Every sample satisfied the inequality within tol.
        worst_violation (float): Largest amount by which the inequality
            failed (negative when it holds everywhere with slack).
        worst_x (tuple of float): Node of the worst sample.
        worst_u (float): Control of the worst sample.
        samples (int): Number of (node, control) pairs checked.
        min_margin (float): Smallest slack.
        mean_margin (float): Mean slack.
        shift (float): The shift c that was checked.

    """

    def to_json(self):
        return {
            'pass': bool(self.passed),
            'worst_violation': self.worst_violation,
            'worst_x': list(self.worst_x),
            'worst_u': self.worst_u,
            'samples': self.samples,
            'min_margin': self.min_margin,
            'mean_margin': self.mean_margin,
            'shift': self.shift,
        }

    def summary(self):
        return '{} on {} samples (worst violation {:.3g} at x={}, u={:.6g})'.\
            format('passed' if self.passed else 'FAILED', self.samples,
                   self.worst_violation, list(self.worst_x), self.worst_u)


def _storage_values(spec, storage):
    """ lambda at the nodes and, interpolated, at every successor. """
    sampled = spec.sampled()
    if isinstance(storage, GridFunction):
        assert storage.grid.same_as(spec.grid)
        at_nodes = storage.values
    else:
        expr = spec.resolve_storage(storage)
        at_nodes = expr.evaluate_many(spec.state_columns(sampled.nodes))
    at_successors = sampled.transition @ at_nodes
    return at_nodes, at_successors.reshape(sampled.costs.shape)


def supply_margins(spec, storage):
    """ lambda(x) + l(x, u) - lambda(f(x, u)) per node and control. """
    at_nodes, at_successors = _storage_values(spec, storage)
    return at_nodes[:, None] + spec.sampled().costs - at_successors


def _report(spec, margins, shift, tol):
    sampled = spec.sampled()
    flat = margins.reshape(-1)
    worst = int(np.argmin(flat))
    m = margins.shape[1]
    min_margin = float(flat[worst])
    return DissipativityReport(
        passed=bool(min_margin >= -tol),
        worst_violation=-min_margin,
        worst_x=tuple(float(v) for v in sampled.nodes[worst // m]),
        worst_u=float(sampled.controls.reshape(-1)[worst]),
        samples=int(flat.size),
        min_margin=min_margin,
        mean_margin=float(np.mean(flat)),
        shift=float(shift))


def check_dissipativity(spec, storage, c, tol=DEFAULT_TOL):
    """ Sweep lambda(f(x,u)) <= lambda(x) + l(x,u) - c.

    Arguments
    ---------
    spec : ProblemSpec
    storage : GridFunction, Expr, str or None
        Storage label, expression text, Expr, GridFunction on the spec grid,
        or None for the spec default.
    c : float

    """
    margins = supply_margins(spec, storage) - float(c)
    return _report(spec, margins, c, tol)


def best_certified_shift(spec, storage):
    """ Largest c that storage certifies on the sampled set. """
    return float(np.min(supply_margins(spec, storage)))


def _comparison_function(alpha_fn):
    if isinstance(alpha_fn, Expr):
        return alpha_fn
    if isinstance(alpha_fn, (int, float)):
        return as_expr(alpha_fn)
    return parse(alpha_fn, dim=0, extra_variables=('r', ))


def check_strict_dissipativity(spec,
                               storage,
                               xe,
                               ue,
                               alpha_fn,
                               tol=DEFAULT_TOL):
    """ Sweep the strict dissipation inequality about (xe, ue).

        lambda(f(x,u)) <= lambda(x) + l(x,u) - l(xe,ue) - alpha(|x - xe|)

    alpha_fn is an expression in the single variable r (Euclidean distance
    to xe); alpha(0) = 0 and monotonicity are checked on the sampled radii.
    """
    xe = tuple(float(v) for v in np.ravel(xe))
    ue = float(ue)
    if len(xe) != spec.dim:
        raise EquilibriumError('x_e has {} components, state dimension is {}'.
                               format(len(xe), spec.dim))
    fe = np.array(spec.evaluate_dynamics(xe, ue))
    gap = float(np.max(np.abs(fe - np.array(xe))))
    if gap > EQUILIBRIUM_TOL:
        raise EquilibriumError(
            '({}, {}) is not an equilibrium: |f(x_e,u_e) - x_e| = {:g}'.format(
                list(xe), ue, gap))

    alpha = _comparison_function(alpha_fn)
    at_zero = alpha.evaluate([], extra={'r': 0.0})
    if abs(at_zero) > 1e-12:
        raise ComparisonFunctionError(
            'comparison function must vanish at 0, alpha(0) = {}'.format(
                at_zero))

    nodes = spec.sampled().nodes
    radii = np.sqrt(np.sum((nodes - np.array(xe)[None, :])**2, axis=1))
    alpha_values = alpha.evaluate_many([], extra={'r': radii})
    order = np.argsort(radii, kind='stable')
    if np.any(np.diff(alpha_values[order]) < -1e-12):
        raise ComparisonFunctionError(
            'comparison function decreases on the sampled radii')

    shift = spec.evaluate_cost(xe, ue)
    margins = supply_margins(spec, storage) - shift - alpha_values[:, None]
    return _report(spec, margins, shift, tol)


def terminal_from_storage(spec, storage):
    """ Terminal penalty psi = -lambda sampled on the problem grid. """
    if isinstance(storage, GridFunction):
        return -storage
    return -GridFunction.from_expr(spec.grid, spec.resolve_storage(storage))
