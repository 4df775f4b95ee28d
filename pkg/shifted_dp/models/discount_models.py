""" Discounted linear quadratic example and its closed form solution.

For x+ = (x + u) / 2 and l = (x - 1)^2 + u^2 the discounted value function
is alpha x^2 + beta x + delta with

    alpha = gamma - 2 + sqrt(gamma^2 + 4)
    beta  = -(2 alpha gamma + 8) / (alpha gamma + 4 - 2 gamma)
    delta = (4 alpha gamma + 16 - beta^2 gamma^2)
            / ((4 alpha gamma + 16)(1 - gamma))

and the optimal feedback u = -(beta gamma + alpha gamma x) / (alpha gamma + 4)
stabilises x_e = -beta gamma / (2 alpha gamma + 4).  The best average cost,
1/2 at x = u = 1/2, is reached only in the limit gamma -> 1.

>>> round(lq_equilibrium(0.5), 3)
0.286

"""
import math

from .common import make_problem
from ..problem import DEFAULT_CONTROL_SAMPLES, DEFAULT_KINKS, \
        DEFAULT_NODES_1D

DEFAULT_GAMMA = 0.9

OPTIMAL_AVERAGE = 0.5


def lq_alpha(gamma):
    return gamma - 2 + math.sqrt(gamma**2 + 4)


def lq_beta(gamma):
    a = lq_alpha(gamma)
    return -(2 * a * gamma + 8) / (a * gamma + 4 - 2 * gamma)


def lq_delta(gamma):
    if gamma >= 1.0:
        raise ValueError('the discounted value is unbounded for gamma >= 1')
    a = lq_alpha(gamma)
    b = lq_beta(gamma)
    return (4 * a * gamma + 16 - b**2 * gamma**2) / (
        (4 * a * gamma + 16) * (1 - gamma))


def lq_policy(gamma, x):
    a = lq_alpha(gamma)
    b = lq_beta(gamma)
    return -(b * gamma + a * gamma * x) / (a * gamma + 4)


def lq_equilibrium(gamma):
    a = lq_alpha(gamma)
    return -lq_beta(gamma) * gamma / (2 * a * gamma + 4)


def lq_value(gamma):
    """ Closed form discounted value as a candidate callable. """
    a = lq_alpha(gamma)
    b = lq_beta(gamma)
    d = lq_delta(gamma)

    def candidate(nodes):
        x = nodes[:, 0]
        return a * x**2 + b * x + d

    return candidate


def lq_discounted(grid_nodes=DEFAULT_NODES_1D,
                  control_samples=DEFAULT_CONTROL_SAMPLES,
                  gamma=DEFAULT_GAMMA):
    """ Box [-2, 2] and u in [-2, 2] stand in for the real line; the
    optimal closed loop from [-1, 1] stays well inside both.

    lambda = 2x certifies strict dissipativity about (1/2, 1/2):
    2x + l(x, u) - 1/2 - (x + u) = (x - 1/2)^2 + (u - 1/2)^2.
    """
    gamma = float(gamma)
    candidates = {}
    if gamma < 1.0:
        candidates['value'] = lq_value(gamma)
    return make_problem(
        'lq-discounted',
        box=[(-2.0, 2.0)],
        dynamics=['(x1 + u)/2'],
        cost='(x1 - 1)^2 + u^2',
        control=('-2', '2'),
        grid_nodes=grid_nodes,
        control_samples=control_samples,
        kinks=DEFAULT_KINKS,
        mandatory_controls=(0.5, ),
        storages={
            'lambda': '2*x1',
            'zero': '0',
        },
        storage='lambda',
        shift_c=OPTIMAL_AVERAGE,
        equilibrium=((0.5, ), 0.5),
        discount=gamma,
        candidates=candidates)
