""" Piecewise linear examples on x+ = -x + u (and x+ = x + u).

All four have node aligned successors on their default grids: the control
samples are spaced so that every f(x, u) lands on a node, which makes the
min-commutativity and closed-form checks exact.
"""
import numpy as np

from .common import in_box, make_problem
from ..problem import ConfigError, DEFAULT_CONTROL_SAMPLES, \
        DEFAULT_KINKS, DEFAULT_NODES_1D

# Kinks of the stage cost and of both storage functions.
PWL_KINKS = tuple(sorted(set(DEFAULT_KINKS + (-1.25, -0.75, -0.25, 0.25))))

LAMBDA1 = 'min(abs(x1 - 1) + 1/2, abs(x1 + 1)) / 2'
LAMBDA2 = '-min(abs(x1 + 1) + 1/4, abs(x1 - 1) - 1/4, 2*abs(x1 + 1))'

ZERO_AVG_COST = 'min(abs(x1 - 1) - 1/4, abs(x1 + 1) + 1/4) + abs(u)'
SHIFTED_COST = 'min(abs(x1 - 1) - 15/4, abs(x1 + 1) - 13/4) + abs(u)'


def _mirror_problem(name, cost, grid_nodes, control_samples, **kwargs):
    return make_problem(
        name,
        box=[(-2.0, 2.0)],
        dynamics=['-x1 + u'],
        cost=cost,
        control=('-2 + x1', '2 + x1'),
        grid_nodes=grid_nodes,
        control_samples=control_samples,
        kinks=PWL_KINKS,
        mandatory_controls=(0.0, ),
        **kwargs)


def pwl_zero_avg(grid_nodes=DEFAULT_NODES_1D,
                 control_samples=DEFAULT_CONTROL_SAMPLES):
    """ Zero average cost; plain value iteration from 0 oscillates with
    period two, from -lambda1 it converges in three steps. """
    return _mirror_problem(
        'pwl-zero-avg',
        ZERO_AVG_COST,
        grid_nodes,
        control_samples,
        storages={
            'lambda1': LAMBDA1,
            'lambda2': LAMBDA2,
            'zero': '0',
        },
        storage='lambda1',
        shift_c=0.0,
        candidates={
            'neg-lambda1': lambda nodes: -_lambda1(nodes[:, 0]),
            'neg-lambda2': lambda nodes: -_lambda2(nodes[:, 0]),
        })


def _lambda1(x):
    return np.minimum(np.abs(x - 1) + 0.5, np.abs(x + 1)) / 2


def _lambda2(x):
    return -np.minimum.reduce(
        [np.abs(x + 1) + 0.25,
         np.abs(x - 1) - 0.25, 2 * np.abs(x + 1)])


def pwl_shifted(grid_nodes=DEFAULT_NODES_1D,
                control_samples=DEFAULT_CONTROL_SAMPLES):
    """ pwl-zero-avg with the stage cost lowered by 7/2. """
    return _mirror_problem(
        'pwl-shifted',
        SHIFTED_COST,
        grid_nodes,
        control_samples,
        storages={
            'lambda1': LAMBDA1,
            'zero': '0',
        },
        storage='lambda1',
        shift_c=-3.5)


def psi_alpha(alpha, eps):
    """ alpha |x| + eps x / 2, a fixed point for 0 <= alpha < 1 - eps. """

    def candidate(nodes):
        x = nodes[:, 0]
        return alpha * np.abs(x) + eps * x / 2

    return candidate


def nonunique_eps(grid_nodes=DEFAULT_NODES_1D,
                  control_samples=DEFAULT_CONTROL_SAMPLES,
                  eps=0.1):
    """ A continuum of fixed points psi_alpha with the same shift 0. """
    if not 0.0 <= eps < 1.0:
        raise ConfigError('eps must lie in [0, 1), got {}'.format(eps))
    candidates = {
        'psi-alpha-{:g}'.format(alpha): psi_alpha(alpha, eps)
        for alpha in (0.0, 0.3, 0.6) if alpha < 1.0 - eps
    }
    return _mirror_problem(
        'nonunique-eps',
        '{!r}*x1 + abs(u)'.format(float(eps)),
        grid_nodes,
        control_samples,
        storages={
            'lambda': '-{!r}*x1/2'.format(float(eps)),
        },
        storage='lambda',
        shift_c=0.0,
        candidates=candidates)


def _psi1(nodes):
    x = nodes[:, 0]
    return 1 - np.abs(x) + (1 + x) / 2


def _psi2(nodes):
    x = nodes[:, 0]
    return 1 - np.abs(x) + (1 - x) / 2


def two_policies(grid_nodes=DEFAULT_NODES_1D,
                 control_samples=DEFAULT_CONTROL_SAMPLES):
    """ Two fixed points, one per end of [-1, 1], sharing the shift 0. """
    return make_problem(
        'two-policies',
        box=[(-1.0, 1.0)],
        dynamics=['x1 + u'],
        cost='1 - abs(x1) + abs(u)/2',
        control=('-1 - x1', '1 - x1'),
        grid_nodes=grid_nodes,
        control_samples=control_samples,
        kinks=in_box(PWL_KINKS, -1.0, 1.0),
        mandatory_controls=(0.0, ),
        storages={'zero': '0'},
        storage='zero',
        shift_c=0.0,
        candidates={
            'psi1': _psi1,
            'psi2': _psi2,
            'psi-min': lambda nodes: 1.5 * (1 - np.abs(nodes[:, 0])),
        })
