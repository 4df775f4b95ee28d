""" Examples whose fixed points are discontinuous, or do not exist. """
import numpy as np

from .common import make_problem
from ..problem import DEFAULT_CONTROL_SAMPLES, DEFAULT_KINKS, \
        DEFAULT_NODES_1D

CUBIC = '1.5*x1 - 0.5*x1^3'


def _psi_lsc(nodes):
    x = nodes[:, 0]
    return np.where(x > 0, 1 + x, 0.0)


def bilinear_lsc(grid_nodes=DEFAULT_NODES_1D,
                 control_samples=DEFAULT_CONTROL_SAMPLES):
    """ Lower semicontinuous fixed point; the optimal feedback jumps from
    0 to -1 at x = 0. """
    return make_problem(
        'bilinear-lsc',
        box=[(-2.0, 2.0)],
        dynamics=['x1*(1 + u)'],
        cost='max(0, x1) + abs(u)',
        control=('-2', '0'),
        grid_nodes=grid_nodes,
        control_samples=control_samples,
        kinks=DEFAULT_KINKS,
        mandatory_controls=(-1.0, 0.0),
        storages={'zero': '0'},
        storage='zero',
        shift_c=0.0,
        candidates={'psi-lsc': _psi_lsc})


def bilinear_unbounded(grid_nodes=DEFAULT_NODES_1D,
                       control_samples=DEFAULT_CONTROL_SAMPLES):
    """ Dissipative with lambda = 0 and c = 0, yet the optimal cost is
    unbounded and no bounded fixed point exists.

    Successor values are read at the node at or above f(x, u): linear
    interpolation would leak value from the absorbing node 0 into every
    cell and bound the discretised cost.
    """
    return make_problem(
        'bilinear-unbounded',
        box=[(0.0, 1.0)],
        dynamics=['x1*u'],
        cost='abs(u - 1) + abs(x1)',
        control=('1/2', '1'),
        grid_nodes=grid_nodes,
        control_samples=control_samples,
        kinks=[0.0, 0.5, 1.0],
        storages={'zero': '0'},
        storage='zero',
        shift_c=0.0,
        successor_rule='upper-node')


def _hat_limit(nodes):
    x = nodes[:, 0]
    return np.where(x < 0, -1.0, x)


def _check_limit(nodes):
    x = nodes[:, 0]
    return np.where(x > 0, 1.0, x)


def cubic_autonomous(grid_nodes=DEFAULT_NODES_1D,
                     control_samples=DEFAULT_CONTROL_SAMPLES):
    """ Zero cost autonomous cubic map with stable equilibria at -1 and 1.

    The shift stays 0 along the min- and max-shifted iterations from
    psi = x; their limits are hat-limit and check-limit.
    """
    return make_problem(
        'cubic-autonomous',
        box=[(-1.0, 1.0)],
        dynamics=[CUBIC],
        cost='0',
        control=('0', '0'),
        grid_nodes=grid_nodes,
        control_samples=control_samples,
        kinks=[-1.0, -0.5, 0.0, 0.5, 1.0],
        storages={'zero': '0'},
        storage='zero',
        shift_c=0.0,
        candidates={
            'hat-limit': _hat_limit,
            'check-limit': _check_limit,
        })


def _psi_usc(nodes):
    x = nodes[:, 0]
    return np.where(x == 0, 0.0, x - 2)


def usc_modified(grid_nodes=DEFAULT_NODES_1D,
                 control_samples=DEFAULT_CONTROL_SAMPLES):
    """ Upper semicontinuous fixed point with an isolated value at x = 0.

    psi-usc is 0 at x = 0 and x - 2 elsewhere; the identity is another
    fixed point.
    """
    return make_problem(
        'usc-modified',
        box=[(0.0, 1.0)],
        dynamics=['u*({})'.format(CUBIC)],
        cost='abs(u - 1) - u*({}) + x1'.format(CUBIC),
        control=('0', '1'),
        grid_nodes=grid_nodes,
        control_samples=control_samples,
        kinks=[0.0, 0.5, 1.0],
        mandatory_controls=(0.0, 1.0),
        storages={
            'lambda': '-x1',
            'zero': '0',
        },
        storage='lambda',
        shift_c=0.0,
        candidates={
            'psi-usc': _psi_usc,
            'identity': lambda nodes: nodes[:, 0].copy(),
        })
