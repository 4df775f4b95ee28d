""" Chaotic and two dimensional examples. """
from .common import make_problem
from ..problem import DEFAULT_CONTROL_SAMPLES, DEFAULT_NODES_1D, \
        DEFAULT_NODES_2D

LOGISTIC = 'u*x1*(1 - x1)'
LOGISTIC_U = 3.6


def logistic_chaos(grid_nodes=DEFAULT_NODES_1D,
                   control_samples=DEFAULT_CONTROL_SAMPLES):
    """ Logistic map with a cost that telescopes along u = 18/5.

    psi = x^2 solves the shifted Bellman equation with c = 0 although the
    optimal closed loop is chaotic.  The -x^2 term at the successor is
    declared as successor_term, so it telescopes on the grid too.
    """
    return make_problem(
        'logistic-chaos',
        box=[(0.0, 1.0)],
        dynamics=[LOGISTIC],
        cost='x1^2 - ({})^2 + abs(u - {!r})'.format(LOGISTIC, LOGISTIC_U),
        control=('0', '4'),
        grid_nodes=grid_nodes,
        control_samples=control_samples,
        kinks=[0.0, 0.5, 1.0],
        mandatory_controls=(LOGISTIC_U, ),
        successor_term='x1^2',
        storages={'lambda': '-x1^2'},
        storage='lambda',
        shift_c=0.0,
        candidates={'xsq': lambda nodes: nodes[:, 0]**2})


def rotation_2d(grid_nodes=DEFAULT_NODES_2D,
                control_samples=DEFAULT_CONTROL_SAMPLES):
    """ Quarter turn rotation with the input on the first coordinate.

    Zero input gives period four orbits; the stage cost is negative near
    |x1| = 1/4, so the optimal average is below 0.
    """
    axis_kinks = [-1.0, -0.5, 0.0, 0.5, 1.0]
    return make_problem(
        'rotation-2d',
        box=[(-1.0, 1.0), (-1.0, 1.0)],
        dynamics=['x2 + u', '-x1'],
        cost='abs(u) + x1^2 - abs(x1)/2',
        control=('-1 - x2', '1 - x2'),
        grid_nodes=grid_nodes,
        control_samples=control_samples,
        kinks=[axis_kinks, axis_kinks],
        mandatory_controls=(0.0, ))
