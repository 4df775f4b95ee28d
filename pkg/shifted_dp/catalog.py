""" Registry of the builtin example problems. """
from collections import namedtuple

from .models.discount_models import lq_discounted
from .models.pwl_models import nonunique_eps, pwl_shifted, pwl_zero_avg, \
        two_policies
from .models.regime_models import logistic_chaos, rotation_2d
from .models.regularity_models import bilinear_lsc, bilinear_unbounded, \
        cubic_autonomous, usc_modified
from .problem import ConfigError, UnknownProblemError

Builtin = namedtuple('Builtin', 'factory description tag')

BUILTINS = {
    'pwl-zero-avg':
    Builtin(pwl_zero_avg, 'piecewise linear cost, zero optimal average',
            'period-2'),
    'pwl-shifted':
    Builtin(pwl_shifted, 'piecewise linear cost, optimal average -7/2',
            'shift-recovery'),
    'nonunique-eps':
    Builtin(nonunique_eps, 'cost eps*x + |u|, a continuum of fixed points',
            'non-unique'),
    'two-policies':
    Builtin(two_policies, 'two optimal policies sharing one shift',
            'shared-shift'),
    'bilinear-lsc':
    Builtin(bilinear_lsc, 'bilinear dynamics, lower semicontinuous fixed '
            'point', 'lsc'),
    'bilinear-unbounded':
    Builtin(bilinear_unbounded, 'dissipative but with unbounded optimal '
            'cost', 'unbounded'),
    'cubic-autonomous':
    Builtin(cubic_autonomous, 'zero cost cubic map, frozen shift',
            'shift-freeze'),
    'usc-modified':
    Builtin(usc_modified, 'upper semicontinuous fixed point', 'usc'),
    'logistic-chaos':
    Builtin(logistic_chaos, 'logistic map, chaotic optimal closed loop',
            'chaos'),
    'rotation-2d':
    Builtin(rotation_2d, 'two dimensional rotation with scalar input',
            '2d'),
    'lq-discounted':
    Builtin(lq_discounted, 'discounted linear quadratic, biased equilibrium',
            'discounted'),
}


def builtin_names():
    return sorted(BUILTINS)


def describe(name):
    """ (description, tag) of a builtin. """
    entry = _lookup(name)
    return entry.description, entry.tag


def _lookup(name):
    if name not in BUILTINS:
        raise UnknownProblemError('unknown problem "{}" (known: {})'.format(
            name, ', '.join(builtin_names())))
    return BUILTINS[name]


def builtin(name, **overrides):
    """ Construct a builtin problem.

    Arguments
    ---------
    name : str
    overrides : dict
        Factory keywords: grid_nodes, control_samples and model parameters
        (eps for nonunique-eps, gamma for lq-discounted).

    """
    entry = _lookup(name)
    try:
        spec = entry.factory(**overrides)
    except TypeError as e:
        raise ConfigError('{}: {}'.format(name, e))
    return spec.replace(description=entry.description, tag=entry.tag)
