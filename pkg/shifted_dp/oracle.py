""" Brute force finite horizon values, an independent check of the DP.

brute_force_value expands

    V_k(x) = min over control samples u of l(x, u) + V_{k-1}(f(x, u)),
    V_0 = psi

recursively from every node, evaluating expressions one point at a time
and reading continuation values through its own interpolation weights.
It shares only the problem definition with bellman, so agreement with k
applications of apply_T checks the vectorised sampling, the sparse
transition operator and the minimisation.
"""
import bisect
from collections import namedtuple
import functools
import itertools

import numpy as np

from .bellman import apply_T
from .problem import GridFunction, GridMismatchError, SNAP_TOL

MAX_SEQUENCES = 10**6

DEFAULT_COARSE_NODES = 21
DEFAULT_COARSE_CONTROLS = 11
DEFAULT_TOL = 1e-10


class BudgetError(ValueError):
    pass


OracleReport = namedtuple('OracleReport', 'passed max_gap k nodes controls')


def coarsen(spec,
            nodes=DEFAULT_COARSE_NODES,
            controls=DEFAULT_COARSE_CONTROLS):
    """ The same problem on fewer nodes and control samples. """
    coarse = spec.with_grid(nodes)
    return coarse.replace(control=coarse.control.replace(samples=controls))


def _control_samples(spec, x):
    lo = spec.control.lo.evaluate(x)
    hi = spec.control.hi.evaluate(x)
    if lo == hi:
        return [lo]
    samples = [
        lo + (hi - lo) * s
        for s in np.linspace(0.0, 1.0, spec.control.samples)
    ]
    samples[0] = lo
    samples[-1] = hi
    samples.extend(min(max(m, lo), hi) for m in spec.control.mandatory)
    return samples


def _weights_1d(axis, c, rule):
    """ [(node index, weight)] along one axis. """
    i = bisect.bisect_right(axis, c) - 1
    i = min(max(i, 0), len(axis) - 2)
    t = (c - axis[i]) / (axis[i + 1] - axis[i])
    t = min(max(t, 0.0), 1.0)
    if t < SNAP_TOL:
        t = 0.0
    elif t > 1.0 - SNAP_TOL:
        t = 1.0
    if rule == 'upper-node' and t > 0.0:
        t = 1.0
    return [(i, 1.0 - t), (i + 1, t)]


def _point_weights(grid, axes, point, rule):
    per_dim = [
        _weights_1d(axis, c, rule) for axis, c in zip(axes, point)
    ]
    weights = []
    for corner in itertools.product(*per_dim):
        w = 1.0
        for _, wd in corner:
            w *= wd
        if w != 0.0:
            index = tuple(i for i, _ in corner)
            weights.append((int(np.ravel_multi_index(index, grid.shape)), w))
    return weights


def _sequence_count(spec, k):
    per_node = spec.control.samples + len(spec.control.mandatory)
    return per_node**k


def brute_force_value(spec, psi, k):
    """ V_k on every node of spec.grid by recursive expansion.

    Arguments
    ---------
    spec : ProblemSpec
        Usually a coarse problem from coarsen().
    psi : GridFunction on spec.grid
        Terminal penalty.
    k : int
        Horizon.

    Returns
    -------
    GridFunction

    Raises BudgetError when the number of control sequences per start node
    exceeds MAX_SEQUENCES.
    """
    if not spec.grid.same_as(psi.grid):
        raise GridMismatchError('terminal penalty is not on the problem grid')
    if k < 0:
        raise ValueError('horizon must be nonnegative')
    count = _sequence_count(spec, k)
    if count > MAX_SEQUENCES:
        raise BudgetError(
            '{} control samples over horizon {} give {} sequences, limit is '
            '{}'.format(spec.control.samples, k, count, MAX_SEQUENCES))

    grid = spec.grid
    axes = [list(a) for a in grid.axes]
    nodes = [tuple(float(v) for v in n) for n in grid.nodes()]
    box = spec.box
    terminal = [float(v) for v in psi.values]
    g = spec.successor_term

    @functools.lru_cache(maxsize=None)
    def transitions(i):
        x = nodes[i]
        out = []
        for u in _control_samples(spec, x):
            cost = spec.evaluate_cost(x, u)
            raw = spec.evaluate_dynamics(x, u)
            fx = [min(max(v, lo), hi) for v, (lo, hi) in zip(raw, box)]
            weights = _point_weights(grid, axes, fx, spec.successor_rule)
            if g is not None:
                cost += g.evaluate(raw) - sum(
                    w * g.evaluate(nodes[j]) for j, w in weights)
            out.append((cost, weights))
        return out

    @functools.lru_cache(maxsize=None)
    def value(i, remaining):
        if remaining == 0:
            return terminal[i]
        best = None
        for cost, weights in transitions(i):
            q = cost + spec.discount * sum(
                w * value(j, remaining - 1) for j, w in weights)
            if best is None or q < best:
                best = q
        return best

    return GridFunction(grid, [value(i, k) for i in range(grid.size)])


def dp_values(spec, psi, k):
    """ k applications of apply_T. """
    for _ in range(k):
        psi, _ = apply_T(spec, psi)
    return psi


def check_oracle(spec, psi, k, tol=DEFAULT_TOL):
    """ Compare brute_force_value with the DP for the same horizon. """
    brute = brute_force_value(spec, psi, k)
    dp = dp_values(spec, psi, k)
    gap = brute.sup_distance(dp)
    return OracleReport(
        passed=gap <= tol,
        max_gap=gap,
        k=k,
        nodes=spec.grid.size,
        controls=spec.control.samples)
