""" Optimal control problems on compact boxes and their grid discretisation.

A ProblemSpec holds the textual model (dynamics f, stage cost l, state box,
state dependent control interval, optional discount, storage function and
equilibrium).  Sampling the spec on its grid gives a SampledProblem: every
(node, control sample) pair with its stage cost and the sparse multilinear
interpolation operator mapping node values to successor values.  Every
operator in bellman works on that table.
"""
from collections import namedtuple
import itertools

import numpy as np
import scipy.sparse as sp
import simplejson as json

from .exprlang import Expr, ExprError, as_expr, parse

# Clamping distance tolerated before a successor counts as leaving the box.
EPS_PROJ = 1e-6

# Relative distance to a node under which a coordinate snaps onto it.
SNAP_TOL = 1e-10

# Relative distance under which a mandatory point replaces a uniform node.
MANDATORY_SNAP_TOL = 1e-12

SUCCESSOR_RULES = ('linear', 'upper-node')

DEFAULT_NODES_1D = 401
DEFAULT_NODES_2D = 101
DEFAULT_CONTROL_SAMPLES = 201
DEFAULT_KINKS = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0)


class ProblemError(ValueError):
    pass


class ConfigError(ProblemError):
    pass


class UnknownProblemError(ProblemError):
    pass


class GridMismatchError(ProblemError):
    pass


class InvarianceError(ProblemError):
    """ Some successor f(x, u) leaves the state box.

    Args:
        x (tuple of float): Worst offending node.
        u (float): Control sample at that node.
        fx (tuple of float): Successor f(x, u).
        distance (float): Clamping distance of the successor.

    """

    def __init__(self, x, u, fx, distance, count):
        self.x = x
        self.u = u
        self.fx = fx
        self.distance = distance
        self.count = count
        super(InvarianceError, self).__init__(
            'control invariance violated on {} samples; worst x={}, u={!r}, '
            'f(x,u)={} is {:g} outside the box'.format(
                count, list(x), u, list(fx), distance))


def normalize_box(box):
    """ Return the box as a tuple of (lo, hi) float pairs. """
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    if not box:
        raise ProblemError('state box has no dimensions')
    for lo, hi in box:
        if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
            raise ProblemError('degenerate box interval [{}, {}]'.format(
                lo, hi))
    return box


class Grid(object):
    """ Rectilinear node set over a state box.

    Nodes are enumerated in C order (last coordinate fastest).
    """

    def __init__(self, axes):
        axes = tuple(np.array(a, dtype=np.float64) for a in axes)
        assert len(axes) >= 1
        for a in axes:
            assert a.ndim == 1 and len(a) >= 2, a
            assert np.all(np.diff(a) > 0), 'axis not strictly increasing'
            a.setflags(write=False)

        self.axes = axes
        self.dim = len(axes)
        self.shape = tuple(len(a) for a in axes)
        self.size = int(np.prod(self.shape))
        self.box = tuple((float(a[0]), float(a[-1])) for a in axes)
        self._nodes = None

    def nodes(self):
        """ (size, dim) array of node coordinates. """
        if self._nodes is None:
            mesh = np.meshgrid(*self.axes, indexing='ij')
            nodes = np.stack([m.ravel() for m in mesh], axis=1)
            nodes.setflags(write=False)
            self._nodes = nodes
        return self._nodes

    def spacing(self):
        """ Largest node spacing per dimension. """
        return tuple(float(np.max(np.diff(a))) for a in self.axes)

    def same_as(self, other):
        if self is other:
            return True
        return self.shape == other.shape and all(
            np.array_equal(a, b) for a, b in zip(self.axes, other.axes))

    def __repr__(self):
        return 'Grid(shape={}, box={})'.format(self.shape, self.box)


def _mandatory_per_dimension(mandatory_points, dim):
    if not mandatory_points:
        return [()] * dim
    if dim == 1 and all(
            isinstance(p, (int, float)) for p in mandatory_points):
        return [tuple(mandatory_points)]
    mandatory_points = list(mandatory_points)
    if len(mandatory_points) != dim:
        raise ProblemError('mandatory points given for {} dimensions, box has '
                           '{}'.format(len(mandatory_points), dim))
    return [tuple(p) for p in mandatory_points]


def build_axis(lo, hi, count, mandatory=()):
    """ Uniform nodes over [lo, hi] augmented with mandatory points.

    >>> build_axis(-2, 2, 5).tolist()
    [-2.0, -1.0, 0.0, 1.0, 2.0]
    >>> np.round(build_axis(-2, 2, 4, [1]), 6).tolist()
    [-2.0, -0.666667, 0.666667, 1.0, 2.0]

    """
    if count < 2:
        raise ProblemError('need at least 2 nodes per dimension')

    axis = np.linspace(lo, hi, count)
    if lo == -hi:
        # Exact mirror symmetry about 0.
        axis = 0.5 * (axis - axis[::-1])
    axis[0] = lo
    axis[-1] = hi

    extra = []
    width = hi - lo
    for p in mandatory:
        p = float(p)
        if p < lo or p > hi:
            raise ProblemError(
                'mandatory point {} outside [{}, {}]'.format(p, lo, hi))
        nearest = int(np.argmin(np.abs(axis - p)))
        if abs(axis[nearest] - p) <= MANDATORY_SNAP_TOL * width:
            axis[nearest] = p
        else:
            extra.append(p)

    return np.unique(np.concatenate([axis, np.array(extra, dtype=float)]))


def build_grid(box, nodes_per_dim, mandatory_points=None):
    """ Build a Grid over box.

    Arguments
    ---------
    box : sequence of (lo, hi)
    nodes_per_dim : int or sequence of int
    mandatory_points : sequence of sequences of float, optional
        Per dimension points that must be nodes (kinks of piecewise linear
        data).  A flat list is accepted for one dimensional boxes.

    """
    box = normalize_box(box)
    dim = len(box)
    if isinstance(nodes_per_dim, int):
        nodes_per_dim = [nodes_per_dim] * dim
    nodes_per_dim = list(nodes_per_dim)
    if len(nodes_per_dim) != dim:
        raise ProblemError('node counts given for {} dimensions, box has {}'.
                           format(len(nodes_per_dim), dim))

    mandatory = _mandatory_per_dimension(mandatory_points, dim)
    return Grid(
        build_axis(lo, hi, int(n), m)
        for (lo, hi), n, m in zip(box, nodes_per_dim, mandatory))


def default_kinks(box):
    return [[k for k in DEFAULT_KINKS if lo <= k <= hi] for lo, hi in box]


def project(points, box, eps=EPS_PROJ):
    """ Clamp points into box.

    Arguments
    ---------
    points : array_like, shape (..., dim)
    box : sequence of (lo, hi)
    eps : float
        Clamping distance tolerated without raising the flag.

    Returns
    -------
    (clamped points, flag) where flag is True for points clamped by more
    than eps in some coordinate.

    >>> project([2.5], [(-2, 2)])
    (array([2.]), True)

    """
    points = np.asarray(points, dtype=np.float64)
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    clamped = np.clip(points, lo, hi)
    exceeded = np.any(np.abs(points - clamped) > eps, axis=-1)
    if exceeded.ndim == 0:
        exceeded = bool(exceeded)
    return clamped, exceeded


def _axis_weights(axis, coords, rule):
    """ Lower cell index and weight of the upper node, per coordinate. """
    idx = np.searchsorted(axis, coords, side='right') - 1
    idx = np.clip(idx, 0, len(axis) - 2)
    t = (coords - axis[idx]) / (axis[idx + 1] - axis[idx])
    t = np.clip(t, 0.0, 1.0)
    t[t < SNAP_TOL] = 0.0
    t[t > 1.0 - SNAP_TOL] = 1.0
    if rule == 'upper-node':
        t = np.where(t > 0.0, 1.0, 0.0)
    return idx, t


def interpolation_matrix(grid, points, rule='linear'):
    """ Sparse operator mapping node values to values at points.

    Row i of the returned CSR matrix holds the multilinear weights of
    points[i]; weights are nonnegative and sum to one, and a point on a
    node gets weight exactly one on that node.
    """
    assert rule in SUCCESSOR_RULES, rule
    points = np.asarray(points, dtype=np.float64).reshape(-1, grid.dim)
    count = points.shape[0]

    per_dim = [
        _axis_weights(axis, points[:, d], rule)
        for d, axis in enumerate(grid.axes)
    ]

    rows = []
    cols = []
    weights = []
    row_index = np.arange(count)
    for corner in itertools.product((0, 1), repeat=grid.dim):
        w = np.ones(count)
        index = []
        for bit, (idx, t) in zip(corner, per_dim):
            w = w * (t if bit else 1.0 - t)
            index.append(idx + bit)
        flat = np.ravel_multi_index(index, grid.shape)
        keep = w != 0.0
        rows.append(row_index[keep])
        cols.append(flat[keep])
        weights.append(w[keep])

    return sp.csr_matrix(
        (np.concatenate(weights), (np.concatenate(rows),
                                   np.concatenate(cols))),
        shape=(count, grid.size))


class GridFunction(object):
    """ One finite real value per node of a Grid.

    Values are read only; arithmetic returns new GridFunctions.
    """

    def __init__(self, grid, values):
        values = np.array(values, dtype=np.float64).reshape(-1)
        assert values.shape == (grid.size, ), (values.shape, grid.size)
        if not np.all(np.isfinite(values)):
            raise ProblemError('grid function has non-finite values')
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.size, float(value)))

    @classmethod
    def from_expr(cls, grid, expr):
        expr = as_expr(expr, dim=grid.dim)
        nodes = grid.nodes()
        return cls(grid,
                   expr.evaluate_many([nodes[:, d] for d in range(grid.dim)]))

    @classmethod
    def from_function(cls, grid, fn):
        """ fn maps the (size, dim) node array to node values. """
        return cls(grid, fn(grid.nodes()))

    def _other_values(self, other):
        if isinstance(other, GridFunction):
            if not self.grid.same_as(other.grid):
                raise GridMismatchError('grid functions live on different '
                                        'grids')
            return other.values
        return float(other)

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other_values(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other_values(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._other_values(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * float(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def minimum(self, other):
        return GridFunction(self.grid,
                            np.minimum(self.values, self._other_values(other)))

    def maximum(self, other):
        return GridFunction(self.grid,
                            np.maximum(self.values, self._other_values(other)))

    def min(self):
        return float(np.min(self.values))

    def max(self):
        return float(np.max(self.values))

    def range(self):
        return self.max() - self.min()

    def sup_distance(self, other):
        return float(np.max(np.abs(self.values - self._other_values(other))))

    def interpolate_many(self, points, rule='linear'):
        return interpolation_matrix(self.grid, points, rule) @ self.values

    def interpolate(self, x):
        return float(self.interpolate_many([x])[0])

    def __repr__(self):
        return 'GridFunction({!r}, min={:g}, max={:g})'.format(
            self.grid, self.min(), self.max())


def interpolate(gf, x):
    """ Multilinear interpolation of gf at the point x.

    >>> g = build_grid([(0, 1)], 3)
    >>> interpolate(GridFunction.from_expr(g, 'x1^2'), [0.25])
    0.125

    """
    return gf.interpolate(x)


class ControlTable(object):
    """ A control value per node, e.g. a greedy feedback law. """

    def __init__(self, grid, values):
        values = np.array(values, dtype=np.float64).reshape(-1)
        assert values.shape == (grid.size, )
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    def control_at(self, x):
        return float((interpolation_matrix(self.grid, [x]) @ self.values)[0])


class ControlInterval(object):
    """ State dependent control interval [lo(x), hi(x)].

    Args:
        lo (Expr): Lower bound in x.
        hi (Expr): Upper bound in x.
        samples (int): Uniform samples per node, endpoints included.
        mandatory (tuple of float): Values that are always sampled (clipped
            into the interval at each node).

    """

    def __init__(self, lo, hi, samples=DEFAULT_CONTROL_SAMPLES, mandatory=()):
        self.lo = as_expr(lo)
        self.hi = as_expr(hi)
        self.samples = int(samples)
        self.mandatory = tuple(float(m) for m in mandatory)
        if self.samples < 2:
            raise ProblemError('control sample count must be at least 2')
        for e in (self.lo, self.hi):
            if 'u' in e.variables():
                raise ProblemError(
                    'control bound "{}" depends on u'.format(e.to_string()))

    def replace(self, **kwargs):
        fields = dict(
            lo=self.lo,
            hi=self.hi,
            samples=self.samples,
            mandatory=self.mandatory)
        fields.update(kwargs)
        return ControlInterval(**fields)

    def bounds(self, xs):
        lo = self.lo.evaluate_many(xs)
        hi = self.hi.evaluate_many(xs)
        bad = lo > hi
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ProblemError(
                'empty control interval at x={}: lo={!r} > hi={!r}'.format(
                    [float(np.ravel(x)[i]) for x in xs], float(lo[i]),
                    float(hi[i])))
        return lo, hi

    def sample(self, xs):
        """ Control samples per point, shape (points, M), sorted per row.

        Collapses to a single column when lo(x) == hi(x) everywhere.
        """
        lo, hi = self.bounds(xs)
        if np.array_equal(lo, hi):
            return lo.reshape(-1, 1).copy()

        s = np.linspace(0.0, 1.0, self.samples)
        table = lo[:, None] + (hi - lo)[:, None] * s[None, :]
        table[:, 0] = lo
        table[:, -1] = hi
        if self.mandatory:
            extra = np.clip(
                np.array(self.mandatory)[None, :], lo[:, None], hi[:, None])
            table = np.concatenate([table, extra], axis=1)
        table.sort(axis=1)
        return table

    def clip(self, x, u):
        lo, hi = self.bounds([np.array([v]) for v in x])
        return float(np.clip(u, lo[0], hi[0]))


SampledProblem = namedtuple(
    'SampledProblem', 'nodes controls costs successors transition')


class ProblemSpec(object):
    """ An optimal control problem on a compact box.

    Args:
        name (str): Problem name.
        dim (int): State dimension n.
        box (tuple of (lo, hi)): State box.
        dynamics (tuple of Expr): f_1 .. f_n in x1..xn and u.
        cost (Expr): Stage cost l(x, u).
        control (ControlInterval): Feasible inputs U(x).
        discount (float): Continuation weight in (0, 1]; 1 is undiscounted.
        storage (Expr): Default storage function, optional.
        shift_c (float): Known shift for dissipativity checks, optional.
        equilibrium (tuple): (x_e, u_e), optional.
        grid (Grid): Discretisation of the box.
        storages (dict): Labeled storage Exprs.
        candidates (dict): Labeled candidate fixed points, each a callable
            from the (size, dim) node array to values.
        successor_rule (str): "linear" or "upper-node".
        successor_term (Expr): g such that the stage cost contains
            -g(f(x, u)), optional.  On the grid that term is read through
            the successor interpolation, so g telescopes exactly.
        description (str): One line description.
        tag (str): Topic tag shown by the CLI listing.

    """

    def __init__(self,
                 name,
                 dim,
                 box,
                 dynamics,
                 cost,
                 control,
                 discount=1.0,
                 storage=None,
                 shift_c=None,
                 equilibrium=None,
                 grid=None,
                 storages=None,
                 candidates=None,
                 successor_rule='linear',
                 successor_term=None,
                 description='',
                 tag=''):
        self.name = name
        self.dim = int(dim)
        self.box = normalize_box(box)
        if len(self.box) != self.dim:
            raise ProblemError('box has {} dimensions, dim is {}'.format(
                len(self.box), self.dim))

        self.dynamics = tuple(as_expr(f, dim=self.dim) for f in dynamics)
        if len(self.dynamics) != self.dim:
            raise ProblemError('{} dynamics components for dimension {}'.
                               format(len(self.dynamics), self.dim))
        self.cost = as_expr(cost, dim=self.dim)
        self.control = control
        if control.lo.state_dimension() > self.dim or \
                control.hi.state_dimension() > self.dim:
            raise ProblemError('control bounds reference x beyond dim')

        self.discount = float(discount)
        if not 0.0 < self.discount <= 1.0:
            raise ProblemError('discount must lie in (0, 1], got {}'.format(
                discount))

        self.storage = None if storage is None else as_expr(
            storage, dim=self.dim)
        self.shift_c = None if shift_c is None else float(shift_c)
        if equilibrium is not None:
            xe, ue = equilibrium
            equilibrium = (tuple(float(v) for v in xe), float(ue))
        self.equilibrium = equilibrium

        if grid is None:
            nodes = DEFAULT_NODES_1D if self.dim == 1 else DEFAULT_NODES_2D
            grid = build_grid(self.box, nodes, default_kinks(self.box))
        assert grid.box == self.box, (grid.box, self.box)
        self.grid = grid

        self.storages = dict(storages or {})
        self.candidates = dict(candidates or {})
        assert successor_rule in SUCCESSOR_RULES, successor_rule
        self.successor_rule = successor_rule
        self.successor_term = None if successor_term is None else \
            as_expr(successor_term, dim=self.dim)
        self.description = description
        self.tag = tag
        self._sampled = None

    def replace(self, **changes):
        """ Copy with some fields replaced (the sampled table is rebuilt). """
        fields = dict(
            name=self.name,
            dim=self.dim,
            box=self.box,
            dynamics=self.dynamics,
            cost=self.cost,
            control=self.control,
            discount=self.discount,
            storage=self.storage,
            shift_c=self.shift_c,
            equilibrium=self.equilibrium,
            grid=self.grid,
            storages=self.storages,
            candidates=self.candidates,
            successor_rule=self.successor_rule,
            successor_term=self.successor_term,
            description=self.description,
            tag=self.tag)
        fields.update(changes)
        return ProblemSpec(**fields)

    def with_grid(self, nodes_per_dim, mandatory_points=None):
        if mandatory_points is None:
            mandatory_points = default_kinks(self.box)
        return self.replace(
            grid=build_grid(self.box, nodes_per_dim, mandatory_points))

    def state_columns(self, nodes):
        return [nodes[:, d] for d in range(self.dim)]

    def evaluate_dynamics(self, x, u):
        return tuple(f.evaluate(x, u) for f in self.dynamics)

    def evaluate_cost(self, x, u):
        return self.cost.evaluate(x, u)

    def storage_function(self, name=None):
        """ Storage Expr by label; the default storage when name is None. """
        if name is None:
            if self.storage is None:
                raise ProblemError('{} has no storage function'.format(
                    self.name))
            return self.storage
        if name not in self.storages:
            raise ProblemError('{} has no storage "{}" (known: {})'.format(
                self.name, name, ', '.join(sorted(self.storages))))
        return self.storages[name]

    def resolve_storage(self, storage=None):
        """ Storage Expr from a label, expression text, an Expr or None. """
        if storage is None or isinstance(storage, Expr):
            return self.storage_function() if storage is None else storage
        if storage in self.storages:
            return self.storages[storage]
        try:
            return parse(storage, dim=self.dim)
        except ExprError as e:
            raise ProblemError(
                '{}: storage {!r} is neither a label nor an expression: {}'.
                format(self.name, storage, e))

    def candidate(self, name):
        """ Labeled candidate fixed point sampled on the grid. """
        if name not in self.candidates:
            raise ProblemError('{} has no candidate "{}" (known: {})'.format(
                self.name, name, ', '.join(sorted(self.candidates))))
        return GridFunction.from_function(self.grid, self.candidates[name])

    def sampled(self):
        """ Node x control sample table; built once and cached. """
        if self._sampled is None:
            self._sampled = sample_problem(self)
        return self._sampled


def sample_problem(spec):
    """ Evaluate costs and successors on every node and control sample.

    Raises InvarianceError when some successor leaves the box by more than
    EPS_PROJ.
    """
    grid = spec.grid
    nodes = grid.nodes()
    xs = spec.state_columns(nodes)
    controls = spec.control.sample(xs)
    m = controls.shape[1]
    xs_col = [x[:, None] for x in xs]

    costs = spec.cost.evaluate_many(xs_col, controls)
    successors = np.stack(
        [f.evaluate_many(xs_col, controls) for f in spec.dynamics], axis=-1)
    successors = successors.reshape(-1, spec.dim)

    clamped, exceeded = project(successors, spec.box)
    if np.any(exceeded):
        distance = np.max(np.abs(successors - clamped), axis=1)
        worst = int(np.argmax(distance))
        raise InvarianceError(
            x=tuple(float(v) for v in nodes[worst // m]),
            u=float(controls.reshape(-1)[worst]),
            fx=tuple(float(v) for v in successors[worst]),
            distance=float(distance[worst]),
            count=int(np.count_nonzero(exceeded)))

    transition = interpolation_matrix(grid, clamped, spec.successor_rule)
    if spec.successor_term is not None:
        g = spec.successor_term
        exact = g.evaluate_many([successors[:, d] for d in range(spec.dim)])
        interpolated = transition @ g.evaluate_many(xs)
        costs = costs + (exact - interpolated).reshape(costs.shape)
    costs.setflags(write=False)
    controls.setflags(write=False)
    clamped.setflags(write=False)
    return SampledProblem(
        nodes=nodes,
        controls=controls,
        costs=costs,
        successors=clamped,
        transition=transition)


Trajectory = namedtuple('Trajectory',
                        'states controls costs running_average')


def _policy_function(spec, policy):
    if isinstance(policy, ControlTable):
        return policy.control_at
    if callable(policy):
        return policy
    expr = as_expr(policy, dim=spec.dim)
    return lambda x: expr.evaluate(x)


def simulate(spec, policy, x0, steps):
    """ Closed loop trajectory under the projected dynamics.

    Arguments
    ---------
    spec : ProblemSpec
    policy : ControlTable, Expr, str, float or callable
        Feedback law; its value is clipped into U(x).
    x0 : sequence of float
    steps : int
        Number of transitions T >= 1.

    Returns
    -------
    Trajectory with T + 1 states, T controls and costs, and the running
    average of the stage costs after every step.

    """
    if steps < 1:
        raise ProblemError('simulation needs at least one step')
    x = np.array(x0, dtype=np.float64).reshape(spec.dim)
    _, outside = project(x, spec.box)
    if outside:
        raise ProblemError('x0={} outside the state box'.format(list(x)))

    law = _policy_function(spec, policy)
    states = [x.copy()]
    controls = []
    costs = []
    total = 0.0
    averages = []
    for t in range(steps):
        u = spec.control.clip(x, law(x))
        cost = spec.evaluate_cost(x, u)
        x, _ = project(np.array(spec.evaluate_dynamics(x, u)), spec.box)
        total += cost
        states.append(x.copy())
        controls.append(u)
        costs.append(cost)
        averages.append(total / (t + 1))

    return Trajectory(
        states=np.array(states),
        controls=np.array(controls),
        costs=np.array(costs),
        running_average=np.array(averages))


CONFIG_KEYS = frozenset(('name', 'dim', 'box', 'dynamics', 'cost', 'control',
                         'storage', 'shift_c', 'discount', 'grid',
                         'equilibrium', 'successor_term'))


def _config_expr(text, dim, location):
    try:
        return parse(text, dim=dim)
    except ExprError as e:
        raise ConfigError('{}: {}'.format(location, e))


def _require(config, key, kind, location):
    if key not in config:
        raise ConfigError('{}: missing required key "{}"'.format(
            location, key))
    value = config[key]
    if not isinstance(value, kind):
        raise ConfigError('{}: "{}" must be {}'.format(
            location, key, getattr(kind, '__name__', kind)))
    return value


def spec_from_config(config, name='config'):
    """ Build a ProblemSpec from a decoded configuration dict. """
    if not isinstance(config, dict):
        raise ConfigError('{}: top level must be an object'.format(name))
    unknown = set(config) - CONFIG_KEYS
    if unknown:
        raise ConfigError('{}: unknown keys {}'.format(
            name, ', '.join(sorted(unknown))))

    dim = _require(config, 'dim', int, name)
    box = _require(config, 'box', list, name)
    dynamics = _require(config, 'dynamics', list, name)
    cost = _require(config, 'cost', str, name)
    control = _require(config, 'control', dict, name)
    if dim < 1 or len(box) != dim or len(dynamics) != dim:
        raise ConfigError('{}: dim, box and dynamics disagree'.format(name))

    try:
        box = normalize_box(box)
    except (TypeError, ValueError) as e:
        raise ConfigError('{}: bad box: {}'.format(name, e))

    parsed = []
    for i, f in enumerate(dynamics):
        location = 'dynamics[{}]'.format(i)
        if not isinstance(f, str):
            raise ConfigError('{}: must be an expression string'.format(
                location))
        parsed.append(_config_expr(f, dim, location))
    dynamics = parsed
    cost = _config_expr(cost, dim, 'cost')

    lo = _config_expr(_require(control, 'lo', str, 'control'), dim,
                      'control.lo')
    hi = _config_expr(_require(control, 'hi', str, 'control'), dim,
                      'control.hi')
    interval = ControlInterval(
        lo,
        hi,
        samples=control.get('samples', DEFAULT_CONTROL_SAMPLES),
        mandatory=control.get('mandatory', ()))

    grid_config = config.get('grid', {})
    nodes = grid_config.get(
        'nodes', DEFAULT_NODES_1D if dim == 1 else DEFAULT_NODES_2D)
    mandatory = grid_config.get('mandatory', default_kinks(box))
    grid = build_grid(box, nodes, mandatory)

    storage = None
    if 'storage' in config:
        storage = _config_expr(
            _require(config, 'storage', str, name), dim, 'storage')

    successor_term = None
    if 'successor_term' in config:
        successor_term = _config_expr(
            _require(config, 'successor_term', str, name), dim,
            'successor_term')

    equilibrium = None
    if 'equilibrium' in config:
        eq = _require(config, 'equilibrium', dict, name)
        equilibrium = (eq.get('x'), eq.get('u'))
        if equilibrium[0] is None or equilibrium[1] is None:
            raise ConfigError('equilibrium needs "x" and "u"')

    return ProblemSpec(
        name=config.get('name', name),
        dim=dim,
        box=box,
        dynamics=dynamics,
        cost=cost,
        control=interval,
        discount=config.get('discount', 1.0),
        storage=storage,
        shift_c=config.get('shift_c'),
        equilibrium=equilibrium,
        grid=grid,
        successor_term=successor_term,
        storages={'storage': storage} if storage is not None else {},
        description='loaded from {}'.format(name))


def load_config(path):
    """ Read a JSON problem file and check control invariance on its grid. """
    try:
        with open(path, encoding='utf-8') as f:
            config = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError('{}: invalid JSON at line {} column {}: {}'.format(
            path, e.lineno, e.colno, e.msg))

    spec = spec_from_config(config, name=path)
    spec.sampled()
    return spec


def builtin(name, **overrides):
    """ Builtin example problem by name; see catalog.BUILTINS. """
    from .catalog import builtin as make_builtin
    return make_builtin(name, **overrides)
