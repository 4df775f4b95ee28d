""" CSV files for iteration traces, grid functions and trajectories. """
import csv

import numpy as np

from .utils import format_float
from ..problem import GridFunction, GridMismatchError, ProblemError


def _cell(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format_float(float(value))


def write_trace(path, trace):
    """ Trace rows under the header k,c_k,W_k,sup_delta,min_diff,max_diff
    (plus V_k when the run had a reference). """
    header = trace.header()
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in trace.rows:
            writer.writerow([_cell(getattr(row, name)) for name in header])


def _coordinate_names(dim):
    return ['x{}'.format(d + 1) for d in range(dim)]


def write_grid_function(path, gf):
    """ One line per node: coordinates then value, header x1[,x2],value. """
    nodes = gf.grid.nodes()
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(_coordinate_names(gf.grid.dim) + ['value'])
        for node, value in zip(nodes, gf.values):
            writer.writerow([_cell(v) for v in node] + [_cell(value)])


def read_grid_function(path, grid):
    """ Read a file written by write_grid_function back onto grid.

    Raises GridMismatchError when the node coordinates differ from the
    nodes of grid.
    """
    names = _coordinate_names(grid.dim)
    coords = []
    values = []
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.DictReader(f)
        missing = set(names + ['value']) - set(reader.fieldnames or ())
        if missing:
            raise ProblemError('{}: missing columns {}'.format(
                path, ', '.join(sorted(missing))))
        for d in reader:
            try:
                coords.append([float(d[n]) for n in names])
                values.append(float(d['value']))
            except ValueError as e:
                raise ProblemError('{} line {}: {}'.format(
                    path, reader.line_num, e))

    coords = np.array(coords, dtype=np.float64).reshape(-1, grid.dim)
    if coords.shape[0] != grid.size:
        raise GridMismatchError('{} has {} nodes, grid has {}'.format(
            path, coords.shape[0], grid.size))
    if not np.allclose(coords, grid.nodes(), rtol=0.0, atol=1e-12):
        raise GridMismatchError(
            '{}: node coordinates do not match the problem grid'.format(path))

    return GridFunction(grid, values)


def write_trajectory(path, trajectory):
    """ Header t,x1[,x2],u,cost,running_average; the last row carries the
    final state only. """
    dim = trajectory.states.shape[1]
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['t'] + _coordinate_names(dim) +
                        ['u', 'cost', 'running_average'])
        steps = len(trajectory.controls)
        for t, state in enumerate(trajectory.states):
            row = [str(t)] + [_cell(v) for v in state]
            if t < steps:
                row += [
                    _cell(trajectory.controls[t]),
                    _cell(trajectory.costs[t]),
                    _cell(trajectory.running_average[t])
                ]
            else:
                row += ['', '', '']
            writer.writerow(row)
