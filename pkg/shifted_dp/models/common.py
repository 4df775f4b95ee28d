from ..exprlang import parse
from ..problem import ControlInterval, DEFAULT_CONTROL_SAMPLES, \
        DEFAULT_NODES_1D, ProblemSpec, build_grid


def make_problem(name,
                 box,
                 dynamics,
                 cost,
                 control,
                 grid_nodes=DEFAULT_NODES_1D,
                 control_samples=DEFAULT_CONTROL_SAMPLES,
                 kinks=(),
                 mandatory_controls=(),
                 storages=None,
                 storage=None,
                 **kwargs):
    """ ProblemSpec from expression text.

    Arguments
    ---------
    box : list of (lo, hi)
    dynamics : list of str
    cost : str
    control : (str, str)
        Lower and upper control bounds.
    kinks : list of float or list of list of float
        Mandatory grid points (per dimension for dim > 1).
    storages : dict of label to str
        Storage functions; storage names the default one.

    """
    dim = len(box)
    storages = {
        label: parse(text, dim=dim)
        for label, text in (storages or {}).items()
    }
    lo, hi = control
    return ProblemSpec(
        name=name,
        dim=dim,
        box=box,
        dynamics=[parse(f, dim=dim) for f in dynamics],
        cost=parse(cost, dim=dim),
        control=ControlInterval(
            parse(lo, dim=dim),
            parse(hi, dim=dim),
            samples=control_samples,
            mandatory=mandatory_controls),
        grid=build_grid(box, grid_nodes, kinks),
        storages=storages,
        storage=storages[storage] if storage is not None else None,
        **kwargs)


def in_box(kinks, lo, hi):
    return [k for k in kinks if lo <= k <= hi]
