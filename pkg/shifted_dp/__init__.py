from .problem import ProblemSpec, GridFunction, builtin, load_config
from .solve import IterationOptions, iterate, iterate_normalized
