""" Operator laws checked on random grid functions over the builtins. """
import functools
import unittest

import numpy as np
from parameterized import parameterized

from shifted_dp.bellman import apply_alpha_shift, apply_T, apply_T_check, \
        apply_T_hat, rotated_cost, shift_pair
from shifted_dp.catalog import builtin
from shifted_dp.problem import GridFunction
from shifted_dp.solve import IterationOptions, finite_horizon_values, \
        iterate, is_monotone, residual_shifted_BE

SAMPLES = 20
TOL = 1e-9

COARSE = {
    'pwl-zero-avg': dict(grid_nodes=41, control_samples=21),
    'pwl-shifted': dict(grid_nodes=41, control_samples=21),
    'nonunique-eps': dict(grid_nodes=41, control_samples=21),
    'two-policies': dict(grid_nodes=41, control_samples=21),
    'bilinear-lsc': dict(grid_nodes=41, control_samples=21),
    'bilinear-unbounded': dict(grid_nodes=41, control_samples=21),
    'cubic-autonomous': dict(grid_nodes=41, control_samples=21),
    'usc-modified': dict(grid_nodes=41, control_samples=21),
    'logistic-chaos': dict(grid_nodes=41, control_samples=21),
    'rotation-2d': dict(grid_nodes=11, control_samples=11),
    'lq-discounted': dict(grid_nodes=41, control_samples=21, gamma=1.0),
    'lq-discounted-0.9': dict(grid_nodes=41, control_samples=21, gamma=0.9),
}

UNDISCOUNTED = [[name] for name in sorted(COARSE)
                if name != 'lq-discounted-0.9']
ALL = [[name] for name in sorted(COARSE)]

# Successors land on nodes, so T is a minimum over node values.
NODE_ALIGNED = [['pwl-zero-avg'], ['pwl-shifted'], ['nonunique-eps'],
                ['two-policies']]


@functools.lru_cache(maxsize=None)
def coarse(name):
    overrides = dict(COARSE[name])
    problem = 'lq-discounted' if name.startswith('lq-discounted') else name
    return builtin(problem, **overrides)


def random_functions(spec, seed=0):
    rng = np.random.RandomState(seed)
    for _ in range(SAMPLES):
        yield GridFunction(spec.grid, rng.uniform(-1, 1, spec.grid.size))


def T(spec, psi):
    return apply_T(spec, psi)[0]


class TestOperatorLaws(unittest.TestCase):
    @parameterized.expand(ALL)
    def test_monotone(self, name):
        spec = coarse(name)
        rng = np.random.RandomState(1)
        for a in random_functions(spec):
            b = a + GridFunction(spec.grid,
                                 rng.uniform(0, 1, spec.grid.size))
            self.assertTrue(np.all(T(spec, a).values <= T(spec, b).values +
                                   TOL))

    @parameterized.expand(ALL)
    def test_translation(self, name):
        spec = coarse(name)
        for a in random_functions(spec):
            ta = T(spec, a)
            for c in (-3.0, 0.1, 7.0):
                self.assertLessEqual(
                    T(spec, a + c).sup_distance(ta + spec.discount * c), TOL)

    @parameterized.expand(ALL)
    def test_concave(self, name):
        spec = coarse(name)
        functions = list(random_functions(spec))
        for a, b in zip(functions, functions[1:]):
            for theta in (0.25, 0.5):
                mixed = T(spec, a * theta + b * (1 - theta))
                bound = T(spec, a) * theta + T(spec, b) * (1 - theta)
                self.assertTrue(np.all(mixed.values >= bound.values - TOL))

    @parameterized.expand(ALL)
    def test_min_max(self, name):
        spec = coarse(name)
        functions = list(random_functions(spec))
        for a, b in zip(functions, functions[1:]):
            ta, tb = T(spec, a), T(spec, b)
            self.assertTrue(
                np.all(
                    T(spec, a.maximum(b)).values >=
                    ta.maximum(tb).values - TOL))
            self.assertTrue(
                np.all(
                    T(spec, a.minimum(b)).values <=
                    ta.minimum(tb).values + TOL))

    @parameterized.expand(NODE_ALIGNED)
    def test_min_commutes(self, name):
        spec = coarse(name)
        functions = list(random_functions(spec))
        for a, b in zip(functions, functions[1:]):
            expected = T(spec, a).minimum(T(spec, b))
            self.assertLessEqual(
                T(spec, a.minimum(b)).sup_distance(expected), 1e-12)

    @parameterized.expand(ALL)
    def test_non_expansive(self, name):
        spec = coarse(name)
        functions = list(random_functions(spec))
        for a, b in zip(functions, functions[1:]):
            ta, tb = T(spec, a), T(spec, b)
            self.assertLessEqual(
                ta.sup_distance(tb), spec.discount * a.sup_distance(b) + TOL)
            self.assertLessEqual(
                shift_pair(ta, tb).d, shift_pair(a, b).d + TOL)

    @parameterized.expand(ALL)
    def test_argmin_deterministic(self, name):
        spec = coarse(name)
        psi = next(random_functions(spec))
        _, first = apply_T(spec, psi)
        _, second = apply_T(spec, psi)
        self.assertTrue(np.array_equal(first.values, second.values))


class TestShiftedLaws(unittest.TestCase):
    @parameterized.expand(UNDISCOUNTED)
    def test_translation(self, name):
        spec = coarse(name)
        for a in random_functions(spec):
            for apply in (apply_T_hat, apply_T_check):
                self.assertLessEqual(
                    apply(spec, a + 3.7).sup_distance(apply(spec, a) + 3.7),
                    TOL)

    @parameterized.expand(UNDISCOUNTED)
    def test_monotone_chains(self, name):
        spec = coarse(name)
        psi = next(random_functions(spec, 3))
        for apply, direction in ((apply_T_hat, 'nonincreasing'),
                                 (apply_T_check, 'nondecreasing')):
            chain = [psi]
            for _ in range(10):
                chain.append(apply(spec, chain[-1]))
            self.assertTrue(is_monotone(chain, direction, slack=0.0))

    @parameterized.expand(UNDISCOUNTED)
    def test_trace_invariants(self, name):
        spec = coarse(name)
        psi = next(random_functions(spec, 4))
        for operator in ('t-hat', 't-check'):
            _, trace = iterate(spec, psi, operator,
                               IterationOptions(max_iter=100))
            self.assertTrue(np.all(np.diff(trace.column('W_k')) <= TOL))
            self.assertTrue(np.all(np.diff(trace.column('max_diff')) <= TOL))
            self.assertTrue(
                np.all(np.diff(trace.column('min_diff')) >= -TOL))

    @parameterized.expand(NODE_ALIGNED)
    def test_rotated_hat(self, name):
        spec = coarse(name)
        rotated = rotated_cost(spec)
        lam = GridFunction.from_expr(spec.grid, spec.storage)
        for psi in random_functions(spec, 5):
            self.assertLessEqual(
                apply_T_hat(rotated, psi).sup_distance(
                    apply_T_hat(spec, psi - lam) + lam), TOL)


class TestFamilies(unittest.TestCase):
    def test_range_of_extrema(self):
        spec = coarse('pwl-zero-avg')
        rng = np.random.RandomState(6)
        for _ in range(5):
            family = [
                GridFunction(spec.grid,
                             rng.uniform(-1, 1, spec.grid.size) * scale)
                for scale in rng.uniform(0.1, 3, 4)
            ]
            widest = max(f.range() for f in family)
            upper = functools.reduce(lambda a, b: a.maximum(b), family)
            lower = functools.reduce(lambda a, b: a.minimum(b), family)
            self.assertLessEqual(upper.range(), widest)
            self.assertLessEqual(lower.range(), widest)


class TestReferenceBounds(unittest.TestCase):
    def setUp(self):
        self.spec = coarse('two-policies')
        self.reference = self.spec.candidate('psi1')

    def test_growth(self):
        spec = coarse('pwl-shifted')
        report, _ = iterate(spec, GridFunction.constant(spec.grid, 0.0))
        ref = report.psi.values
        fit = residual_shifted_BE(spec, report.psi)
        # T ref = ref - shift within fit.residual on every node.
        shift = -fit.c
        self.assertGreater(shift, 3.0)
        slack = fit.residual
        for psi in random_functions(spec, 7):
            diff = psi.values - ref
            for k, values in enumerate(finite_horizon_values(spec, psi, 50)):
                drift = ref - k * shift
                tol = 1e-7 + k * slack
                self.assertTrue(
                    np.all(values.values <= drift + np.max(diff) + tol), k)
                self.assertTrue(
                    np.all(values.values >= drift + np.min(diff) - tol), k)

    def test_hat_range(self):
        for psi in random_functions(self.spec, 8):
            bound = self.reference.range() + (psi - self.reference).range()
            values = psi
            for _ in range(30):
                values = apply_T_hat(self.spec, values)
                self.assertLessEqual(values.range(), bound + 1e-7)

    @parameterized.expand([
        ['two-policies', 'psi1'],
        ['two-policies', 'psi-min'],
        ['nonunique-eps', 'psi-alpha-0.3'],
    ])
    def test_fixed_point_equivalence(self, name, label):
        spec = coarse(name)
        psi = spec.candidate(label)
        self.assertLessEqual(residual_shifted_BE(spec, psi).residual, 1e-8)
        self.assertLessEqual(apply_T_hat(spec, psi).sup_distance(psi), 1e-7)
        self.assertLessEqual(apply_T_check(spec, psi).sup_distance(psi), 1e-7)

    def test_alpha_invariance(self):
        spec = builtin('pwl-shifted', grid_nodes=81, control_samples=41)
        report, _ = iterate(spec, GridFunction.constant(spec.grid, 0.0))
        bound = max(1e-8, 2 * report.residual)
        for alpha in (0.25, 0.75):
            for mode in ('min', 'max'):
                shifted = apply_alpha_shift(spec, report.psi, alpha, mode)
                self.assertLessEqual(
                    shifted.sup_distance(report.psi), bound + 1e-12)


if __name__ == "__main__":
    unittest.main()
