import os
import tempfile
import unittest

import numpy as np
from parameterized import parameterized

from shifted_dp.bellman import apply_T
from shifted_dp.catalog import builtin, builtin_names, describe
from shifted_dp.exprlang import parse
from shifted_dp.models.common import make_problem
from shifted_dp.models.discount_models import lq_equilibrium, lq_policy
from shifted_dp.models.pwl_models import PWL_KINKS
from shifted_dp.problem import ConfigError, ControlInterval, \
        GridFunction, GridMismatchError, InvarianceError, ProblemError, \
        UnknownProblemError, build_axis, build_grid, interpolation_matrix, \
        load_config, project, simulate

TEST_DATA = os.path.join(os.path.dirname(__file__), 'test_data')


def coarse(name, **overrides):
    overrides.setdefault('grid_nodes', 41)
    overrides.setdefault('control_samples', 21)
    return builtin(name, **overrides)


class TestGrid(unittest.TestCase):
    @parameterized.expand([
        ([2.0000001], [(-2, 2)], [2.0], False),
        ([2.5], [(-2, 2)], [2.0], True),
        ([-3.0, 0.5], [(-2, 2), (-1, 1)], [-2.0, 0.5], True),
        ([0.25, -0.75], [(-2, 2), (-1, 1)], [0.25, -0.75], False),
    ])
    def test_project(self, point, box, clamped, flag):
        out, exceeded = project(point, box)
        self.assertEqual(out.tolist(), clamped)
        self.assertIs(exceeded, flag)

    def test_symmetric_axis(self):
        axis = build_axis(-2.0, 2.0, 401, PWL_KINKS)
        self.assertTrue(np.all(np.diff(axis) > 0))
        self.assertEqual(axis[0], -2.0)
        self.assertEqual(axis[-1], 2.0)
        self.assertTrue(np.array_equal(axis, -axis[::-1]))
        for k in PWL_KINKS:
            self.assertIn(k, axis)

    def test_inserted_kinks(self):
        axis = build_axis(-1.0, 1.0, 4, [0.0, 0.25])
        self.assertIn(0.0, axis)
        self.assertIn(0.25, axis)
        self.assertEqual(len(axis), 6)

    def test_kink_outside_box(self):
        with self.assertRaises(ProblemError):
            build_axis(0.0, 1.0, 11, [2.0])

    def test_too_few_nodes(self):
        with self.assertRaises(ProblemError):
            build_grid([(0, 1)], 1)

    def test_degenerate_box(self):
        with self.assertRaises(ProblemError):
            build_grid([(1, 1)], 5)

    def test_2d_nodes(self):
        grid = build_grid([(0, 1), (-1, 1)], [3, 5])
        self.assertEqual(grid.shape, (3, 5))
        self.assertEqual(grid.nodes().shape, (15, 2))
        self.assertEqual(grid.nodes()[1].tolist(), [0.0, -0.5])

    def test_pwl_grid_contains_kinks(self):
        spec = builtin('pwl-zero-avg')
        axis = spec.grid.axes[0]
        for k in (-2, -1, -0.25, 0, 0.25, 1, 2):
            self.assertIn(k, axis)


class TestInterpolation(unittest.TestCase):
    def test_exact_at_nodes(self):
        grid = build_grid([(-2, 2)], 41, [[-0.25, 0.25]])
        rng = np.random.RandomState(0)
        gf = GridFunction(grid, rng.uniform(-1, 1, grid.size))
        self.assertTrue(np.array_equal(gf.interpolate_many(grid.nodes()),
                                       gf.values))

    def test_exact_at_nodes_2d(self):
        grid = build_grid([(-1, 1), (-1, 1)], 7)
        rng = np.random.RandomState(1)
        gf = GridFunction(grid, rng.uniform(-1, 1, grid.size))
        self.assertTrue(np.array_equal(gf.interpolate_many(grid.nodes()),
                                       gf.values))

    def test_weights(self):
        grid = build_grid([(-1, 1), (-1, 1)], 5)
        rng = np.random.RandomState(2)
        points = rng.uniform(-1, 1, (50, 2))
        m = interpolation_matrix(grid, points)
        self.assertTrue(np.all(m.data >= 0))
        self.assertTrue(np.allclose(np.asarray(m.sum(axis=1)).ravel(), 1.0))

    def test_monotone(self):
        grid = build_grid([(0, 1)], 11)
        rng = np.random.RandomState(3)
        low = GridFunction(grid, rng.uniform(-1, 1, grid.size))
        high = low + GridFunction(grid, rng.uniform(0, 1, grid.size))
        points = rng.uniform(0, 1, (100, 1))
        self.assertTrue(
            np.all(
                high.interpolate_many(points) >= low.interpolate_many(points)))

    def test_piecewise_linear_cost_exact(self):
        spec = builtin('pwl-zero-avg')
        nodes = spec.grid.nodes()
        samples = GridFunction(spec.grid,
                               spec.cost.evaluate_many([nodes[:, 0]], 0.0))
        rng = np.random.RandomState(4)
        for x in rng.uniform(-2, 2, 100):
            self.assertAlmostEqual(
                samples.interpolate([x]), spec.evaluate_cost([x], 0.0),
                delta=1e-12)

    def test_upper_node(self):
        grid = build_grid([(0, 1)], 5)
        gf = GridFunction.from_expr(grid, 'x1')
        self.assertEqual(gf.interpolate_many([[0.3]], 'upper-node')[0], 0.5)
        self.assertEqual(gf.interpolate_many([[0.5]], 'upper-node')[0], 0.5)


class TestGridFunction(unittest.TestCase):
    def test_non_finite(self):
        grid = build_grid([(0, 1)], 3)
        with self.assertRaises(ProblemError):
            GridFunction(grid, [0.0, float('nan'), 1.0])

    def test_grid_mismatch(self):
        a = GridFunction.constant(build_grid([(0, 1)], 3), 1.0)
        b = GridFunction.constant(build_grid([(0, 1)], 4), 1.0)
        with self.assertRaises(GridMismatchError):
            a - b

    def test_arithmetic(self):
        grid = build_grid([(0, 1)], 3)
        a = GridFunction.from_expr(grid, 'x1')
        self.assertEqual((2 * a + 1).values.tolist(), [1.0, 2.0, 3.0])
        self.assertEqual((1 - a).values.tolist(), [1.0, 0.5, 0.0])
        self.assertEqual(a.minimum(0.25).values.tolist(), [0.0, 0.25, 0.25])
        self.assertEqual(a.range(), 1.0)

    def test_read_only(self):
        gf = GridFunction.constant(build_grid([(0, 1)], 3), 1.0)
        with self.assertRaises(ValueError):
            gf.values[0] = 2.0


class TestControlInterval(unittest.TestCase):
    def test_single_sample(self):
        spec = builtin('cubic-autonomous')
        self.assertEqual(spec.sampled().controls.shape, (spec.grid.size, 1))

    def test_mandatory_sampled(self):
        spec = builtin('logistic-chaos')
        self.assertTrue(np.all(np.any(spec.sampled().controls == 3.6,
                                      axis=1)))

    def test_empty_interval(self):
        interval = ControlInterval('1', '0')
        with self.assertRaises(ProblemError):
            interval.sample([np.zeros(3)])

    def test_bounds_depend_on_u(self):
        with self.assertRaises(ProblemError):
            ControlInterval('u', '1')

    def test_clip(self):
        interval = ControlInterval('-1 - x1', '1 - x1')
        self.assertEqual(interval.clip([0.5], 3.0), 0.5)
        self.assertEqual(interval.clip([0.5], -3.0), -1.5)


class TestBuiltins(unittest.TestCase):
    def test_names(self):
        names = builtin_names()
        self.assertEqual(names, sorted(names))
        self.assertEqual(len(names), 11)
        self.assertEqual(describe('pwl-zero-avg')[1], 'period-2')

    @parameterized.expand([[name] for name in builtin_names()])
    def test_control_invariance(self, name):
        spec = coarse(name)
        sampled = spec.sampled()
        self.assertEqual(sampled.transition.shape,
                         (sampled.costs.size, spec.grid.size))
        self.assertEqual(spec.tag, describe(name)[1])

    def test_unknown(self):
        with self.assertRaises(UnknownProblemError):
            builtin('no-such-problem')

    def test_bad_override(self):
        with self.assertRaises(ConfigError):
            builtin('pwl-zero-avg', eps=0.2)

    def test_bad_eps(self):
        with self.assertRaises(ConfigError):
            builtin('nonunique-eps', eps=1.5)

    def test_examples(self):
        spec = builtin('pwl-zero-avg')
        self.assertEqual(spec.evaluate_cost([1.0], 0.0), -0.25)
        spec = builtin('logistic-chaos')
        self.assertEqual(spec.evaluate_dynamics([0.5], 4.0), (1.0, ))
        spec = builtin('rotation-2d', grid_nodes=11)
        fx = spec.evaluate_dynamics([0.3, 0.7], 0.0)
        self.assertAlmostEqual(fx[0], 0.7, delta=1e-15)
        self.assertAlmostEqual(fx[1], -0.3, delta=1e-15)

    def test_candidates(self):
        spec = builtin('two-policies')
        psi1 = spec.candidate('psi1')
        self.assertEqual(psi1.grid, spec.grid)
        with self.assertRaises(ProblemError):
            spec.candidate('psi3')

    def test_successor_term(self):
        spec = builtin('logistic-chaos', grid_nodes=41, control_samples=21)
        plain = spec.replace(successor_term=None).sampled()
        sampled = spec.sampled()
        g = sampled.nodes[:, 0]**2
        reread = sampled.costs.reshape(-1) + sampled.transition @ g
        exact = plain.costs.reshape(-1) + plain.successors[:, 0]**2
        self.assertLessEqual(np.max(np.abs(reread - exact)), 1e-12)

    def test_storage_lookup(self):
        spec = builtin('pwl-zero-avg')
        self.assertEqual(spec.resolve_storage('lambda1'),
                         spec.storage_function())
        self.assertEqual(
            spec.resolve_storage('x1^2').evaluate([2.0]), 4.0)
        with self.assertRaises(ProblemError):
            spec.resolve_storage('lambda9 +')


class TestConfig(unittest.TestCase):
    def test_matches_builtin(self):
        spec = load_config(os.path.join(TEST_DATA, 'pwl_zero_avg.json'))
        reference = builtin('pwl-zero-avg')
        self.assertTrue(spec.grid.same_as(reference.grid))
        self.assertEqual(spec.shift_c, 0.0)

        rng = np.random.RandomState(5)
        values = rng.uniform(-1, 1, spec.grid.size)
        got, _ = apply_T(spec, GridFunction(spec.grid, values))
        expected, _ = apply_T(reference, GridFunction(reference.grid, values))
        self.assertLessEqual(np.max(np.abs(got.values - expected.values)),
                             1e-12)

    def test_invariance_violation(self):
        with self.assertRaises(InvarianceError) as cm:
            load_config(os.path.join(TEST_DATA, 'escapes_box.json'))
        self.assertGreater(cm.exception.distance, 1.0)
        self.assertGreater(cm.exception.count, 0)

    def test_missing_key(self):
        with self.assertRaises(ConfigError) as cm:
            load_config(os.path.join(TEST_DATA, 'missing_cost.json'))
        self.assertIn('cost', str(cm.exception))

    def test_bad_expression(self):
        with self.assertRaises(ConfigError) as cm:
            load_config(os.path.join(TEST_DATA, 'bad_expression.json'))
        self.assertIn('dynamics[0]', str(cm.exception))

    def test_invalid_json(self):
        temp_dir = tempfile.mkdtemp(prefix="test_problem_", dir='/tmp')
        path = os.path.join(temp_dir, 'broken.json')
        with open(path, 'w') as f:
            f.write('{"dim": 1,')
        with self.assertRaises(ConfigError):
            load_config(path)

    def test_successor_term_key(self):
        temp_dir = tempfile.mkdtemp(prefix="test_problem_", dir='/tmp')
        path = os.path.join(temp_dir, 'telescoping.json')
        with open(path, 'w') as f:
            f.write('{"dim": 1, "box": [[0, 1]], "dynamics": ["x1/2"], '
                    '"cost": "x1^2 - (x1/2)^2", '
                    '"control": {"lo": "0", "hi": "0"}, '
                    '"grid": {"nodes": [11]}, "successor_term": "x1^2"}')
        spec = load_config(path)
        self.assertEqual(spec.successor_term, parse('x1^2', dim=1))
        tpsi, _ = apply_T(spec, GridFunction.from_expr(spec.grid, parse(
            'x1^2', dim=1)))
        x = spec.grid.nodes()[:, 0]
        self.assertLessEqual(np.max(np.abs(tpsi.values - x**2)), 1e-12)

    def test_unknown_key(self):
        temp_dir = tempfile.mkdtemp(prefix="test_problem_", dir='/tmp')
        path = os.path.join(temp_dir, 'extra.json')
        with open(path, 'w') as f:
            f.write('{"dim": 1, "box": [[0, 1]], "dynamics": ["x1"], '
                    '"cost": "0", "control": {"lo": "0", "hi": "0"}, '
                    '"colour": "red"}')
        with self.assertRaises(ConfigError) as cm:
            load_config(path)
        self.assertIn('colour', str(cm.exception))


class TestSimulate(unittest.TestCase):
    def test_alternating(self):
        spec = builtin('pwl-zero-avg')
        traj = simulate(spec, 0.0, [1.0], 100)
        self.assertEqual(traj.states.shape, (101, 1))
        self.assertEqual(traj.states[1, 0], -1.0)
        self.assertEqual(traj.states[2, 0], 1.0)
        self.assertEqual(traj.costs[0], -0.25)
        self.assertEqual(traj.costs[1], 0.25)
        self.assertEqual(traj.running_average[-1], 0.0)

    def test_logistic_average(self):
        spec = builtin('logistic-chaos')
        traj = simulate(spec, 3.6, [0.5], 10000)
        self.assertLessEqual(abs(traj.running_average[-1]), 1e-3)

    @parameterized.expand([[0.5, 1.0], [-0.5, -1.0]])
    def test_cubic(self, x0, limit):
        spec = builtin('cubic-autonomous')
        traj = simulate(spec, 0.0, [x0], 200)
        self.assertAlmostEqual(traj.states[-1, 0], limit, delta=1e-9)

    def test_lq_closed_form_policy(self):
        gamma = 0.9
        spec = builtin('lq-discounted', gamma=gamma)
        traj = simulate(spec, lambda x: lq_policy(gamma, x[0]), [0.0], 200)
        self.assertAlmostEqual(
            traj.states[-1, 0], lq_equilibrium(gamma), delta=1e-6)

    def test_expression_policy(self):
        spec = builtin('two-policies')
        traj = simulate(spec, '-1 - x1', [0.5], 3)
        self.assertEqual(traj.states[:, 0].tolist(), [0.5, -1.0, -1.0, -1.0])

    def test_control_clipped(self):
        spec = builtin('two-policies')
        traj = simulate(spec, 10.0, [0.0], 1)
        self.assertEqual(traj.controls[0], 1.0)

    def test_bad_start(self):
        spec = builtin('two-policies')
        with self.assertRaises(ProblemError):
            simulate(spec, 0.0, [3.0], 10)
        with self.assertRaises(ProblemError):
            simulate(spec, 0.0, [0.0], 0)


class TestMakeProblem(unittest.TestCase):
    def test_dimension_mismatch(self):
        with self.assertRaises(ProblemError):
            make_problem(
                'bad', [(0, 1)], ['x1', 'x1'], '0', ('0', '0'), grid_nodes=3)

    def test_discount_range(self):
        with self.assertRaises(ProblemError):
            make_problem(
                'bad', [(0, 1)], ['x1'],
                '0', ('0', '0'),
                grid_nodes=3,
                discount=1.5)


if __name__ == "__main__":
    unittest.main()
