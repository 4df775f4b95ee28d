import random
import unittest

import numpy as np
from parameterized import parameterized

from shifted_dp.exprlang import ArityError, Constant, ExprDomainError, \
        ExprError, ExprSyntaxError, UnknownIdentifierError, Variable, \
        as_expr, parse, tokenize


def random_expression(rng, depth):
    """ Fully parenthesised random text and a plain python evaluator. """
    if depth == 0 or rng.random() < 0.2:
        choice = rng.randrange(3)
        if choice == 0:
            c = rng.choice([0.25, 0.5, 1.0, 2.0, 3.0])
            return repr(c), lambda x, u, c=c: c
        elif choice == 1:
            return 'x1', lambda x, u: x
        else:
            return 'u', lambda x, u: u

    a_text, a = random_expression(rng, depth - 1)
    kind = rng.randrange(8)
    if kind == 0:
        return '(-{})'.format(a_text), lambda x, u: -a(x, u)
    elif kind == 1:
        return 'abs({})'.format(a_text), lambda x, u: abs(a(x, u))
    elif kind == 2:
        return '({} / 2.0)'.format(a_text), lambda x, u: a(x, u) / 2.0

    b_text, b = random_expression(rng, depth - 1)
    if kind == 3:
        return '({} + {})'.format(a_text, b_text), \
            lambda x, u: a(x, u) + b(x, u)
    elif kind == 4:
        return '({} - {})'.format(a_text, b_text), \
            lambda x, u: a(x, u) - b(x, u)
    elif kind == 5:
        return '({} * {})'.format(a_text, b_text), \
            lambda x, u: a(x, u) * b(x, u)
    elif kind == 6:
        return 'min({}, {})'.format(a_text, b_text), \
            lambda x, u: min(a(x, u), b(x, u))
    return 'max({}, {})'.format(a_text, b_text), \
        lambda x, u: max(a(x, u), b(x, u))


class TestEvaluate(unittest.TestCase):
    @parameterized.expand([
        ("abs(x1-1) - 0.25", 1.0, 0.0, -0.25),
        ("min(abs(x1-1)-0.25, abs(x1+1)+0.25) + abs(u)", 1.0, 0.0, -0.25),
        ("min(abs(x1-1)-0.25, abs(x1+1)+0.25) + abs(u)", -1.0, 0.5, 0.75),
        ("2^3^2", 0.0, 0.0, 512.0),
        ("-2^2", 0.0, 0.0, -4.0),
        ("(-2)^2", 0.0, 0.0, 4.0),
        ("2^-1", 0.0, 0.0, 0.5),
        ("1 - 2 - 3", 0.0, 0.0, -4.0),
        ("8/4/2", 0.0, 0.0, 1.0),
        ("2*3^2", 0.0, 0.0, 18.0),
        ("-x1^2", 2.0, 0.0, -4.0),
        ("3.5", 0.3, 0.2, 3.5),
        ("min(x1, 2*x1)", -1.0, 0.0, -2.0),
        ("max(x1, u, 7)", 1.0, 2.0, 7.0),
        ("sqrt(x1) + exp(0) + log(1)", 4.0, 0.0, 3.0),
        ("1.5e1 + .5", 0.0, 0.0, 15.5),
    ])
    def test_examples(self, text, x, u, expected):
        self.assertEqual(parse(text).evaluate([x], u), expected)

    def test_logistic_cost(self):
        cost = parse('x1^2 - (u*x1*(1 - x1))^2 + abs(u - 3.6)')
        self.assertAlmostEqual(cost.evaluate([0.5], 3.6), -0.56, places=12)

    def test_pure(self):
        e = parse('sin(x1)*cos(u) + x1^3')
        first = e.evaluate([0.7], 0.3)
        second = e.evaluate([0.7], 0.3)
        self.assertEqual(first, second)

    def test_broadcast(self):
        e = parse('x1 + u')
        out = e.evaluate_many([np.zeros((3, 1))], np.ones((1, 4)))
        self.assertEqual(out.shape, (3, 4))
        self.assertTrue(np.all(out == 1.0))

    def test_constant_broadcast(self):
        out = parse('2').evaluate_many([np.zeros(5)])
        self.assertEqual(out.tolist(), [2.0] * 5)

    def test_extra_variables(self):
        e = parse('r^2/2', dim=0, extra_variables=('r', ))
        self.assertEqual(e.evaluate([], extra={'r': 2.0}), 2.0)

    def test_unbound_variable(self):
        with self.assertRaises(ExprError):
            parse('x2').evaluate([1.0])


class TestDomain(unittest.TestCase):
    @parameterized.expand([
        ("sqrt(x1)", -1.0, "sqrt(x1)"),
        ("log(x1)", 0.0, "log(x1)"),
        ("1 + 1/x1", 0.0, "(1.0 / x1)"),
        ("x1^0.5", -8.0, "(x1 ^ 0.5)"),
        ("x1^-1", 0.0, "(x1 ^ (-1.0))"),
        ("exp(x1)", 1000.0, "exp(x1)"),
    ])
    def test_domain_error(self, text, x, subexpression):
        with self.assertRaises(ExprDomainError) as cm:
            parse(text).evaluate([x])
        self.assertEqual(cm.exception.subexpression.to_string(), subexpression)

    def test_negative_base_integer_exponent(self):
        self.assertEqual(parse('x1^3').evaluate([-2.0]), -8.0)


class TestParse(unittest.TestCase):
    @parameterized.expand([
        ("x1 + 2 * x1", "(x1 + (2.0 * x1))"),
        ("-x1", "(-x1)"),
        ("abs(x1)", "abs(x1)"),
        ("min(x1, u)", "min(x1, u)"),
        ("2^3^2", "(2.0 ^ (3.0 ^ 2.0))"),
        ("-2^2", "(-(2.0 ^ 2.0))"),
        ("-1.5", "(-1.5)"),
    ])
    def test_canonical(self, text, canonical):
        self.assertEqual(parse(text).to_string(), canonical)

    @parameterized.expand([
        ("min(abs(x1-1)-0.25, abs(x1+1)+0.25) + abs(u)", ),
        ("1.5*x1 - 0.5*x1^3", ),
        ("u*x1*(1 - x1)", ),
        ("-min(abs(x1 + 1) + 1/4, abs(x1 - 1) - 1/4, 2*abs(x1 + 1))", ),
        ("x2 + u - -x1", ),
        ("2^-x1^2", ),
    ])
    def test_round_trip(self, text):
        tree = parse(text)
        self.assertEqual(parse(tree.to_string()), tree)
        self.assertEqual(hash(parse(tree.to_string())), hash(tree))

    def test_random_trees(self):
        rng = random.Random(1234)
        points = [(-0.7, 0.3), (0.0, 1.0), (1.25, -2.0)]
        for _ in range(300):
            text, fn = random_expression(rng, 5)
            tree = parse(text)
            self.assertEqual(parse(tree.to_string()), tree, text)
            for x, u in points:
                expected = fn(x, u)
                got = tree.evaluate([x], u)
                self.assertLessEqual(
                    abs(got - expected), 1e-12 * max(1.0, abs(expected)), text)

    @parameterized.expand([
        ("1 +", 3),
        ("x1 $ 2", 3),
        ("(x1", 3),
        ("abs(x1", 6),
        ("x1 x1", 3),
        ("", 0),
        ("*2", 0),
    ])
    def test_syntax_error_offset(self, text, offset):
        with self.assertRaises(ExprSyntaxError) as cm:
            parse(text)
        self.assertEqual(cm.exception.offset, offset)
        self.assertTrue(cm.exception.expected)

    def test_expected_operand(self):
        with self.assertRaises(ExprSyntaxError) as cm:
            parse('1 +')
        self.assertIn('number', cm.exception.expected)
        self.assertEqual(cm.exception.found, 'end of input')

    @parameterized.expand([
        ("y", "y", 0, None),
        ("x1 + y", "y", 5, None),
        ("x2", "x2", 0, 1),
        ("foo(1)", "foo", 0, None),
        ("x0", "x0", 0, None),
    ])
    def test_unknown_identifier(self, text, name, offset, dim):
        with self.assertRaises(UnknownIdentifierError) as cm:
            parse(text, dim=dim)
        self.assertEqual(cm.exception.name, name)
        self.assertEqual(cm.exception.offset, offset)

    @parameterized.expand([
        ("min(x1)", "min", 1),
        ("max(1)", "max", 1),
        ("abs(1, 2)", "abs", 2),
        ("sqrt(x1, x1, x1)", "sqrt", 3),
    ])
    def test_arity(self, text, function, count):
        with self.assertRaises(ArityError) as cm:
            parse(text)
        self.assertEqual(cm.exception.function, function)
        self.assertEqual(cm.exception.count, count)

    def test_not_a_string(self):
        with self.assertRaises(ExprError):
            parse(3.0)

    def test_errors_are_value_errors(self):
        with self.assertRaises(ValueError):
            parse('1 +')

    def test_tokens(self):
        kinds = [t.kind for t in tokenize('min(x1, 2.5)^2')]
        self.assertEqual(kinds, [
            'identifier', '(', 'identifier', ',', 'number', ')', '^',
            'number', 'end'
        ])


class TestTree(unittest.TestCase):
    def test_immutable(self):
        tree = parse('x1 + 1')
        with self.assertRaises(AttributeError):
            tree.op = '-'
        with self.assertRaises(AttributeError):
            Constant(1.0).value = 2.0

    def test_variables(self):
        tree = parse('x1*u + abs(x2)')
        self.assertEqual(tree.variables(), frozenset(['x1', 'x2', 'u']))
        self.assertEqual(tree.state_dimension(), 2)
        self.assertEqual(parse('u + 1').state_dimension(), 0)

    def test_substitute(self):
        lam = parse('abs(x1) + x1^2')
        composed = lam.substitute({'x1': parse('-x1 + u')})
        self.assertEqual(composed.variables(), frozenset(['x1', 'u']))
        self.assertEqual(
            composed.evaluate([0.5], 2.0), lam.evaluate([-0.5 + 2.0]))

    def test_negative_constant_round_trip(self):
        self.assertEqual(parse('-1'), Constant(-1.0))
        self.assertEqual(parse(Constant(-1.0).to_string()), Constant(-1.0))
        tree = parse('x1 + u').substitute({'u': Constant(-2.5)})
        self.assertEqual(parse(tree.to_string()), tree)

    def test_structural_equality(self):
        self.assertEqual(parse('x1 + 1'), parse('x1+1.0'))
        self.assertNotEqual(parse('x1 + 1'), parse('1 + x1'))
        self.assertEqual(parse('u'), Variable('u'))

    def test_as_expr(self):
        self.assertEqual(as_expr(2), Constant(2.0))
        self.assertEqual(as_expr('x1', dim=1), Variable('x1'))
        tree = parse('u')
        self.assertIs(as_expr(tree), tree)

    def test_non_finite_constant(self):
        with self.assertRaises(ExprError):
            Constant(float('inf'))


if __name__ == "__main__":
    unittest.main()
