""" Small arithmetic expression language.

Dynamics, stage costs, storage functions and control bounds are written as
text in problem configuration files, e.g.

    min(abs(x1-1)-0.25, abs(x1+1)+0.25) + abs(u)

Grammar (whitespace is insignificant):

    expr  := term (("+"|"-") term)*
    term  := unary (("*"|"/") unary)*
    unary := "-" unary | power
    power := atom ("^" unary)?
    atom  := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"

"^" binds tighter than unary minus (so -2^2 is -4) and is right
associative (so 2^3^2 is 512).  Identifiers are the state variables x1..x9,
the scalar input u, and the functions abs, sin, cos, sqrt, log, exp, min and
max.  min and max take two or more arguments.

Parsed trees are immutable.  Evaluation is vectorised over numpy arrays so a
whole grid of (x, u) samples is evaluated in one call.

>>> parse('2^3^2').evaluate([0.0])
512.0
>>> parse('-2^2').evaluate([0.0])
-4.0
>>> parse('min(x1, 2*x1)').evaluate([-1.0])
-2.0

"""
import re
from collections import namedtuple

import numpy as np

STATE_VARIABLE_RE = re.compile(r'^x([1-9])$')
INPUT_VARIABLE = 'u'

UNARY_FUNCTIONS = ('abs', 'sin', 'cos', 'sqrt', 'log', 'exp')
NARY_FUNCTIONS = ('min', 'max')

TOKEN_RE = re.compile(
    r'(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)'
    r'|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)'
    r'|(?P<op>[-+*/^(),])'
    r'|(?P<space>\s+)')

Token = namedtuple('Token', 'kind text offset')

START_OF_OPERAND = ('number', 'identifier', '(', '-')


class ExprError(ValueError):
    """ Base class of every error raised by the expression language. """
    pass


class ExprSyntaxError(ExprError):
    """ Source text is not in the grammar.

    Args:
        offset (int): Byte offset (UTF-8) of the offending token.
        expected (tuple of str): Token kinds that would have been accepted.

    """

    def __init__(self, source, offset, found, expected):
        self.source = source
        self.offset = offset
        self.found = found
        self.expected = tuple(sorted(set(expected)))
        super(ExprSyntaxError, self).__init__(
            'syntax error at byte {}: found {}, expected one of {}'.format(
                offset, found, ', '.join(self.expected)))


class UnknownIdentifierError(ExprError):
    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super(UnknownIdentifierError, self).__init__(
            'unknown identifier "{}" at byte {}'.format(name, offset))


class ArityError(ExprError):
    def __init__(self, function, count, offset):
        self.function = function
        self.count = count
        self.offset = offset
        super(ArityError, self).__init__(
            '{}() at byte {} called with {} argument(s)'.format(
                function, offset, count))


class ExprDomainError(ExprError):
    """ Evaluation left the real domain of a subexpression.

    Args:
        subexpression (Expr): The node whose evaluation failed.
        reason (str): Human readable reason.

    """

    def __init__(self, subexpression, reason):
        self.subexpression = subexpression
        self.reason = reason
        super(ExprDomainError, self).__init__('{} in "{}"'.format(
            reason, subexpression.to_string()))


class Expr(object):
    """ Base class of expression tree nodes.

    Nodes are immutable and compare structurally.
    """
    __slots__ = ()

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def __repr__(self):
        return '{}({!r})'.format(type(self).__name__, self.to_string())

    def __str__(self):
        return self.to_string()

    def to_string(self):
        """ Canonical fully parenthesised form, which re-parses to an equal
        tree. """
        raise NotImplementedError

    def children(self):
        return ()

    def iter_variables(self):
        """ Yield the name of every variable referenced, with repeats. """
        for child in self.children():
            for name in child.iter_variables():
                yield name

    def variables(self):
        return frozenset(self.iter_variables())

    def state_dimension(self):
        """ Largest state index referenced (0 when no x variable is used). """
        dim = 0
        for name in self.iter_variables():
            m = STATE_VARIABLE_RE.match(name)
            if m:
                dim = max(dim, int(m.group(1)))
        return dim

    def substitute(self, mapping):
        """ Replace variables by expressions.

        Arguments
        ---------
        mapping : dict of str to Expr

        Returns
        -------
        Expr with every variable found in mapping replaced.

        >>> parse('abs(x1) + u').substitute({'x1': parse('u - 1')}).to_string()
        '(abs((u - 1.0)) + u)'

        """
        raise NotImplementedError

    def _evaluate(self, env):
        raise NotImplementedError

    def evaluate_many(self, xs, u=0.0, extra=None):
        """ Vectorised evaluation.

        Arguments
        ---------
        xs : sequence of array_like
            Value of x1, x2, ... in order; arrays broadcast against each
            other and against u.
        u : array_like
            Value of the input.
        extra : dict of str to array_like, optional
            Values of additional variables (e.g. "r").

        Returns
        -------
        numpy.ndarray of float64, the broadcast shape of the inputs.

        Raises
        ------
        ExprDomainError if any element leaves the real domain or is not
        finite.

        """
        env = make_environment(xs, u, extra)
        with np.errstate(all='ignore'):
            value = np.asarray(self._evaluate(env), dtype=np.float64)
        shape = np.broadcast_arrays(*env.values())[0].shape
        return np.broadcast_to(value, shape).astype(np.float64)

    def evaluate(self, x, u=0.0, extra=None):
        """ Evaluate at a single point and return a float. """
        return float(
            self.evaluate_many([float(v) for v in x], float(u), extra))


def make_environment(xs, u, extra=None):
    env = {}
    for idx, value in enumerate(xs):
        env['x{}'.format(idx + 1)] = np.asarray(value, dtype=np.float64)
    env[INPUT_VARIABLE] = np.asarray(u, dtype=np.float64)
    if extra:
        for name, value in extra.items():
            env[name] = np.asarray(value, dtype=np.float64)
    return env


def _check_finite(node, value):
    if not np.all(np.isfinite(value)):
        raise ExprDomainError(node, 'non-finite result')
    return value


class Constant(Expr):
    __slots__ = ('value', )

    def __init__(self, value):
        value = float(value)
        if not np.isfinite(value):
            raise ExprError('constant {!r} is not finite'.format(value))
        object.__setattr__(self, 'value', value)

    def __setattr__(self, name, value):
        raise AttributeError('Expr nodes are immutable')

    def _key(self):
        return (self.value, )

    def to_string(self):
        # Negative literals are parenthesised; the parser folds them back.
        if np.signbit(self.value):
            return '({!r})'.format(self.value)
        return repr(self.value)

    def substitute(self, mapping):
        return self

    def _evaluate(self, env):
        return np.float64(self.value)


class Variable(Expr):
    __slots__ = ('name', )

    def __init__(self, name):
        object.__setattr__(self, 'name', name)

    def __setattr__(self, name, value):
        raise AttributeError('Expr nodes are immutable')

    def _key(self):
        return (self.name, )

    def to_string(self):
        return self.name

    def iter_variables(self):
        yield self.name

    def substitute(self, mapping):
        return mapping.get(self.name, self)

    def _evaluate(self, env):
        if self.name not in env:
            raise ExprError('no value bound for variable "{}"'.format(
                self.name))
        return env[self.name]


class UnaryOp(Expr):
    """ Negation or one of the single argument functions.

    Args:
        op (str): "neg" or a name from UNARY_FUNCTIONS.
        operand (Expr): Argument.

    """
    __slots__ = ('op', 'operand')

    def __init__(self, op, operand):
        assert op == 'neg' or op in UNARY_FUNCTIONS, op
        object.__setattr__(self, 'op', op)
        object.__setattr__(self, 'operand', operand)

    def __setattr__(self, name, value):
        raise AttributeError('Expr nodes are immutable')

    def _key(self):
        return (self.op, self.operand)

    def children(self):
        return (self.operand, )

    def to_string(self):
        if self.op == 'neg':
            return '(-{})'.format(self.operand.to_string())
        return '{}({})'.format(self.op, self.operand.to_string())

    def substitute(self, mapping):
        return UnaryOp(self.op, self.operand.substitute(mapping))

    def _evaluate(self, env):
        a = self.operand._evaluate(env)
        if self.op == 'neg':
            return -a
        elif self.op == 'abs':
            return np.abs(a)
        elif self.op == 'sin':
            return np.sin(a)
        elif self.op == 'cos':
            return np.cos(a)
        elif self.op == 'sqrt':
            if np.any(a < 0):
                raise ExprDomainError(self, 'square root of a negative value')
            return np.sqrt(a)
        elif self.op == 'log':
            if np.any(a <= 0):
                raise ExprDomainError(self,
                                      'logarithm of a non-positive value')
            return np.log(a)
        else:
            assert self.op == 'exp', self.op
            return _check_finite(self, np.exp(a))


class BinaryOp(Expr):
    __slots__ = ('op', 'left', 'right')

    def __init__(self, op, left, right):
        assert op in '+-*/^', op
        object.__setattr__(self, 'op', op)
        object.__setattr__(self, 'left', left)
        object.__setattr__(self, 'right', right)

    def __setattr__(self, name, value):
        raise AttributeError('Expr nodes are immutable')

    def _key(self):
        return (self.op, self.left, self.right)

    def children(self):
        return (self.left, self.right)

    def to_string(self):
        return '({} {} {})'.format(self.left.to_string(), self.op,
                                   self.right.to_string())

    def substitute(self, mapping):
        return BinaryOp(self.op, self.left.substitute(mapping),
                        self.right.substitute(mapping))

    def _evaluate(self, env):
        a = self.left._evaluate(env)
        b = self.right._evaluate(env)
        if self.op == '+':
            return _check_finite(self, a + b)
        elif self.op == '-':
            return _check_finite(self, a - b)
        elif self.op == '*':
            return _check_finite(self, a * b)
        elif self.op == '/':
            if np.any(b == 0):
                raise ExprDomainError(self, 'division by zero')
            return _check_finite(self, a / b)
        else:
            a, b = np.broadcast_arrays(a, b)
            if np.any((a < 0) & (b != np.floor(b))):
                raise ExprDomainError(
                    self, 'negative base with a non-integer exponent')
            if np.any((a == 0) & (b < 0)):
                raise ExprDomainError(self, 'zero to a negative power')
            return _check_finite(self, np.power(a, b))


class NaryOp(Expr):
    """ min(...) or max(...) over two or more arguments. """
    __slots__ = ('op', 'operands')

    def __init__(self, op, operands):
        assert op in NARY_FUNCTIONS, op
        operands = tuple(operands)
        assert len(operands) >= 2, operands
        object.__setattr__(self, 'op', op)
        object.__setattr__(self, 'operands', operands)

    def __setattr__(self, name, value):
        raise AttributeError('Expr nodes are immutable')

    def _key(self):
        return (self.op, self.operands)

    def children(self):
        return self.operands

    def to_string(self):
        return '{}({})'.format(
            self.op, ', '.join(o.to_string() for o in self.operands))

    def substitute(self, mapping):
        return NaryOp(self.op, (o.substitute(mapping) for o in self.operands))

    def _evaluate(self, env):
        values = [o._evaluate(env) for o in self.operands]
        reduce_fn = np.minimum if self.op == 'min' else np.maximum
        out = values[0]
        for v in values[1:]:
            out = reduce_fn(out, v)
        return out


def tokenize(source):
    """ Split source into tokens, ending with an "end" token. """
    offset = 0
    pos = 0
    while pos < len(source):
        m = TOKEN_RE.match(source, pos)
        if m is None:
            raise ExprSyntaxError(source, _byte_offset(source, pos),
                                  repr(source[pos]), START_OF_OPERAND)

        kind = m.lastgroup
        text = m.group(kind)
        if kind == 'op':
            kind = text
        if kind != 'space':
            yield Token(
                kind=kind if kind != 'ident' else 'identifier',
                text=text,
                offset=_byte_offset(source, pos))
        pos = m.end()

    yield Token(kind='end', text='', offset=len(source.encode('utf-8')))


def _byte_offset(source, pos):
    return len(source[:pos].encode('utf-8'))


class _Parser(object):
    def __init__(self, source, dim, extra_variables):
        self.source = source
        self.dim = dim
        self.extra_variables = frozenset(extra_variables)
        self.tokens = list(tokenize(source))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected):
        tok = self.peek()
        found = 'end of input' if tok.kind == 'end' else repr(tok.text)
        raise ExprSyntaxError(self.source, tok.offset, found, expected)

    def expect(self, kind, expected=None):
        if self.peek().kind != kind:
            self.fail(expected or (kind, ))
        return self.advance()

    def parse(self):
        tree = self.expr()
        if self.peek().kind != 'end':
            self.fail(('+', '-', '*', '/', '^', 'end'))
        return tree

    def expr(self):
        left = self.term()
        while self.peek().kind in ('+', '-'):
            op = self.advance().kind
            left = BinaryOp(op, left, self.term())
        return left

    def term(self):
        left = self.unary()
        while self.peek().kind in ('*', '/'):
            op = self.advance().kind
            left = BinaryOp(op, left, self.unary())
        return left

    def unary(self):
        if self.peek().kind == '-':
            self.advance()
            operand = self.unary()
            if isinstance(operand, Constant):
                return Constant(-operand.value)
            return UnaryOp('neg', operand)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().kind == '^':
            self.advance()
            # Right associative, exponent may carry its own sign.
            return BinaryOp('^', base, self.unary())
        return base

    def atom(self):
        tok = self.peek()
        if tok.kind == 'number':
            self.advance()
            return Constant(float(tok.text))
        elif tok.kind == '(':
            self.advance()
            inner = self.expr()
            self.expect(')', (')', '+', '-', '*', '/', '^'))
            return inner
        elif tok.kind == 'identifier':
            self.advance()
            if self.peek().kind == '(':
                return self.call(tok)
            return self.variable(tok)
        else:
            self.fail(START_OF_OPERAND)

    def variable(self, tok):
        name = tok.text
        if name == INPUT_VARIABLE or name in self.extra_variables:
            return Variable(name)

        m = STATE_VARIABLE_RE.match(name)
        if m is None or (self.dim is not None and int(m.group(1)) > self.dim):
            raise UnknownIdentifierError(name, tok.offset)

        return Variable(name)

    def call(self, tok):
        name = tok.text
        if name not in UNARY_FUNCTIONS and name not in NARY_FUNCTIONS:
            raise UnknownIdentifierError(name, tok.offset)

        self.expect('(')
        args = [self.expr()]
        while self.peek().kind == ',':
            self.advance()
            args.append(self.expr())
        self.expect(')', (',', ')', '+', '-', '*', '/', '^'))

        if name in UNARY_FUNCTIONS:
            if len(args) != 1:
                raise ArityError(name, len(args), tok.offset)
            return UnaryOp(name, args[0])
        else:
            if len(args) < 2:
                raise ArityError(name, len(args), tok.offset)
            return NaryOp(name, args)


def parse(source, dim=None, extra_variables=()):
    """ Parse source text into an Expr.

    Arguments
    ---------
    source : str
    dim : int, optional
        Declared state dimension; x indices above it are rejected.
    extra_variables : iterable of str
        Additional variable names accepted (e.g. "r" for a comparison
        function of a radius).

    >>> parse('abs(x1-1) - 0.25').evaluate([1.0])
    -0.25
    >>> parse('x1 + 2 * x1').to_string()
    '(x1 + (2.0 * x1))'

    """
    if not isinstance(source, str):
        raise ExprError('expression must be a string, got {!r}'.format(source))
    return _Parser(source, dim, extra_variables).parse()


def constant(value):
    return Constant(value)


def as_expr(value, dim=None, extra_variables=()):
    """ Accept an Expr, a number or source text and return an Expr. """
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return Constant(value)
    return parse(value, dim=dim, extra_variables=extra_variables)
