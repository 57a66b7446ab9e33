"""
The expression language of tensor components.

Grammar (whitespace insensitive)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' exponent)?
    exponent := '-'? INTEGER | '(' '-'? INTEGER ')'
    atom     := NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'
    FUNC     := sin | cos | exp | log

NAME resolves to a chart coordinate first, then to a bound parameter.
Parameters are substituted at parse time, so an Expr never changes after
it is built.
"""
import math
import re
from dataclasses import dataclass
from typing import Union

from .dual import DualScalar
from .exceptions import DomainError, ParseError, UnknownIdentifierError

FUNCTIONS = ('sin', 'cos', 'exp', 'log')

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str
    index: int


@dataclass(frozen=True)
class Param:
    name: str
    value: float


@dataclass(frozen=True)
class Neg:
    operand: 'Expr'


@dataclass(frozen=True)
class BinOp:
    op: str
    left: 'Expr'
    right: 'Expr'


@dataclass(frozen=True)
class Pow:
    base: 'Expr'
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: 'Expr'


Expr = Union[Num, Var, Param, Neg, BinOp, Pow, Call]


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _byte_offset(text, index):
    return len(text[:index].encode('utf-8'))


def _tokenize(text):
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise ParseError(f"unexpected character {text[position]!r}", text,
                             _byte_offset(text, position))
        if match.lastgroup != 'ws':
            tokens.append(_Token(match.lastgroup, match.group(), _byte_offset(text, position)))
        position = match.end()
    tokens.append(_Token('end', '', _byte_offset(text, len(text))))
    return tokens


class _Parser:
    def __init__(self, text, coord_names, params):
        self.text = text
        self.coord_names = tuple(coord_names)
        self.params = dict(params or {})
        self.tokens = _tokenize(text)
        self.position = 0

    @property
    def current(self):
        return self.tokens[self.position]

    def _advance(self):
        token = self.current
        self.position += 1
        return token

    def _error(self, message, token=None):
        token = token or self.current
        return ParseError(message, self.text, token.offset)

    def _describe(self, token):
        return 'end of input' if token.kind == 'end' else repr(token.text)

    def _expect(self, text):
        if self.current.text != text or self.current.kind == 'end':
            raise self._error(f"expected {text!r}, found {self._describe(self.current)}")
        return self._advance()

    def parse(self):
        node = self._expr()
        if self.current.kind != 'end':
            raise self._error(f"unexpected token {self._describe(self.current)}")
        return node

    def _expr(self):
        node = self._term()
        while self.current.text in ('+', '-') and self.current.kind == 'op':
            op = self._advance().text
            node = BinOp(op, node, self._term())
        return node

    def _term(self):
        node = self._unary()
        while self.current.text in ('*', '/') and self.current.kind == 'op':
            op = self._advance().text
            node = BinOp(op, node, self._unary())
        return node

    def _unary(self):
        if self.current.kind == 'op' and self.current.text == '-':
            self._advance()
            return Neg(self._unary())
        return self._power()

    def _power(self):
        base = self._atom()
        if self.current.kind == 'op' and self.current.text == '^':
            self._advance()
            node = Pow(base, self._exponent())
            if self.current.kind == 'op' and self.current.text == '^':
                raise self._error("chained '^' needs parentheses")
            return node
        return base

    def _exponent(self):
        parenthesized = self.current.kind == 'op' and self.current.text == '('
        if parenthesized:
            self._advance()
        sign = 1
        if self.current.kind == 'op' and self.current.text == '-':
            self._advance()
            sign = -1
        token = self.current
        if token.kind != 'number' or not token.text.isdigit():
            raise self._error(f"exponent must be an integer literal, found {self._describe(token)}")
        self._advance()
        if parenthesized:
            self._expect(')')
        return sign * int(token.text)

    def _atom(self):
        token = self.current
        if token.kind == 'number':
            value = float(token.text)
            if not math.isfinite(value):
                raise self._error(f"number {token.text!r} is out of range", token)
            self._advance()
            return Num(value)
        if token.kind == 'name':
            self._advance()
            if token.text in FUNCTIONS:
                self._expect('(')
                arg = self._expr()
                self._expect(')')
                return Call(token.text, arg)
            if token.text in self.coord_names:
                return Var(token.text, self.coord_names.index(token.text))
            if token.text in self.params:
                return Param(token.text, float(self.params[token.text]))
            raise UnknownIdentifierError(f"unknown identifier {token.text!r}", self.text, token.offset)
        if token.kind == 'op' and token.text == '(':
            self._advance()
            node = self._expr()
            self._expect(')')
            return node
        raise self._error(f"unexpected token {self._describe(token)}")


def parse(text, chart, params=None):
    """Parse `text` against the coordinates of `chart` and the bound `params`."""
    if not isinstance(text, str):
        raise ParseError(f"expression must be a string, got {type(text).__name__}", str(text), 0)
    return _Parser(text, chart.coord_names, params).parse()


def to_text(e):
    """Canonical printer; parsing its output reproduces the tree."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, (Var, Param)):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_text(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Pow):
        base = to_text(e.base)
        if isinstance(e.base, Pow):
            base = f"({base})"
        return f"{base}^{e.exponent}"
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    raise TypeError(f"Not an expression node: {e!r}")


def parameters_of(e):
    """Bound parameters appearing in `e`, as a name -> value map."""
    found = {}

    def visit(node):
        if isinstance(node, Param):
            found[node.name] = node.value
        elif isinstance(node, Neg):
            visit(node.operand)
        elif isinstance(node, BinOp):
            visit(node.left)
            visit(node.right)
        elif isinstance(node, Pow):
            visit(node.base)
        elif isinstance(node, Call):
            visit(node.arg)

    visit(e)
    return found


def relabel(e, coord_names):
    """Rename coordinate variables to the names of another chart, keeping indices."""
    if isinstance(e, Var):
        return Var(coord_names[e.index], e.index)
    if isinstance(e, Neg):
        return Neg(relabel(e.operand, coord_names))
    if isinstance(e, BinOp):
        return BinOp(e.op, relabel(e.left, coord_names), relabel(e.right, coord_names))
    if isinstance(e, Pow):
        return Pow(relabel(e.base, coord_names), e.exponent)
    if isinstance(e, Call):
        return Call(e.func, relabel(e.arg, coord_names))
    return e


def _apply_float(func, x):
    if func == 'log':
        if x <= 0.0:
            raise DomainError(f"log of nonpositive value {x}")
        return math.log(x)
    if func == 'exp':
        try:
            return math.exp(x)
        except OverflowError:
            raise DomainError(f"exp overflows at {x}") from None
    return getattr(math, func)(x)


def evaluate(e, p):
    """Plain evaluation at point `p`."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return float(p[e.index])
    if isinstance(e, Param):
        return e.value
    if isinstance(e, Neg):
        return -evaluate(e.operand, p)
    if isinstance(e, BinOp):
        left = evaluate(e.left, p)
        right = evaluate(e.right, p)
        if e.op == '+':
            return left + right
        if e.op == '-':
            return left - right
        if e.op == '*':
            return left * right
        if right == 0.0:
            raise DomainError(f"Division by zero in {to_text(e)}")
        return left / right
    if isinstance(e, Pow):
        base = evaluate(e.base, p)
        if e.exponent < 0 and base == 0.0:
            raise DomainError(f"Zero raised to negative power in {to_text(e)}")
        return base ** e.exponent
    if isinstance(e, Call):
        return _apply_float(e.func, evaluate(e.arg, p))
    raise TypeError(f"Not an expression node: {e!r}")


def eval_dual(e, p):
    """Evaluation with first partials along every chart coordinate."""
    dim = len(p)
    if isinstance(e, Num):
        return DualScalar.constant(e.value, dim)
    if isinstance(e, Var):
        return DualScalar.variable(p[e.index], e.index, dim)
    if isinstance(e, Param):
        return DualScalar.constant(e.value, dim)
    if isinstance(e, Neg):
        return -eval_dual(e.operand, p)
    if isinstance(e, BinOp):
        left = eval_dual(e.left, p)
        right = eval_dual(e.right, p)
        if e.op == '+':
            return left + right
        if e.op == '-':
            return left - right
        if e.op == '*':
            return left * right
        return left / right
    if isinstance(e, Pow):
        return eval_dual(e.base, p) ** e.exponent
    if isinstance(e, Call):
        return getattr(eval_dual(e.arg, p), e.func)()
    raise TypeError(f"Not an expression node: {e!r}")


def is_constant(e):
    """True when `e` contains no coordinate variable."""
    if isinstance(e, Var):
        return False
    if isinstance(e, Neg):
        return is_constant(e.operand)
    if isinstance(e, BinOp):
        return is_constant(e.left) and is_constant(e.right)
    if isinstance(e, Pow):
        return is_constant(e.base)
    if isinstance(e, Call):
        return is_constant(e.arg)
    return True
