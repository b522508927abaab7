"""
Expression parser

Grammar (EBNF), shared by curve files and operator files:

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ['-'] base ['^' ['-'] integer]
    base   := integer | name | 'sqrt' '(' ['-'] integer ')'
            | 'log' '(' expr ')' | '(' expr ')'

`name` is the free parameter or a declared constant. `sqrt(d)` is accepted
only over ℚ(√d) with that same d, which is how the printer writes the
generator of the extension. A leading '-' is the
only unary operator; "z + + 1" is rejected at offset 4. Parsing builds a
small syntax tree first and evaluates it afterwards, so evaluation errors
(division by zero, log of a constant) also carry the offset of the
offending subexpression.
"""

import logging
from functools import lru_cache
from typing import Dict, Mapping, Optional, Sequence, Tuple

import pyparsing as pp
import sympy
from sympy.polys.domains import AlgebraicField

from .errors import ExpressionSyntaxError, QuantumCurveError
from .field import Field, FieldElement
from .logfunc import LogAugmentedFunction
from .rational import RationalFunction

logger = logging.getLogger(__name__)

Node = tuple


@lru_cache(maxsize=32)
def _grammar(names: Tuple[str, ...]) -> pp.ParserElement:
    expr = pp.Forward()
    integer = pp.Word(pp.nums)
    integer.set_parse_action(lambda s, loc, toks: ("num", loc, int(toks[0])))
    log_call = pp.Keyword("log") + pp.Suppress("(") - expr + pp.Suppress(")")
    log_call.set_parse_action(lambda s, loc, toks: ("log", loc, toks[1]))
    radicand = pp.Opt(pp.Literal("-")) + pp.Word(pp.nums)
    sqrt_call = pp.Keyword("sqrt") + pp.Suppress("(") - radicand + pp.Suppress(")")
    sqrt_call.set_parse_action(lambda s, loc, toks: ("sqrt", loc, int("".join(toks[1:]))))
    alternatives = [integer, sqrt_call, log_call]
    if names:
        name = pp.MatchFirst([pp.Keyword(n) for n in sorted(names, key=len, reverse=True)])
        name.set_parse_action(lambda s, loc, toks: ("name", loc, toks[0]))
        alternatives.append(name)
    group = pp.Suppress("(") - expr + pp.Suppress(")")
    alternatives.append(group)
    base = pp.MatchFirst(alternatives)

    exponent = pp.Opt(pp.Literal("-")) + pp.Word(pp.nums)
    exponent.set_parse_action(lambda s, loc, toks: int("".join(toks)))
    factor = pp.Opt(pp.Literal("-")) + base + pp.Opt(pp.Literal("^") - exponent)

    def build_factor(s, loc, toks):
        toks = list(toks)
        negate = toks[0] == "-"
        if negate:
            toks = toks[1:]
        node = toks[0]
        if len(toks) == 3:
            node = ("pow", loc, node, toks[2])
        if negate:
            node = ("neg", loc, node)
        return [node]

    factor.set_parse_action(build_factor)

    def fold(s, loc, toks):
        toks = list(toks)
        node = toks[0]
        for i in range(1, len(toks), 2):
            op, operand = toks[i], toks[i + 1]
            node = ("bin", operand[1], op, node, operand)
        return [node]

    term = factor + pp.ZeroOrMore(pp.one_of("* /") - factor)
    term.set_parse_action(fold)
    expr <<= term + pp.ZeroOrMore(pp.one_of("+ -") - term)
    expr.set_parse_action(fold)
    return expr


def parse_tree(text: str, names: Sequence[str]) -> Node:
    """Parse text into a syntax tree; raises ExpressionSyntaxError with the offset."""
    try:
        result = _grammar(tuple(sorted(set(names)))).parse_string(text, parse_all=True)
    except pp.ParseBaseException as exc:
        raise ExpressionSyntaxError(exc.msg, exc.loc, text) from None
    return result[0]


class _Evaluator:
    """Evaluate a syntax tree into log-augmented functions of one parameter."""

    def __init__(self, text: str, field: Field, parameter: str, constants: Mapping[str, FieldElement]):
        self.text = text
        self.field = field
        self.parameter = parameter
        self.constants = constants

    def fail(self, message: str, loc: int):
        raise ExpressionSyntaxError(message, loc, self.text)

    def const(self, value) -> LogAugmentedFunction:
        return LogAugmentedFunction(RationalFunction.constant(self.field, value, self.parameter))

    def __call__(self, node: Node) -> LogAugmentedFunction:
        kind, loc = node[0], node[1]
        if kind == "num":
            return self.const(node[2])
        if kind == "name":
            if node[2] == self.parameter:
                return LogAugmentedFunction(RationalFunction.variable(self.field, self.parameter))
            return self.const(self.constants[node[2]])
        if kind == "sqrt":
            if node[2] != self.field.d:
                self.fail(f"sqrt({node[2]}) does not lie in {self.field!r}", loc)
            return self.const(self.field.sqrt_d())
        if kind == "neg":
            return -self(node[2])
        if kind == "pow":
            base, e = self(node[2]), node[3]
            if not base.is_rational:
                self.fail("cannot raise a logarithm to a power", loc)
            if e < 0 and base.rational.is_zero:
                self.fail("division by the zero polynomial", loc)
            return LogAugmentedFunction(base.rational**e)
        if kind == "log":
            argument = self(node[2])
            if not argument.is_rational:
                self.fail("log of a logarithm", loc)
            if argument.rational.is_constant:
                self.fail("log of a constant", loc)
            return LogAugmentedFunction.log_of(argument.rational)
        if kind == "bin":
            op, left, right = node[2], self(node[3]), self(node[4])
            try:
                if op == "+":
                    return left + right
                if op == "-":
                    return left - right
                if op == "*":
                    return left * right
                if right.is_zero:
                    self.fail("division by the zero polynomial", loc)
                return left / right
            except ExpressionSyntaxError:
                raise
            except QuantumCurveError as exc:
                self.fail(str(exc), loc)
        raise QuantumCurveError(f"unknown syntax node {kind!r}")


def parse_expr(
    text: str,
    parameter: str = "z",
    field: Optional[Field] = None,
    constants: Optional[Mapping[str, FieldElement]] = None,
) -> LogAugmentedFunction:
    """
    Parse an expression in one parameter.

    Args:
        text: expression text
        parameter: name of the free parameter
        field: scalar field, ℚ by default
        constants: named constants substituted at parse time

    Returns:
        LogAugmentedFunction with the exact value

    Example:
        >>> parse_expr("z + 1/z").format()
        '(z^2 + 1)/z'
    """
    field = field or Field()
    constants = dict(constants or {})
    if parameter in constants:
        raise QuantumCurveError(f"constant {parameter!r} shadows the parameter")
    tree = parse_tree(text, [parameter, *constants])
    return _Evaluator(text, field, parameter, constants)(tree)


def parse_constant(
    text: str, field: Optional[Field] = None, constants: Optional[Mapping[str, FieldElement]] = None
) -> FieldElement:
    """Parse a constant expression such as "1/2" or "-3"."""
    field = field or Field()
    constants = dict(constants or {})
    tree = parse_tree(text, list(constants))
    value = _Evaluator(text, field, "_", constants)(tree)
    if not value.is_rational or not value.rational.is_constant:
        raise ExpressionSyntaxError("not a constant", 0, text)
    return value.rational.constant_value()


def _square_root(domain, d: int):
    """√d as an element of `domain` when the domain is exactly ℚ(√d), else None."""
    if not isinstance(domain, AlgebraicField):
        return None
    if domain.ext.as_expr() != sympy.sqrt(d):
        return None
    return domain.from_sympy(sympy.sqrt(d))


def evaluate_polynomial(text: str, ring, names: Sequence[str], constants: Dict[str, FieldElement] = None):
    """
    Parse a polynomial in several generators into a sympy sparse ring.

    Division is allowed only by nonzero constants and exponents must be
    nonnegative; log( ) is rejected.
    """
    constants = dict(constants or {})
    tree = parse_tree(text, [*names, *constants])
    gens = dict(zip(names, ring.gens))

    def fail(message: str, loc: int):
        raise ExpressionSyntaxError(message, loc, text)

    def walk(node):
        kind, loc = node[0], node[1]
        if kind == "num":
            return ring(node[2])
        if kind == "name":
            if node[2] in gens:
                return gens[node[2]]
            return ring(constants[node[2]])
        if kind == "sqrt":
            root = _square_root(ring.domain, node[2])
            if root is None:
                fail(f"sqrt({node[2]}) does not lie in {ring.domain}", loc)
            return ring(root)
        if kind == "neg":
            return -walk(node[2])
        if kind == "pow":
            if node[3] < 0:
                fail("negative power in a polynomial", loc)
            base = walk(node[2])
            return base ** node[3] if node[3] else ring.one
        if kind == "log":
            fail("log( ) is not allowed here", loc)
        op, left, right = node[2], walk(node[3]), walk(node[4])
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if not right.is_ground or not right:
            fail("division by a non-constant or zero", loc)
        return left.quo_ground(right.LC)

    return walk(tree)
