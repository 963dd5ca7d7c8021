"""Text grammar for polynomials and for instance files.

Polynomials are written with explicit ``*``, ``^`` for nonnegative integer
powers, rational literals ``a/b`` and unary minus, e.g. ``x1^2 - 3/2*x1*x4``.
Instance files look like::

    # comment
    vars: n=5
    p1 = x1^2 - x4^2
    p2 = x1*x5
    g = ...            (optional)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import pyparsing as pp

from modules.polyring import MonomialOrder, OrderKind, Polynomial, RingContext

pp.ParserElement.enable_packrat()


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, position: int = 0, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.position = position
        self.line = line
        self.column = column


class UnknownVariableError(PolynomialSyntaxError):
    pass


class ExponentError(PolynomialSyntaxError):
    pass


@dataclass(frozen=True)
class PolySource:
    text: str
    variables: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.variables is not None:
            for name in _IDENTIFIER.findall(self.text):
                if name not in self.variables:
                    raise UnknownVariableError(f"identifier {name!r} is not declared", self.text.find(name))


_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class _Leaf:
    kind: str
    value: Union[Fraction, str]
    loc: int


def _grammar():
    number = pp.Regex(r"\d+(?:/\d+)?")
    identifier = pp.Regex(_IDENTIFIER.pattern)

    def number_action(s, loc, toks):
        denominator = toks[0].partition("/")[2]
        if denominator and int(denominator) == 0:
            raise pp.ParseFatalException(s, loc, "zero denominator")
        return _Leaf("num", Fraction(toks[0]), loc)

    number.set_parse_action(number_action)
    identifier.set_parse_action(lambda s, loc, toks: _Leaf("var", toks[0], loc))
    return pp.infix_notation(
        number | identifier,
        [
            (pp.Literal("^"), 2, pp.OpAssoc.RIGHT),
            (pp.Literal("-"), 1, pp.OpAssoc.RIGHT),
            (pp.Literal("*"), 2, pp.OpAssoc.LEFT),
            (pp.one_of("+ -"), 2, pp.OpAssoc.LEFT),
        ],
    )


_EXPRESSION = _grammar()


class _Evaluator:
    """Folds the grouped parse tree into a Polynomial."""

    def __init__(self, ctx: RingContext, text: str):
        self.ctx = ctx
        self.text = text

    def error(self, cls, message: str, loc: int) -> PolynomialSyntaxError:
        return cls(message, loc, pp.lineno(loc, self.text), pp.col(loc, self.text))

    @staticmethod
    def location(node) -> int:
        while not isinstance(node, _Leaf):
            node = node[0]
        return node.loc

    def constant(self, node) -> Fraction:
        p = self.eval(node)
        if not p.is_constant():
            raise self.error(ExponentError, "exponent must be a nonnegative integer", self.location(node))
        return p.coefficient(self.ctx.one_monomial())

    def checked_exponent(self, value: Fraction, node) -> int:
        if value.denominator != 1 or value < 0:
            raise self.error(ExponentError, f"exponent {value} is not a nonnegative integer", self.location(node))
        return int(value)

    def eval(self, node) -> Polynomial:
        if isinstance(node, _Leaf):
            if node.kind == "num":
                return self.ctx.constant(node.value)
            if node.value not in self.ctx.variables:
                raise self.error(UnknownVariableError, f"unknown variable {node.value!r}", node.loc)
            return self.ctx.variable(node.value)
        items = list(node)
        if len(items) == 1:
            return self.eval(items[0])
        if isinstance(items[0], str):
            return -self.eval(items[1])
        if items[1] == "^":
            # a ^ b ^ c groups to the right
            exponents = items[2::2]
            k = self.checked_exponent(self.constant(exponents[-1]), exponents[-1])
            for inner in reversed(exponents[:-1]):
                k = self.checked_exponent(self.constant(inner) ** k, inner)
            return self.eval(items[0]) ** k
        result = self.eval(items[0])
        for op, operand in zip(items[1::2], items[2::2]):
            value = self.eval(operand)
            if op == "*":
                result = result * value
            elif op == "+":
                result = result + value
            else:
                result = result - value
        return result


def parse_polynomial(src: Union[PolySource, str], ctx: RingContext) -> Polynomial:
    text = src.text if isinstance(src, PolySource) else src
    if not text.strip():
        raise PolynomialSyntaxError("empty expression", 0)
    try:
        tree = _EXPRESSION.parse_string(text, parse_all=True)
    except pp.ParseBaseException as e:
        raise PolynomialSyntaxError(f"syntax error: {e.msg}", e.loc, e.lineno, e.col) from e
    return _Evaluator(ctx, text).eval(tree[0])


def _format_coefficient(c: Fraction) -> str:
    return str(abs(c))


def print_polynomial(p: Polynomial, order: Optional[MonomialOrder] = None) -> str:
    """Deterministic rendering, terms in decreasing ``order`` (degrevlex by default)."""
    if p.is_zero():
        return "0"
    order = order or MonomialOrder(OrderKind.DEGREVLEX, p.context)
    pieces = []
    for i, m in enumerate(order.descending(p.terms)):
        c = p.terms[m]
        mono = p.context.monomial_name(m)
        if mono == "1":
            body = _format_coefficient(c)
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{_format_coefficient(c)}*{mono}"
        if i == 0:
            pieces.append(f"-{body}" if c < 0 else body)
        else:
            pieces.append(f"- {body}" if c < 0 else f"+ {body}")
    return " ".join(pieces)


@dataclass
class InstanceText:
    """Parsed instance file: the ring, the generators in file order and an optional target."""

    context: RingContext
    generators: dict[str, Polynomial] = field(default_factory=dict)
    target: Optional[Polynomial] = None


_HEADER = re.compile(r"^vars:\s*n\s*=\s*(\d+)\s*$")
_ASSIGNMENT = re.compile(r"^(p\d+|g)\s*=\s*(.*)$")


def parse_instance(text: str) -> InstanceText:
    context: Optional[RingContext] = None
    result: Optional[InstanceText] = None
    offset = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line_offset = offset
        offset += len(raw) + 1
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if context is None:
            header = _HEADER.match(line)
            if not header:
                raise PolynomialSyntaxError("expected header 'vars: n=<k>'", line_offset, lineno, 1)
            n = int(header.group(1))
            if n < 1:
                raise PolynomialSyntaxError("variable count must be positive", line_offset, lineno, 1)
            context = RingContext.standard(n)
            result = InstanceText(context)
            continue
        assignment = _ASSIGNMENT.match(line)
        if not assignment:
            raise PolynomialSyntaxError("expected 'p<i> = <polynomial>' or 'g = <polynomial>'", line_offset, lineno, 1)
        name, body = assignment.groups()
        column = len(raw) - len(raw.lstrip()) + assignment.start(2) + 1 if body else len(raw) + 1
        try:
            poly = parse_polynomial(body, context)
        except PolynomialSyntaxError as e:
            raise type(e)(e.message, line_offset + column - 1 + e.position, lineno, column + e.column - 1) from e
        if name == "g":
            if result.target is not None:
                raise PolynomialSyntaxError("target g given twice", line_offset, lineno, 1)
            result.target = poly
        else:
            if name in result.generators:
                raise PolynomialSyntaxError(f"generator {name} given twice", line_offset, lineno, 1)
            result.generators[name] = poly
    if result is None:
        raise PolynomialSyntaxError("missing header 'vars: n=<k>'", 0, 1, 1)
    if not result.generators:
        raise PolynomialSyntaxError("instance lists no generators", len(text), max(1, text.count("\n")), 1)
    result.generators = dict(sorted(result.generators.items(), key=lambda kv: int(kv[0][1:])))
    return result
