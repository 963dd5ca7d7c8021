import random

import pytest

from modules.parser import (
    ExponentError,
    PolySource,
    PolynomialSyntaxError,
    UnknownVariableError,
    parse_instance,
    parse_polynomial,
    print_polynomial,
)
from modules.polyring import MonomialOrder, OrderKind, Polynomial, RingContext
from tests.conftest import SEEDS

R4 = RingContext.standard(4)


def test_parse_generator():
    p = parse_polynomial("x1^2 - x4^2", R4)
    assert p == Polynomial(R4, {(2, 0, 0, 0): 1, (0, 0, 0, 2): -1})


def test_parse_expands_powers():
    assert parse_polynomial("(x1+x2)^2", R4) == parse_polynomial("x1^2 + 2*x1*x2 + x2^2", R4)


def test_parse_zero_and_rationals():
    assert parse_polynomial("0", R4).is_zero()
    assert parse_polynomial("3/2*x1 - 1/2*x1", R4) == R4.variable("x1")
    assert parse_polynomial("-x1^2", R4) == R4.variable(0) ** 2 * -1


def test_power_is_right_associative():
    assert parse_polynomial("2^3^2", R4) == R4.constant(512)
    assert parse_polynomial("x1^2^0", R4) == R4.variable(0)


@pytest.mark.parametrize(
    "text, error",
    [
        ("x1 +", PolynomialSyntaxError),
        ("x1 x2", PolynomialSyntaxError),
        ("1/0", PolynomialSyntaxError),
        ("", PolynomialSyntaxError),
        ("x9", UnknownVariableError),
        ("x1^(1/2)", ExponentError),
        ("x1^x2", ExponentError),
        ("x1^(0-1)", ExponentError),
    ],
)
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_polynomial(text, R4)


def test_error_position():
    with pytest.raises(UnknownVariableError) as info:
        parse_polynomial("x1 + x9", R4)
    assert info.value.position == 5
    assert info.value.line == 1
    assert info.value.column == 6


def test_poly_source_declares_variables():
    assert PolySource("x1 + x2", ("x1", "x2")).text == "x1 + x2"
    with pytest.raises(UnknownVariableError):
        PolySource("x1 + y", ("x1",))


def test_print_polynomial():
    p1 = parse_polynomial("x1^2 - x4^2", R4)
    assert print_polynomial(p1) == "x1^2 - x4^2"
    assert print_polynomial(R4.zero()) == "0"
    assert print_polynomial(parse_polynomial("1 - x1", R4)) == "-x1 + 1"
    assert print_polynomial(parse_polynomial("3/2*x1", R4)) == "3/2*x1"


def test_print_respects_order():
    r2 = RingContext.standard(2)
    p = parse_polynomial("x1 + x2^3", r2)
    assert print_polynomial(p, MonomialOrder(OrderKind.DEGREVLEX, r2)) == "x2^3 + x1"
    assert print_polynomial(p, MonomialOrder(OrderKind.LEX, r2)) == "x1 + x2^3"


@pytest.mark.parametrize(
    "tokens",
    [
        ["x1", "^", "2", "*", "x2", "+", "3"],
        ["(", "x1", "+", "x2", ")", "^", "2"],
    ],
)
def test_token_deletion_is_rejected(tokens):
    assert not parse_polynomial(" ".join(tokens), R4).is_zero()
    for k in range(len(tokens)):
        mutated = " ".join(tokens[:k] + tokens[k + 1 :])
        with pytest.raises(PolynomialSyntaxError):
            parse_polynomial(mutated, R4)


@pytest.mark.parametrize("seed", SEEDS)
def test_print_parse_round_trip(seed, random_polynomial):
    rng = random.Random(seed)
    p = random_polynomial(rng, R4, terms=6)
    text = print_polynomial(p)
    assert parse_polynomial(text, R4) == p
    assert print_polynomial(p) == text
    lex = MonomialOrder(OrderKind.LEX, R4)
    assert parse_polynomial(print_polynomial(p, lex), R4) == p


INSTANCE = """\
# two squares
vars: n=3

p2 = x2*x3   # trailing comment
p1 = x1^2 - x3^2
"""


def test_parse_instance():
    parsed = parse_instance(INSTANCE)
    assert parsed.context.variables == ("x1", "x2", "x3")
    assert list(parsed.generators) == ["p1", "p2"]
    assert parsed.generators["p2"] == parse_polynomial("x2*x3", parsed.context)
    assert parsed.target is None


def test_parse_instance_with_target():
    parsed = parse_instance("vars: n=1\np1 = x1^2\ng = x1^4\n")
    assert parsed.target == parse_polynomial("x1^4", parsed.context)


@pytest.mark.parametrize(
    "text",
    [
        "p1 = x1\n",
        "vars: n=0\np1 = 1\n",
        "vars: n=2\n",
        "vars: n=2\np1 = x1\np1 = x2\n",
        "vars: n=2\np1 = x1\ng = x1^2\ng = x1^2\n",
        "vars: n=2\nq1 = x1\n",
    ],
)
def test_malformed_instances(text):
    with pytest.raises(PolynomialSyntaxError):
        parse_instance(text)


def test_instance_error_location():
    with pytest.raises(UnknownVariableError) as info:
        parse_instance("vars: n=2\np1 = x1 + x3\n")
    assert info.value.line == 2
    assert info.value.column == 11


def test_instance_error_column_when_body_repeats_the_name():
    with pytest.raises(PolynomialSyntaxError) as info:
        parse_instance("vars: n=2\ng = g\n")
    assert (info.value.line, info.value.column) == (2, 5)
    with pytest.raises(PolynomialSyntaxError) as info:
        parse_instance("vars: n=2\n  p1 = p1\n")
    assert (info.value.line, info.value.column) == (2, 8)
