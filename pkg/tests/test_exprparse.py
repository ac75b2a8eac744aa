"""Tests for the expression language: parsing, printing, evaluation, diff."""

import math
import random

import pytest

from metriq.errors import DomainError, ParseError, RangeOverflow
from metriq.exprparse import (
    BinOp,
    Call,
    Const,
    MAX_SOURCE_BYTES,
    Neg,
    Var,
    diff,
    evaluate,
    parse,
    to_source,
)


def test_parse_basic_shapes():
    assert parse("x") == Var()
    assert parse("2.5") == Const(2.5)
    assert parse("-3") == Const(-3.0)  # minus folds into the literal
    assert parse("x+1") == BinOp("+", Var(), Const(1.0))
    assert parse("sin(x)") == Call("sin", Var())
    assert parse("2*x+1") == BinOp("+", BinOp("*", Const(2.0), Var()), Const(1.0))
    assert parse("x^2^3") == BinOp("^", Var(), BinOp("^", Const(2.0), Const(3.0)))


def test_unary_minus_binds_tighter_than_power():
    # documented quirk: -x^2 is (-x)^2, not -(x^2)
    assert parse("-x^2") == BinOp("^", Neg(Var()), Const(2.0))
    assert evaluate(parse("-x^2"), 3.0) == 9.0
    assert evaluate(parse("-(x^2)"), 3.0) == -9.0
    assert evaluate(parse("-3^2"), 0.0) == 9.0


def test_parse_ignores_whitespace():
    assert parse(" 2 * ( x + 1 ) ") == parse("2*(x+1)")
    assert parse("sin( x )\t+ 1\n") == parse("sin(x)+1")


@pytest.mark.parametrize(
    "src,offset",
    [
        ("sin(", 4),
        ("sin(x", 5),
        ("", 0),
        ("2+", 2),
        ("foo(x)", 0),
        ("x+y", 2),
        ("(x", 2),
        ("x)", 1),
        ("2..5", 1),
        ("2π", 1),
    ],
)
def test_parse_error_offsets(src, offset):
    with pytest.raises(ParseError) as exc_info:
        parse(src)
    assert exc_info.value.offset == offset
    assert str(offset) in str(exc_info.value)


def test_parse_source_cap():
    ok = "1" + "+1" * 200
    parse(ok)
    with pytest.raises(ParseError) as exc_info:
        parse("1" + "+1" * 3000)
    assert exc_info.value.offset == MAX_SOURCE_BYTES


ROUNDTRIP_SOURCES = [
    "x",
    "2*x+1",
    "x/(1+x)",
    "-(x^2)",
    "-x^2",
    "x^-2",
    "sin(cos(exp(x)))",
    "x^2^3",
    "(x+1)*(x-1)",
    "1-(x-2)",
    "x/(2*x)/3",
    "sqrt(x)+ln(x)",
    "x^x",
    "2e3*x",
    "-(x+1)",
]


@pytest.mark.parametrize("src", ROUNDTRIP_SOURCES)
def test_roundtrip_fixed_sources(src):
    tree = parse(src)
    assert parse(to_source(tree)) == tree


def _random_tree(rng, depth):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Var()
        return Const(round(rng.uniform(-3.0, 3.0), 3))
    kind = rng.choice(["+", "-", "*", "/", "^", "call", "neg"])
    if kind == "call":
        return Call(rng.choice(["sin", "cos", "exp", "ln", "sqrt"]), _random_tree(rng, depth - 1))
    if kind == "neg":
        child = _random_tree(rng, depth - 1)
        if isinstance(child, Const):
            # the parser folds -literal, so a Neg(Const) node cannot round trip
            return Const(-child.value)
        return Neg(child)
    return BinOp(kind, _random_tree(rng, depth - 1), _random_tree(rng, depth - 1))


def test_roundtrip_random_trees():
    rng = random.Random(99)
    for _ in range(300):
        tree = _random_tree(rng, 5)
        assert parse(to_source(tree)) == tree, to_source(tree)


def test_evaluate_basics():
    assert evaluate(parse("2*x+1"), 3.0) == 7.0
    assert evaluate(parse("x^2.5"), 4.0) == pytest.approx(32.0, rel=1e-15)
    assert evaluate(parse("x^3"), -2.0) == -8.0
    assert evaluate(parse("sin(x)^2+cos(x)^2"), 0.7) == pytest.approx(1.0, rel=1e-14)
    assert evaluate(parse("ln(exp(x))"), 1.25) == pytest.approx(1.25, rel=1e-14)
    assert evaluate(parse("sqrt(x)"), 9.0) == 3.0


def test_evaluate_domain_errors():
    with pytest.raises(DomainError):
        evaluate(parse("1/x"), 0.0)
    with pytest.raises(DomainError):
        evaluate(parse("ln(x)"), -1.0)
    with pytest.raises(DomainError):
        evaluate(parse("sqrt(x)"), -1.0)
    with pytest.raises(DomainError):
        evaluate(parse("x^0.5"), -4.0)  # negative base, non-integer exponent
    with pytest.raises(RangeOverflow):
        evaluate(parse("exp(x)"), 1000.0)
    with pytest.raises(RangeOverflow):
        evaluate(parse("x^x"), 300.0)


def test_diff_folds_trivia():
    assert diff(parse("3.7")) == Const(0.0)
    assert diff(parse("x")) == Const(1.0)
    assert diff(parse("2*x")) == Const(2.0)
    assert diff(parse("sin(x)")) == Call("cos", Var())
    assert to_source(diff(parse("x^3"))) == "3.0*x^2.0"


def _central_fd(tree, x, h):
    return (evaluate(tree, x + h) - evaluate(tree, x - h)) / (2.0 * h)


def _check_derivative_at(tree, x):
    """Compare symbolic and finite-difference derivatives; None = untestable."""
    try:
        fx = evaluate(tree, x)
        sym = evaluate(diff(tree), x)
        fd1 = _central_fd(tree, x, 1e-4)
        fd2 = _central_fd(tree, x, 1e-5)
    except (DomainError, RangeOverflow):
        return None
    scale = max(1.0, abs(fx), abs(sym))
    if abs(fd1 - fd2) > 1e-5 * scale:
        return None  # finite differences themselves unreliable here
    assert abs(sym - fd2) <= 1e-4 * scale, (to_source(tree), x, sym, fd2)
    return True


def test_diff_matches_finite_differences_random():
    rng = random.Random(13)
    checked = 0
    for _ in range(120):
        tree = _random_tree(rng, 4)
        for x in (0.35, 0.8, 1.6, 2.2):
            if _check_derivative_at(tree, x):
                checked += 1
    assert checked > 150  # the generator must not starve the property


def test_diff_general_power_rule():
    # f^g with a non-constant exponent goes through the logarithmic rule
    for src in ("x^x", "(1+x^2)^sin(x)", "x^(1/x)"):
        tree = parse(src)
        for x in (0.5, 1.3, 2.1):
            assert _check_derivative_at(tree, x), src


def test_diff_quotient_rule_value():
    tree = parse("sin(x)/(1+x^2)")
    x = 1.1
    num = math.cos(x) * (1 + x * x) - math.sin(x) * 2 * x
    assert evaluate(diff(tree), x) == pytest.approx(num / (1 + x * x) ** 2, rel=1e-12)


def test_to_source_deterministic():
    tree = parse("2*x+sin(x)^2")
    assert to_source(tree) == to_source(parse(to_source(tree)))
