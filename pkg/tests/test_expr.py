"""Parser, pretty-printer and jet-evaluation tests."""

import math

import numpy as np
import pytest

from biconf.expr import (
    Bin,
    Call,
    DomainError,
    Neg,
    Num,
    ParseError,
    Var,
    eval_jet,
    eval_value,
    parse_expr,
    pretty,
)
from helpers import fd_partial, fd_partial2

ORIGIN = (0.0, 0.0, 0.0, 0.0)


def test_parse_literal():
    assert parse_expr("1") == Num(1.0)
    assert parse_expr("2.5e-1") == Num(0.25)


def test_parse_sphere_factor():
    ast = parse_expr("(1 + x1^2 + x2^2)/2")
    assert isinstance(ast, Bin) and ast.op == "/"
    assert eval_value(ast, ORIGIN) == 0.5
    assert eval_value(ast, (1.0, 2.0, 9.0, 9.0)) == 3.0


def test_parse_exp_product():
    ast = parse_expr("exp(x1)*x3")
    assert eval_value(ast, (0.0, 0.0, 1.0, 0.0)) == 1.0


def test_t_is_alias_for_x1():
    assert parse_expr("t") == Var(1)
    assert eval_value(parse_expr("t^-0.5"), (4.0, 0, 0, 0)) == 0.5


def test_precedence_power_over_unary_minus():
    # -x1^2 parses as -(x1^2)
    assert eval_value(parse_expr("-x1^2"), (2.0, 0, 0, 0)) == -4.0
    assert eval_value(parse_expr("(-x1)^2"), (2.0, 0, 0, 0)) == 4.0


def test_power_right_associative():
    # 2^(3^2) = 512, not (2^3)^2 = 64; the nested exponent goes through
    # the exp/ln path, so compare with a relative tolerance
    assert math.isclose(eval_value(parse_expr("2^3^2"), ORIGIN), 512.0, rel_tol=1e-12)
    assert eval_value(parse_expr("x1^-1"), (2.0, 0, 0, 0)) == 0.5


def test_left_associativity():
    assert eval_value(parse_expr("10 - 3 - 2"), ORIGIN) == 5.0
    assert eval_value(parse_expr("12/3/2"), ORIGIN) == 2.0


def test_parse_error_offset():
    with pytest.raises(ParseError) as err:
        parse_expr("x1 + @")
    assert err.value.offset == 5
    with pytest.raises(ParseError):
        parse_expr("")
    with pytest.raises(ParseError) as err:
        parse_expr("x1 + ")
    assert "end of input" in str(err.value)


def test_unknown_identifier():
    with pytest.raises(ParseError) as err:
        parse_expr("foo + 1")
    assert "unknown identifier" in str(err.value)
    assert err.value.offset == 0


def test_function_arity_errors():
    with pytest.raises(ParseError) as err:
        parse_expr("exp + 1")
    assert "requires a parenthesized argument" in str(err.value)
    with pytest.raises(ParseError) as err:
        parse_expr("x1(2)")
    assert "is not a function" in str(err.value)
    with pytest.raises(ParseError):
        parse_expr("exp(x1, x2)")  # comma is not part of the grammar


def test_trailing_input():
    with pytest.raises(ParseError) as err:
        parse_expr("1 2")
    assert "trailing" in str(err.value)


ROUND_TRIP_CORPUS = [
    "1",
    "0.5",
    "2.5e-3",
    "x1",
    "x4",
    "t",
    "-x1",
    "--x2",
    "x1 + x2",
    "x1 - x2 - x3",
    "x1 - (x2 - x3)",
    "x1*x2*x3",
    "x1*(x2*x3)",
    "x1/x2/x3",
    "x1/(x2/x3)",
    "x1 + x2*x3",
    "(x1 + x2)*x3",
    "x1^2",
    "x1^-2",
    "x1^0.25",
    "-x1^2",
    "(-x1)^2",
    "x1^x2^x3",
    "(x1^x2)^x3",
    "2^x1",
    "exp(x1)",
    "ln(x1 + 2)",
    "sqrt(1 + x1^2)",
    "sin(x1*x2)",
    "cos(-x3)",
    "atan(x4/2)",
    "exp(x1)*x3",
    "(1 + x1^2 + x2^2)/2",
    "(1 - x1^2 - x2^2)/2",
    "(1 + x3^2 + x4^2)/2",
    "1/(1 + x1^2)",
    "exp(-x1^2 - x2^2)",
    "x1*x3 + x2*x4",
    "exp(x1*x3)",
    "sin(x1) + cos(x2) + atan(x3) + sqrt(x4 + 2)",
    "2*x1^3 - 3*x2^2 + 4*x3 - 5",
    "x1^2*x2^2",
    "(x1 + x2)/(x3 + 2)",
    "-(x1 + x2)",
    "-(x1*x2)",
    "1 - -x1",
    "x1 - -2",
    "ln(exp(x1))",
    "sqrt(x1^2 + 1)/(2 + sin(x2))",
    "atan(atan(x1))",
    "0.1*x1 + 0.01*x2^2",
]


def test_round_trip_corpus_is_fixed_point():
    assert len(ROUND_TRIP_CORPUS) >= 50
    for text in ROUND_TRIP_CORPUS:
        ast = parse_expr(text)
        printed = pretty(ast)
        reparsed = parse_expr(printed)
        assert reparsed == ast, f"{text!r} -> {printed!r} reparses differently"
        assert pretty(reparsed) == printed, f"{text!r}: printer not a fixed point"


def test_jet_matches_finite_differences():
    """Exact first/second partials vs centered differences on smooth fields."""
    rng = np.random.default_rng(42)
    exprs = [
        "exp(0.3*x1 - 0.2*x2^2 + 0.1*x3*x4)",
        "sin(x1*x2) + cos(x3 - x4)",
        "(1 + x1^2 + x2^2)/2",
        "sqrt(4 + x1 + x2^2)",
        "atan(x1 + 0.5*x2) * (2 + x3)",
        "ln(3 + x1*x4)",
    ]
    for text in exprs:
        ast = parse_expr(text)
        func = lambda q: eval_value(ast, q)
        for _ in range(100 // len(exprs) + 1):
            p = rng.uniform(-1.0, 1.0, size=4)
            jet = eval_jet(ast, p)
            for i in range(4):
                approx = fd_partial(func, p, i)
                scale = max(1.0, abs(approx))
                assert abs(jet.g[i] - approx) / scale < 1e-6, (text, p, i)
            for i in range(4):
                for j in range(i, 4):
                    approx = fd_partial2(func, p, i, j)
                    scale = max(1.0, abs(approx))
                    assert abs(jet.h[i, j] - approx) / scale < 1e-4, (text, p, i, j)


def test_hessian_symmetric_bitwise():
    rng = np.random.default_rng(7)
    ast = parse_expr("x1^3*x2 - x2^2*x3 + x3*x4^2 + x1*x2*x3*x4")
    for _ in range(20):
        p = rng.uniform(-2.0, 2.0, size=4)
        h = eval_jet(ast, p).h
        assert np.array_equal(h, h.T)


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_value(parse_expr("ln(x1)"), (0.0, 0, 0, 0))
    with pytest.raises(DomainError):
        eval_value(parse_expr("ln(x1)"), (-1.0, 0, 0, 0))
    with pytest.raises(DomainError):
        eval_value(parse_expr("sqrt(x1)"), (-1.0, 0, 0, 0))
    with pytest.raises(DomainError):
        eval_value(parse_expr("1/x1"), ORIGIN)
    with pytest.raises(DomainError):
        eval_value(parse_expr("x1^0.5"), (-1.0, 0, 0, 0))
    with pytest.raises(DomainError):
        eval_value(parse_expr("x1^-2"), ORIGIN)
    # integer exponents accept negative bases
    assert eval_value(parse_expr("x1^3"), (-2.0, 0, 0, 0)) == -8.0
    assert eval_value(parse_expr("x1^(-2)"), (-2.0, 0, 0, 0)) == 0.25


def test_jet_of_power_at_zero_base():
    jet = eval_jet(parse_expr("x1^2"), ORIGIN)
    assert jet.val == 0.0 and jet.g[0] == 0.0 and jet.h[0, 0] == 2.0
    jet = eval_jet(parse_expr("x1^1"), ORIGIN)
    assert jet.g[0] == 1.0 and jet.h[0, 0] == 0.0


def test_pretty_prints_known_forms():
    assert pretty(parse_expr("x1+x2 * x3")) == "x1 + x2*x3"
    assert pretty(parse_expr("t^2")) == "x1^2"
    assert pretty(Neg(Bin("*", Var(1), Var(2)))) == "-(x1*x2)"
    assert pretty(Call("exp", Num(1.0))) == "exp(1)"


def test_eval_jet_value_consistency():
    rng = np.random.default_rng(11)
    for text in ROUND_TRIP_CORPUS:
        ast = parse_expr(text)
        p = rng.uniform(0.1, 0.9, size=4)  # positive box avoids domain errors
        try:
            v = eval_value(ast, p)
        except DomainError:
            continue
        assert math.isclose(eval_jet(ast, p).val, v, rel_tol=1e-12, abs_tol=1e-12)
