import math

import numpy as np
import pytest

from abfrac import exprparse
from abfrac.errors import EvalError, ExprSyntaxError, UnknownIdentifier
from abfrac.exprparse import BinOp, Call, Num, Var, evaluate, parse, pretty


ROUND_TRIP_CORPUS = [
    "2*t + 1",
    "sin(3.141592653589793*x)*t",
    "t ^ 2 ^ 3",
    "-2^2",
    "2^-1",
    "1.5*t - 1.5*t",
    "exp(-t)",
    "gamma(2.5)",
    "pow(t, 2)",
    "pi*e",
    "t*(1-t)^2",
    "-(t+1)",
    "t - -1",
    "1e-3*t",
    "abs(-t)",
    "(t+x)/(t-x+2)",
    "t - (t - x)",
    "t/(2*x)/3",
    "t - x - 1",
    "t^x^0.5",
    "sqrt(t)*cos(x)",
    "2.5e2 + t",
    ".5*t",
    "-t^2 - -x",
    "sin(cos(exp(t)))",
    "pow(pow(t, 2), x)",
    "t*t*t*t",
    "1/(1+exp(-t))",
    "abs(t - x)",
    "gamma(t + 2)",
    "0.5*sin(pi*x)/(1.25 - cos(pi*x))*t",
    "t + x + 1 + 2 + 3",
    "(((t)))",
    "-(-(-t))",
    "2*pi*t",
    "e^t",
    "x*(1-x)*t",
    "sin(pi*x)*t",
    "t^2",
    "sin(t)",
    "2*exp(-t)",
    "0.5*exp(-t)",
    "t - 0.001",
    "1000000*t",
    "1.23456789012345e-7*x",
    "cos(2*t)^2 + sin(2*t)^2",
    "t/x",
    "x^-2",
    "sqrt(abs(t))",
    "exp(t)/(exp(t)+1)",
]


class TestGrammar:
    def test_basic_shapes(self):
        assert parse("2*t + 1") == BinOp(
            "+", BinOp("*", Num(2.0), Var("t")), Num(1.0)
        )
        node = parse("sin(3.141592653589793*x)*t")
        assert node == BinOp(
            "*",
            Call("sin", (BinOp("*", Num(3.141592653589793), Var("x")),)),
            Var("t"),
        )

    def test_power_right_associative(self):
        assert evaluate(parse("t ^ 2 ^ 3"), t=2.0) == 2.0**8

    def test_unary_minus_binds_into_power_base(self):
        # factor := unary ('^' factor)?, so -2^2 parses as (-2)^2
        assert evaluate(parse("-2^2")) == 4.0

    def test_negative_exponent(self):
        assert evaluate(parse("2^-1")) == 0.5

    def test_no_implicit_multiplication(self):
        with pytest.raises(ExprSyntaxError):
            parse("2t")

    def test_constants(self):
        assert evaluate(parse("pi")) == math.pi
        assert evaluate(parse("e")) == math.e

    def test_size_limit(self):
        with pytest.raises(ExprSyntaxError):
            parse("1+" * 40000 + "1")


class TestErrors:
    @pytest.mark.parametrize(
        "src",
        ["", "t +", "(t", "sin()", "sin(t,x)", "pow(t)", "t @ 1", "1..2", "* t", "t,"],
    )
    def test_syntax_errors_with_offsets(self, src):
        with pytest.raises(ExprSyntaxError) as err:
            parse(src)
        assert 0 <= err.value.offset <= len(src)
        assert err.value.expected

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifier) as err:
            parse("foo(t)")
        assert err.value.name == "foo"
        with pytest.raises(UnknownIdentifier):
            parse("t + y")

    def test_eval_errors(self):
        with pytest.raises(EvalError):
            evaluate(parse("1/(t-t)"), t=1.0)
        with pytest.raises(EvalError):
            evaluate(parse("pow(0, -1)"))
        with pytest.raises(EvalError):
            evaluate(parse("gamma(-2)"))
        with pytest.raises(EvalError):
            evaluate(parse("sqrt(-1)"))
        with pytest.raises(EvalError):
            evaluate(parse("exp(1000)"))
        with pytest.raises(EvalError):
            evaluate(parse("x"), t=1.0)  # x unbound in a t-only context


class TestEvaluation:
    def test_scalar_values(self):
        assert evaluate(parse("t"), t=0.5) == 0.5
        assert evaluate(parse("exp(-t)"), t=0.0) == 1.0
        assert evaluate(parse("gamma(2.5)")) == pytest.approx(
            1.3293403881791370, rel=1e-13
        )

    def test_exact_cancellation(self):
        node = parse("1.5*t - 1.5*t")
        for t in (0.0, 0.1, 0.7, 3.14159, 1e6):
            assert evaluate(node, t=t) == 0.0

    def test_vectorized(self):
        node = parse("sin(pi*x)*t")
        x = np.array([0.0, 0.5, 1.0])
        out = evaluate(node, t=2.0, x=x)
        assert out == pytest.approx([0.0, 2.0, 2.0 * math.sin(math.pi)], abs=1e-12)

    def test_broadcasting(self):
        node = parse("x + 10*t")
        out = evaluate(node, t=np.array([[1.0], [2.0]]), x=np.array([0.1, 0.2]))
        assert out.shape == (2, 2)
        assert np.allclose(out, [[10.1, 10.2], [20.1, 20.2]])


class TestPretty:
    @pytest.mark.parametrize("src", ROUND_TRIP_CORPUS)
    def test_round_trip_idempotent(self, src):
        once = pretty(parse(src))
        twice = pretty(parse(once))
        assert once == twice
        assert parse(once) == parse(src)

    @pytest.mark.parametrize("src", ROUND_TRIP_CORPUS)
    def test_round_trip_preserves_value(self, src):
        node = parse(src)
        node2 = parse(pretty(node))
        for t, x in ((0.3, 0.7), (1.5, 0.2)):
            try:
                v1 = evaluate(node, t=t, x=x)
            except EvalError:
                continue
            assert evaluate(node2, t=t, x=x) == v1
