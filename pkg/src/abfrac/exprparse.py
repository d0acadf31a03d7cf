"""Recursive-descent parser and evaluator for forcing expressions in t (and x).

Grammar::

    expr    := term (('+'|'-') term)*
    term    := factor (('*'|'/') factor)*
    factor  := unary ('^' factor)?          # '^' is right-associative
    unary   := '-'? primary
    primary := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'

No implicit multiplication.  Identifiers are limited to the variables t and
x, the constants pi and e, and a fixed function table.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import DomainError, EvalError, ExprSyntaxError, UnknownIdentifier

__all__ = ["Expr", "Num", "Var", "Neg", "BinOp", "Call", "parse", "evaluate", "pretty"]

MAX_SOURCE_BYTES = 64 * 1024

VARIABLES = ("t", "x")
CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTION_ARITY = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "sqrt": 1,
    "abs": 1,
    "pow": 2,
    "gamma": 1,
}


class Expr:
    """Base class for AST nodes; nodes are immutable and freely shareable."""

    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Call(Expr):
    name: str
    args: tuple


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _tokenize(src):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ExprSyntaxError(
                f"unexpected character {src[pos]!r}",
                pos,
                expected=("number", "identifier", "operator"),
            )
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        tokens.append((kind, m.group(), m.start()))
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, text, off = self.peek()
        if kind == "op" and text == op:
            return self.advance()
        raise ExprSyntaxError(
            f"expected {op!r} but found {text or 'end of input'!r}", off, expected=(op,)
        )

    def parse_expr(self):
        node = self.parse_term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = BinOp(text, node, self.parse_term())
            else:
                return node

    def parse_term(self):
        node = self.parse_factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = BinOp(text, node, self.parse_factor())
            else:
                return node

    def parse_factor(self):
        node = self.parse_unary()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return BinOp("^", node, self.parse_factor())
        return node

    def parse_unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.parse_primary())
        return self.parse_primary()

    def parse_primary(self):
        kind, text, off = self.advance()
        if kind == "number":
            return Num(float(text))
        if kind == "ident":
            nxt_kind, nxt_text, _ = self.peek()
            if nxt_kind == "op" and nxt_text == "(":
                return self.parse_call(text, off)
            if text in VARIABLES:
                return Var(text)
            if text in CONSTANTS:
                return Num(CONSTANTS[text])
            raise UnknownIdentifier(text, off)
        if kind == "op" and text == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(
            f"expected a number, identifier or '(' but found {text or 'end of input'!r}",
            off,
            expected=("number", "identifier", "("),
        )

    def parse_call(self, name, off):
        if name not in FUNCTION_ARITY:
            raise UnknownIdentifier(name, off)
        self.expect_op("(")
        args = [self.parse_expr()]
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text == ",":
                self.advance()
                args.append(self.parse_expr())
            else:
                break
        self.expect_op(")")
        arity = FUNCTION_ARITY[name]
        if len(args) != arity:
            raise ExprSyntaxError(
                f"{name} takes {arity} argument(s), got {len(args)}",
                off,
                expected=(f"{arity} arguments",),
            )
        return Call(name, tuple(args))


def parse(src: str) -> Expr:
    """Parse an expression string into an AST."""
    if not isinstance(src, str) or not src.strip():
        raise ExprSyntaxError("empty expression", 0, expected=("expression",))
    if len(src.encode()) > MAX_SOURCE_BYTES:
        raise ExprSyntaxError("expression exceeds 64 KiB", MAX_SOURCE_BYTES)
    parser = _Parser(_tokenize(src))
    try:
        node = parser.parse_expr()
    except RecursionError:
        raise ExprSyntaxError(
            "expression too deeply nested", 0, expected=("shallower expression",)
        ) from None
    kind, text, off = parser.peek()
    if kind != "end":
        raise ExprSyntaxError(f"trailing input {text!r}", off, expected=("end of input",))
    return node


def _call(name, args):
    a = args[0]
    if name == "sin":
        return np.sin(a)
    if name == "cos":
        return np.cos(a)
    if name == "exp":
        return np.exp(a)
    if name == "sqrt":
        if np.any(np.asarray(a) < 0):
            raise EvalError("sqrt of a negative value")
        return np.sqrt(a)
    if name == "abs":
        return np.abs(a)
    if name == "pow":
        return _power(a, args[1])
    if name == "gamma":
        try:
            return specfun.gamma(a)
        except DomainError as exc:
            raise EvalError(str(exc)) from exc
    raise EvalError(f"unknown function {name!r}")


def _power(base, exponent):
    b = np.asarray(base, dtype=float)
    e = np.asarray(exponent, dtype=float)
    if np.any((b == 0.0) & (e < 0.0)):
        raise EvalError("zero raised to a negative power")
    if np.any((b < 0.0) & (e != np.floor(e))):
        raise EvalError("negative base with non-integer exponent")
    with np.errstate(over="ignore"):
        out = np.power(b, e)
    return out


def _eval_node(node, t, x):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        val = t if node.name == "t" else x
        if val is None:
            raise EvalError(f"variable {node.name!r} has no value in this context")
        return val
    if isinstance(node, Neg):
        return -_eval_node(node.operand, t, x)
    if isinstance(node, BinOp):
        a = _eval_node(node.lhs, t, x)
        b = _eval_node(node.rhs, t, x)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if np.any(np.asarray(b) == 0.0):
                raise EvalError("division by zero")
            return a / b
        return _power(a, b)
    if isinstance(node, Call):
        return _call(node.name, [_eval_node(arg, t, x) for arg in node.args])
    raise EvalError(f"malformed AST node {node!r}")


def evaluate(node: Expr, t=None, x=None):
    """Evaluate an AST at scalar or numpy-array arguments.

    Any non-finite result (NaN or overflow to infinity) raises EvalError
    rather than propagating silently.
    """
    with np.errstate(all="ignore"):
        out = _eval_node(node, t, x)
    arr = np.asarray(out, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise EvalError("expression produced a non-finite value")
    if arr.ndim == 0:
        return float(arr)
    return arr


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}


def _pretty(node, parent_prec, right_side):
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = _pretty(node.operand, 4, False)
        text = f"-{inner}"
        return f"({text})" if parent_prec > 1 else text
    if isinstance(node, Call):
        return f"{node.name}({', '.join(_pretty(a, 0, False) for a in node.args)})"
    if isinstance(node, BinOp):
        prec = _PRECEDENCE[node.op]
        lhs = _pretty(node.lhs, prec if node.op != "^" else prec + 1, False)
        rhs = _pretty(node.rhs, prec + 1 if node.op != "^" else prec, True)
        text = f"{lhs} {node.op} {rhs}"
        if prec < parent_prec or (prec == parent_prec and right_side):
            return f"({text})"
        return text
    raise EvalError(f"malformed AST node {node!r}")


def pretty(node: Expr) -> str:
    """Render an AST back to parseable source; parse(pretty(e)) == e."""
    return _pretty(node, 0, False)
