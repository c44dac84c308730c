"""Small expression language for scalar functions on R^4.

Grammar (EBNF):

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := ("-" factor) | power
    power  := atom ("^" factor)?
    atom   := number | ident | ident "(" expr ")" | "(" expr ")"

Binary "-" and "/" associate to the left, "^" to the right and binds
tighter than unary minus (so ``-x1^2`` is ``-(x1^2)``).  Variables are
``x1 .. x4``; ``t`` is accepted as a synonym for ``x1``.  The function
set is ``exp``, ``ln``, ``sqrt``, ``sin``, ``cos``, ``atan``.

Evaluation is done on second-order jets (value, gradient, Hessian), so
every parsed expression carries exact first and second partials.  The
``^`` operator accepts any base when the exponent is an integer literal;
otherwise the base must be strictly positive (it is rewritten as
``exp(y*ln x)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "ParseError",
    "Expr",
    "Num",
    "Var",
    "Neg",
    "Bin",
    "Call",
    "Jet",
    "parse_expr",
    "pretty",
    "eval_value",
    "eval_jet",
]

FUNCTIONS = ("exp", "ln", "sqrt", "sin", "cos", "atan")
VARIABLES = {"x1": 1, "x2": 2, "x3": 3, "x4": 4, "t": 1}


class DomainError(ValueError):
    """Evaluation left the real domain (ln of a non-positive value, etc.)."""


class ParseError(ValueError):
    """Syntax or name error while parsing; ``offset`` is the byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


# ---------------------------------------------------------------------------
# AST


class Expr:
    """Base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    index: int  # 1..4


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Bin(Expr):
    op: str  # one of "+-*/^"
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_OPS = set("+-*/^()")


def _tokenize(text: str):
    """Yield (kind, value, offset) triples; kinds are num/ident/op/end."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _TOKEN_OPS:
            tokens.append(("op", c, i))
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            lexeme = text[i:j]
            try:
                value = float(lexeme)
            except ValueError:
                raise ParseError(f"malformed number {lexeme!r}", i) from None
            tokens.append(("num", value, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, value, offset = self.peek()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", offset)
        return self.advance()

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                node = Bin(value, node, self.parse_term())
            else:
                return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                node = Bin(value, node, self.parse_factor())
            else:
                return node

    def parse_factor(self) -> Expr:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.parse_factor())
        return self.parse_power()

    def parse_power(self) -> Expr:
        node = self.parse_atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return Bin("^", node, self.parse_factor())
        return node

    def parse_atom(self) -> Expr:
        kind, value, offset = self.advance()
        if kind == "num":
            return Num(value)
        if kind == "ident":
            if value in VARIABLES:
                nkind, nvalue, _ = self.peek()
                if nkind == "op" and nvalue == "(":
                    raise ParseError(f"{value!r} is not a function", offset)
                return Var(VARIABLES[value])
            if value in FUNCTIONS:
                nkind, nvalue, noffset = self.peek()
                if not (nkind == "op" and nvalue == "("):
                    raise ParseError(
                        f"function {value!r} requires a parenthesized argument", noffset
                    )
                self.advance()
                arg = self.parse_expr()
                self.expect_op(")")
                return Call(value, arg)
            raise ParseError(f"unknown identifier {value!r}", offset)
        if kind == "op" and value == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        shown = value if value else "end of input"
        raise ParseError(f"unexpected {shown!r}", offset)


def parse_expr(text: str) -> Expr:
    """Parse ``text`` into an AST.  Raises ParseError with a byte offset."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    parser = _Parser(_tokenize(text))
    node = parser.parse_expr()
    kind, value, offset = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input {value!r}", offset)
    return node


# ---------------------------------------------------------------------------
# Pretty printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _fmt_num(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _render(node: Expr, min_prec: int) -> str:
    if isinstance(node, Num):
        text, prec = _fmt_num(node.value), _PREC["atom"]
    elif isinstance(node, Var):
        text, prec = f"x{node.index}", _PREC["atom"]
    elif isinstance(node, Call):
        text, prec = f"{node.fn}({_render(node.arg, 0)})", _PREC["atom"]
    elif isinstance(node, Neg):
        text, prec = "-" + _render(node.arg, _PREC["neg"]), _PREC["neg"]
    elif isinstance(node, Bin):
        prec = _PREC[node.op]
        if node.op == "^":
            # right associative; the exponent slot is a factor
            text = _render(node.lhs, prec + 1) + "^" + _render(node.rhs, _PREC["neg"])
        else:
            sep = f" {node.op} " if node.op in "+-" else node.op
            text = _render(node.lhs, prec) + sep + _render(node.rhs, prec + 1)
    else:
        raise TypeError(f"not an expression node: {node!r}")
    if prec < min_prec:
        return "(" + text + ")"
    return text


def pretty(node: Expr) -> str:
    """Deterministic text form; ``parse_expr(pretty(e))`` reproduces ``e``."""
    return _render(node, 0)


# ---------------------------------------------------------------------------
# Second-order jets


@dataclass
class Jet:
    """Value, gradient and Hessian of a scalar at a point of R^4."""

    val: float
    g: np.ndarray  # shape (4,)
    h: np.ndarray  # shape (4, 4), symmetric

    @staticmethod
    def constant(value: float) -> "Jet":
        return Jet(float(value), np.zeros(4), np.zeros((4, 4)))

    @staticmethod
    def variable(value: float, axis: int) -> "Jet":
        g = np.zeros(4)
        g[axis] = 1.0
        return Jet(float(value), g, np.zeros((4, 4)))

    def __add__(self, other: "Jet") -> "Jet":
        return Jet(self.val + other.val, self.g + other.g, self.h + other.h)

    def __sub__(self, other: "Jet") -> "Jet":
        return Jet(self.val - other.val, self.g - other.g, self.h - other.h)

    def __neg__(self) -> "Jet":
        return Jet(-self.val, -self.g, -self.h)

    def __mul__(self, other: "Jet") -> "Jet":
        cross = np.outer(self.g, other.g)
        return Jet(
            self.val * other.val,
            self.val * other.g + other.val * self.g,
            self.val * other.h + other.val * self.h + cross + cross.T,
        )

    def __truediv__(self, other: "Jet") -> "Jet":
        if other.val == 0.0:
            raise DomainError("division by zero")
        inv = 1.0 / other.val
        q = self.val * inv
        qg = (self.g - q * other.g) * inv
        cross = np.outer(qg, other.g)
        qh = (self.h - q * other.h - cross - cross.T) * inv
        return Jet(q, qg, qh)


def _chain(u: Jet, f0: float, f1: float, f2: float) -> Jet:
    """Jet of f(u) given f, f', f'' at u.val."""
    return Jet(f0, f1 * u.g, f1 * u.h + f2 * np.outer(u.g, u.g))


def _jet_call(fn: str, u: Jet) -> Jet:
    v = u.val
    if fn == "exp":
        e = math.exp(v)
        return _chain(u, e, e, e)
    if fn == "ln":
        if v <= 0.0:
            raise DomainError(f"ln of non-positive value {v}")
        return _chain(u, math.log(v), 1.0 / v, -1.0 / (v * v))
    if fn == "sqrt":
        if v <= 0.0:
            raise DomainError(f"sqrt derivative undefined at {v}")
        r = math.sqrt(v)
        return _chain(u, r, 0.5 / r, -0.25 / (v * r))
    if fn == "sin":
        return _chain(u, math.sin(v), math.cos(v), -math.sin(v))
    if fn == "cos":
        return _chain(u, math.cos(v), -math.sin(v), -math.cos(v))
    if fn == "atan":
        d = 1.0 + v * v
        return _chain(u, math.atan(v), 1.0 / d, -2.0 * v / (d * d))
    raise ValueError(f"unknown function {fn!r}")


def _int_exponent(node: Expr):
    """Integer value of a literal exponent node, else None."""
    if isinstance(node, Num) and float(node.value).is_integer():
        return int(node.value)
    if isinstance(node, Neg):
        inner = _int_exponent(node.arg)
        if inner is not None:
            return -inner
    return None


def _jet_pow(base: Jet, exponent: Expr, point) -> Jet:
    n = _int_exponent(exponent)
    if n is not None:
        if n == 0:
            return Jet.constant(1.0)
        v = base.val
        try:
            f0 = v**n
            f1 = n * v ** (n - 1)
            f2 = n * (n - 1) * v ** (n - 2) if n * (n - 1) != 0 else 0.0
        except ZeroDivisionError:
            raise DomainError(f"zero raised to negative power {n}") from None
        return _chain(base, f0, f1, f2)
    if base.val <= 0.0:
        raise DomainError(
            f"non-integer power requires a positive base, got base {base.val}"
        )
    return _jet_call("exp", eval_jet(exponent, point) * _jet_call("ln", base))


def eval_jet(node: Expr, point) -> Jet:
    """Evaluate ``node`` to a second-order jet at ``point`` (4 coordinates)."""
    if isinstance(node, Num):
        return Jet.constant(node.value)
    if isinstance(node, Var):
        return Jet.variable(point[node.index - 1], node.index - 1)
    if isinstance(node, Neg):
        return -eval_jet(node.arg, point)
    if isinstance(node, Call):
        return _jet_call(node.fn, eval_jet(node.arg, point))
    if isinstance(node, Bin):
        if node.op == "^":
            return _jet_pow(eval_jet(node.lhs, point), node.rhs, point)
        a = eval_jet(node.lhs, point)
        b = eval_jet(node.rhs, point)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
    raise TypeError(f"not an expression node: {node!r}")


def _value_pow(node: Bin, point) -> float:
    base = eval_value(node.lhs, point)
    n = _int_exponent(node.rhs)
    if n is not None:
        try:
            return base**n
        except ZeroDivisionError:
            raise DomainError(f"zero raised to negative power {n}") from None
    if base <= 0.0:
        raise DomainError(
            f"non-integer power requires a positive base, got base {base}"
        )
    return math.exp(eval_value(node.rhs, point) * math.log(base))


def eval_value(node: Expr, point) -> float:
    """Evaluate ``node`` to a plain float (no derivatives)."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return float(point[node.index - 1])
    if isinstance(node, Neg):
        return -eval_value(node.arg, point)
    if isinstance(node, Call):
        v = eval_value(node.arg, point)
        if node.fn == "exp":
            return math.exp(v)
        if node.fn == "ln":
            if v <= 0.0:
                raise DomainError(f"ln of non-positive value {v}")
            return math.log(v)
        if node.fn == "sqrt":
            if v < 0.0:
                raise DomainError(f"sqrt of negative value {v}")
            return math.sqrt(v)
        if node.fn == "sin":
            return math.sin(v)
        if node.fn == "cos":
            return math.cos(v)
        if node.fn == "atan":
            return math.atan(v)
        raise ValueError(f"unknown function {node.fn!r}")
    if isinstance(node, Bin):
        if node.op == "^":
            return _value_pow(node, point)
        a = eval_value(node.lhs, point)
        b = eval_value(node.rhs, point)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if b == 0.0:
                raise DomainError("division by zero")
            return a / b
    raise TypeError(f"not an expression node: {node!r}")
