"""Right-hand sides ``f(x)`` of the scalar evolution equation ``x' = f(x)``.

Grammar (whitespace is insignificant)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?
    atom    := NUMBER | 'x' | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := 'sin' | 'cos' | 'exp' | 'tanh' | 'abs'
    NUMBER  := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
             | '.' digits [exponent]

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``; it is
right associative and its exponent may itself be negated (``2^-x``).
``abs`` is accepted for stress tests even though it is not smooth.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from typing import Callable, Union

__all__ = [
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "Expr",
    "ExprSyntaxError",
    "EvaluationError",
    "FUNCTIONS",
    "parse",
    "evaluate",
    "compile_expr",
    "to_text",
]

FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "tanh": math.tanh,
    "abs": abs,
}


class ExprSyntaxError(ValueError):
    """Raised by :func:`parse`; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class EvaluationError(ArithmeticError):
    """Evaluation produced no finite real (pole, overflow, domain error)."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]


# --- tokenizer -------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, message, offset=None):
        return ExprSyntaxError(message, self.tok[2] if offset is None else offset, self.text)

    def advance(self):
        tok = self.tok
        self.i += 1
        return tok

    def accept(self, *ops: str) -> str | None:
        kind, value, _ = self.tok
        if kind == "op" and value in ops:
            self.i += 1
            return value
        return None

    def parse(self) -> Expr:
        node = self.expr()
        kind, value, offset = self.tok
        if kind != "end":
            if value == ")":
                raise self.error("unbalanced parenthesis ')'")
            raise self.error(f"unexpected token {value!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while (op := self.accept("+", "-")) is not None:
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while (op := self.accept("*", "/")) is not None:
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, value, offset = self.tok
        if kind == "num":
            self.advance()
            number = float(value)
            if not math.isfinite(number):
                raise ExprSyntaxError("numeric literal out of range", offset, self.text)
            return Num(number)
        if kind == "name":
            self.advance()
            if value == "x":
                return Var()
            if value not in FUNCTIONS:
                raise ExprSyntaxError(f"unknown identifier {value!r}", offset, self.text)
            if not self.accept("("):
                raise self.error(f"expected '(' after {value!r}")
            arg = self.expr()
            if not self.accept(")"):
                raise self.error("unbalanced parenthesis: expected ')'")
            return Call(value, arg)
        if self.accept("("):
            node = self.expr()
            if not self.accept(")"):
                raise self.error("unbalanced parenthesis: expected ')'")
            return node
        if kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected token {value!r}")


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    >>> evaluate(parse("2*x + 1"), 3.0)
    7.0
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0, text)
    return _Parser(text).parse()


# --- evaluation ------------------------------------------------------------


def _checked(value: float) -> float:
    if not math.isfinite(value):
        raise EvaluationError(f"non-finite value {value!r}")
    return value


def _pow(a: float, b: float) -> float:
    try:
        return math.pow(a, b)
    except ValueError as exc:
        raise EvaluationError(f"{a!r} ^ {b!r} is not real") from exc


def _div(a: float, b: float) -> float:
    if b == 0.0:
        raise EvaluationError("division by zero")
    return a / b


_BINARY = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _div,
    "^": _pow,
}


@functools.lru_cache(maxsize=256)
def compile_expr(expr: Expr) -> Callable[[float], float]:
    """Closure evaluating ``expr``; every intermediate is checked for finiteness."""
    if isinstance(expr, Num):
        value = expr.value
        return lambda x: value
    if isinstance(expr, Var):
        return lambda x: x
    if isinstance(expr, Neg):
        inner = compile_expr(expr.operand)
        return lambda x: -inner(x)
    if isinstance(expr, BinOp):
        left, right = compile_expr(expr.left), compile_expr(expr.right)
        fn = _BINARY[expr.op]
        return lambda x: _checked(fn(left(x), right(x)))
    if isinstance(expr, Call):
        inner = compile_expr(expr.arg)
        fn = FUNCTIONS[expr.name]

        def call(x):
            try:
                return _checked(fn(inner(x)))
            except OverflowError as exc:
                raise EvaluationError(f"{expr.name} overflow") from exc

        return call
    raise TypeError(f"not an expression node: {expr!r}")


def evaluate(f: Expr, x: float) -> float:
    """Evaluate ``f`` at ``x`` in double precision.

    Raises :class:`EvaluationError` instead of ever returning inf or NaN.
    """
    if not math.isfinite(x):
        raise EvaluationError(f"argument must be finite, got {x!r}")
    try:
        return _checked(compile_expr(f)(x))
    except (OverflowError, ZeroDivisionError) as exc:
        raise EvaluationError(str(exc)) from exc


# --- printing --------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG_PREC = 3
_POW_PREC = 4
_ATOM_PREC = 5


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _POW_PREC if node.op == "^" else _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    return _ATOM_PREC


def _wrap(node: Expr, min_prec: int) -> str:
    text = to_text(node)
    return f"({text})" if _prec(node) < min_prec else text


def to_text(node: Expr) -> str:
    """Render with the fewest parentheses that re-parse to the same tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Call):
        return f"{node.name}({to_text(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _NEG_PREC)
    if node.op == "^":
        return f"{_wrap(node.left, _ATOM_PREC)}^{_wrap(node.right, _NEG_PREC)}"
    p = _PREC[node.op]
    return f"{_wrap(node.left, p)} {node.op} {_wrap(node.right, p + 1)}"
