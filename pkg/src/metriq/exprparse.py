"""Tiny expression language over one variable ``x``.

Grammar (ASCII only, at most 4096 bytes):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' factor)?          right-associative
    base   := NUMBER | 'x' | IDENT '(' expr ')' | '(' expr ')' | '-' base

Unary minus lives in ``base``, so it binds tighter than ``^``: the source
``-x^2`` means ``(-x)^2``. A minus directly in front of a numeric literal is
folded into the literal at parse time, which keeps ``to_source`` round trips
structural: ``parse(to_source(t)) == t`` for any tree the parser or the
differentiator produces.

Functions are the fixed set in ``BUILTINS``; each takes exactly one argument.
``diff`` applies textbook rules with light simplification (constant folding
plus the 0/1 identities), nothing cleverer.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import DomainError, ParseError, RangeOverflow

__all__ = [
    "BUILTINS",
    "MAX_SOURCE_BYTES",
    "Expr",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "parse",
    "to_source",
    "evaluate",
    "diff",
]

BUILTINS = frozenset({"sin", "cos", "exp", "ln", "sqrt"})
MAX_SOURCE_BYTES = 4096


@dataclass(frozen=True)
class Expr:
    """Base class for AST nodes."""


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Neg(Expr):
    child: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr


# ------------------------------------------------------------ tokenizer

_NUMBER = re.compile(r"\d+(\.\d+)?([eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_OPS = set("+-*/^()")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    # (kind, text, byte offset); ASCII is enforced first so that character
    # positions and byte positions agree
    for i, ch in enumerate(src):
        if ord(ch) > 127:
            raise ParseError(
                f"unexpected non-ASCII character {ch!r}", len(src[:i].encode("utf-8"))
            )
    tokens: list[tuple[str, str, int]] = []
    i = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch in _OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        m = _NUMBER.match(src, i)
        if m:
            tokens.append(("number", m.group(0), i))
            i = m.end()
            continue
        m = _IDENT.match(src, i)
        if m:
            tokens.append(("ident", m.group(0), i))
            i = m.end()
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, text, off = self.peek()
        if kind != "op" or text != op:
            what = "end of input" if kind == "end" else repr(text)
            raise ParseError(f"expected {op!r}, found {what}", off)
        self.advance()

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = BinOp(text, node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = BinOp(text, node, self.factor())
            else:
                return node

    def factor(self) -> Expr:
        node = self.base()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return BinOp("^", node, self.factor())
        return node

    def base(self) -> Expr:
        kind, text, off = self.advance()
        if kind == "number":
            return Const(float(text))
        if kind == "op" and text == "-":
            inner = self.base()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Neg(inner)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "ident":
            if text == "x":
                return Var()
            if text in BUILTINS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            raise ParseError(f"unknown identifier {text!r}", off)
        what = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"expected a value, found {what}", off)


def parse(src: str) -> Expr:
    """Parse ``src`` into an AST.

    Raises ParseError (carrying the byte offset) on any malformed input,
    including unknown identifiers and sources longer than 4096 bytes.
    """
    if len(src.encode("utf-8")) > MAX_SOURCE_BYTES:
        raise ParseError(f"source exceeds {MAX_SOURCE_BYTES} bytes", MAX_SOURCE_BYTES)
    parser = _Parser(_tokenize(src))
    node = parser.expr()
    kind, text, off = parser.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing input {text!r}", off)
    return node


# -------------------------------------------------------------- printer


def _shape_level(node: Expr) -> int:
    # 0 add, 1 mul, 2 pow; unary and atoms are base-shaped (3)
    if isinstance(node, BinOp):
        return {"+": 0, "-": 0, "*": 1, "/": 1, "^": 2}[node.op]
    return 3


def _wrap(node: Expr, minimum: int) -> str:
    text = to_source(node)
    if _shape_level(node) < minimum:
        return f"({text})"
    return text


def to_source(node: Expr) -> str:
    """Render an AST back to source. Inverse of ``parse`` up to literal folding."""
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return "-" + _wrap(node.child, 3)
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if isinstance(node, BinOp):
        if node.op in "+-":
            return f"{to_source(node.left)}{node.op}{_wrap(node.right, 1)}"
        if node.op in "*/":
            return f"{_wrap(node.left, 1)}{node.op}{_wrap(node.right, 2)}"
        # '^': left must be base-shaped, right may itself be a power chain
        return f"{_wrap(node.left, 3)}^{_wrap(node.right, 2)}"
    raise TypeError(f"not an expression node: {node!r}")


# ------------------------------------------------------------- evaluate


def _finite(v: float, what: str) -> float:
    if math.isinf(v):
        raise RangeOverflow(f"{what} overflowed double range")
    return v


def evaluate(node: Expr, x: float) -> float:
    """Evaluate the expression at the point ``x``.

    Powers follow real semantics: a negative base needs an integer exponent,
    ``0^e`` needs ``e >= 0``. Domain violations raise DomainError and values
    leaving double range raise RangeOverflow.
    """
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -evaluate(node.child, x)
    if isinstance(node, Call):
        v = evaluate(node.arg, x)
        if node.func == "sin":
            return math.sin(v)
        if node.func == "cos":
            return math.cos(v)
        if node.func == "exp":
            try:
                return math.exp(v)
            except OverflowError as exc:
                raise RangeOverflow(f"exp({v:g}) overflows") from exc
        if node.func == "ln":
            if v <= 0.0:
                raise DomainError(f"ln of non-positive value {v:g}")
            return math.log(v)
        if node.func == "sqrt":
            if v < 0.0:
                raise DomainError(f"sqrt of negative value {v:g}")
            return math.sqrt(v)
        raise DomainError(f"unknown function {node.func!r}")
    if isinstance(node, BinOp):
        a = evaluate(node.left, x)
        b = evaluate(node.right, x)
        if node.op == "+":
            return _finite(a + b, "sum")
        if node.op == "-":
            return _finite(a - b, "difference")
        if node.op == "*":
            return _finite(a * b, "product")
        if node.op == "/":
            if b == 0.0:
                raise DomainError("division by zero")
            return _finite(a / b, "quotient")
        try:
            return _finite(math.pow(a, b), "power")
        except ValueError as exc:
            raise DomainError(f"invalid power {a:g}^{b:g}") from exc
        except OverflowError as exc:
            raise RangeOverflow(f"power {a:g}^{b:g} overflows") from exc
    raise TypeError(f"not an expression node: {node!r}")


# ----------------------------------------------------- differentiation

# Smart constructors: constant folding and the 0/1 identities. They keep
# derivative trees small without doing real algebra.


def _const_fold(op: str, a: float, b: float) -> Expr | None:
    try:
        if op == "+":
            v = a + b
        elif op == "-":
            v = a - b
        elif op == "*":
            v = a * b
        elif op == "/":
            if b == 0.0:
                return None
            v = a / b
        else:
            v = math.pow(a, b)
    except (ValueError, OverflowError):
        return None
    if not math.isfinite(v):
        return None
    return Const(v)


def _add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        folded = _const_fold("+", a.value, b.value)
        if folded is not None:
            return folded
    if a == Const(0.0):
        return b
    if b == Const(0.0):
        return a
    return BinOp("+", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        folded = _const_fold("-", a.value, b.value)
        if folded is not None:
            return folded
    if b == Const(0.0):
        return a
    if a == Const(0.0):
        return _neg(b)
    return BinOp("-", a, b)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.child
    return Neg(a)


def _mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        folded = _const_fold("*", a.value, b.value)
        if folded is not None:
            return folded
    if a == Const(0.0) or b == Const(0.0):
        return Const(0.0)
    if a == Const(1.0):
        return b
    if b == Const(1.0):
        return a
    return BinOp("*", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        folded = _const_fold("/", a.value, b.value)
        if folded is not None:
            return folded
    if b == Const(1.0):
        return a
    if a == Const(0.0) and b != Const(0.0):
        return Const(0.0)
    return BinOp("/", a, b)


def _pow(a: Expr, b: Expr) -> Expr:
    if isinstance(b, Const):
        if b.value == 1.0:
            return a
        if b.value == 0.0:
            return Const(1.0)
        if isinstance(a, Const):
            folded = _const_fold("^", a.value, b.value)
            if folded is not None:
                return folded
    return BinOp("^", a, b)


def diff(node: Expr) -> Expr:
    """Symbolic derivative with respect to ``x``."""
    if isinstance(node, Const):
        return Const(0.0)
    if isinstance(node, Var):
        return Const(1.0)
    if isinstance(node, Neg):
        return _neg(diff(node.child))
    if isinstance(node, Call):
        du = diff(node.arg)
        u = node.arg
        if node.func == "sin":
            return _mul(Call("cos", u), du)
        if node.func == "cos":
            return _neg(_mul(Call("sin", u), du))
        if node.func == "exp":
            return _mul(Call("exp", u), du)
        if node.func == "ln":
            return _div(du, u)
        if node.func == "sqrt":
            return _div(du, _mul(Const(2.0), Call("sqrt", u)))
        raise DomainError(f"unknown function {node.func!r}")
    if isinstance(node, BinOp):
        a, b = node.left, node.right
        da, db = diff(a), diff(b)
        if node.op == "+":
            return _add(da, db)
        if node.op == "-":
            return _sub(da, db)
        if node.op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if node.op == "/":
            return _div(_sub(_mul(da, b), _mul(a, db)), _mul(b, b))
        # power rule for a constant exponent, logarithmic rule otherwise
        if isinstance(b, Const):
            return _mul(_mul(b, _pow(a, Const(b.value - 1.0))), da)
        return _mul(node, _add(_mul(db, Call("ln", a)), _div(_mul(b, da), a)))
    raise TypeError(f"not an expression node: {node!r}")
