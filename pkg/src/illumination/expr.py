"""Expression trees for univariate real functions and a recursive-descent parser.

Grammar (whitespace-insensitive)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?            right-associative
    atom   := NUMBER | "x" | "pi" | "e" | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := sin | cos | exp | ln | sqrt | erf

Unary minus binds looser than ``^`` so that ``-x^2`` means ``-(x^2)``.
Exponents must be constant: ``x^x`` is rejected at parse time.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import ExprSyntaxError, NonConstantExponent, UnknownIdentifier

UNARY_FUNCS = ("sin", "cos", "exp", "ln", "sqrt", "erf")
NAMED_CONSTANTS = {"pi": math.pi, "e": math.e}
BINARY_OPS = ("add", "sub", "mul", "div", "pow")

_OP_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


@dataclass(frozen=True)
class Constant:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"constant must be finite, got {self.value!r}")

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class NamedConstant:
    name: str

    def __post_init__(self):
        if self.name not in NAMED_CONSTANTS:
            raise ValueError(f"unknown named constant {self.name!r}")

    @property
    def value(self) -> float:
        return NAMED_CONSTANTS[self.name]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Variable:
    def __str__(self):
        return "x"


@dataclass(frozen=True)
class Unary:
    op: str
    child: "Expr"

    def __post_init__(self):
        if self.op != "neg" and self.op not in UNARY_FUNCS:
            raise ValueError(f"unknown unary op {self.op!r}")

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary op {self.op!r}")
        if self.op == "pow" and has_variable(self.right):
            raise ValueError("exponent must not depend on x")

    def __str__(self):
        return render(self)


Expr = Union[Constant, NamedConstant, Variable, Unary, Binary]


def has_variable(node: Expr) -> bool:
    if isinstance(node, Variable):
        return True
    if isinstance(node, Unary):
        return has_variable(node.child)
    if isinstance(node, Binary):
        return has_variable(node.left) or has_variable(node.right)
    return False


def render(node: Expr) -> str:
    """Debug printer. Fully parenthesised, so ``parse(render(e)) == e``."""
    if isinstance(node, Constant):
        return repr(float(node.value))
    if isinstance(node, NamedConstant):
        return node.name
    if isinstance(node, Variable):
        return "x"
    if isinstance(node, Unary):
        if node.op == "neg":
            return f"(-{render(node.child)})"
        return f"{node.op}({render(node.child)})"
    return f"({render(node.left)} {_OP_SYMBOL[node.op]} {render(node.right)})"


# -- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "name" | "op" | "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(pos, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _expect(self, text: str) -> _Token:
        if self.tok.kind != "op" or self.tok.text != text:
            found = self.tok.text or "end of input"
            raise ExprSyntaxError(self.tok.pos, f"expected {text!r}, found {found!r}")
        return self._advance()

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExprSyntaxError(self.tok.pos, f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = "add" if self._advance().text == "+" else "sub"
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = "mul" if self._advance().text == "*" else "div"
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self._advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            caret = self._advance()
            exponent = self.unary()
            if has_variable(exponent):
                raise NonConstantExponent(caret.pos, "exponent must not depend on x")
            return Binary("pow", base, exponent)
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self._advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ExprSyntaxError(tok.pos, f"number {tok.text!r} overflows")
            return Constant(value)
        if tok.kind == "name":
            self._advance()
            if tok.text == "x":
                return Variable()
            if tok.text in NAMED_CONSTANTS:
                return NamedConstant(tok.text)
            if tok.text in UNARY_FUNCS:
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Unary(tok.text, arg)
            raise UnknownIdentifier(tok.pos, f"unknown identifier {tok.text!r}")
        if tok.kind == "op" and tok.text == "(":
            self._advance()
            node = self.expr()
            self._expect(")")
            return node
        found = tok.text or "end of input"
        raise ExprSyntaxError(tok.pos, f"unexpected {found!r}")


def parse(text: str) -> Expr:
    """Parse function text in the variable ``x`` into an expression tree.

    Raises
    ------
    ExprSyntaxError
        Malformed input; ``position`` is the offending character offset.
    NonConstantExponent
        The right operand of ``^`` mentions ``x``.
    UnknownIdentifier
        A name other than ``x``, ``pi``, ``e`` or a builtin function.
    """
    return _Parser(text).parse()


def as_expr(f: Union[Expr, str]) -> Expr:
    return parse(f) if isinstance(f, str) else f
