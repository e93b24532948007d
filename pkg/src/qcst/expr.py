"""Expressions for metric components: tokenizer, parser, evaluators.

Grammar, loosest binding first::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary_exponent)?      right associative
    atom    := NUMBER | NAME | NAME '(' sum ')' | '(' sum ')'

so ``-t^2`` is ``-(t^2)`` and ``2^3^2`` is ``2^(3^2)``. Exponents must be
constant and integer valued; fractional powers go through ``sqrt``/``exp``.
"""

import math
import re
from dataclasses import dataclass
from typing import Mapping

from . import jet
from .exceptions import (
    BadExponent,
    UnbalancedParenthesis,
    UnboundName,
    UnexpectedCharacter,
    UnexpectedToken,
    UnknownFunction,
)

FUNCTIONS = ("exp", "log", "sin", "cos", "sinh", "cosh", "sqrt")

_SYMBOLS = {
    "+": "plus",
    "-": "minus",
    "*": "star",
    "/": "slash",
    "^": "caret",
    "(": "lparen",
    ")": "rparen",
    ",": "comma",
}
_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(src):
    """Split ``src`` into tokens by maximal munch; whitespace is skipped."""
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        ch = src[pos]
        if ch.isspace():
            pos += 1
            continue
        offset = len(src[:pos].encode("utf-8"))
        if ch in _SYMBOLS:
            tokens.append(Token(_SYMBOLS[ch], ch, offset))
            pos += 1
            continue
        m = _NUMBER.match(src, pos)
        if m:
            text = m.group(0)
            value = float(text)
            if not math.isfinite(value):
                raise UnexpectedCharacter(f"number {text!r} is not finite", offset)
            tokens.append(Token("number", text, offset))
            pos = m.end()
            if pos < n and src[pos] == ".":
                raise UnexpectedCharacter("malformed number", len(src[:pos].encode("utf-8")))
            continue
        m = _NAME.match(src, pos)
        if m:
            tokens.append(Token("identifier", m.group(0), offset))
            pos = m.end()
            continue
        raise UnexpectedCharacter(f"unexpected character {ch!r}", offset)
    return tokens


# ---------------------------------------------------------------------------
# tree
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Number:
    value: float
    position: int = 0


@dataclass(frozen=True)
class Variable:
    name: str
    position: int = 0


@dataclass(frozen=True)
class Parameter:
    name: str
    position: int = 0


@dataclass(frozen=True)
class Unary:
    op: str
    child: object
    position: int = 0


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object
    position: int = 0


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    position: int = 0


def same_tree(a, b):
    """Structural equality ignoring source positions."""
    if type(a) is not type(b):
        return False
    if isinstance(a, Number):
        return a.value == b.value
    if isinstance(a, (Variable, Parameter)):
        return a.name == b.name
    if isinstance(a, Unary):
        return a.op == b.op and same_tree(a.child, b.child)
    if isinstance(a, Binary):
        return a.op == b.op and same_tree(a.left, b.left) and same_tree(a.right, b.right)
    return a.func == b.func and len(a.args) == len(b.args) and all(
        same_tree(x, y) for x, y in zip(a.args, b.args)
    )


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens, coordinates, end):
        self.tokens = list(tokens)
        self.i = 0
        self.coordinates = set(coordinates)
        self.end = end

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, *expected):
        tok = self.peek()
        wanted = " or ".join(expected)
        if tok is None:
            raise UnexpectedToken(f"unexpected end of input, expected {wanted}", self.end, expected=expected)
        if tok.kind == "rparen":
            raise UnbalancedParenthesis("unmatched ')'", tok.position)
        raise UnexpectedToken(f"unexpected {tok.text!r}, expected {wanted}", tok.position, expected=expected)

    def parse_sum(self):
        node = self.parse_product()
        while (tok := self.peek()) is not None and tok.kind in ("plus", "minus"):
            self.advance()
            node = Binary(tok.text, node, self.parse_product(), tok.position)
        return node

    def parse_product(self):
        node = self.parse_unary()
        while (tok := self.peek()) is not None and tok.kind in ("star", "slash"):
            self.advance()
            node = Binary(tok.text, node, self.parse_unary(), tok.position)
        return node

    def parse_unary(self):
        tok = self.peek()
        if tok is not None and tok.kind == "minus":
            self.advance()
            return Unary("-", self.parse_unary(), tok.position)
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        tok = self.peek()
        if tok is not None and tok.kind == "caret":
            self.advance()
            exponent = self.parse_power()
            _integer_exponent(exponent, tok.position)
            return Binary("^", base, exponent, tok.position)
        return base

    def parse_atom(self):
        tok = self.peek()
        if tok is None:
            self.fail("number", "name", "'('")
        if tok.kind == "number":
            self.advance()
            return Number(float(tok.text), tok.position)
        if tok.kind == "identifier":
            self.advance()
            nxt = self.peek()
            if nxt is not None and nxt.kind == "lparen":
                if tok.text not in FUNCTIONS:
                    raise UnknownFunction(f"unknown function {tok.text!r}", tok.position)
                self.advance()
                arg = self.parse_sum()
                self.close(nxt)
                return Call(tok.text, (arg,), tok.position)
            if tok.text in self.coordinates:
                return Variable(tok.text, tok.position)
            return Parameter(tok.text, tok.position)
        if tok.kind == "lparen":
            self.advance()
            node = self.parse_sum()
            self.close(tok)
            return node
        self.fail("number", "name", "'('")

    def close(self, opener):
        tok = self.peek()
        if tok is None:
            raise UnbalancedParenthesis("missing ')'", opener.position)
        if tok.kind == "comma":
            raise UnexpectedToken("functions take exactly one argument", tok.position, expected=("')'",))
        if tok.kind != "rparen":
            self.fail("')'")
        self.advance()


def _integer_exponent(node, position):
    try:
        value = evaluate_scalar(node, {}, {})
    except (UnboundName, ArithmeticError, ValueError):
        raise BadExponent("exponent must be a constant integer", position) from None
    if not float(value).is_integer():
        raise BadExponent(f"exponent {value} is not an integer", position)


def parse(tokens, coordinates=(), source_length=None):
    """Build an expression tree from ``tokens``.

    Identifiers listed in ``coordinates`` become ``Variable`` nodes; any other
    bare identifier is a ``Parameter``.
    """
    tokens = list(tokens)
    if not tokens:
        raise UnexpectedToken("empty expression", 0, expected=("number", "name", "'('"))
    end = source_length if source_length is not None else tokens[-1].position + len(tokens[-1].text)
    p = _Parser(tokens, coordinates, end)
    node = p.parse_sum()
    if p.peek() is not None:
        p.fail("operator", "end of input")
    return node


def parse_expression(src, coordinates=()):
    return parse(tokenize(src), coordinates, len(src.encode("utf-8")))


def to_source(node):
    """Print ``node`` fully parenthesized; re-parsing gives the same tree."""
    if isinstance(node, Number):
        return repr(float(node.value))
    if isinstance(node, (Variable, Parameter)):
        return node.name
    if isinstance(node, Unary):
        return f"(-{to_source(node.child)})"
    if isinstance(node, Binary):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    return f"{node.func}({to_source(node.args[0])})"


def names(node, kind=None):
    """Set of variable and/or parameter names used by ``node``."""
    if isinstance(node, (Variable, Parameter)):
        return {node.name} if kind is None or isinstance(node, kind) else set()
    if isinstance(node, Unary):
        return names(node.child, kind)
    if isinstance(node, Binary):
        return names(node.left, kind) | names(node.right, kind)
    if isinstance(node, Call):
        return set().union(*(names(a, kind) for a in node.args))
    return set()


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _lookup(node, env, params):
    if isinstance(node, Variable) and node.name in env:
        return env[node.name]
    if node.name in params:
        return params[node.name]
    if node.name in env:
        return env[node.name]
    raise UnboundName(f"unbound name {node.name!r}", node.position)


def evaluate(node, env: Mapping, params: Mapping):
    """Evaluate over jets. ``env`` maps coordinates to ``Jet3``."""
    if isinstance(node, Number):
        return jet.Jet3.constant(node.value)
    if isinstance(node, (Variable, Parameter)):
        v = _lookup(node, env, params)
        return v if isinstance(v, jet.Jet3) else jet.Jet3.constant(float(v))
    try:
        if isinstance(node, Unary):
            return -evaluate(node.child, env, params)
        if isinstance(node, Binary):
            left = evaluate(node.left, env, params)
            if node.op == "^":
                n = int(evaluate_scalar(node.right, {}, {}))
                return left ** n
            right = evaluate(node.right, env, params)
            if node.op == "+":
                return left + right
            if node.op == "-":
                return left - right
            if node.op == "*":
                return left * right
            return left / right
        arg = evaluate(node.args[0], env, params)
        return jet.jet_elementary(node.func, arg)
    except ArithmeticError as exc:
        if getattr(exc, "position", None) is None:
            exc.position = node.position
        raise


_SCALAR_FUNCS = {
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "sqrt": math.sqrt,
}


def evaluate_scalar(node, env: Mapping, params: Mapping):
    """Plain float evaluation; the reference path for jet value parts."""
    if isinstance(node, Number):
        return node.value
    if isinstance(node, (Variable, Parameter)):
        return float(_lookup(node, env, params))
    if isinstance(node, Unary):
        return -evaluate_scalar(node.child, env, params)
    if isinstance(node, Binary):
        left = evaluate_scalar(node.left, env, params)
        right = evaluate_scalar(node.right, env, params)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            return left / right
        n = int(right)
        return 1.0 / left ** -n if n < 0 else left ** n
    return _SCALAR_FUNCS[node.func](evaluate_scalar(node.args[0], env, params))
