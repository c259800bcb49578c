"""Small recursive-descent parser for field expressions.

Grammar (whitespace-insensitive):

    expr   := term ('+' term)*
    term   := RATIONAL | RATIONAL? factor
    factor := atom | 'd^'INT factor | ':' factor factor+ ':'
    atom   := ('beta'|'gamma'|'b'|'c'|'g')'_'INT

Multi-factor products fold to the right, matching the left-nested normal
ordering convention; 'g' is accepted as a short alias for 'gamma'.  The
canonical printer lives in fields.format_poly and round-trips through this
parser.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import UsageError
from .fields import (KIND_BY_NAME, FieldPoly, FreeFieldContext, normal_order)


class ParseError(UsageError):
    def __init__(self, message, line, col):
        self.line = line
        self.col = col
        super().__init__(f"{message} (line {line}, column {col})")


# -- AST ----------------------------------------------------------------------

@dataclass(frozen=True)
class GenRef:
    kind: str
    index: int

    def to_poly(self, ctx):
        return FieldPoly.generator(ctx, self.kind, self.index)


@dataclass(frozen=True)
class Deriv:
    order: int
    arg: object

    def to_poly(self, ctx):
        return self.arg.to_poly(ctx).derivative(self.order)


@dataclass(frozen=True)
class NProd:
    factors: tuple

    def to_poly(self, ctx):
        polys = [f.to_poly(ctx) for f in self.factors]
        out = polys[-1]
        for p in reversed(polys[:-1]):
            out = normal_order(p, out)
        return out


@dataclass(frozen=True)
class Scaled:
    coeff: Fraction
    arg: object     # None encodes a multiple of the identity field

    def to_poly(self, ctx):
        base = FieldPoly.identity(ctx) if self.arg is None else self.arg.to_poly(ctx)
        return self.coeff * base


@dataclass(frozen=True)
class Sum:
    terms: tuple

    def to_poly(self, ctx):
        out = self.terms[0].to_poly(ctx)
        for t in self.terms[1:]:
            out = out + t.to_poly(ctx)
        return out


# -- tokenizer ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<deriv>d\^\d+)"
    r"|(?P<name>(beta|gamma|b|c|g)_\d+)"
    r"|(?P<rat>[+-]?\d+(/\d+)?)"
    r"|(?P<colon>:)"
    r"|(?P<plus>\+)"
)


@dataclass
class _Token:
    type: str
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unknown symbol {src[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            tokens.append(_Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens, ctx):
        self.tokens = tokens
        self.ctx = ctx
        self.pos = 0

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self):
        tok = self._peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("", "", 1, 1)
            raise ParseError("unexpected end of input", last.line,
                             last.col + len(last.text))
        self.pos += 1
        return tok

    def parse(self):
        expr = self.parse_sum()
        tok = self._peek()
        if tok is not None:
            raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col)
        return expr

    def parse_sum(self):
        terms = [self.parse_term()]
        while True:
            tok = self._peek()
            if tok is not None and tok.type == "plus":
                self._next()
                terms.append(self.parse_term())
            elif tok is not None and tok.type == "rat" and tok.text.startswith("-"):
                # allow 'a - b' style input as '+ -b'
                terms.append(self.parse_term())
            else:
                break
        return Sum(tuple(terms)) if len(terms) > 1 else terms[0]

    def parse_term(self):
        tok = self._peek()
        coeff = None
        if tok is not None and tok.type == "rat":
            self._next()
            coeff = Fraction(tok.text)
            nxt = self._peek()
            if nxt is None or nxt.type in ("plus",) or \
                    (nxt.type == "rat" and nxt.text.startswith("-")):
                return Scaled(coeff, None)
        factor = self.parse_factor()
        if coeff is None:
            return factor
        return Scaled(coeff, factor)

    def parse_factor(self):
        tok = self._next()
        if tok.type == "deriv":
            order = int(tok.text[2:])
            return Deriv(order, self.parse_factor())
        if tok.type == "name":
            name, idx = tok.text.rsplit("_", 1)
            if name == "g":
                name = "gamma"
            kind = KIND_BY_NAME[name]
            index = int(idx)
            if index < 1 or index > self.ctx.rank_of(kind):
                raise ParseError(f"index {index} out of range for {name}",
                                 tok.line, tok.col)
            return GenRef(name, index)
        if tok.type == "colon":
            factors = [self.parse_factor()]
            while True:
                nxt = self._peek()
                if nxt is None:
                    raise ParseError("unbalanced ':'", tok.line, tok.col)
                if nxt.type == "colon":
                    self._next()
                    break
                if nxt.type in ("plus",):
                    raise ParseError("unbalanced ':'", tok.line, tok.col)
                factors.append(self.parse_factor())
            if len(factors) < 2:
                raise ParseError("normally ordered product needs two factors",
                                 tok.line, tok.col)
            return NProd(tuple(factors))
        raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col)


def parse_field(src: str, ctx: FreeFieldContext):
    """Parse a field expression into an AST; AST.to_poly(ctx) evaluates it."""
    tokens = _tokenize(src)
    if not tokens:
        raise ParseError("empty expression", 1, 1)
    return _Parser(tokens, ctx).parse()


def parse_poly(src: str, ctx: FreeFieldContext) -> FieldPoly:
    return parse_field(src, ctx).to_poly(ctx)
