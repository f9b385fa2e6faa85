"""Parser for the `.pols` polynomial-system text format.

Grammar, one polynomial per ``;``-terminated expression::

    file    :=  [header] poly+
    header  :=  "vars" ":" IDENT ("," IDENT)* ";"
    poly    :=  ["+"|"-"] term (("+"|"-") term)* ";"
    term    :=  factor ("*" factor)*
    factor  :=  INT ["/" INT]            (integer or rational coefficient)
             |  IDENT ["^" INT]          (variable, optional exponent >= 0)

Whitespace is insignificant; ``#`` starts a comment running to end of line.
Multiplication must be explicit (``x*y``, never ``xy``) and parentheses are
not part of the grammar: input is expanded form only.

Without a header, variables are collected in order of first appearance.
With a header, the declared order is authoritative and undeclared
identifiers are rejected.  Terms with equal exponent tuples are merged; a
polynomial whose terms all cancel is an error rather than an empty support
set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .core import PolySystem, make_polynomial

MAX_EXPONENT = 2**31 - 1

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[+\-*^/;:,])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    """Syntax or semantic error in `.pols` input, with 1-based position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str  # "int" | "ident" | one of "+-*^/;:," | "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        raw = m.group()
        if kind == "int":
            tokens.append(_Token("int", raw, line, col))
        elif kind == "ident":
            tokens.append(_Token("ident", raw, line, col))
        elif kind == "punct":
            tokens.append(_Token(raw, raw, line, col))
        # whitespace and comments are skipped, but still advance position
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            col = len(raw) - raw.rindex("\n")
        else:
            col += len(raw)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            shown = tok.text or "end of input"
            raise ParseError(f"expected {kind!r}, found {shown!r}", tok.line, tok.col)
        return self.next()

    def fail(self, message: str) -> None:
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    # --- grammar ---

    def parse(self) -> PolySystem:
        declared = self._header()
        var_order: list[str] = list(declared) if declared is not None else []
        var_index = {name: j for j, name in enumerate(var_order)}

        raw_polys: list[list[tuple[Fraction, dict[int, int]]]] = []
        poly_positions: list[tuple[int, int]] = []
        while self.peek().kind != "eof":
            start = self.peek()
            raw_polys.append(self._polynomial(declared, var_order, var_index))
            poly_positions.append((start.line, start.col))
        if not raw_polys:
            tok = self.peek()
            raise ParseError("input contains no polynomials", tok.line, tok.col)

        nv = len(var_order)
        polys = []
        for (line, col), raw in zip(poly_positions, raw_polys):
            terms = []
            for coeff, sparse in raw:
                expo = [0] * nv
                for j, e in sparse.items():
                    expo[j] = e
                terms.append((coeff, tuple(expo)))
            try:
                polys.append(make_polynomial(terms))
            except ValueError as exc:
                raise ParseError(str(exc), line, col) from None
        return PolySystem(vars=tuple(var_order), polys=tuple(polys))

    def _header(self) -> list[str] | None:
        if not (
            self.peek().kind == "ident"
            and self.peek().text == "vars"
            and self.peek(1).kind == ":"
        ):
            return None
        self.next()
        self.next()
        names: list[str] = []
        seen: set[str] = set()
        while True:
            tok = self.expect("ident")
            if tok.text in seen:
                raise ParseError(f"duplicate variable {tok.text!r}", tok.line, tok.col)
            seen.add(tok.text)
            names.append(tok.text)
            if self.peek().kind == ",":
                self.next()
                continue
            self.expect(";")
            return names

    def _polynomial(
        self,
        declared: list[str] | None,
        var_order: list[str],
        var_index: dict[str, int],
    ) -> list[tuple[Fraction, dict[int, int]]]:
        terms: list[tuple[Fraction, dict[int, int]]] = []
        sign = 1
        if self.peek().kind in ("+", "-"):
            sign = -1 if self.next().kind == "-" else 1
        while True:
            terms.append(self._term(sign, declared, var_order, var_index))
            tok = self.peek()
            if tok.kind == ";":
                self.next()
                return terms
            if tok.kind in ("+", "-"):
                sign = -1 if self.next().kind == "-" else 1
                continue
            self.fail(f"expected '+', '-', '*' or ';', found {tok.text or 'end of input'!r}")

    def _term(
        self,
        sign: int,
        declared: list[str] | None,
        var_order: list[str],
        var_index: dict[str, int],
    ) -> tuple[Fraction, dict[int, int]]:
        coeff = Fraction(sign)
        expo: dict[int, int] = {}
        while True:
            tok = self.peek()
            if tok.kind == "int":
                coeff *= self._number()
            elif tok.kind == "ident":
                j, e = self._power(declared, var_order, var_index)
                total = expo.get(j, 0) + e
                if total > MAX_EXPONENT:
                    raise ParseError(
                        f"exponent {total} exceeds {MAX_EXPONENT}", tok.line, tok.col
                    )
                expo[j] = total
            else:
                self.fail(f"expected a coefficient or variable, found {tok.text or 'end of input'!r}")
            if self.peek().kind == "*":
                self.next()
                continue
            return coeff, {j: e for j, e in expo.items() if e > 0}

    def _number(self) -> Fraction:
        num = self.expect("int")
        if self.peek().kind == "/":
            self.next()
            den = self.expect("int")
            if int(den.text) == 0:
                raise ParseError("zero denominator in rational", den.line, den.col)
            return Fraction(int(num.text), int(den.text))
        return Fraction(int(num.text))

    def _power(
        self,
        declared: list[str] | None,
        var_order: list[str],
        var_index: dict[str, int],
    ) -> tuple[int, int]:
        tok = self.expect("ident")
        if tok.text not in var_index:
            if declared is not None:
                raise ParseError(
                    f"variable {tok.text!r} not in vars declaration", tok.line, tok.col
                )
            var_index[tok.text] = len(var_order)
            var_order.append(tok.text)
        j = var_index[tok.text]
        e = 1
        if self.peek().kind == "^":
            self.next()
            etok = self.expect("int")
            e = int(etok.text)
            if e > MAX_EXPONENT:
                raise ParseError(
                    f"exponent {e} exceeds {MAX_EXPONENT}", etok.line, etok.col
                )
        return j, e


def parse_system(text: str) -> PolySystem:
    """Parse `.pols` text into a PolySystem.  Raises ParseError."""
    return _Parser(text).parse()
