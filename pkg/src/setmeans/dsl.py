"""Textual set-expression language: parser and canonical renderer.

Grammar (whitespace insignificant):

    expr    := term { "U" term }
    term    := prim | "(" expr ")" | "shift(" expr "," rat ")"
                    | "below(" expr "," rat ")" | "above(" expr "," rat ")"
    prim    := "{" rat { "," rat } "}"
             | "seq(" rat "," rat "," rat ")"
             | "tower(" int "," rat "," rat [ "," rat ] ")"
             | "[" rat "," rat "]"
             | "cantor(" rat "," rat "," int "," rat ")"
    rat     := optionally signed integer [ "/" positive integer ]

``below``/``above`` keep the part of the set at or below/above the cut;
``shift`` translates.  ``tower`` takes an optional fourth scale argument
(default 1) so that cut results render losslessly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q

from .blocks import Cantor, Finite, GeomSeq, Interval, Tower
from .errors import ParseError
from .sets import CutAbove, CutBelow, Leaf, SetExpr, Translate, Union


@dataclass(frozen=True)
class _Token:
    kind: str  # "int", "word", or a literal punctuation mark
    text: str
    line: int
    column: int


_PUNCT = set("()[]{},/U")


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(src):
        ch = src[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch == "U":
            tokens.append(_Token("U", "U", line, col))
            i += 1
            col += 1
            continue
        if ch in _PUNCT:
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch in "+-" or ch.isdigit():
            j = i + 1 if ch in "+-" else i
            if j >= len(src) or not src[j].isdigit():
                raise ParseError(f"stray {ch!r}", line, col, expected=("integer",))
            k = j
            while k < len(src) and src[k].isdigit():
                k += 1
            tokens.append(_Token("int", src[i:k], line, col))
            col += k - i
            i = k
            continue
        if ch.isalpha():
            k = i
            while k < len(src) and src[k].isalpha():
                k += 1
            tokens.append(_Token("word", src[i:k], line, col))
            col += k - i
            i = k
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col,
                         expected=("expression",))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.pos = 0
        self.src = src

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _fail(self, expected):
        tok = self._peek()
        if tok is None:
            lines = self.src.split("\n")
            line = len(lines)
            col = len(lines[-1]) + 1
            raise ParseError("unexpected end of input", line, col, expected=expected)
        raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.column,
                         expected=expected)

    def _eat(self, kind):
        tok = self._peek()
        if tok is None or tok.kind != kind:
            self._fail((kind,))
        self.pos += 1
        return tok

    def parse(self) -> SetExpr:
        e = self.expr()
        if self._peek() is not None:
            self._fail(("U", "end of input"))
        return e

    def expr(self) -> SetExpr:
        parts = [self.term()]
        while True:
            tok = self._peek()
            if tok is not None and tok.kind == "U":
                self.pos += 1
                parts.append(self.term())
            else:
                break
        return parts[0] if len(parts) == 1 else Union(tuple(parts))

    def term(self) -> SetExpr:
        tok = self._peek()
        if tok is None:
            self._fail(("{", "[", "(", "seq", "tower", "cantor", "shift", "below", "above"))
        if tok.kind == "(":
            self.pos += 1
            e = self.expr()
            self._eat(")")
            return e
        if tok.kind == "word" and tok.text in ("shift", "below", "above"):
            self.pos += 1
            self._eat("(")
            child = self.expr()
            self._eat(",")
            at = self.rat()
            self._eat(")")
            if tok.text == "shift":
                return Translate(child, at)
            if tok.text == "below":
                return CutBelow(child, at)
            return CutAbove(child, at)
        return self.prim()

    def prim(self) -> SetExpr:
        tok = self._peek()
        if tok is None:
            self._fail(("{", "[", "seq", "tower", "cantor"))
        if tok.kind == "{":
            self.pos += 1
            pts = [self.rat()]
            while self._peek() is not None and self._peek().kind == ",":
                self.pos += 1
                pts.append(self.rat())
            self._eat("}")
            return Leaf(Finite(tuple(pts)))
        if tok.kind == "[":
            self.pos += 1
            lo = self.rat()
            self._eat(",")
            hi = self.rat()
            self._eat("]")
            return Leaf(Interval(lo, hi))
        if tok.kind == "word":
            if tok.text == "seq":
                self.pos += 1
                self._eat("(")
                a = self.rat()
                self._eat(",")
                w = self.rat()
                self._eat(",")
                r = self.rat()
                self._eat(")")
                return Leaf(GeomSeq(a, w, r))
            if tok.text == "tower":
                self.pos += 1
                self._eat("(")
                k_tok = self._eat("int")
                self._eat(",")
                a = self.rat()
                self._eat(",")
                r = self.rat()
                w = Q(1)
                if self._peek() is not None and self._peek().kind == ",":
                    self.pos += 1
                    w = self.rat()
                self._eat(")")
                return Leaf(Tower(int(k_tok.text), a, w, r))
            if tok.text == "cantor":
                self.pos += 1
                self._eat("(")
                lo = self.rat()
                self._eat(",")
                hi = self.rat()
                self._eat(",")
                m_tok = self._eat("int")
                self._eat(",")
                r = self.rat()
                self._eat(")")
                return Leaf(Cantor(lo, hi, int(m_tok.text), r))
        self._fail(("{", "[", "(", "seq", "tower", "cantor", "shift", "below", "above"))

    def rat(self) -> Q:
        num_tok = self._eat("int")
        num = int(num_tok.text)
        if self._peek() is not None and self._peek().kind == "/":
            self.pos += 1
            den_tok = self._eat("int")
            den = int(den_tok.text)
            if den <= 0 or den_tok.text[0] in "+-":
                raise ParseError("denominator must be a positive integer",
                                 den_tok.line, den_tok.column, expected=("positive integer",))
            return Q(num, den)
        return Q(num)


def parse(src: str) -> SetExpr:
    """Parse source text; ParseError carries 1-based line/column."""
    return _Parser(src).parse()


def fmt_q(q: Q) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def render(e: SetExpr) -> str:
    """Canonical text; parsing it back normalizes to the same set."""
    if isinstance(e, Leaf):
        b = e.block
        if isinstance(b, Finite):
            return "{" + ", ".join(fmt_q(p) for p in b.points) + "}"
        if isinstance(b, GeomSeq):
            return f"seq({fmt_q(b.anchor)}, {fmt_q(b.scale)}, {fmt_q(b.ratio)})"
        if isinstance(b, Tower):
            if b.scale == 1:
                return f"tower({b.level}, {fmt_q(b.anchor)}, {fmt_q(b.ratio)})"
            return (f"tower({b.level}, {fmt_q(b.anchor)}, {fmt_q(b.ratio)}, "
                    f"{fmt_q(b.scale)})")
        if isinstance(b, Interval):
            return f"[{fmt_q(b.lo)}, {fmt_q(b.hi)}]"
        return (f"cantor({fmt_q(b.lo)}, {fmt_q(b.hi)}, {b.pieces}, {fmt_q(b.ratio)})")
    if isinstance(e, Union):
        return " U ".join(
            f"({render(p)})" if isinstance(p, Union) else render(p) for p in e.parts
        )
    if isinstance(e, Translate):
        return f"shift({render(e.child)}, {fmt_q(e.offset)})"
    if isinstance(e, CutBelow):
        return f"below({render(e.child)}, {fmt_q(e.at)})"
    return f"above({render(e.child)}, {fmt_q(e.at)})"


def render_set(bs) -> str:
    """Render a normalized BlockSet as expression text."""
    return render(bs.to_expr())
