"""Recursive-descent parser for coefficient expressions.

Grammar (whitespace insignificant)::

    expr    := ['-'] term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := atom ('^' unsigned-int)?
    atom    := gaussian | var | char | '(' expr ')'
    gaussian:= rational ['i'] | 'i'
    rational:= int ['/' posint]
    var     := 'z' index | 'zb' index          (chart only)
    char    := 'e[' intlist ';' intlist ']'    (torus only)

Indices are 1-based.  A leading ``-`` and a bare ``i`` are accepted on top
of the core grammar.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Tuple

from ..coeff import CoeffFn, GaussianRational, Model, ModelError

__all__ = ["ParseError", "parse_expr", "print_expr"]


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class _Parser:
    def __init__(self, text: str, model: Model):
        self.text = text
        self.model = model
        self.pos = 0

    # lexing helpers -------------------------------------------------------

    def _skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _startswith(self, s: str) -> bool:
        self._skip()
        return self.text.startswith(s, self.pos)

    def _expect(self, s: str) -> None:
        if not self._startswith(s):
            raise ParseError(f"expected {s!r}", self._byte_offset())
        self.pos += len(s)

    def _byte_offset(self) -> int:
        return len(self.text[: self.pos].encode("utf-8"))

    def _uint(self) -> int:
        self._skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ParseError("expected an unsigned integer", self._byte_offset())
        return int(self.text[start:self.pos])

    def _int(self) -> int:
        sign = 1
        if self._peek() in "+-" and self._peek():
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        return sign * self._uint()

    # grammar --------------------------------------------------------------------

    def parse(self) -> CoeffFn:
        if not self.text.strip():
            raise ParseError("empty expression", 0)
        out = self.expr()
        if self._peek():
            raise ParseError(f"unexpected {self._peek()!r}", self._byte_offset())
        return out

    def expr(self) -> CoeffFn:
        neg = False
        if self._peek() == "-":
            self.pos += 1
            neg = True
        out = self.term()
        if neg:
            out = -out
        while self._peek() in ("+", "-") and self._peek():
            op = self.text[self.pos]
            self.pos += 1
            t = self.term()
            out = out + t if op == "+" else out - t
        return out

    def term(self) -> CoeffFn:
        out = self.factor()
        while self._peek() == "*":
            self.pos += 1
            out = out * self.factor()
        return out

    def factor(self) -> CoeffFn:
        base = self.atom()
        if self._peek() == "^":
            self.pos += 1
            base = base ** self._uint()
        return base

    def atom(self) -> CoeffFn:
        c = self._peek()
        start = self._byte_offset()
        if c == "(":
            self.pos += 1
            out = self.expr()
            self._expect(")")
            return out
        if c.isdigit():
            num = Fraction(self._uint())
            if self._peek() == "/":
                self.pos += 1
                den = self._uint()
                if den == 0:
                    raise ParseError("zero denominator", self._byte_offset())
                num = num / den
            if self._peek() == "i":
                self.pos += 1
                return CoeffFn.constant(self.model, GaussianRational(0, num))
            return CoeffFn.constant(self.model, GaussianRational(num))
        if c == "i":
            self.pos += 1
            return CoeffFn.constant(self.model, GaussianRational(0, 1))
        if self._startswith("e["):
            if self.model.kind != "torus":
                raise ModelError(f"characters are not allowed on the chart model (offset {start})")
            self.pos += 2
            k = self._intlist()
            self._expect(";")
            l = self._intlist()
            self._expect("]")
            if len(k) != self.model.n or len(l) != self.model.n:
                raise ParseError(f"character needs {self.model.n} frequencies per list", start)
            return CoeffFn.character(self.model, k, l)
        if c == "z":
            self.pos += 1
            bar = False
            if self.pos < len(self.text) and self.text[self.pos] == "b":
                self.pos += 1
                bar = True
            if self.model.kind != "chart":
                raise ModelError(f"coordinates z/zb are not allowed on the torus model (offset {start})")
            if not (self.pos < len(self.text) and self.text[self.pos].isdigit()):
                raise ParseError("expected a coordinate index", self._byte_offset())
            j = self._uint()
            if not 1 <= j <= self.model.n:
                raise ParseError(f"coordinate index {j} out of range 1..{self.model.n}", start)
            return CoeffFn.var(self.model, j - 1, bar)
        if not c:
            raise ParseError("unexpected end of input", start)
        raise ParseError(f"unexpected {c!r}", start)

    def _intlist(self) -> List[int]:
        out = [self._int()]
        while self._peek() == ",":
            self.pos += 1
            out.append(self._int())
        return out


def parse_expr(text: str, model: Model) -> CoeffFn:
    """Parse ``text`` into an exact :class:`CoeffFn` on ``model``."""
    return _Parser(text, model).parse()


def _monomial_text(model: Model, key) -> str:
    a, b = key
    if model.kind == "torus":
        if not any(a) and not any(b):
            return ""
        return "e[" + ",".join(map(str, a)) + ";" + ",".join(map(str, b)) + "]"
    parts = []
    for j, e in enumerate(a):
        if e:
            parts.append(f"z{j + 1}" + (f"^{e}" if e > 1 else ""))
    for j, e in enumerate(b):
        if e:
            parts.append(f"zb{j + 1}" + (f"^{e}" if e > 1 else ""))
    return "*".join(parts)


def _scalar_parts(c: GaussianRational) -> Tuple[str, str]:
    """``(sign, magnitude-text)`` for printing a coefficient after a binary operator."""
    re, im = c.re, c.im
    if im == 0:
        return ("-" if re < 0 else "+"), str(abs(re))
    if re == 0:
        mag = "i" if abs(im) == 1 else f"{abs(im)}i"
        return ("-" if im < 0 else "+"), mag
    return "+", f"({c})"


def print_expr(f: CoeffFn) -> str:
    """Canonical text form; ``parse_expr(print_expr(f), f.model) == f``."""
    if f.is_zero():
        return "0"
    pieces = []
    for key, c in sorted(f.items()):
        sign, mag = _scalar_parts(c)
        mono = _monomial_text(f.model, key)
        if mono:
            body = mono if mag == "1" else f"{mag}*{mono}"
        else:
            body = mag
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out
