"""Recursive-descent parser for rational expressions and invariant forms.

Shared by the ring text format and the structure-equation DSL.  Grammar::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := ("+" | "-") unary | power
    power := atom ("^" ["-"] INT)?
    atom  := INT | NAME | "(" expr ")"

With forms enabled, a name ``e<digits>`` is the wedge of the listed coframe
elements and ``*`` between two forms is the wedge product.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from heterotic5.ring import RingElement

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")
BASIS_NAME = re.compile(r"e(\d+)$")


class ExprError(ValueError):
    def __init__(self, message: str, col: int):
        super().__init__(f"column {col}: {message}")
        self.message = message
        self.col = col


@dataclass
class _Tok:
    kind: str  # "int", "name", "op", "end"
    text: str
    col: int  # 1-based


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        col = m.start(m.lastindex) + 1
        if m.group(1):
            toks.append(_Tok("int", m.group(1), col))
        elif m.group(2):
            toks.append(_Tok("name", m.group(2), col))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExprError(f"unexpected character {ch!r}", col)
            toks.append(_Tok("op", ch, col))
        pos = m.end()
    toks.append(_Tok("end", "", len(text) + 1))
    return toks


class _Parser:
    def __init__(self, text, params, dim, allow_forms):
        self.toks = _tokenize(text)
        self.i = 0
        self.params = params
        self.dim = dim
        self.allow_forms = allow_forms

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _eat(self, text=None) -> _Tok:
        t = self.tok
        if text is not None and t.text != text:
            raise ExprError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.col)
        self.i += 1
        return t

    def parse(self):
        v = self.expr()
        if self.tok.kind != "end":
            raise ExprError(f"unexpected {self.tok.text!r}", self.tok.col)
        return v

    def expr(self):
        v = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self._eat()
            w = self.term()
            v = _add(v, w if op.text == "+" else _neg(w), op.col)
        return v

    def term(self):
        v = self.unary()
        while self.tok.text in ("*", "/") and self.tok.kind == "op":
            op = self._eat()
            w = self.unary()
            v = _mul(v, w, op.col) if op.text == "*" else _div(v, w, op.col)
        return v

    def unary(self):
        if self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self._eat()
            v = self.unary()
            return _neg(v) if op.text == "-" else v
        return self.power()

    def power(self):
        v = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            op = self._eat()
            sign = 1
            if self.tok.text == "-":
                self._eat()
                sign = -1
            t = self.tok
            if t.kind != "int":
                raise ExprError("exponent must be an integer", t.col)
            self._eat()
            if not isinstance(v, RingElement):
                raise ExprError("cannot raise a form to a power", op.col)
            try:
                v = v ** (sign * int(t.text))
            except ZeroDivisionError:
                raise ExprError("negative power of zero", op.col) from None
        return v

    def atom(self):
        t = self.tok
        if t.kind == "int":
            self._eat()
            return RingElement.const(int(t.text))
        if t.kind == "name":
            self._eat()
            m = BASIS_NAME.match(t.text)
            if m and self.allow_forms:
                return self._basis(m.group(1), t.col)
            if m and self.params is not None and t.text not in self.params:
                raise ExprError(f"coframe element {t.text!r} not allowed here", t.col)
            if self.params is not None and t.text not in self.params:
                raise ExprError(f"undeclared parameter {t.text!r}", t.col)
            return RingElement.var(t.text)
        if t.kind == "op" and t.text == "(":
            self._eat()
            v = self.expr()
            self._eat(")")
            return v
        raise ExprError(f"unexpected {t.text or 'end of input'!r}", t.col)

    def _basis(self, digits: str, col: int):
        from heterotic5.exterior import KForm

        idx = [int(d) for d in digits]
        if any(not 1 <= i <= self.dim for i in idx):
            raise ExprError(f"index out of range in e{digits} (dim {self.dim})", col)
        if len(set(idx)) != len(idx):
            raise ExprError(f"repeated index in e{digits}", col)
        return KForm.basis(self.dim, *idx)


def _is_form(v) -> bool:
    return not isinstance(v, RingElement)


def _neg(v):
    return -v


def _add(v, w, col):
    if _is_form(v) and _is_form(w):
        if v.degree != w.degree and v.coeffs and w.coeffs:
            raise ExprError(f"cannot add forms of degree {v.degree} and {w.degree}", col)
        return v + w
    if _is_form(v) or _is_form(w):
        f, r = (v, w) if _is_form(v) else (w, v)
        if r.is_zero():
            return f
        if f.is_zero():
            return r
        raise ExprError("cannot add a scalar and a form", col)
    return v + w


def _mul(v, w, col):
    if _is_form(v) and _is_form(w):
        from heterotic5.exterior import wedge

        return wedge(v, w)
    if _is_form(w):
        return w * v
    return v * w


def _div(v, w, col):
    if _is_form(w):
        raise ExprError("cannot divide by a form", col)
    if w.is_zero():
        raise ExprError("division by zero", col)
    return v / w


def parse_expression(text: str, params=None, dim: int = 0, allow_forms: bool = False):
    """Parse ``text`` into a RingElement or (with ``allow_forms``) a KForm."""
    return _Parser(text, params, dim, allow_forms).parse()
