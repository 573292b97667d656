"""Exact multivariate polynomials over Q and their fractions.

A :class:`Polynomial` is a sparse map from monomials to :class:`fractions.Fraction`
coefficients.  A monomial is a tuple of ``(name, exponent)`` pairs sorted by
name, so polynomials in different parameter sets combine without any
declaration step.  :class:`RingElement` is a numerator/denominator pair.

Fractions are kept reduced by content, common monomial factors and exact
division only; no multivariate GCD is attempted.  Equality is decided by
cross-multiplication, so this never affects correctness.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Union

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by variable name

Number = Union[int, Fraction]


class RingError(ArithmeticError):
    """Base class for ring failures."""


class DivisionByZero(RingError, ZeroDivisionError):
    pass


class PoleError(RingError):
    """Evaluation hit a zero of the denominator."""


class MissingParameter(RingError, KeyError):
    pass


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    out = dict(m1)
    for v, e in m2:
        out[v] = out.get(v, 0) + e
    return tuple(sorted(out.items()))


def _mono_div(m1: Monomial, m2: Monomial):
    """m1 / m2 if m2 divides m1, else None."""
    d = dict(m1)
    for v, e in m2:
        have = d.get(v, 0)
        if have < e:
            return None
        if have == e:
            del d[v]
        else:
            d[v] = have - e
    return tuple(sorted(d.items()))


def _mono_deg(m: Monomial) -> int:
    return sum(e for _, e in m)


def _grlex_key(m: Monomial, names: tuple) -> tuple:
    d = dict(m)
    return (_mono_deg(m),) + tuple(d.get(v, 0) for v in names)


def _fmt_mono(m: Monomial) -> str:
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)


class Polynomial:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = Fraction(c)
        self.terms: dict = clean

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def const(cls, c: Number) -> "Polynomial":
        return cls._raw({(): Fraction(c)} if c else {})

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        return cls._raw({((name, 1),): Fraction(1)})

    # -- queries ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def variables(self) -> tuple:
        return tuple(sorted({v for m in self.terms for v, _ in m}))

    def degree(self) -> int:
        return max((_mono_deg(m) for m in self.terms), default=-1)

    def sorted_terms(self) -> list:
        """Terms in descending graded-lex order (variables alphabetical)."""
        names = self.variables()
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0], names), reverse=True)

    def leading_term(self):
        names = self.variables()
        return max(self.terms.items(), key=lambda t: _grlex_key(t[0], names))

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial._raw(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if not self.terms or not other.terms:
            return Polynomial._raw({})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Polynomial._raw(out)

    def scale(self, c: Number) -> "Polynomial":
        if not c:
            return Polynomial._raw({})
        return Polynomial._raw({m: v * c for m, v in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def exact_div(self, other: "Polynomial"):
        """Quotient if ``other`` divides ``self`` exactly, else None."""
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        if self.is_zero():
            return self
        names = tuple(sorted(set(self.variables()) | set(other.variables())))
        lm_d, lc_d = max(other.terms.items(), key=lambda t: _grlex_key(t[0], names))
        rem = self
        quot: dict = {}
        while not rem.is_zero():
            lm_r, lc_r = max(rem.terms.items(), key=lambda t: _grlex_key(t[0], names))
            m = _mono_div(lm_r, lm_d)
            if m is None:
                return None
            c = lc_r / lc_d
            quot[m] = quot.get(m, 0) + c
            rem = rem - Polynomial._raw({_mono_mul(m, mm): c * cc for mm, cc in other.terms.items()})
        return Polynomial(quot)

    def monomial_content(self) -> Monomial:
        """Largest monomial dividing every term."""
        it = iter(self.terms)
        first = next(it, None)
        if first is None:
            return ()
        common = dict(first)
        for m in it:
            d = dict(m)
            for v in list(common):
                e = min(common[v], d.get(v, 0))
                if e:
                    common[v] = e
                else:
                    del common[v]
            if not common:
                break
        return tuple(sorted(common.items()))

    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    def evaluate(self, assignment: Mapping[str, Number]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            term = c
            for v, e in m:
                try:
                    term *= Fraction(assignment[v]) ** e
                except KeyError:
                    raise MissingParameter(v) from None
            total += term
        return total

    def substitute(self, mapping: Mapping[str, "RingElement"]) -> "RingElement":
        total = ZERO
        for m, c in self.terms.items():
            term = RingElement.const(c)
            for v, e in m:
                term = term * (mapping[v] ** e if v in mapping else RingElement.var(v) ** e)
            total = total + term
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            neg = c < 0
            a = -c if neg else c
            if not m:
                body = str(a)
            elif a == 1:
                body = _fmt_mono(m)
            else:
                body = f"{a}*{_fmt_mono(m)}"
            if i == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self})"


_P_ZERO = Polynomial._raw({})
_P_ONE = Polynomial.const(1)


def _normalize(num: Polynomial, den: Polynomial):
    if den.is_zero():
        raise DivisionByZero("division by the zero element")
    if num.is_zero():
        return _P_ZERO, _P_ONE
    if den.is_constant():
        c = den.constant_value()
        return (num if c == 1 else num.scale(1 / c)), _P_ONE
    mc = dict(num.monomial_content())
    common = tuple((v, min(e, mc[v])) for v, e in den.monomial_content() if v in mc)
    if common:
        num = Polynomial._raw({_mono_div(m, common): c for m, c in num.terms.items()})
        den = Polynomial._raw({_mono_div(m, common): c for m, c in den.terms.items()})
        if den.is_constant():
            return _normalize(num, den)
    q = num.exact_div(den)
    if q is not None:
        return q, _P_ONE
    q = den.exact_div(num)
    if q is not None:
        num, den = _P_ONE, q
    cd = den.content()
    num = num.scale(1 / cd)
    den = den.scale(1 / cd)
    if den.leading_term()[1] < 0:
        num, den = -num, -den
    return num, den


class RingElement:
    """An element of Q(params): numerator / denominator polynomials."""

    __slots__ = ("num", "den")
    __hash__ = None  # equality is by cross-multiplication; no canonical hash

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None or den == _P_ONE:
            self.num, self.den = num, _P_ONE
        else:
            self.num, self.den = _normalize(num, den)

    @classmethod
    def const(cls, c: Number) -> "RingElement":
        return cls(Polynomial.const(c))

    @classmethod
    def var(cls, name: str) -> "RingElement":
        return cls(Polynomial.var(name))

    @staticmethod
    def coerce(x) -> "RingElement":
        if isinstance(x, RingElement):
            return x
        if isinstance(x, (int, Fraction)):
            return RingElement.const(x)
        if isinstance(x, Polynomial):
            return RingElement(x)
        if isinstance(x, str):
            return parse_ring(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to RingElement")

    # -- queries ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den == _P_ONE

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise RingError(f"{self} is not constant")
        return self.num.constant_value() / self.den.constant_value()

    def variables(self) -> tuple:
        return tuple(sorted(set(self.num.variables()) | set(self.den.variables())))

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other) -> "RingElement":
        if not isinstance(other, RingElement):
            if isinstance(other, (int, Fraction)):
                other = RingElement.const(other)
            else:
                return NotImplemented
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den is _P_ONE and other.den is _P_ONE:
            return RingElement(self.num + other.num)
        if self.den == other.den:
            return RingElement(self.num + other.num, self.den)
        return RingElement(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RingElement":
        r = RingElement.__new__(RingElement)
        r.num, r.den = -self.num, self.den
        return r

    def __sub__(self, other) -> "RingElement":
        if not isinstance(other, RingElement):
            if isinstance(other, (int, Fraction)):
                other = RingElement.const(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RingElement":
        return RingElement.coerce(other) - self

    def __mul__(self, other) -> "RingElement":
        if not isinstance(other, RingElement):
            if isinstance(other, (int, Fraction)):
                if not other:
                    return ZERO
                r = RingElement.__new__(RingElement)
                r.num, r.den = self.num.scale(other), self.den
                return r
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        if self.den is _P_ONE and other.den is _P_ONE:
            return RingElement(self.num * other.num)
        return RingElement(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RingElement":
        other = RingElement.coerce(other)
        if other.is_zero():
            raise DivisionByZero("division by the zero element")
        return RingElement(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RingElement":
        return RingElement.coerce(other) / self

    def __pow__(self, n: int) -> "RingElement":
        if n >= 0:
            return RingElement(self.num**n, self.den**n)
        if self.is_zero():
            raise DivisionByZero("negative power of zero")
        return RingElement(self.den ** (-n), self.num ** (-n))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingElement):
            if isinstance(other, (int, Fraction)):
                other = RingElement.const(other)
            else:
                return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.den == other.num * self.den

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def evaluate(self, assignment: Mapping[str, Number]) -> Fraction:
        d = self.den.evaluate(assignment)
        if d == 0:
            raise PoleError(f"denominator {self.den} vanishes at {dict(assignment)}")
        return self.num.evaluate(assignment) / d

    def substitute(self, mapping: Mapping[str, "RingElement"]) -> "RingElement":
        return self.num.substitute(mapping) / self.den.substitute(mapping)

    def __str__(self) -> str:
        return f"({self.num})/({self.den})"

    def short(self) -> str:
        """Compact form: omits a unit denominator."""
        if self.den == _P_ONE:
            return str(self.num)
        return str(self)

    def __repr__(self) -> str:
        return f"RingElement({self})"


ZERO = RingElement(_P_ZERO)
ONE = RingElement(_P_ONE)


def const(c: Number) -> RingElement:
    return RingElement.const(c)


def var(name: str) -> RingElement:
    return RingElement.var(name)


def symbols(names: str | Iterable[str]) -> tuple:
    if isinstance(names, str):
        names = names.replace(",", " ").split()
    return tuple(RingElement.var(n) for n in names)


def ring_arith(x: RingElement, y: RingElement, op: str) -> RingElement:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def evaluate(x: RingElement, assignment: Mapping[str, Number]) -> Fraction:
    return RingElement.coerce(x).evaluate(assignment)


def parse_ring(text: str, params: Iterable[str] | None = None) -> RingElement:
    """Parse a rational expression such as ``"(a^2 + b^2)/(1)"``.

    With ``params`` given, any other identifier is rejected.
    """
    from heterotic5._expr import parse_expression

    value = parse_expression(text, params=None if params is None else tuple(params), allow_forms=False)
    return value
