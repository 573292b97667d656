"""Lie algebras given by invariant structure equations.

Sign convention (Cartan's formula for invariant forms)::

    de^k(E_i, E_j) = -e^k([E_i, E_j])

so ``[E_i, E_j] = -sum_k (de^k)_{ij} E_k``.  The DSL reads files like::

    algebra h21
    params a b c
    dim 5
    de 1 = 0
    ...
    de 5 = a*(e12 - e34) + b*(e13 + e24) + c*(e14 - e23)
    structure
    eta = e5
    F1 = e12 + e34
    F2 = e13 + e42
    F3 = e14 + e23
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from heterotic5._expr import ExprError, parse_expression
from heterotic5.exterior import KForm, hodge_star, render_form, to_tensor, wedge, zeros
from heterotic5.ring import ZERO, RingElement

_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*$")
_RESERVED = {"algebra", "params", "dim", "de", "structure", "eta", "F1", "F2", "F3"}


class DSLError(ValueError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Coframe dimension plus the 2-forms de^1..de^n."""

    dim: int
    d_coframe: tuple
    params: tuple = ()
    name: str = "g"

    def __post_init__(self):
        if len(self.d_coframe) != self.dim:
            raise ValueError(f"expected {self.dim} structure equations, got {len(self.d_coframe)}")
        for k, f in enumerate(self.d_coframe, 1):
            if f.dim != self.dim or (f.degree != 2 and not f.is_zero()):
                raise ValueError(f"de{k} is not a 2-form on a {self.dim}-dimensional coframe")

    @classmethod
    def abelian(cls, dim: int, name: str = "abelian") -> "LieAlgebra":
        return cls(dim, tuple(KForm.zero(dim, 2) for _ in range(dim)), (), name)

    def e(self, *indices: int) -> KForm:
        return KForm.basis(self.dim, *indices)

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """c[i, j, k] with [E_i, E_j] = sum_k c[i, j, k] E_k (0-based)."""
        c = zeros(self.dim, 3)
        for k, f in enumerate(self.d_coframe):
            t = to_tensor(f) if f.degree == 2 else zeros(self.dim, 2)
            for i in range(self.dim):
                for j in range(self.dim):
                    if not t[i, j].is_zero():
                        c[i, j, k] = -t[i, j]
        return c

    def bracket(self, i: int, j: int) -> list:
        """Components of [E_i, E_j] (1-based labels)."""
        return list(self.structure_constants[i - 1, j - 1, :])

    def d(self, u: KForm) -> KForm:
        return exterior_derivative(self, u)


def exterior_derivative(alg: LieAlgebra, u: KForm) -> KForm:
    """Chevalley-Eilenberg differential, extending de^i by graded Leibniz."""
    if u.dim != alg.dim:
        raise ValueError(f"form on dim {u.dim} used with algebra of dim {alg.dim}")
    out = KForm.zero(alg.dim, u.degree + 1)
    for idx, c in u.coeffs.items():
        for p, i in enumerate(idx):
            di = alg.d_coframe[i - 1]
            if di.is_zero():
                continue
            left = KForm.basis(alg.dim, *idx[:p]) if p else None
            right = KForm.basis(alg.dim, *idx[p + 1:]) if p + 1 < len(idx) else None
            term = di
            if left is not None:
                term = wedge(left, term)
            if right is not None:
                term = wedge(term, right)
            term = term * c
            out = out + (term if p % 2 == 0 else -term)
    return out


@dataclass
class JacobiResult:
    ok: bool
    index: int | None = None
    witness: KForm | None = None

    def __bool__(self) -> bool:
        return self.ok


def jacobi_check(alg: LieAlgebra) -> JacobiResult:
    """Pass iff d(de^i) = 0 for every i; else the first nonzero 3-form."""
    for i, f in enumerate(alg.d_coframe, 1):
        dd = exterior_derivative(alg, f)
        if not dd.is_zero():
            return JacobiResult(False, i, dd)
    return JacobiResult(True)


def jacobiator(alg: LieAlgebra) -> np.ndarray:
    """P[i, j, k, l]: E_l-component of [[E_i,E_j],E_k] + cyclic, from brackets."""
    c = alg.structure_constants
    n = alg.dim
    P = zeros(n, 4)
    nz = {(i, j): [(m, c[i, j, m]) for m in range(n) if not c[i, j, m].is_zero()]
          for i in range(n) for j in range(n)}

    def dbl(i, j, k, l):
        total = ZERO
        for m, v in nz[(i, j)]:
            w = c[m, k, l]
            if not w.is_zero():
                total = total + v * w
        return total

    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    P[i, j, k, l] = dbl(i, j, k, l) + dbl(j, k, i, l) + dbl(k, i, j, l)
    return P


# -- DSL --------------------------------------------------------------------

@dataclass(eq=False)
class AlgebraSource:
    name: str
    params: tuple
    dim: int
    d_forms: tuple
    structure: dict | None = None  # keys "eta", "F1", "F2", "F3"
    source_lines: dict = field(default_factory=dict, repr=False)

    def to_algebra(self) -> LieAlgebra:
        return LieAlgebra(self.dim, tuple(self.d_forms), tuple(self.params), self.name)

    def render(self) -> str:
        lines = [f"algebra {self.name}", "params" + "".join(f" {p}" for p in self.params), f"dim {self.dim}"]
        for k, f in enumerate(self.d_forms, 1):
            lines.append(f"de {k} = {render_form(f)}")
        if self.structure is not None:
            lines.append("structure")
            for key in ("eta", "F1", "F2", "F3"):
                lines.append(f"{key} = {render_form(self.structure[key])}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraSource):
            return NotImplemented
        if (self.name, tuple(self.params), self.dim) != (other.name, tuple(other.params), other.dim):
            return False
        if any(a != b for a, b in zip(self.d_forms, other.d_forms)):
            return False
        if (self.structure is None) != (other.structure is None):
            return False
        if self.structure is not None:
            return all(self.structure[k] == other.structure[k] for k in ("eta", "F1", "F2", "F3"))
        return True


def _strip(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def parse_algebra(text: str) -> AlgebraSource:
    """Parse DSL source; raises :class:`DSLError` with line/column."""
    lines = [(n, _strip(raw)) for n, raw in enumerate(text.splitlines(), 1)]
    lines = [(n, s) for n, s in lines if s.strip()]
    pos = 0

    def expect_header(keyword: str):
        nonlocal pos
        if pos >= len(lines):
            raise DSLError(f"missing '{keyword}' line", (lines[-1][0] + 1) if lines else 1)
        n, s = lines[pos]
        words = s.split()
        if not words or words[0] != keyword:
            raise DSLError(f"expected '{keyword}'", n, len(s) - len(s.lstrip()) + 1)
        pos += 1
        return n, s, words[1:]

    n, s, rest = expect_header("algebra")
    if len(rest) != 1 or not _NAME.match(rest[0]):
        raise DSLError("expected a single algebra name", n, s.find("algebra") + 9)
    name = rest[0]

    n, s, params = expect_header("params")
    seen = set()
    for p in params:
        col = s.find(p) + 1
        if not _NAME.match(p) or re.match(r"e\d+$", p) or p in _RESERVED:
            raise DSLError(f"invalid parameter name {p!r}", n, col)
        if p in seen:
            raise DSLError(f"duplicate parameter {p!r}", n, col)
        seen.add(p)
    params = tuple(params)

    n, s, rest = expect_header("dim")
    if len(rest) != 1 or not rest[0].isdigit():
        raise DSLError("expected an integer dimension", n, s.find("dim") + 5)
    dim = int(rest[0])
    if not 1 <= dim <= 9:
        raise DSLError("dimension must lie in 1..9", n, s.find(rest[0]) + 1)

    def parse_rhs(n: int, s: str, degree: int, label: str) -> KForm:
        eq = s.index("=")
        expr = s[eq + 1:]
        try:
            v = parse_expression(expr, params=params, dim=dim, allow_forms=True)
        except ExprError as exc:
            raise DSLError(exc.message, n, eq + 1 + exc.col) from None
        if isinstance(v, RingElement):
            if not v.is_zero():
                raise DSLError(f"{label} must be a {degree}-form, got a scalar", n, eq + 2)
            return KForm.zero(dim, degree)
        if v.degree != degree and not v.is_zero():
            raise DSLError(f"{label} must be a {degree}-form, got degree {v.degree}", n, eq + 2)
        return v if v.degree == degree else KForm.zero(dim, degree)

    d_forms: dict = {}
    source_lines = {}
    de_re = re.compile(r"\s*de\s+(\d+)\s*=")
    while pos < len(lines):
        n, s = lines[pos]
        if s.split()[0] != "de":
            break
        m = de_re.match(s)
        if not m:
            raise DSLError("expected 'de <index> = <form>'", n, 1)
        k = int(m.group(1))
        if not 1 <= k <= dim:
            raise DSLError(f"index {k} out of range for dim {dim}", n, m.start(1) + 1)
        if k in d_forms:
            raise DSLError(f"duplicate equation for de {k}", n, 1)
        d_forms[k] = parse_rhs(n, s, 2, f"de {k}")
        source_lines[f"de{k}"] = n
        pos += 1
    missing = [k for k in range(1, dim + 1) if k not in d_forms]
    if missing:
        at = lines[pos][0] if pos < len(lines) else (lines[-1][0] + 1)
        raise DSLError(f"missing equation for de {missing[0]}", at, 1)

    structure = None
    if pos < len(lines):
        n, s = lines[pos]
        if s.strip() != "structure":
            raise DSLError(f"unexpected line {s.strip()!r}", n, 1)
        pos += 1
        structure = {}
        for key, deg in (("eta", 1), ("F1", 2), ("F2", 2), ("F3", 2)):
            if pos >= len(lines):
                raise DSLError(f"missing '{key} = ...' in structure block", n + 1, 1)
            n, s = lines[pos]
            m = re.match(r"\s*(\w+)\s*=", s)
            if not m or m.group(1) != key:
                raise DSLError(f"expected '{key} = ...'", n, 1)
            structure[key] = parse_rhs(n, s, deg, key)
            source_lines[key] = n
            pos += 1
        if pos < len(lines):
            n, s = lines[pos]
            raise DSLError(f"unexpected line {s.strip()!r}", n, 1)

    return AlgebraSource(name, params, dim, tuple(d_forms[k] for k in range(1, dim + 1)), structure, source_lines)


def load_algebra(path) -> AlgebraSource:
    return parse_algebra(Path(path).read_text(encoding="utf-8"))


# -- cylinder ---------------------------------------------------------------

@dataclass(eq=False)
class CylinderLift:
    algebra: LieAlgebra
    kahler: KForm
    psi_plus: KForm
    psi_minus: KForm

    def checks(self) -> dict:
        d = self.algebra.d
        om2 = wedge(self.kahler, self.kahler)
        return {
            "d(Omega^Omega)": d(om2),
            "d(Psi+)": d(self.psi_plus),
            "d(Psi-)": d(self.psi_minus),
        }

    def bismut_torsion(self) -> KForm:
        """-*_6 dΩ, orientation e^{123456}."""
        return -hodge_star(self.algebra.d(self.kahler))


def cylinder_extend(alg: LieAlgebra, structure) -> CylinderLift:
    """Product with a line: appends closed e^6 = dt and builds (Ω, Ψ+, Ψ-)."""
    if structure is None:
        raise ValueError("cylinder_extend needs an SU(2) structure block")
    if alg.dim != 5:
        raise ValueError("cylinder_extend expects a 5-dimensional algebra")
    eta, F1, F2, F3 = _structure_forms(structure)
    n = 6
    d6 = tuple(f.embed(n) for f in alg.d_coframe) + (KForm.zero(n, 2),)
    alg6 = LieAlgebra(n, d6, alg.params, alg.name + "xR")
    eta, F1, F2, F3 = (f.embed(n) for f in (eta, F1, F2, F3))
    dt = KForm.basis(n, 6)
    kahler = -F1 - wedge(eta, dt)
    psi_plus = wedge(F2, eta) - wedge(F3, dt)
    psi_minus = wedge(F3, eta) + wedge(F2, dt)
    return CylinderLift(alg6, kahler, psi_plus, psi_minus)


def _structure_forms(structure):
    if isinstance(structure, dict):
        return structure["eta"], structure["F1"], structure["F2"], structure["F3"]
    return structure.eta, structure.F[0], structure.F[1], structure.F[2]
