"""Metric connections on an invariant orthonormal coframe.

A connection is stored through its values on frame vectors::

    gamma[k, j, i] = ω_{ji}(E_k) = g(∇_{E_k} E_j, E_i)       (0-based)

so ``∇_{E_k} E_j = sum_i gamma[k, j, i] E_i`` and ``ω^i_j = ω_{ji}``.
Curvature forms are ``Ω^i_j = dω^i_j + ω^i_k ∧ ω^k_j`` and

    R[i, j, k, l] = R_{ijkl} = Ω^l_k(E_i, E_j),    Ric_{mn} = sum_i R_{imni}.

Pontrjagin forms are carried as ``P = 8π² p_1 = sum_{i<j} Ω^i_j ∧ Ω^i_j`` to stay
inside the rational function field.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from heterotic5.exterior import (
    KForm,
    einsum,
    is_zero_tensor,
    render_form,
    to_tensor,
    wedge,
    zeros,
)
from heterotic5.liealg import LieAlgebra, exterior_derivative
from heterotic5.ring import RingElement

RICCI_CONVENTION = 1


@dataclass(eq=False)
class ConnectionForms:
    gamma: np.ndarray
    label: str = "custom"
    params: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def form(self, i: int, j: int) -> KForm:
        """ω^i_j as a 1-form (1-based labels)."""
        n = self.dim
        return KForm(n, 1, {(k + 1,): self.gamma[k, j - 1, i - 1] for k in range(n)})

    def matrix(self) -> list:
        """n x n nested list with entry [i][j] = ω^i_j (0-based)."""
        return [[self.form(i + 1, j + 1) for j in range(self.dim)] for i in range(self.dim)]

    def is_metric(self) -> bool:
        return is_zero_tensor(self.gamma + np.swapaxes(self.gamma, 1, 2))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConnectionForms):
            return NotImplemented
        return is_zero_tensor(self.gamma - other.gamma)


@dataclass(eq=False)
class CurvatureForms:
    """Omega[i][j] = Ω^{i+1}_{j+1}."""

    Omega: list
    label: str = "custom"

    @property
    def dim(self) -> int:
        return len(self.Omega)

    def entry(self, i: int, j: int) -> KForm:
        return self.Omega[i - 1][j - 1]

    def tensor(self) -> np.ndarray:
        return curvature_tensor(self)

    def nonzero_entries(self):
        """[(i, j, Ω^i_j)] for i < j with Ω^i_j != 0 (1-based)."""
        n = self.dim
        return [(i + 1, j + 1, self.Omega[i][j]) for i in range(n) for j in range(i + 1, n)
                if not self.Omega[i][j].is_zero()]


def _gamma_zero(n: int) -> np.ndarray:
    return zeros(n, 3)


def levi_civita(alg: LieAlgebra) -> ConnectionForms:
    """Koszul formula 2g(∇_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y)."""
    c = alg.structure_constants
    n = alg.dim
    g = _gamma_zero(n)
    for k, j, i in itertools.product(range(n), repeat=3):
        v = c[k, j, i] - c[j, i, k] + c[i, k, j]
        if not v.is_zero():
            g[k, j, i] = v * RingElement.const(1) / 2
    return ConnectionForms(g, "levi_civita")


def with_torsion(base: ConnectionForms, T: KForm, sign: int = 1, label: str | None = None) -> ConnectionForms:
    """ω_{ji}(E_k) + sign/2 T(E_k, E_j, E_i): torsion shifts by sign*T."""
    if T.degree != 3 and not T.is_zero():
        raise ValueError(f"torsion must be a 3-form, got degree {T.degree}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if T.is_zero():
        return ConnectionForms(base.gamma.copy(), label or base.label, dict(base.params))
    t = to_tensor(T)
    half = RingElement.const(sign) / 2
    g = base.gamma.copy()
    for idx in itertools.product(range(base.dim), repeat=3):
        if not t[idx].is_zero():
            g[idx] = g[idx] + t[idx] * half
    if label is None:
        label = "plus" if sign > 0 else "minus"
    return ConnectionForms(g, label)


def instanton_connection(alg: LieAlgebra, lam, mu, tau, reeb: int = 5) -> ConnectionForms:
    """The family A_{λ,µ,τ}: constant multiples of e^5 in the horizontal block."""
    if alg.dim != 5:
        raise ValueError("instanton connection is defined on 5-dimensional algebras")
    lam, mu, tau = (RingElement.coerce(x) for x in (lam, mu, tau))
    g = _gamma_zero(alg.dim)
    k = reeb - 1
    # σ^i_j = -coef e^5 for the listed (i, j), antisymmetric partners implied
    entries = [
        (1, 2, lam), (3, 4, -lam),
        (1, 3, mu), (2, 4, mu),
        (1, 4, tau), (2, 3, -tau),
    ]
    for i, j, coef in entries:
        # gamma[k, j, i] = ω_{ji}(E_k) = σ^i_j(E_k)
        g[k, j - 1, i - 1] = -coef
        g[k, i - 1, j - 1] = coef
    return ConnectionForms(g, "instanton", {"lambda": lam, "mu": mu, "tau": tau})


def curvature(alg: LieAlgebra, conn: ConnectionForms) -> CurvatureForms:
    n = alg.dim
    w = conn.matrix()
    Omega = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = exterior_derivative(alg, w[i][j])
            for k in range(n):
                if w[i][k].is_zero() or w[k][j].is_zero():
                    continue
                acc = acc + wedge(w[i][k], w[k][j])
            Omega[i][j] = acc
    return CurvatureForms(Omega, conn.label)


def curvature_tensor(curv: CurvatureForms) -> np.ndarray:
    n = curv.dim
    R = zeros(n, 4)
    for k in range(n):
        for l in range(n):
            f = curv.Omega[l][k]
            if f.is_zero():
                continue
            t = to_tensor(f)
            R[:, :, k, l] = t
    return R


def curvature_from_brackets(alg: LieAlgebra, conn: ConnectionForms) -> np.ndarray:
    """R(E_i,E_j)E_k = ∇_i∇_j E_k - ∇_j∇_i E_k - ∇_{[E_i,E_j]} E_k, lowered on l."""
    G = conn.gamma
    c = alg.structure_constants
    A = einsum("jks,isl->ijkl", G, G)
    R = A - np.transpose(A, (1, 0, 2, 3)) - einsum("ijm,mkl->ijkl", c, G)
    return R


def ricci(alg: LieAlgebra, conn: ConnectionForms, convention: int | None = None) -> np.ndarray:
    """Ric_{mn} = sum_i R_{imni}; ``convention=-1`` traces the other pair (sign flip)."""
    if convention is None:
        convention = RICCI_CONVENTION
    R = curvature_tensor(curvature(alg, conn))
    Ric = einsum("imni->mn", R)
    return Ric if convention > 0 else -Ric


def covariant_derivative(conn: ConnectionForms, t: np.ndarray) -> np.ndarray:
    """(∇_{E_k} t)_{j1..jr} = -sum_a sum_s ω_{j_a s}(E_k) t_{..s..}; slot 0 is k."""
    G = conn.gamma
    r = t.ndim
    n = conn.dim
    out = zeros(n, r + 1)
    if r == 0:
        return out
    letters = "abcdefghij"[:r]
    for a in range(r):
        src = list(letters)
        src[a] = "s"
        sub = f"k{letters[a]}s," + "".join(src) + "->k" + letters
        out = out - einsum(sub, G, t)
    return out


def torsion_of(alg: LieAlgebra, conn: ConnectionForms) -> np.ndarray:
    """T_{kji} = g(∇_{E_k}E_j - ∇_{E_j}E_k - [E_k, E_j], E_i)."""
    G = conn.gamma
    return G - np.transpose(G, (1, 0, 2)) - alg.structure_constants


def pontrjagin_P(alg: LieAlgebra, conn: ConnectionForms | CurvatureForms) -> KForm:
    """8π² p_1 = sum_{i<j} Ω^i_j ∧ Ω^i_j."""
    curv = conn if isinstance(conn, CurvatureForms) else curvature(alg, conn)
    n = curv.dim
    P = KForm.zero(n, 4)
    for i in range(n):
        for j in range(i + 1, n):
            f = curv.Omega[i][j]
            if not f.is_zero():
                P = P + wedge(f, f)
    return P


# -- rendering ----------------------------------------------------------------

def connection_table(conn: ConnectionForms) -> list:
    n = conn.dim
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            f = conn.form(i + 1, j + 1)
            if not f.is_zero():
                rows.append({"entry": f"omega^{i + 1}_{j + 1}", "form": render_form(f)})
    return rows


def curvature_table(curv: CurvatureForms) -> list:
    return [{"entry": f"Omega^{i}_{j}", "form": render_form(f)} for i, j, f in curv.nonzero_entries()]


def render_table(rows: list, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=True)
    if not rows:
        return "(all entries zero)"
    width = max(len(r["entry"]) for r in rows)
    return "\n".join(f"{r['entry']:<{width}} = {r['form']}" for r in rows)
