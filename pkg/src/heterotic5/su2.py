"""Almost-contact and SU(2)-structure machinery in dimension five.

The endomorphism attached to a 2-form F is fixed by g(X, ψY) = F(X, Y), so in
the orthonormal coframe ``psi[s, j] = F_{sj}``.  For F_1 = e^{12} + e^{34} this
gives ψ(E_1) = -E_2 and ψ(E_3) = -E_4.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from heterotic5.connection import CurvatureForms, curvature_tensor
from heterotic5.exterior import (
    KForm,
    einsum,
    first_nonzero,
    from_tensor,
    hodge_H,
    identity_tensor,
    is_antisymmetric,
    is_zero_tensor,
    render_form,
    to_tensor,
    wedge,
)
from heterotic5.liealg import LieAlgebra, exterior_derivative
from heterotic5.ring import ONE, ZERO, RingElement


class NonSkewNijenhuis(ValueError):
    """The Nijenhuis tensor is not totally skew; no characteristic connection."""


@dataclass(eq=False)
class SU2Structure:
    eta: KForm
    F: tuple

    @classmethod
    def from_source(cls, structure: dict) -> "SU2Structure":
        return cls(structure["eta"], (structure["F1"], structure["F2"], structure["F3"]))

    @classmethod
    def standard(cls, dim: int = 5) -> "SU2Structure":
        e = lambda *i: KForm.basis(dim, *i)  # noqa: E731
        return cls(e(5), (e(1, 2) + e(3, 4), e(1, 3) + e(4, 2), e(1, 4) + e(2, 3)))

    @property
    def dim(self) -> int:
        return self.eta.dim

    @property
    def psi(self) -> tuple:
        return tuple(to_tensor(f) for f in self.F)

    @property
    def xi(self) -> np.ndarray:
        """Components of the Reeb vector (metric dual of η)."""
        return to_tensor(self.eta)

    @property
    def reeb_index(self) -> int:
        """The coframe index carrying η, when η is a single basis element."""
        if len(self.eta.coeffs) == 1:
            (idx, c), = self.eta.coeffs.items()
            if c == ONE:
                return idx[0]
        raise ValueError("η is not a coframe element")

    def forms(self) -> dict:
        return {"eta": self.eta, "F1": self.F[0], "F2": self.F[1], "F3": self.F[2]}


@dataclass
class Check:
    name: str
    ok: bool
    witness: str | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class CheckReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def __bool__(self) -> bool:
        return self.ok

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __getattr__(self, name: str):
        if name.endswith("_ok"):
            try:
                return self[name[:-3]].ok
            except KeyError:
                pass
        raise AttributeError(name)


def _matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return einsum("ij,jk->ik", A, B)


def _witness(t: np.ndarray, label: str) -> str | None:
    hit = first_nonzero(t)
    if hit is None:
        return None
    idx, v = hit
    return f"{label}[{','.join(map(str, idx))}] = {v.short()}"


def structure_check(alg: LieAlgebra | None, s: SU2Structure) -> CheckReport:
    """F_p ∧ F_q = δ_pq v with v ∧ η != 0; ψ_p contact relations; ψ1 then ψ2 gives ψ3."""
    n = s.dim
    report = CheckReport()

    v = wedge(s.F[0], s.F[0])
    bad = None
    if wedge(v, s.eta).is_zero():
        bad = "v ^ eta = 0"
    for p, q in itertools.product(range(3), repeat=2):
        if bad:
            break
        w = wedge(s.F[p], s.F[q])
        want = v if p == q else KForm.zero(n, 4)
        if w != want:
            bad = f"F{p + 1}^F{q + 1} = {render_form(w)}, expected {render_form(want)}"
    report.checks.append(Check("defsu2", bad is None, bad))

    xi = s.xi
    eta = to_tensor(s.eta)
    target = -identity_tensor(n) + einsum("i,j->ij", xi, eta)
    bad = None
    for p, psi in enumerate(s.psi, 1):
        kill = einsum("ij,j->i", psi, xi)
        if not is_zero_tensor(kill):
            bad = f"psi{p}(xi) != 0"
            break
        sq = _matmul(psi, psi) - target
        if not is_zero_tensor(sq):
            bad = _witness(sq, f"psi{p}^2 + id - eta(x)xi")
            break
        # g(ψX, ψY) = g(X, Y) - η(X)η(Y)
        met = einsum("si,sj->ij", psi, psi) - identity_tensor(n) + einsum("i,j->ij", eta, eta)
        if not is_zero_tensor(met):
            bad = _witness(met, f"g(psi{p}.,psi{p}.) - g + eta(x)eta")
            break
    report.checks.append(Check("contact", bad is None, bad))

    # positivity of F3 on {X⌟F1 = Y⌟F2} reduces to ψ3 = ψ2∘ψ1
    psi1, psi2, psi3 = s.psi
    diff = _matmul(psi2, psi1) - psi3
    report.checks.append(Check("quaternion", is_zero_tensor(diff), _witness(diff, "psi2.psi1 - psi3")))
    return report


def nijenhuis(alg: LieAlgebra, s: SU2Structure) -> np.ndarray:
    """N_{ijk} = g(N(E_i, E_j), E_k) with ψ := ψ_1."""
    psi = s.psi[0]
    c = alg.structure_constants
    xi = s.xi
    deta = to_tensor(exterior_derivative(alg, s.eta))
    # [ψE_i, ψE_j] = ψ^a_i ψ^b_j [E_a, E_b]
    t1 = einsum("ai,bj,abk->ijk", psi, psi, c)
    # ψ²[E_i, E_j]
    t2 = einsum("ijm,km->ijk", c, _matmul(psi, psi))
    # ψ[ψE_i, E_j] and ψ[E_i, ψE_j]
    t3 = einsum("ai,ajm,km->ijk", psi, c, psi)
    t4 = einsum("bj,ibm,km->ijk", psi, c, psi)
    t5 = einsum("ij,k->ijk", deta, xi)
    return t1 + t2 - t3 - t4 + t5


def lee_form(alg: LieAlgebra, s: SU2Structure) -> KForm:
    """θ_i = ½ sum_{kl} (dF_1)_{ikl} (F_1)_{kl}."""
    dF = to_tensor(exterior_derivative(alg, s.F[0]))
    F = to_tensor(s.F[0])
    theta = einsum("ikl,kl->i", dF, F)
    half = RingElement.const(1) / 2
    return from_tensor(np.array([x * half for x in theta], dtype=object), check=False)


def d_psi(alg: LieAlgebra, s: SU2Structure) -> KForm:
    """(d^ψF)_{ijk} = -sum dF_{str} ψ^s_i ψ^t_j ψ^r_k."""
    dF = to_tensor(exterior_derivative(alg, s.F[0]))
    psi = s.psi[0]
    t = -einsum("str,si,tj,rk->ijk", dF, psi, psi, psi)
    return from_tensor(t, check=False)


def characteristic_torsion(alg: LieAlgebra, s: SU2Structure) -> KForm:
    """T = η∧dη + d^ψF + N for a structure with totally skew Nijenhuis tensor."""
    N = nijenhuis(alg, s)
    if not is_antisymmetric(N):
        raise NonSkewNijenhuis(_witness(N, "N") or "N not skew")
    T = wedge(s.eta, exterior_derivative(alg, s.eta)) + d_psi(alg, s)
    if not is_zero_tensor(N):
        T = T + from_tensor(N, check=False)
    return T


def susy_check(alg: LieAlgebra, s: SU2Structure) -> CheckReport:
    """dF_p = 0, *_H dη = -dη and N = 0 (constant-dilaton supersymmetry)."""
    report = CheckReport()
    for p in range(3):
        dF = exterior_derivative(alg, s.F[p])
        report.checks.append(Check(f"dF{p + 1}_closed", dF.is_zero(), None if dF.is_zero() else render_form(dF)))
    deta = exterior_derivative(alg, s.eta)
    reeb = s.reeb_index
    if not deta.is_horizontal(reeb):
        report.checks.append(Check("d_eta_ASD", False, f"d eta not horizontal: {render_form(deta)}"))
    else:
        r = hodge_H(deta, reeb) + deta
        report.checks.append(Check("d_eta_ASD", r.is_zero(), None if r.is_zero() else f"*d eta + d eta = {render_form(r)}"))
    N = nijenhuis(alg, s)
    report.checks.append(Check("quasi_sasaki", is_zero_tensor(N), _witness(N, "N")))
    if deta.is_zero():
        report.checks.append(Check("flux_nonzero", False, "d eta = 0: flux vanishes (degenerate)"))
    return report


def susy_ok(report: CheckReport) -> bool:
    """Supersymmetry proper: ignores the degenerate-flux marker."""
    return all(c.ok for c in report.checks if c.name != "flux_nonzero")


def instanton_check(alg: LieAlgebra, s: SU2Structure, curv: CurvatureForms | np.ndarray) -> Check:
    """Ω^m_n(ψE_k, ψE_l) = Ω^m_n(E_k, E_l) and sum_k Ω^m_n(E_k, ψE_k) = 0."""
    R = curvature_tensor(curv) if isinstance(curv, CurvatureForms) else curv
    psi = s.psi[0]
    # R[k, l, n, m] = Ω^m_n(E_k, E_l)
    inv = einsum("abnm,ak,bl->klnm", R, psi, psi) - R
    hit = first_nonzero(inv)
    if hit is not None:
        (k, l, n, m), v = hit
        return Check("instanton", False, f"Omega^{m}_{n}(psi E{k}, psi E{l}) - Omega^{m}_{n}(E{k}, E{l}) = {v.short()}")
    tr = einsum("kbnm,bk->nm", R, psi)
    hit = first_nonzero(tr)
    if hit is not None:
        (n, m), v = hit
        return Check("instanton", False, f"sum_k Omega^{m}_{n}(E_k, psi E_k) = {v.short()}")
    return Check("instanton", True)


def conformal_scale(alg: LieAlgebra, s: SU2Structure, t="t", reeb: int = 5) -> tuple:
    """Constant special conformal change: ê^i = t e^i horizontally, ê^reeb = e^reeb.

    η, ξ and ψ are unchanged; the SU(2) forms keep their coefficients in the new coframe.
    """
    t = RingElement.var(t) if isinstance(t, str) else RingElement.coerce(t)
    n = alg.dim
    scale = [ONE if i == reeb else t for i in range(1, n + 1)]
    new_d = []
    for k, f in enumerate(alg.d_coframe):
        coeffs = {}
        for idx, c in f.coeffs.items():
            factor = scale[k]
            for i in idx:
                factor = factor / scale[i - 1]
            coeffs[idx] = c * factor
        new_d.append(KForm(n, 2, coeffs) if coeffs else KForm.zero(n, 2))
    params = tuple(alg.params) + tuple(v for v in t.variables() if v not in alg.params)
    new_alg = LieAlgebra(n, tuple(new_d), params, alg.name + "_scaled")
    return new_alg, SU2Structure(s.eta, tuple(s.F))


@dataclass(eq=False)
class HeteroticBackground:
    alg: LieAlgebra
    structure: SU2Structure
    dilaton: RingElement = ZERO
    flux: KForm | None = None

    def __post_init__(self):
        if self.flux is None:
            self.flux = characteristic_torsion(self.alg, self.structure)

    @property
    def name(self) -> str:
        return self.alg.name
