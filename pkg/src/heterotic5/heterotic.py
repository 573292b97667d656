"""Anomaly cancellation, equations of motion and the cross-identity suite.

Curvature-squared terms use the same bundle-trace normalization as the
Pontrjagin form P = sum_{i<j} Ω^i_j ∧ Ω^i_j, i.e. a sum over bundle index
pairs n < s.  That is the normalization under which the Bianchi identity
dT = (α'/4)(P(∇) - P(A)) and the Einstein equation use one and the same α'.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from heterotic5.connection import (
    ConnectionForms,
    covariant_derivative,
    curvature,
    curvature_tensor,
    levi_civita,
    pontrjagin_P,
    ricci,
    with_torsion,
)
from heterotic5.exterior import (
    KForm,
    einsum,
    first_nonzero,
    is_zero_tensor,
    norm_squared,
    render_form,
    to_tensor,
    wedge,
)
from heterotic5.liealg import LieAlgebra, cylinder_extend, exterior_derivative, jacobi_check, jacobiator
from heterotic5.ring import RingElement
from heterotic5.su2 import (
    Check,
    CheckReport,
    HeteroticBackground,
    SU2Structure,
    instanton_check,
    structure_check,
    susy_check,
)

HALF = RingElement.const(1) / 2
QUARTER = RingElement.const(1) / 4


class AnomalyError(ValueError):
    pass


def _witness(t, label: str) -> str | None:
    hit = first_nonzero(t)
    if hit is None:
        return None
    idx, v = hit
    return f"{label}[{','.join(map(str, idx))}] = {v.short()}"


def _scale(t: np.ndarray, c: RingElement) -> np.ndarray:
    out = t.copy()
    flat = out.reshape(-1)
    for k, x in enumerate(flat):
        flat[k] = x * c
    return out


# -- anomaly ----------------------------------------------------------------

@dataclass(eq=False)
class AnomalyResult:
    alpha_prime: RingElement
    lhs: KForm
    rhs_template: KForm
    positivity_domain: str

    def residual(self) -> KForm:
        return self.lhs - self.rhs_template * self.alpha_prime


def positivity_domain(x: RingElement) -> str:
    """The region x > 0 stated as a parameter inequality."""
    num, den = x.num, x.den
    if num.is_constant():
        if den.is_constant():
            return "always" if x.constant_value() > 0 else "never"
        return f"{den} > 0" if num.constant_value() > 0 else f"{den} < 0"
    if den.is_constant():
        return f"{num} > 0"
    return f"({num})*({den}) > 0"


def anomaly_solve(alg: LieAlgebra, bg: HeteroticBackground, conn, inst) -> AnomalyResult:
    """Solve dT = (α'/4)(P(conn) - P(inst)) for α'."""
    lhs = exterior_derivative(alg, bg.flux)
    P_conn = pontrjagin_P(alg, conn)
    P_inst = pontrjagin_P(alg, inst)
    template = (P_conn - P_inst) * QUARTER
    if template.is_zero():
        raise AnomalyError("P(conn) = P(inst) identically: no finite alpha' "
                           f"(dT = {render_form(lhs)})")
    idx = sorted(template.coeffs)[0]
    alpha = lhs[idx] / template.coeffs[idx]
    result = AnomalyResult(alpha, lhs, template, positivity_domain(alpha))
    if not result.residual().is_zero():
        raise AnomalyError(f"dT = {render_form(lhs)} is not proportional to (P(conn) - P(inst))/4 = "
                           f"{render_form(template)}")
    return result


# -- equations of motion ------------------------------------------------------

def curvature_square(R: np.ndarray) -> np.ndarray:
    """sum_m sum_{n<s} R_{imns} R_{jmns}."""
    return _scale(einsum("imns,jmns->ij", R, R), HALF)


def gauge_divergence(form_conn: ConnectionForms, F: np.ndarray, bundle_conn: ConnectionForms) -> np.ndarray:
    """sum_i (∇_{E_i} F)(E_i, E_j) for an End(TM)-valued 2-form F[i, j, k, l].

    Form slots are differentiated with ``form_conn``, bundle slots with ``bundle_conn``.
    """
    Gf, Gb = form_conn.gamma, bundle_conn.gamma
    d = -einsum("xis,sjkl->xijkl", Gf, F) - einsum("xjs,iskl->xijkl", Gf, F)
    d = d - einsum("xks,ijsl->xijkl", Gb, F) - einsum("xls,ijks->xijkl", Gb, F)
    return einsum("iijkl->jkl", d)


@dataclass(eq=False)
class MotionReport:
    einstein_residual: np.ndarray
    H_divergence: np.ndarray
    gauge_divergence: np.ndarray
    gauge_divergence_plus_only: np.ndarray
    supmot_residual: np.ndarray

    def checks(self) -> list:
        out = [
            Check("motion_einstein", is_zero_tensor(self.einstein_residual), _witness(self.einstein_residual, "E")),
            Check("motion_H_divergence", is_zero_tensor(self.H_divergence), _witness(self.H_divergence, "divH")),
            Check("motion_gauge_divergence", is_zero_tensor(self.gauge_divergence),
                  _witness(self.gauge_divergence, "divF")),
        ]
        a_coupled = is_zero_tensor(self.gauge_divergence)
        plus_only = is_zero_tensor(self.gauge_divergence_plus_only)
        out.append(Check("motion_gauge_divergence_variants_agree", a_coupled == plus_only,
                         None if a_coupled == plus_only else
                         "A-coupled and nabla+-only divergences disagree: "
                         + (_witness(self.gauge_divergence_plus_only, "divF+") or "A-coupled nonzero")))
        out.append(Check("supmot", is_zero_tensor(self.supmot_residual), _witness(self.supmot_residual, "S")))
        return out

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks())


def motion_check(alg: LieAlgebra, bg: HeteroticBackground, conn: ConnectionForms,
                 inst: ConnectionForms, alpha_prime) -> MotionReport:
    """Residuals of the three string-frame field equations at constant dilaton."""
    alpha_prime = RingElement.coerce(alpha_prime)
    lc = levi_civita(alg)
    H = to_tensor(bg.flux)
    plus = with_torsion(lc, bg.flux, 1)
    R = curvature_tensor(curvature(alg, conn))
    FA = curvature_tensor(curvature(alg, inst))

    ric_g = ricci(alg, lc)
    HH = _scale(einsum("imn,jmn->ij", H, H), QUARTER)
    gauge = curvature_square(FA) - curvature_square(R)
    einstein = ric_g - HH - _scale(gauge, alpha_prime * QUARTER)

    DH = covariant_derivative(lc, H)
    div_H = einsum("iijk->jk", DH)

    div_A = gauge_divergence(plus, FA, inst)
    div_plus = gauge_divergence(plus, FA, plus)
    return MotionReport(einstein, div_H, div_A, div_plus, supmot_check(alg, bg, R))


def supmot_check(alg: LieAlgebra, bg: HeteroticBackground, curv) -> np.ndarray:
    """½[R_msij R_trij + R_mtij R_rsij + R_mrij R_stij] F_tr ψ^s_n - R_mstr R_nstr."""
    R = curvature_tensor(curv) if not isinstance(curv, np.ndarray) else curv
    F = to_tensor(bg.structure.F[0])
    psi = F
    Q = einsum("abij,cdij->abcd", R, R)  # Q[a,b,c,d] = R_abij R_cdij
    X = Q + einsum("mtrs->mstr", Q) + einsum("mrst->mstr", Q)
    lhs = _scale(einsum("mstr,tr,sn->mn", X, F, psi), HALF)
    rhs = einsum("mstr,nstr->mn", R, R)
    return lhs - rhs


# -- identity suite ------------------------------------------------------------

def identity_suite(alg: LieAlgebra, bg: HeteroticBackground, ricci_convention: int = 1) -> CheckReport:
    """Ricci cross-identities, curvature trace and the closed-form Ricci tensors."""
    s = bg.structure
    lc = levi_civita(alg)
    plus = with_torsion(lc, bg.flux, 1)
    T = to_tensor(bg.flux)
    ric_g = ricci(alg, lc, ricci_convention)
    ric_p = ricci(alg, plus, ricci_convention)
    TT = einsum("mst,nst->mn", T, T)
    div_p = einsum("ssmn->mn", covariant_derivative(plus, T))
    div_g = einsum("ssmn->mn", covariant_derivative(lc, T))
    report = CheckReport()

    r1 = ric_g - ric_p - _scale(TT, QUARTER) + _scale(div_p, HALF)
    anti = ric_p - ric_p.T
    r1b = (anti - div_p, anti - div_g)
    ok1 = is_zero_tensor(r1) and all(is_zero_tensor(x) for x in r1b)
    wit = _witness(r1, "ricg+") or _witness(r1b[0], "antisym(Ric+) - div+T") or _witness(r1b[1], "antisym(Ric+) - divgT")
    report.checks.append(Check("identity_ricg+", ok1, wit))

    r2 = ric_g - _scale(ric_p + ric_p.T, HALF) - _scale(TT, QUARTER)
    report.checks.append(Check("identity_mo", is_zero_tensor(r2), _witness(r2, "mo")))

    dT = to_tensor(exterior_derivative(alg, bg.flux))
    F = to_tensor(s.F[0])
    r3 = ric_p + _scale(einsum("sn,msij,ij->mn", F, dT, F), QUARTER)
    report.checks.append(Check("identity_ric+ff", is_zero_tensor(r3), _witness(r3, "ric+ff")))

    Rp = curvature_tensor(curvature(alg, plus))
    r4 = einsum("ijkl,kl->ij", Rp, F)
    report.checks.append(Check("identity_su2_trace", is_zero_tensor(r4), _witness(r4, "R+F")))

    deta_form = exterior_derivative(alg, s.eta)
    deta = to_tensor(deta_form)
    eta = to_tensor(s.eta)
    dd = einsum("im,in->mn", deta, deta)
    want_p = -dd
    want_g = _scale(dd, -HALF) + _scale(einsum("m,n->mn", eta, eta), QUARTER * norm_squared(deta_form))
    r5 = (ric_p - want_p, ric_g - want_g)
    report.checks.append(Check("identity_ricc5", all(is_zero_tensor(x) for x in r5),
                               _witness(r5[0], "Ric+ - formula") or _witness(r5[1], "Ricg - formula")))
    return report


def parallel_check(alg: LieAlgebra, bg: HeteroticBackground) -> Check:
    """∇⁺T = 0."""
    plus = with_torsion(levi_civita(alg), bg.flux, 1)
    D = covariant_derivative(plus, to_tensor(bg.flux))
    return Check("torsion_parallel", is_zero_tensor(D), _witness(D, "nabla+T"))


def cylinder_checks(alg: LieAlgebra, structure: SU2Structure) -> list:
    lift = cylinder_extend(alg, structure)
    out = [Check(name, f.is_zero(), None if f.is_zero() else render_form(f)) for name, f in lift.checks().items()]
    eta6 = structure.eta.embed(6)
    diff = lift.bismut_torsion() - wedge(eta6, exterior_derivative(lift.algebra, eta6))
    out.append(Check("-*6 dOmega = eta^deta", diff.is_zero(), None if diff.is_zero() else render_form(diff)))
    return out


# -- classification probe -------------------------------------------------------

_F = {
    "F1": ((1, 2), (3, 4), 1), "F2": ((1, 3), (2, 4), -1), "F3": ((1, 4), (2, 3), 1),
}


def _two_form(dim: int, pairs_signs) -> KForm:
    out = KForm.zero(dim, 2)
    for pair, sign in pairs_signs:
        out = out + KForm.basis(dim, *pair) * sign
    return out


def ansatz_basis(dim: int = 5) -> dict:
    """The horizontal self-dual and anti-self-dual bases used by the ansatz."""
    e = lambda *i: KForm.basis(dim, *i)  # noqa: E731
    return {
        "F": (e(1, 2) + e(3, 4), e(1, 3) + e(4, 2), e(1, 4) + e(2, 3)),
        "Fm": (e(1, 2) - e(3, 4), e(1, 3) + e(2, 4), e(1, 4) - e(2, 3)),
    }


def ansatz_unknowns() -> list:
    """Names a_ij, b_ij (i=1..4, j=1..3) and c_ij (i,j=1..4) in a fixed order."""
    names = [f"a{i}{j}" for i in range(1, 5) for j in range(1, 4)]
    names += [f"b{i}{j}" for i in range(1, 5) for j in range(1, 4)]
    names += [f"c{i}{j}" for i in range(1, 5) for j in range(1, 5)]
    return names


def ansatz_algebra(values: dict, a, b, c, name: str = "ansatz") -> LieAlgebra:
    """de^i = Σ a_ij F_j + b_ij F^-_j + (Σ_k c_ik e^k) ∧ e^5,  de^5 = a F^-_1 + b F^-_2 + c F^-_3.

    Missing entries of ``values`` are zero; values may be RingElements.
    """
    basis = ansatz_basis()
    F, Fm = basis["F"], basis["Fm"]
    e5 = KForm.basis(5, 5)
    ds = []
    for i in range(1, 5):
        f = KForm.zero(5, 2)
        for j in range(1, 4):
            f = f + F[j - 1] * RingElement.coerce(values.get(f"a{i}{j}", 0))
            f = f + Fm[j - 1] * RingElement.coerce(values.get(f"b{i}{j}", 0))
        for k in range(1, 5):
            v = RingElement.coerce(values.get(f"c{i}{k}", 0))
            if not v.is_zero():
                f = f + (KForm.basis(5, k) * e5) * v
        ds.append(f)
    ds.append(Fm[0] * RingElement.coerce(a) + Fm[1] * RingElement.coerce(b) + Fm[2] * RingElement.coerce(c))
    params = tuple(sorted({v for f in ds for co in f.coeffs.values() for v in co.variables()}))
    return LieAlgebra(5, tuple(ds), params, name)


def closedness_system() -> tuple:
    """Matrix of the linear map (a_ij, b_ij, c_ij) -> (dF_1, dF_2, dF_3) components."""
    import itertools

    names = ansatz_unknowns()
    F = ansatz_basis()["F"]
    rows_idx = [(p, idx) for p in range(3) for idx in itertools.combinations(range(1, 6), 3)]
    cols = []
    for nm in names:
        alg = ansatz_algebra({nm: 1}, 0, 0, 0)
        comps = {}
        for p in range(3):
            dF = exterior_derivative(alg, F[p])
            for idx, v in dF.coeffs.items():
                comps[(p, idx)] = v.constant_value()
        cols.append([comps.get(r, Fraction(0)) for r in rows_idx])
    matrix = [[cols[j][i] for j in range(len(names))] for i in range(len(rows_idx))]
    return matrix, names


def closedness_nullspace() -> list:
    """Basis of the ansatz coefficient space on which dF_1 = dF_2 = dF_3 = 0."""
    import sympy

    matrix, names = closedness_system()
    M = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in matrix])
    basis = []
    for vec in M.nullspace():
        basis.append({nm: Fraction(int(vec[k].p), int(vec[k].q)) for k, nm in enumerate(names) if vec[k] != 0})
    return basis


@dataclass
class ProbeReport:
    samples: int
    seed: int
    nullspace_dim: int
    counterexamples: list = field(default_factory=list)
    lambda_witness: str | None = None
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def checks(self) -> list:
        return [
            Check("classify_probe", self.ok,
                  None if self.ok else f"{len(self.counterexamples)} counterexample(s): {self.counterexamples[0]}"),
        ]


def lambda_obstruction(lam="lambda", a="a", b="b", c="c") -> LieAlgebra:
    """Ansatz with c_12 = λa, c_13 = λb, c_14 = λc, the closedness relations, and a_ij = b_ij = 0."""
    lam, a, b, c = (RingElement.var(x) if isinstance(x, str) else RingElement.coerce(x) for x in (lam, a, b, c))
    c12, c13, c14 = lam * a, lam * b, lam * c
    values = {
        "c12": c12, "c13": c13, "c14": c14,
        "c41": -c14, "c23": -c14, "c32": c14,
        "c42": -c13, "c31": -c13, "c24": c13,
        "c43": c12, "c34": -c12, "c21": -c12,
    }
    return ansatz_algebra(values, a, b, c, "lambda_ansatz")


def _rand_rational(rng: random.Random, box: int = 3, max_den: int = 3) -> Fraction:
    return Fraction(rng.randint(-box * max_den, box * max_den), rng.randint(1, max_den))


def _line_counterexample(alg: LieAlgebra, s_name: str):
    """Nonzero s with Jacobi along the sampled line, or None."""
    comps = []
    for f in alg.d_coframe:
        for v in exterior_derivative(alg, f).coeffs.values():
            comps.append(v.num)
    if not comps:
        return "all s"
    svar = ((s_name, 1),)
    s2 = ((s_name, 2),)
    candidate = None
    for p in comps:
        c1 = p.terms.get(svar, Fraction(0))
        c2 = p.terms.get(s2, Fraction(0))
        if c2 == 0:
            if c1 != 0:
                return None
            continue
        root = -c1 / c2
        if root == 0:
            return None
        if candidate is None:
            candidate = root
        elif candidate != root:
            return None
    if candidate is None:
        return None
    for p in comps:
        if p.evaluate({s_name: candidate}) != 0:
            return None
    return candidate


def classify_probe(samples: int = 1000, seed: int = 42) -> ProbeReport:
    """Falsification harness for the uniqueness of h(2,1) among left-invariant solutions.

    Each sample draws (a, b, c) != 0 and a random direction v inside the
    dF_p = 0 subspace of the ansatz, then looks for s != 0 such that the
    algebra with coefficients s*v satisfies Jacobi.  Any such s is reported.
    """
    t0 = time.perf_counter()
    rng = random.Random(seed)
    basis = closedness_nullspace()
    names = ansatz_unknowns()
    report = ProbeReport(samples, seed, len(basis))
    s = RingElement.var("s")

    lam_alg = lambda_obstruction()
    P = jacobiator(lam_alg)
    report.lambda_witness = f"P^3_124 = {P[0, 1, 3, 2].short()}"

    for k in range(samples):
        while True:
            a, b, c = (_rand_rational(rng) for _ in range(3))
            if (a, b, c) != (0, 0, 0):
                break
        while True:
            coeffs = [rng.randint(-3, 3) if rng.random() < 0.5 else 0 for _ in basis]
            vec = {nm: Fraction(0) for nm in names}
            for w, bv in zip(coeffs, basis):
                if w:
                    for nm, x in bv.items():
                        vec[nm] += w * x
            if any(vec.values()):
                break
        values = {nm: s * x for nm, x in vec.items() if x}
        alg = ansatz_algebra(values, a, b, c, f"sample{k}")
        hit = _line_counterexample(alg, "s")
        if hit is not None:
            report.counterexamples.append({
                "sample": k, "abc": [str(a), str(b), str(c)], "s": str(hit),
                "coefficients": {nm: str(x) for nm, x in vec.items() if x},
            })
    report.elapsed = time.perf_counter() - t0
    return report


# -- top-level report -------------------------------------------------------------

@dataclass
class Report:
    background: str
    checks: list = field(default_factory=list)
    alpha_prime: dict | None = None
    domains: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> dict:
        checks = []
        for c in self.checks:
            d = {"name": c.name, "status": "pass" if c.ok else "fail"}
            if c.witness is not None:
                d["witness"] = c.witness
            checks.append(d)
        return {"background": self.background, "checks": checks,
                "alpha_prime": self.alpha_prime, "domains": list(self.domains)}

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        checks = [Check(c["name"], c["status"] == "pass", c.get("witness")) for c in d["checks"]]
        return cls(d["background"], checks, d.get("alpha_prime"), list(d.get("domains", [])))

    def to_json(self) -> str:
        import json

        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"background: {self.background}"]
        for c in self.checks:
            line = f"{'PASS' if c.ok else 'FAIL'}  {c.name}"
            if c.witness:
                line += f"  [{c.witness}]"
            lines.append(line)
        if self.alpha_prime is not None:
            lines.append(f"alpha' = ({self.alpha_prime['num']})/({self.alpha_prime['den']})")
        for dom in self.domains:
            lines.append(f"domain: {dom}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Report):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def full_report(alg: LieAlgebra, structure: SU2Structure, conn: ConnectionForms,
                inst: ConnectionForms, conn_name: str = "plus") -> Report:
    """Every check for one (background, tangent connection, instanton) triple."""
    report = Report(alg.name)
    jac = jacobi_check(alg)
    report.checks.append(Check("jacobi", jac.ok, None if jac.ok else f"d(de{jac.index}) = {render_form(jac.witness)}"))
    report.checks.extend(structure_check(alg, structure).checks)
    report.checks.extend(c for c in susy_check(alg, structure).checks)
    bg = HeteroticBackground(alg, structure)
    report.checks.append(parallel_check(alg, bg))
    inst_curv = curvature(alg, inst)
    chk = instanton_check(alg, structure, inst_curv)
    report.checks.append(Check("instanton_A", chk.ok, chk.witness))
    chk = instanton_check(alg, structure, curvature(alg, conn))
    report.checks.append(Check(f"instanton_R[{conn_name}]", chk.ok, chk.witness))
    try:
        an = anomaly_solve(alg, bg, conn, inst)
    except AnomalyError as exc:
        report.checks.append(Check("anomaly", False, str(exc)))
        an = None
    if an is not None:
        report.checks.append(Check("anomaly", True))
        report.alpha_prime = {"num": str(an.alpha_prime.num), "den": str(an.alpha_prime.den)}
        report.domains.append(f"alpha' > 0 <=> {an.positivity_domain}")
        report.checks.extend(motion_check(alg, bg, conn, inst, an.alpha_prime).checks())
    report.checks.extend(identity_suite(alg, bg).checks)
    if alg.dim == 5:
        report.checks.extend(cylinder_checks(alg, structure))
    return report
