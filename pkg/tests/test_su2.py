import pytest

from heterotic5.connection import curvature
from heterotic5.exterior import KForm, einsum, is_antisymmetric, is_zero_tensor, tensors_equal, to_tensor, wedge
from heterotic5.liealg import LieAlgebra
from heterotic5.ring import ZERO, symbols
from heterotic5.su2 import (
    NonSkewNijenhuis,
    SU2Structure,
    characteristic_torsion,
    conformal_scale,
    d_psi,
    instanton_check,
    lee_form,
    nijenhuis,
    structure_check,
    susy_check,
    susy_ok,
)

a, b, c, t = symbols("a b c t")
e = lambda *i: KForm.basis(5, *i)  # noqa: E731
ABELIAN = LieAlgebra.abelian(5)


def _alg(**d):
    forms = [d.get(f"de{k}", KForm.zero(5, 2)) for k in range(1, 6)]
    return LieAlgebra(5, tuple(forms), (), "test")


# de3 = e13 gives dF1 = e1 ^ F1
LEE = _alg(de3=e(1, 3))


def test_standard_structure(n21, std):
    rep = structure_check(n21, std)
    assert rep.ok and rep.defsu2_ok and rep.contact_ok and rep.quaternion_ok
    assert wedge(std.F[0], std.F[0]) == 2 * e(1, 2, 3, 4)


def test_psi_convention(std):
    psi = std.psi[0]
    # columns are images: ψ(E1) = -E2, ψ(E3) = -E4
    assert psi[1, 0] == -1 and psi[0, 0] == ZERO
    assert psi[3, 2] == -1


def test_swapped_structure_fails_quaternion(n21, std):
    s = SU2Structure(std.eta, (std.F[0], std.F[2], std.F[1]))
    rep = structure_check(n21, s)
    assert rep.defsu2_ok and rep.contact_ok
    assert not rep.quaternion_ok
    assert rep["quaternion"].witness
    # ψ1ψ3 = -ψ2 for the swapped triple
    psi1, psi2, psi3 = s.psi
    assert tensors_equal(einsum("ij,jk->ik", psi1, psi3), -psi2)


def test_anti_self_dual_F1_fails(n21, std):
    s = SU2Structure(std.eta, (e(1, 2) - e(3, 4), std.F[1], std.F[2]))
    assert not structure_check(n21, s).defsu2_ok


def test_nijenhuis(n21, std):
    assert is_zero_tensor(nijenhuis(n21, std))
    assert is_zero_tensor(nijenhuis(ABELIAN, std))


def test_nijenhuis_non_skew_rejected(std):
    # dη has a ψ-anti-invariant part, so the structure is not normal
    alg = _alg(de5=e(1, 3))
    N = nijenhuis(alg, std)
    assert not is_zero_tensor(N) and not is_antisymmetric(N)
    with pytest.raises(NonSkewNijenhuis):
        characteristic_torsion(alg, std)


def test_lee_form(n21, std):
    assert lee_form(n21, std).is_zero()
    assert lee_form(LEE, std) == e(1)
    assert lee_form(LEE, std)[5] == ZERO


def test_d_psi(std):
    assert d_psi(LEE, std) == -e(2, 3, 4)
    # -(β∘ψ) ^ F1 with β = e1
    assert d_psi(LEE, std) == -wedge(e(2), std.F[0])


def test_characteristic_torsion(n21, std, bg):
    T = characteristic_torsion(n21, std)
    assert T == a * e(1, 2, 5) + b * e(1, 3, 5) + c * e(1, 4, 5) - c * e(2, 3, 5) + b * e(2, 4, 5) - a * e(3, 4, 5)
    assert characteristic_torsion(ABELIAN, std).is_zero()
    assert bg.flux == T


def test_torsion_contracted_with_xi(n21, std, deta):
    T = to_tensor(characteristic_torsion(n21, std))
    assert tensors_equal(T[4], to_tensor(deta))


def test_susy(n21, std):
    rep = susy_check(n21, std)
    assert rep.ok
    assert [ch.name for ch in rep.checks] == ["dF1_closed", "dF2_closed", "dF3_closed", "d_eta_ASD", "quasi_sasaki"]


def test_susy_sasaki_fails(std):
    rep = susy_check(_alg(de5=2 * std.F[0]), std)
    assert not rep.d_eta_ASD_ok
    assert rep.dF1_closed_ok


def test_susy_abelian_degenerate(std):
    rep = susy_check(ABELIAN, std)
    assert not rep.ok and susy_ok(rep)
    assert not rep.flux_nonzero_ok


def test_deta_psi_invariant(n21, std, deta):
    d = to_tensor(deta)
    psi = std.psi[0]
    assert tensors_equal(einsum("ai,bj,ab->ij", psi, psi, d), d)


def test_instanton_check(n21, std, plus, inst, lc):
    assert instanton_check(n21, std, curvature(n21, plus)).ok
    assert instanton_check(n21, std, curvature(n21, inst)).ok
    bad = instanton_check(n21, std, curvature(n21, lc))
    assert not bad.ok and "Omega" in bad.witness


def test_lc_trace_witness(n21, std, lc):
    # Σ_k Ω^1_2(E_k, ψE_k) is nonzero for the Levi-Civita curvature
    from heterotic5.connection import curvature_tensor

    R = curvature_tensor(curvature(n21, lc))
    tr = einsum("kbnm,bk->nm", R, std.psi[0])
    assert tr[1, 0] != ZERO


def test_conformal_scale(n21, std):
    alg1, s1 = conformal_scale(n21, std, 1)
    assert all(x == y for x, y in zip(alg1.d_coframe, n21.d_coframe))
    alg_t, s_t = conformal_scale(n21, std, "t")
    assert alg_t.d_coframe[4] == n21.d_coframe[4] / (t * t)
    assert susy_check(alg_t, s_t).ok
    assert lee_form(alg_t, s_t).is_zero()
    assert s_t.eta == std.eta


def test_reeb_index(std):
    assert std.reeb_index == 5
    with pytest.raises(ValueError):
        SU2Structure(e(1) + e(5), std.F).reeb_index
