"""Acceptance criteria A1-A12.  Every comparison is exact over Q(a, b, c, l, m, t).

Run under pytest, or directly (``python3 tests/test_acceptance.py``) for a
one-line-per-criterion report.
"""

from __future__ import annotations

import itertools
import random
import sys
import time
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

import pytest
import sympy

from heterotic5.connection import (
    curvature,
    curvature_from_brackets,
    curvature_tensor,
    instanton_connection,
    levi_civita,
    pontrjagin_P,
    ricci,
    with_torsion,
    covariant_derivative,
)
from heterotic5.exterior import (
    KForm,
    einsum,
    hodge_H,
    is_zero_tensor,
    norm_squared,
    tensors_equal,
    to_tensor,
    wedge,
)
from heterotic5.heterotic import anomaly_solve, classify_probe, identity_suite, motion_check, supmot_check
from heterotic5.liealg import LieAlgebra, cylinder_extend, exterior_derivative, jacobi_check, jacobiator, load_algebra
from heterotic5.ring import ONE, PoleError, RingElement, symbols
from heterotic5.su2 import HeteroticBackground, SU2Structure, instanton_check

a, b, c, l, m, t = symbols("a b c l m t")
r = a * a + b * b + c * c
s = l * l + m * m + t * t
e = lambda *i: KForm.basis(5, *i)  # noqa: E731
E1234 = e(1, 2, 3, 4)
DETA = a * (e(1, 2) - e(3, 4)) + b * (e(1, 3) + e(2, 4)) + c * (e(1, 4) - e(2, 3))


@lru_cache(maxsize=None)
def setup():
    src = load_algebra(Path(str(resources.files("heterotic5") / "data" / "n21.alg")))
    alg = src.to_algebra()
    st = SU2Structure.from_source(src.structure)
    bg = HeteroticBackground(alg, st)
    lc = levi_civita(alg)
    return {
        "alg": alg, "st": st, "bg": bg, "lc": lc,
        "plus": with_torsion(lc, bg.flux, 1), "minus": with_torsion(lc, bg.flux, -1),
        "inst": instanton_connection(alg, l, m, t),
    }


def a1():
    x = setup()
    assert exterior_derivative(x["alg"], x["bg"].flux) == E1234 * (-2 * r)


def a2():
    x = setup()
    Op = curvature(x["alg"], x["plus"])
    want_plus = {(1, 2): -a * DETA, (3, 4): a * DETA, (1, 3): -b * DETA, (2, 4): -b * DETA,
                 (1, 4): -c * DETA, (2, 3): c * DETA}
    for i, j in itertools.combinations(range(1, 6), 2):
        assert Op.entry(i, j) == want_plus.get((i, j), KForm.zero(5, 2)), ("plus", i, j)
    Og = curvature(x["alg"], x["lc"])
    q = r / 4
    want_g = {
        (1, 2): -3 * a / 4 * DETA - q * e(3, 4), (1, 3): -3 * b / 4 * DETA + q * e(2, 4),
        (1, 4): -3 * c / 4 * DETA - q * e(2, 3), (2, 3): 3 * c / 4 * DETA - q * e(1, 4),
        (2, 4): -3 * b / 4 * DETA + q * e(1, 3), (3, 4): 3 * a / 4 * DETA - q * e(1, 2),
    }
    for i in range(1, 5):
        want_g[(i, 5)] = q * e(i, 5)
    for i, j in itertools.combinations(range(1, 6), 2):
        assert Og.entry(i, j) == want_g[(i, j)], ("g", i, j)
        assert Og.entry(j, i) == -want_g[(i, j)]


def a3():
    x = setup()
    alg = x["alg"]
    assert pontrjagin_P(alg, x["plus"]) == E1234 * (-4 * r * r)
    assert pontrjagin_P(alg, x["lc"]) == E1234 * (-Fraction(3, 2) * r * r)
    assert pontrjagin_P(alg, x["inst"]) == E1234 * (-4 * s * r)
    assert pontrjagin_P(alg, x["minus"]).is_zero()


def a4():
    x = setup()
    assert anomaly_solve(x["alg"], x["bg"], x["plus"], x["inst"]).alpha_prime == 2 / (r - s)
    assert anomaly_solve(x["alg"], x["bg"], x["lc"], x["inst"]).alpha_prime == 16 / (3 * r - 8 * s)


def a5():
    x = setup()
    d = to_tensor(DETA)
    eta = to_tensor(e(5))
    dd = einsum("im,in->mn", d, d)
    assert tensors_equal(ricci(x["alg"], x["plus"]), -dd)
    want = dd * (-ONE / 2) + einsum("m,n->mn", eta, eta) * (norm_squared(DETA) / 4)
    assert tensors_equal(ricci(x["alg"], x["lc"]), want)


def a6():
    x = setup()
    assert is_zero_tensor(covariant_derivative(x["plus"], to_tensor(x["bg"].flux)))


def a7():
    x = setup()
    alg, st = x["alg"], x["st"]
    assert instanton_check(alg, st, curvature(alg, x["inst"])).ok
    assert instanton_check(alg, st, curvature(alg, x["plus"])).ok
    bad = instanton_check(alg, st, curvature(alg, x["lc"]))
    assert not bad.ok and bad.witness


def a8():
    x = setup()
    alpha = 2 / (r - s)
    rep = motion_check(x["alg"], x["bg"], x["plus"], x["inst"], alpha)
    assert rep.ok
    residuals = (rep.einstein_residual, rep.H_divergence, rep.gauge_divergence,
                 rep.gauge_divergence_plus_only, rep.supmot_residual)
    rng = random.Random(2024)
    done = 0
    while done < 25:
        pt = {k: Fraction(rng.randint(-12, 12), rng.randint(1, 5)) for k in "abclmt"}
        try:
            if alpha.evaluate(pt) <= 0:
                continue
        except PoleError:
            continue
        for tensor in residuals:
            assert all(v.evaluate(pt) == 0 for v in tensor.reshape(-1)), pt
        done += 1


def a9():
    x = setup()
    alg, bg = x["alg"], x["bg"]
    assert is_zero_tensor(supmot_check(alg, bg, curvature(alg, x["plus"])))
    assert is_zero_tensor(supmot_check(alg, bg, curvature(alg, x["inst"])))
    for lmt in ((1, 0, 0), (0, 1, 0), (0, 0, 1), (2, -1, Fraction(1, 3))):
        assert is_zero_tensor(supmot_check(alg, bg, curvature(alg, instanton_connection(alg, *lmt))))
    assert not is_zero_tensor(supmot_check(alg, bg, curvature(alg, x["lc"])))


def a10():
    x = setup()
    rep = identity_suite(x["alg"], x["bg"])
    assert rep.ok, [ch for ch in rep.checks if not ch.ok]
    assert len(rep.checks) == 5


def a11():
    x = setup()
    lift = cylinder_extend(x["alg"], x["st"])
    assert all(f.is_zero() for f in lift.checks().values())
    assert lift.bismut_torsion() == wedge(e(5), DETA).embed(6)


def _random_algebra(rng, dim):
    pairs = list(itertools.combinations(range(1, dim + 1), 2))
    ds = []
    for _ in range(dim):
        coeffs = {p: RingElement.const(rng.choice((-1, 1))) for p in rng.sample(pairs, rng.randint(0, 2))}
        ds.append(KForm(dim, 2, coeffs) if coeffs else KForm.zero(dim, 2))
    return LieAlgebra(dim, tuple(ds), (), "random")


def a12():
    rng = random.Random(42)
    seen = set()
    for _ in range(60):
        alg = _random_algebra(rng, 4)
        ok = jacobi_check(alg).ok
        seen.add(ok)
        assert ok == is_zero_tensor(jacobiator(alg))
        if ok:
            conn = levi_civita(alg)
            assert tensors_equal(curvature_tensor(curvature(alg, conn)), curvature_from_brackets(alg, conn))
    assert seen == {True, False}
    x = setup()
    for conn in ("lc", "plus", "minus", "inst"):
        assert tensors_equal(curvature_tensor(curvature(x["alg"], x[conn])), curvature_from_brackets(x["alg"], x[conn]))
    idx2 = list(itertools.combinations(range(1, 6), 2))
    for _ in range(30):
        u = KForm(5, 2, {p: RingElement.const(rng.randint(-3, 3)) for p in rng.sample(idx2, 3)})
        v = KForm.basis(5, *sorted(rng.sample(range(1, 6), rng.randint(1, 3))))
        assert wedge(u, v) == wedge(v, u) * (-1) ** (2 * v.degree)
        w = KForm.basis(5, rng.randint(1, 5))
        assert wedge(w, v) == wedge(v, w) * (-1) ** v.degree
    hbasis = [KForm.basis(5, *p) for p in itertools.combinations(range(1, 5), 2)]
    keys = list(itertools.combinations(range(1, 5), 2))
    M = sympy.Matrix([[int(hodge_H(f)[k].constant_value()) for f in hbasis] for k in keys])
    assert M * M == sympy.eye(6)
    assert (6 - (M - sympy.eye(6)).rank(), 6 - (M + sympy.eye(6)).rank()) == (3, 3)
    t0 = time.perf_counter()
    probe = classify_probe(1000, 42)
    elapsed = time.perf_counter() - t0
    assert probe.counterexamples == []
    assert elapsed < 60, elapsed


CRITERIA = {
    "A1": ("dT = -2(a^2+b^2+c^2) e1234", a1),
    "A2": ("curvature tables of nabla+ and nabla^g", a2),
    "A3": ("Pontrjagin forms P(nabla+), P(nabla^g), P(A), P(nabla-)", a3),
    "A4": ("alpha' = 2/(r-s) and 16/(3r-8s)", a4),
    "A5": ("Ricci convention pinned by closed-form Ric+ and Ric^g", a5),
    "A6": ("nabla+ T = 0", a6),
    "A7": ("instanton check: A and R+ pass, R^g fails with witness", a7),
    "A8": ("equations of motion vanish, plus 25 rational spot checks", a8),
    "A9": ("quadratic curvature condition: R+ and A family zero, R^g nonzero", a9),
    "A10": ("Ricci cross-identities, curvature trace, closed-form Ricci", a10),
    "A11": ("cylinder lift closedness and -*6 dOmega = eta^deta", a11),
    "A12": ("property suite and 1000-sample classification probe", a12),
}


@pytest.mark.parametrize("key", list(CRITERIA))
def test_acceptance(key):
    CRITERIA[key][1]()


def main() -> int:
    failures = 0
    for key, (desc, fn) in CRITERIA.items():
        try:
            fn()
        except AssertionError as exc:
            failures += 1
            print(f"{key:<4} FAIL  {desc}  ({exc})")
        else:
            print(f"{key:<4} PASS  {desc}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
