"""Alternating forms and dense tensors on an orthonormal coframe.

Multi-indices of a :class:`KForm` are 1-based and strictly increasing, so
``e^{125}`` is stored under ``(1, 2, 5)``.  Dense tensors are numpy object
arrays of :class:`~heterotic5.ring.RingElement` indexed from 0, with

    u[i1, ..., ik] = u(E_{i1+1}, ..., E_{ik+1}),

i.e. ``e^{12}`` becomes a matrix with ``t[0, 1] = 1`` and ``t[1, 0] = -1``.
The metric is the identity in the working coframe throughout.
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from heterotic5.ring import ONE, ZERO, RingElement


class FormError(ValueError):
    pass


def perm_sign(seq: Iterable[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 on repeated entries."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class Coframe:
    dim: int
    reeb_index: int | None = None

    def __post_init__(self):
        if self.reeb_index is not None and not 1 <= self.reeb_index <= self.dim:
            raise FormError(f"reeb index {self.reeb_index} outside 1..{self.dim}")


class KForm:
    """A k-form sum_I c_I e^I with RingElement coefficients."""

    __slots__ = ("dim", "degree", "coeffs")
    __hash__ = None

    def __init__(self, dim: int, degree: int, coeffs: Mapping[tuple, object] | None = None):
        if not 0 <= degree:
            raise FormError(f"negative degree {degree}")
        self.dim = dim
        self.degree = degree
        clean: dict = {}
        for idx, c in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise FormError(f"multi-index {idx} does not have length {degree}")
            if any(not 1 <= i <= dim for i in idx):
                raise FormError(f"index out of range in {idx} for dim {dim}")
            if any(a >= b for a, b in zip(idx, idx[1:])):
                raise FormError(f"multi-index {idx} is not strictly increasing")
            c = RingElement.coerce(c)
            if not c.is_zero():
                clean[idx] = c
        self.coeffs = clean

    @classmethod
    def _raw(cls, dim: int, degree: int, coeffs: dict) -> "KForm":
        f = cls.__new__(cls)
        f.dim, f.degree, f.coeffs = dim, degree, coeffs
        return f

    @classmethod
    def zero(cls, dim: int, degree: int) -> "KForm":
        return cls._raw(dim, degree, {})

    @classmethod
    def basis(cls, dim: int, *indices: int) -> "KForm":
        """``basis(5, 2, 1)`` is e^2 ^ e^1 = -e^{12}."""
        s = perm_sign(indices)
        if any(not 1 <= i <= dim for i in indices):
            raise FormError(f"index out of range in {indices} for dim {dim}")
        if s == 0:
            return cls.zero(dim, len(indices))
        return cls._raw(dim, len(indices), {tuple(sorted(indices)): RingElement.const(s)})

    @classmethod
    def scalar(cls, dim: int, c) -> "KForm":
        return cls(dim, 0, {(): c})

    # -- linear structure -------------------------------------------------
    def _check(self, other: "KForm"):
        if not isinstance(other, KForm):
            raise TypeError(f"expected KForm, got {type(other).__name__}")
        if other.dim != self.dim:
            raise FormError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "KForm") -> "KForm":
        self._check(other)
        if other.degree != self.degree:
            if not other.coeffs:
                return self
            if not self.coeffs:
                return other
            raise FormError(f"cannot add forms of degree {self.degree} and {other.degree}")
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            s = out[idx] + c if idx in out else c
            if s.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = s
        return KForm._raw(self.dim, self.degree, out)

    def __neg__(self) -> "KForm":
        return KForm._raw(self.dim, self.degree, {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __mul__(self, c) -> "KForm":
        if isinstance(c, KForm):
            return wedge(self, c)
        c = RingElement.coerce(c)
        if c.is_zero():
            return KForm.zero(self.dim, self.degree)
        return KForm._raw(self.dim, self.degree, {i: v * c for i, v in self.coeffs.items()})

    def __rmul__(self, c) -> "KForm":
        return self * c

    def __truediv__(self, c) -> "KForm":
        return self * (ONE / RingElement.coerce(c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, KForm):
            return NotImplemented
        if self.dim != other.dim:
            return False
        if self.degree != other.degree and (self.coeffs or other.coeffs):
            return False
        return (self - other).is_zero() if self.degree == other.degree else True

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, idx) -> RingElement:
        """Component u(E_i1, ..., E_ik) for any 1-based multi-index."""
        if isinstance(idx, int):
            idx = (idx,)
        s = perm_sign(idx)
        if s == 0:
            return ZERO
        c = self.coeffs.get(tuple(sorted(idx)))
        if c is None:
            return ZERO
        return c if s > 0 else -c

    def map_coeffs(self, fn) -> "KForm":
        return KForm(self.dim, self.degree, {i: fn(c) for i, c in self.coeffs.items()})

    def embed(self, dim: int) -> "KForm":
        """Same form viewed on a larger coframe."""
        if dim < self.dim:
            raise FormError("cannot embed into a smaller coframe")
        return KForm._raw(dim, self.degree, dict(self.coeffs))

    def is_horizontal(self, reeb: int) -> bool:
        return all(reeb not in idx for idx in self.coeffs)

    def __str__(self) -> str:
        return render_form(self)

    def __repr__(self) -> str:
        return f"KForm<{self.degree}>({self})"


def _coef_text(c: RingElement) -> tuple[bool, str]:
    """(negative, body) for a form coefficient; body '' means unit."""
    if c.is_polynomial():
        terms = c.num.terms
        if len(terms) == 1:
            (m, v), = terms.items()
            neg = v < 0
            mag = -c.num if neg else c.num
            s = str(mag)
            return neg, "" if s == "1" else s
        return False, f"({c.num})"
    return False, f"(({c.num})/({c.den}))"


def render_form(u: KForm) -> str:
    """Canonical text, e.g. ``a*e125 + b*e135 - c*e235``."""
    if not u.coeffs:
        return "0"
    parts = []
    for n, idx in enumerate(sorted(u.coeffs)):
        neg, body = _coef_text(u.coeffs[idx])
        name = "e" + "".join(str(i) for i in idx) if idx else ""
        if not name:
            term = body or "1"
        elif body:
            term = f"{body}*{name}"
        else:
            term = name
        if n == 0:
            parts.append(("-" if neg else "") + term)
        else:
            parts.append((" - " if neg else " + ") + term)
    return "".join(parts)


def wedge(u: KForm, v: KForm) -> KForm:
    u._check(v)
    deg = u.degree + v.degree
    if deg > u.dim or not u.coeffs or not v.coeffs:
        return KForm.zero(u.dim, deg)
    out: dict = {}
    for i, a in u.coeffs.items():
        si = set(i)
        for j, b in v.coeffs.items():
            if si.intersection(j):
                continue
            s = perm_sign(i + j)
            key = tuple(sorted(i + j))
            term = a * b if s > 0 else -(a * b)
            if key in out:
                term = out[key] + term
            if term.is_zero():
                out.pop(key, None)
            else:
                out[key] = term
    return KForm._raw(u.dim, deg, out)


def wedge_all(*forms: KForm) -> KForm:
    result = forms[0]
    for f in forms[1:]:
        result = wedge(result, f)
    return result


def interior(vector_index: int, u: KForm) -> KForm:
    """Contraction E_i ⌟ u with the i-th (1-based) frame vector."""
    if u.degree < 1:
        raise FormError("interior product needs degree >= 1")
    if not 1 <= vector_index <= u.dim:
        raise FormError(f"vector index {vector_index} outside 1..{u.dim}")
    out: dict = {}
    for idx, c in u.coeffs.items():
        if vector_index in idx:
            p = idx.index(vector_index)
            rest = idx[:p] + idx[p + 1:]
            out[rest] = c if p % 2 == 0 else -c
    return KForm._raw(u.dim, u.degree - 1, out)


def hodge_star(u: KForm, axes: Iterable[int] | None = None) -> KForm:
    """Hodge star on span(e^a : a in axes), orientation e^{axes} in increasing order.

    ``axes`` defaults to the whole coframe.  Components outside ``axes`` are rejected.
    """
    axes = tuple(sorted(axes)) if axes is not None else tuple(range(1, u.dim + 1))
    ax = set(axes)
    out: dict = {}
    for idx, c in u.coeffs.items():
        if not ax.issuperset(idx):
            raise FormError(f"component e{''.join(map(str, idx))} lies outside the span of {axes}")
        comp = tuple(a for a in axes if a not in idx)
        s = perm_sign(idx + comp) * perm_sign(axes)
        out[comp] = c if s > 0 else -c
    return KForm._raw(u.dim, len(axes) - u.degree, out)


def hodge_H(u: KForm, reeb: int = 5) -> KForm:
    """Hodge star on the horizontal space ker(e^reeb), orientation e^{1234}."""
    if not u.is_horizontal(reeb):
        raise FormError(f"form {u} is not horizontal")
    return hodge_star(u, [i for i in range(1, u.dim + 1) if i != reeb])


# -- dense tensors --------------------------------------------------------

def zeros(n: int, rank: int) -> np.ndarray:
    t = np.empty((n,) * rank, dtype=object)
    t.fill(ZERO)
    return t


def to_tensor(u: KForm) -> np.ndarray:
    t = zeros(u.dim, u.degree)
    if u.degree == 0:
        t[()] = u.coeffs.get((), ZERO)
        return t
    for idx, c in u.coeffs.items():
        neg = -c
        for perm in itertools.permutations(range(u.degree)):
            p = tuple(idx[k] - 1 for k in perm)
            t[p] = c if perm_sign(perm) > 0 else neg
    return t


def is_antisymmetric(t: np.ndarray) -> bool:
    k = t.ndim
    for a in range(k):
        for b in range(a + 1, k):
            if not is_zero_tensor(t + np.swapaxes(t, a, b)):
                return False
    return True


def from_tensor(t: np.ndarray, check: bool = True) -> KForm:
    """Inverse of :func:`to_tensor`; ``check`` verifies full antisymmetry."""
    if check and not is_antisymmetric(t):
        raise FormError("tensor is not totally antisymmetric")
    n, k = (t.shape[0] if t.ndim else 0), t.ndim
    if k == 0:
        return KForm(0, 0, {(): t[()]})
    coeffs = {}
    for idx in itertools.combinations(range(n), k):
        c = t[idx]
        if not c.is_zero():
            coeffs[tuple(i + 1 for i in idx)] = c
    return KForm._raw(n, k, coeffs)


def is_zero_tensor(t) -> bool:
    if isinstance(t, np.ndarray):
        return all(RingElement.coerce(x).is_zero() for x in t.flat)
    return RingElement.coerce(t).is_zero()


def first_nonzero(t: np.ndarray):
    """(1-based index, value) of the first nonzero entry, or None."""
    for idx in itertools.product(*(range(s) for s in t.shape)):
        v = RingElement.coerce(t[idx])
        if not v.is_zero():
            return tuple(i + 1 for i in idx), v
    return None


def tensors_equal(s, t) -> bool:
    return is_zero_tensor(np.asarray(s, dtype=object) - np.asarray(t, dtype=object))


def einsum(subscripts: str, *operands: np.ndarray) -> np.ndarray:
    """numpy einsum on object arrays, always returning an object array."""
    out = np.einsum(subscripts, *operands)
    if not isinstance(out, np.ndarray):
        arr = np.empty((), dtype=object)
        arr[()] = RingElement.coerce(out)
        return arr
    # einsum over an empty sum yields int 0 entries; lift them into the ring
    flat = out.reshape(-1)
    for k, x in enumerate(flat):
        if not isinstance(x, RingElement):
            flat[k] = RingElement.coerce(x)
    return out


def contract(t: np.ndarray, pairs: Iterable[tuple[int, int]]) -> np.ndarray:
    """Trace over each pair of (0-based) slots; free slots keep their order."""
    pairs = [tuple(p) for p in pairs]
    used = [s for p in pairs for s in p]
    if len(set(used)) != len(used):
        raise FormError(f"slot collision in {pairs}")
    if any(not 0 <= s < t.ndim for s in used):
        raise FormError(f"slot out of range in {pairs}")
    letters = list(string.ascii_letters[: t.ndim])
    for a, b in pairs:
        letters[b] = letters[a]
    free = [letters[s] for s in range(t.ndim) if s not in used]
    return einsum("".join(letters) + "->" + "".join(free), t)


def identity_tensor(n: int) -> np.ndarray:
    t = zeros(n, 2)
    for i in range(n):
        t[i, i] = ONE
    return t


def norm_squared(u: KForm) -> RingElement:
    """Full repeated-index sum of squares, no 1/k! factor."""
    t = to_tensor(u)
    total = ZERO
    for x in t.flat:
        if not x.is_zero():
            total = total + x * x
    return total
