"""Dense spacetime algebra Cl(1,3).

A multivector is stored as 16 real coefficients, one per basis blade. Blades
are keyed by a bitmask: bit ``mu`` set means generator ``gamma_mu`` is a
factor, and factors are always written in ascending order
(``0b0011`` is ``gamma_0 gamma_1``).  The metric is diag(+1, -1, -1, -1).

The generators stored here are the frame the field theory is written in; in
the soliton code they play the role of ``gamma^mu`` (upper index). Raising or
lowering a spatial index is a sign flip that callers do explicitly.

Coefficient arrays may carry leading batch axes, shape ``(..., 16)``; every
operation broadcasts over them so that point clouds can be processed at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DomainError

DIM = 4
NBLADES = 1 << DIM
METRIC = (1.0, -1.0, -1.0, -1.0)

GRADE_OF = np.array([bin(b).count("1") for b in range(NBLADES)])


def blade_product(a: int, b: int) -> tuple[int, int]:
    """Product of two basis blades: returns ``(sign, blade)``.

    The sign counts the transpositions needed to bring ``a b`` into canonical
    order, times the metric factor of every generator that appears twice.
    """
    swaps = 0
    shifted = a >> 1
    while shifted:
        swaps += bin(shifted & b).count("1")
        shifted >>= 1
    sign = -1 if swaps & 1 else 1
    common = a & b
    for mu in range(DIM):
        if common >> mu & 1:
            sign *= int(METRIC[mu])
    return sign, a ^ b


def _build_tables():
    sign = np.zeros((NBLADES, NBLADES), dtype=np.int8)
    index = np.zeros((NBLADES, NBLADES), dtype=np.int64)
    cayley = np.zeros((NBLADES, NBLADES, NBLADES))
    for i in range(NBLADES):
        for j in range(NBLADES):
            s, k = blade_product(i, j)
            sign[i, j] = s
            index[i, j] = k
            cayley[i, j, k] = s
    return sign, index, cayley


PRODUCT_SIGN, PRODUCT_INDEX, _CAYLEY = _build_tables()

# reversion sign for grade k is (-1)^(k(k-1)/2)
_REVERSE_SIGN = np.array([(-1.0) ** (g * (g - 1) // 2) for g in GRADE_OF])


def blade_name(b: int) -> str:
    if b == 0:
        return "1"
    return "g" + "".join(str(mu) for mu in range(DIM) if b >> mu & 1)


class Multivector:
    """Element of Cl(1,3), optionally batched over leading axes.

    Supports ``+``, ``-``, scalar scaling, and ``*`` as the geometric product.
    """

    __slots__ = ("coeffs",)
    __array_priority__ = 100

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=float)
        if c.shape[-1:] != (NBLADES,):
            raise DomainError(f"expected trailing axis of length 16, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise DomainError("multivector coefficients must be finite")
        self.coeffs = c

    # construction -----------------------------------------------------

    @classmethod
    def zero(cls, shape=()) -> Multivector:
        return cls(np.zeros(tuple(shape) + (NBLADES,)))

    @classmethod
    def scalar(cls, s) -> Multivector:
        s = np.asarray(s, dtype=float)
        c = np.zeros(s.shape + (NBLADES,))
        c[..., 0] = s
        return cls(c)

    @classmethod
    def vector(cls, components) -> Multivector:
        """Grade-1 element from its four components along gamma_0..gamma_3."""
        v = np.asarray(components, dtype=float)
        if v.shape[-1:] != (DIM,):
            raise DomainError("vector needs 4 components")
        c = np.zeros(v.shape[:-1] + (NBLADES,))
        for mu in range(DIM):
            c[..., 1 << mu] = v[..., mu]
        return cls(c)

    @classmethod
    def from_blades(cls, terms: Mapping[int, float]) -> Multivector:
        c = np.zeros(NBLADES)
        for b, v in terms.items():
            c[b] += v
        return cls(c)

    @classmethod
    def basis(cls, b: int) -> Multivector:
        return cls.from_blades({b: 1.0})

    # access -----------------------------------------------------------

    @property
    def shape(self) -> tuple:
        return self.coeffs.shape[:-1]

    def __getitem__(self, blade: int):
        return self.coeffs[..., blade]

    def scalar_part(self):
        return self.coeffs[..., 0]

    def vector_part(self):
        """The four grade-1 components as an array of shape ``(..., 4)``."""
        return np.stack([self.coeffs[..., 1 << mu] for mu in range(DIM)], axis=-1)

    def pseudoscalar_part(self):
        return self.coeffs[..., NBLADES - 1]

    def norm(self):
        """Euclidean norm of the coefficient array (not the algebra's quadratic form)."""
        return np.sqrt(np.sum(self.coeffs**2, axis=-1))

    def grades(self, atol: float = 0.0) -> set[int]:
        mask = np.any(np.abs(self.coeffs.reshape(-1, NBLADES)) > atol, axis=0)
        return {int(GRADE_OF[b]) for b in range(NBLADES) if mask[b]}

    def is_grade(self, k: int, rtol: float = 1e-12) -> bool:
        """True if every blade outside grade ``k`` is negligible."""
        scale = max(1.0, float(np.max(np.abs(self.coeffs), initial=0.0)))
        off = self.coeffs[..., GRADE_OF != k]
        return bool(np.all(np.abs(off) <= rtol * scale))

    # arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Multivector):
            return Multivector(self.coeffs + other.coeffs)
        return self + Multivector.scalar(other)

    __radd__ = __add__

    def __neg__(self):
        return Multivector(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        return Multivector(self.coeffs * np.asarray(other, dtype=float)[..., None])

    def __rmul__(self, other):
        return Multivector(self.coeffs * np.asarray(other, dtype=float)[..., None])

    def __truediv__(self, other):
        return Multivector(self.coeffs / np.asarray(other, dtype=float)[..., None])

    def reverse(self) -> Multivector:
        return reversion(self)

    def grade(self, k: int) -> Multivector:
        return grade(self, k)

    def allclose(self, other, rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        if not isinstance(other, Multivector):
            other = Multivector.scalar(other)
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=rtol, atol=atol))

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            if np.isscalar(other):
                other = Multivector.scalar(other)
            else:
                return NotImplemented
        return bool(np.array_equal(*np.broadcast_arrays(self.coeffs, other.coeffs)))

    __hash__ = None

    def __repr__(self):
        if self.coeffs.ndim > 1:
            return f"Multivector(shape={self.shape})"
        terms = [f"{v:+.6g}*{blade_name(b)}" for b, v in enumerate(self.coeffs) if v != 0.0]
        return "Multivector(" + (" ".join(terms) if terms else "0") + ")"


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    return Multivector(np.einsum("...i,...j,ijk->...k", a.coeffs, b.coeffs, _CAYLEY))


def reversion(a: Multivector) -> Multivector:
    """Main anti-automorphism ``*``: reverses factor order in every blade."""
    return Multivector(a.coeffs * _REVERSE_SIGN)


def grade(a: Multivector, k: int) -> Multivector:
    if not isinstance(k, (int, np.integer)) or not 0 <= k <= DIM:
        raise DomainError(f"grade must be an integer in 0..4, got {k!r}")
    return Multivector(np.where(GRADE_OF == k, a.coeffs, 0.0))


def _require_vector(a: Multivector, what: str = "first argument"):
    if not a.is_grade(1):
        raise DomainError(f"{what} must be a pure 1-vector")


def vector_dot(a: Multivector, b: Multivector) -> Multivector:
    """Inner product of a 1-vector with a vector or bivector.

    For ``b`` of grade 1 this is the symmetric part (a scalar); for grade 2
    it is ``(ab - ba)/2``.  Mixed-grade ``b`` is handled grade by grade.
    """
    _require_vector(a)
    out = Multivector.zero(np.broadcast_shapes(a.shape, b.shape))
    for k in range(DIM + 1):
        bk = grade(b, k)
        if not np.any(bk.coeffs):
            continue
        abk, bka = a * bk, bk * a
        part = 0.5 * (abk + bka) if k % 2 else 0.5 * (abk - bka)
        if k >= 1:
            out = out + grade(part, k - 1)
    return out


def vector_wedge(a: Multivector, b: Multivector) -> Multivector:
    """Outer product of a 1-vector with ``b``, the grade-raising part of ``ab``."""
    _require_vector(a)
    out = Multivector.zero(np.broadcast_shapes(a.shape, b.shape))
    for k in range(DIM):
        bk = grade(b, k)
        if not np.any(bk.coeffs):
            continue
        abk, bka = a * bk, bk * a
        part = 0.5 * (abk - bka) if k % 2 else 0.5 * (abk + bka)
        out = out + grade(part, k + 1)
    return out


# named elements ------------------------------------------------------

GAMMA = tuple(Multivector.basis(1 << mu) for mu in range(DIM))
ONE = Multivector.scalar(1.0)
GAMMA5 = GAMMA[0] * GAMMA[1] * GAMMA[2] * GAMMA[3]
SIGMA = tuple(GAMMA[i] * GAMMA[0] for i in (1, 2, 3))
I_HAT = SIGMA[0] * SIGMA[1] * SIGMA[2]


def hodge_dual(a: Multivector) -> Multivector:
    """Hodge star in the Clifford form ``*a = reversion(a) gamma^5``."""
    return reversion(a) * GAMMA5


# relative (Pauli) split ----------------------------------------------


def _single_blade(m: Multivector) -> tuple[int, float]:
    (nz,) = np.nonzero(m.coeffs)
    assert len(nz) == 1
    return int(nz[0]), float(m.coeffs[nz[0]])


_E_BLADES = [_single_blade(s) for s in SIGMA]
_H_BLADES = [_single_blade(I_HAT * s) for s in SIGMA]


@dataclass(frozen=True)
class RelativeSplit:
    """Electric and magnetic 3-vectors of a bivector, ``F = E + i H``.

    Components are along sigma^i = gamma^i gamma^0; arrays may be batched
    with shape ``(..., 3)``.
    """

    E: np.ndarray
    H: np.ndarray


def relative_split(F: Multivector) -> RelativeSplit:
    if not F.is_grade(2):
        raise DomainError("relative_split needs a pure bivector")
    E = np.stack([sign * F.coeffs[..., b] for b, sign in _E_BLADES], axis=-1)
    H = np.stack([sign * F.coeffs[..., b] for b, sign in _H_BLADES], axis=-1)
    return RelativeSplit(E=E, H=H)


def relative_join(E, H) -> Multivector:
    """Inverse of :func:`relative_split`: builds ``E_i sigma^i + i H_i sigma^i``."""
    E = np.asarray(E, dtype=float)
    H = np.asarray(H, dtype=float)
    E, H = np.broadcast_arrays(E, H)
    c = np.zeros(E.shape[:-1] + (NBLADES,))
    for i in range(3):
        b, sign = _E_BLADES[i]
        c[..., b] += sign * E[..., i]
        b, sign = _H_BLADES[i]
        c[..., b] += sign * H[..., i]
    return Multivector(c)


def spatial_vector(x) -> Multivector:
    """1-vector with zero time component and spatial components ``x``."""
    x = np.asarray(x, dtype=float)
    zeros = np.zeros(x.shape[:-1] + (1,))
    return Multivector.vector(np.concatenate([zeros, x], axis=-1))
