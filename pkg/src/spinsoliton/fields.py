"""Two-potential field theory and its static soliton solution.

Units are Gaussian CGS. The dimensionless preset sets e = m = c = 1 and
leaves hbar free, so beta = (hbar c / e^2)^2 becomes a tunable number.

Spatial points are arrays of shape ``(..., 3)`` in cm; every function here
broadcasts over the leading axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .clifford import GAMMA5, Multivector, RelativeSplit, relative_join, reversion
from .errors import DomainError, ShellError, SingularPointError

Z_AXIS = (0.0, 0.0, 1.0)


@dataclass(frozen=True)
class PhysicalConstants:
    e: float
    m: float
    hbar: float
    c: float

    def __post_init__(self):
        for name in ("e", "m", "hbar", "c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"constant {name} must be positive and finite, got {v!r}")

    @property
    def beta(self) -> float:
        return (self.hbar * self.c / self.e**2) ** 2

    @property
    def rest_energy(self) -> float:
        return self.m * self.c**2

    @classmethod
    def dimensionless(cls, hbar: float = 1.0) -> PhysicalConstants:
        return cls(e=1.0, m=1.0, hbar=hbar, c=1.0)

    @classmethod
    def physical(cls) -> PhysicalConstants:
        """CODATA electron values converted to Gaussian units."""
        from scipy import constants as sc

        c_cgs = sc.c * 100.0
        # 1 C = 10 c_SI statC
        e_cgs = sc.e * sc.c * 10.0
        return cls(e=e_cgs, m=sc.m_e * 1e3, hbar=sc.hbar * 1e7, c=c_cgs)


@dataclass(frozen=True)
class SolitonParams:
    """Parameters of the soliton family.

    ``theta0`` is the value given to the step function at r = r0 in the
    time component A0. The vector part always uses Theta(0) = 0 because
    the gauge condition demands phi(r0) = 0.
    """

    c1: float
    c2: float
    r0: float
    axis: tuple = Z_AXIS
    theta0: float = 1.0

    def __post_init__(self):
        if not self.r0 > 0:
            raise DomainError(f"r0 must be positive, got {self.r0!r}")
        axis = tuple(float(a) for a in self.axis)
        if len(axis) != 3 or abs(math.sqrt(sum(a * a for a in axis)) - 1.0) > 1e-12:
            raise DomainError(f"axis must be a unit 3-vector, got {self.axis!r}")
        object.__setattr__(self, "axis", axis)
        if not 0.0 <= self.theta0 <= 1.0:
            raise DomainError("theta0 must lie in [0, 1]")

    def with_axis(self, axis) -> SolitonParams:
        a = np.asarray(axis, dtype=float)
        a = a / np.linalg.norm(a)
        return SolitonParams(self.c1, self.c2, self.r0, tuple(a), self.theta0)


def paper_params(k: PhysicalConstants, axis=Z_AXIS, theta0: float = 1.0) -> SolitonParams:
    """Parameter choice that ties r0 and c2 to (e, m, hbar, c) with the 3/4 bracket."""
    bracket = 1.0 + 0.75 * k.beta
    r0 = k.e**2 / (2.0 * k.m * k.c**2) * bracket
    c2 = 0.375 * k.e * k.hbar / (k.m * k.c) * bracket
    return SolitonParams(c1=-k.e, c2=c2, r0=r0, axis=axis, theta0=theta0)


# gauge data and multipliers ---------------------------------------------


@dataclass(frozen=True)
class GaugeData:
    """Radial gauge function chi2 through its derivative ``phi = dchi2/dr``.

    ``chi1_grad`` maps points to the spatial gradient of the electric gauge
    function chi1; ``None`` stands for a constant chi1.
    """

    phi: Optional[Callable] = None
    chi1_grad: Optional[Callable] = None

    @classmethod
    def trivial(cls) -> GaugeData:
        return cls()

    @property
    def is_trivial(self) -> bool:
        return self.phi is None

    def phi_at(self, r):
        r = np.asarray(r, dtype=float)
        return np.zeros_like(r) if self.phi is None else np.asarray(self.phi(r), dtype=float)

    def is_admissible(self, r0: float, atol: float = 0.0) -> bool:
        return bool(abs(float(self.phi_at(r0))) <= atol)


@dataclass(frozen=True)
class MultiplierShell:
    """lambda1 = shell_weight * delta(r - r0), lambda2 = 0, no smooth part."""

    r0: float
    shell_weight: float
    lambda2: float = 0.0
    smooth_part: float = 0.0

    @classmethod
    def for_params(cls, p: SolitonParams, k: PhysicalConstants) -> MultiplierShell:
        return cls(r0=p.r0, shell_weight=-k.c / (4.0 * math.pi * p.r0))


RadialShellDistribution = MultiplierShell


@dataclass(frozen=True)
class ConstraintScalar:
    s: np.ndarray
    p4: np.ndarray


@dataclass(frozen=True)
class FieldSample:
    point: np.ndarray
    F: Multivector
    split: RelativeSplit

    @property
    def E(self):
        return self.split.E

    @property
    def H(self):
        return self.split.H


@dataclass(frozen=True)
class ShellCurrent:
    """Effective current supported on the sphere r = r0.

    ``surface_density`` is the 1-vector coefficient of delta(r - r0) at
    ``point`` (already projected onto the shell).
    """

    r0: float
    point: np.ndarray
    surface_density: Multivector
    smooth_part: Multivector = field(default_factory=Multivector.zero)


# helpers ---------------------------------------------------------------


def _points(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (3,):
        raise DomainError(f"points must have trailing dimension 3, got {x.shape}")
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0.0):
        raise SingularPointError("fields are singular at r = 0")
    return x, r


def step(u, at_zero: float):
    """Heaviside step with an explicit value at 0."""
    u = np.asarray(u, dtype=float)
    return np.where(u > 0, 1.0, np.where(u < 0, 0.0, at_zero))


def _axis(p: SolitonParams):
    return np.asarray(p.axis, dtype=float)


# potentials ------------------------------------------------------------


def a0_profile(r, p: SolitonParams):
    """Time component A0(r) = c1 Theta(r - r0) / r."""
    r = np.asarray(r, dtype=float)
    return p.c1 * step(r - p.r0, p.theta0) / r


def phi_profile(r, p: SolitonParams):
    """Radial factor of the vector potential, c2 Theta(r - r0) / r^3, zero on the shell."""
    r = np.asarray(r, dtype=float)
    return p.c2 * step(r - p.r0, 0.0) / r**3


def potential_A(x, p: SolitonParams) -> Multivector:
    x, r = _points(x)
    a0 = a0_profile(r, p)
    spatial = phi_profile(r, p)[..., None] * np.cross(_axis(p), x)
    return Multivector.vector(np.concatenate([a0[..., None], spatial], axis=-1))


def potential_B(x, g: GaugeData) -> Multivector:
    x, r = _points(x)
    if g.is_trivial:
        return Multivector.zero(x.shape[:-1])
    spatial = (g.phi_at(r) / r)[..., None] * x
    return Multivector.vector(np.concatenate([np.zeros(r.shape + (1,)), spatial], axis=-1))


def omega(x, p: SolitonParams, g: GaugeData) -> Multivector:
    """Generalized potential A + gamma^5 B."""
    return potential_A(x, p) + GAMMA5 * potential_B(x, g)


def constraint_check(w: Multivector) -> ConstraintScalar:
    """Scalar and pseudoscalar parts of w w*."""
    bad = w.grades(atol=0.0) - {1, 3}
    if bad:
        raise DomainError(f"omega must have grades 1 and 3 only, found {sorted(bad)}")
    ww = w * reversion(w)
    return ConstraintScalar(s=ww.scalar_part(), p4=ww.pseudoscalar_part())


# fields ----------------------------------------------------------------


def field_E(x, p: SolitonParams):
    """Coulomb field c1 r / r^3 for r >= r0, zero inside."""
    x, r = _points(x)
    inside = r < p.r0
    return np.where(inside[..., None], 0.0, p.c1 * x / r[..., None] ** 3)


def field_H(x, p: SolitonParams):
    """Point-dipole field c2 (3 (d.rhat) rhat - d) / r^3 for r > r0, zero on and inside the shell."""
    x, r = _points(x)
    d = _axis(p)
    rhat = x / r[..., None]
    cos = rhat @ d
    H = p.c2 * (3.0 * cos[..., None] * rhat - d) / r[..., None] ** 3
    return np.where((r <= p.r0)[..., None], 0.0, H)


def faraday(x, p: SolitonParams) -> Multivector:
    return relative_join(field_E(x, p), field_H(x, p))


def sample_field(x, p: SolitonParams) -> FieldSample:
    E, H = field_E(x, p), field_H(x, p)
    return FieldSample(point=np.asarray(x, dtype=float), F=relative_join(E, H), split=RelativeSplit(E, H))


def effective_current(x, p: SolitonParams, k: PhysicalConstants) -> ShellCurrent:
    """Shell current lambda1 * omega with lambda1 = -(c / 4 pi r0) delta(r - r0).

    ``x`` only fixes a direction; the density belongs to the point r0 * x/|x|.
    A is taken exactly at r = r0: A0 = c1 theta0 / r0, and the vector part
    vanishes because phi(r0) = 0. B = 0 and lambda2 = 0 on the solution.
    """
    x, r = _points(x)
    on_shell = p.r0 * x / r[..., None]
    shell = MultiplierShell.for_params(p, k)
    a_shell = np.zeros(r.shape + (4,))
    a_shell[..., 0] = p.c1 * p.theta0 / p.r0
    density = shell.shell_weight * Multivector.vector(a_shell)
    return ShellCurrent(r0=p.r0, point=on_shell, surface_density=density)


def gauge_constraint_residual(g: GaugeData, shell: MultiplierShell, x) -> tuple[float, float]:
    """Magnitudes of lambda1 d(chi1) and lambda1 d(chi2) on the shell.

    lambda1 lives on r = r0, so both products reduce to the shell weight
    times the gauge gradients there. ``x`` picks the direction on the shell.
    """
    x, r = _points(x)
    on_shell = shell.r0 * x / r[..., None]
    w = abs(shell.shell_weight)
    if g.chi1_grad is None:
        res1 = 0.0
    else:
        res1 = w * float(np.max(np.linalg.norm(np.asarray(g.chi1_grad(on_shell), dtype=float), axis=-1)))
    res2 = w * abs(float(g.phi_at(shell.r0)))
    return res1, res2


def lagrangian_density(x, p: SolitonParams, g: GaugeData, shell: MultiplierShell, k: PhysicalConstants):
    """Off-shell Lagrangian density <F F^>_0 / 8 pi (multiplier terms vanish off the shell).

    With B a pure gradient, F_m = -d^B = 0, so only F_e contributes.
    """
    x, r = _points(x)
    if np.any(np.isclose(r, shell.r0, rtol=1e-12, atol=0.0)):
        raise ShellError("Lagrangian density is ambiguous on the shell r = r0")
    F_e = faraday(x, p)
    F_m = Multivector.zero(F_e.shape)
    F = F_e + GAMMA5 * F_m
    F_hat = F_e - GAMMA5 * F_m
    free = (F * F_hat).scalar_part() / (8.0 * math.pi)
    # lambda1 is supported on r0 only and lambda2 = 0
    return free


# config serialization ----------------------------------------------------

CONFIG_KEYS = ("e", "m", "hbar", "c", "r0", "c1", "c2", "axis", "theta0")


def dump_config(k: PhysicalConstants, p: SolitonParams) -> str:
    values = {
        "e": repr(k.e),
        "m": repr(k.m),
        "hbar": repr(k.hbar),
        "c": repr(k.c),
        "r0": repr(p.r0),
        "c1": repr(p.c1),
        "c2": repr(p.c2),
        "axis": ",".join(repr(a) for a in p.axis),
        "theta0": repr(p.theta0),
    }
    return "".join(f"{key}={values[key]}\n" for key in CONFIG_KEYS)


def parse_config(text: str) -> dict[str, str]:
    """Flat ``key=value`` lines; blank lines and ``#`` comments are ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def load_config(text: str) -> tuple[PhysicalConstants, SolitonParams]:
    d = parse_config(text)
    missing = [key for key in CONFIG_KEYS if key not in d]
    if missing:
        raise DomainError(f"config is missing keys: {', '.join(missing)}")
    k = PhysicalConstants(*(float(d[key]) for key in ("e", "m", "hbar", "c")))
    axis = tuple(float(a) for a in d["axis"].split(","))
    p = SolitonParams(float(d["c1"]), float(d["c2"]), float(d["r0"]), axis, float(d["theta0"]))
    return k, p


def axis_frame(axis) -> np.ndarray:
    """Right-handed orthonormal frame (rows e1, e2, d) whose third vector is ``axis``."""
    d = np.asarray(axis, dtype=float)
    d = d / np.linalg.norm(d)
    helper = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = helper - (helper @ d) * d
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    return np.stack([e1, e2, d])


def point_from_polar(r, theta, p: SolitonParams, azimuth=0.0):
    """Cartesian point at radius r, polar angle theta from the dipole axis."""
    r, theta, azimuth = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r, theta, azimuth)))
    local = np.stack(
        [r * np.sin(theta) * np.cos(azimuth), r * np.sin(theta) * np.sin(azimuth), r * np.cos(theta)], axis=-1
    )
    return local @ axis_frame(p.axis)
