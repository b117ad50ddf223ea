"""Finite-difference Dirac operator and residuals of the soliton field equations.

Pointwise residuals are only meaningful away from r = 0 and from the shell,
where the closed-form fields are smooth; stencils that would straddle either
are rejected rather than producing spurious O(1) values.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from . import fields
from .clifford import GAMMA, Multivector, relative_split
from .errors import DomainError, ShellError, StencilCollisionError

# central-difference weights for offsets (+-1, +-2) in units of h
_WEIGHTS = {
    2: ((1, 0.5),),
    4: ((1, 2.0 / 3.0), (2, -1.0 / 12.0)),
}


@dataclass(frozen=True)
class StencilSpec:
    h: float
    order: int = 2
    mode: str = "spatial"

    def __post_init__(self):
        if not self.h > 0:
            raise DomainError("stencil step h must be positive")
        if self.order not in _WEIGHTS:
            raise DomainError("stencil order must be 2 or 4")
        if self.mode not in ("spatial", "spacetime"):
            raise DomainError("mode must be 'spatial' or 'spacetime'")

    @property
    def margin(self) -> float:
        return self.order * self.h

    def halved(self) -> StencilSpec:
        return StencilSpec(self.h / 2.0, self.order, self.mode)


def check_stencil(x, s: StencilSpec, shell_radius: Optional[float] = None):
    """Raise if a stencil around any point comes within ``order * h`` of r = 0 or the shell."""
    x = np.asarray(x, dtype=float)
    spatial = x[..., 1:] if s.mode == "spacetime" else x
    r = np.linalg.norm(spatial, axis=-1)
    if np.any(r <= s.margin):
        raise StencilCollisionError("stencil reaches the origin")
    if shell_radius is not None and np.any(np.abs(r - shell_radius) < s.margin):
        raise StencilCollisionError(f"stencil crosses the shell r = {shell_radius}")


def partial(f: Callable, x, axis: int, s: StencilSpec):
    """Central-difference derivative of ``f`` along coordinate ``axis``."""
    x = np.asarray(x, dtype=float)
    step = np.zeros(x.shape[-1])
    step[axis] = s.h
    total = None
    for k, w in _WEIGHTS[s.order]:
        term = w * (_values(f(x + k * step)) - _values(f(x - k * step)))
        total = term if total is None else total + term
    return total / s.h


def _values(v):
    return v.coeffs if isinstance(v, Multivector) else np.asarray(v, dtype=float)


def dirac_apply(field: Callable, x, s: StencilSpec, shell_radius: Optional[float] = None) -> Multivector:
    """Approximate gamma^mu d_mu applied to a multivector field.

    In ``spatial`` mode ``field`` takes points of shape (..., 3); in
    ``spacetime`` mode it takes (..., 4) with x^0 = ct first. A static field
    gives an exactly zero time term since both stencil samples coincide.
    """
    check_stencil(x, s, shell_radius)
    if s.mode == "spatial":
        terms = [(GAMMA[i + 1], partial(field, x, i, s)) for i in range(3)]
    else:
        terms = [(GAMMA[mu], partial(field, x, mu, s)) for mu in range(4)]
    out = None
    for gamma, d in terms:
        t = gamma * Multivector(d)
        out = t if out is None else out + t
    return out


def static(field: Callable) -> Callable:
    """Lift a field of spatial points to one of spacetime points (x^0 ignored)."""
    return lambda X: field(np.asarray(X)[..., 1:])


def faraday_field(p: fields.SolitonParams) -> Callable:
    return lambda x: fields.faraday(x, p)


def free_field_residual(p: fields.SolitonParams, x, s: StencilSpec):
    """Coefficient norm of the finite-difference dF for the soliton field."""
    if s.mode == "spacetime":
        DF = dirac_apply(static(faraday_field(p)), x, s, shell_radius=p.r0)
    else:
        DF = dirac_apply(faraday_field(p), x, s, shell_radius=p.r0)
    return DF.norm()


def decode_dirac(DF: Multivector) -> dict:
    """Read div/curl of E and H out of dF.

    With dF = -gamma^0 (nabla F) for static fields, ``-gamma^0 dF`` has
    scalar part div E, pseudoscalar part div H, and bivector part
    ``-curl H + i curl E``.
    """
    G = -(GAMMA[0] * DF)
    split = relative_split(G.grade(2))
    return {
        "divE": G.scalar_part(),
        "divH": G.pseudoscalar_part(),
        "curlE": split.H,
        "curlH": -split.E,
    }


def _jacobian(f: Callable, x, s: StencilSpec):
    # J[..., i, j] = d f_i / d x_j
    return np.stack([partial(f, x, j, s) for j in range(3)], axis=-1)


def div_curl(f: Callable, x, s: StencilSpec):
    J = _jacobian(f, x, s)
    div = np.trace(J, axis1=-2, axis2=-1)
    curl = np.stack([J[..., 2, 1] - J[..., 1, 2], J[..., 0, 2] - J[..., 2, 0], J[..., 1, 0] - J[..., 0, 1]], axis=-1)
    return div, curl


def maxwell3_residual(p: fields.SolitonParams, x, s: StencilSpec):
    """(div E, |curl E|, div H, |curl H|) by finite differences, in 3-vector language."""
    check_stencil(x, StencilSpec(s.h, s.order), p.r0)
    divE, curlE = div_curl(lambda y: fields.field_E(y, p), x, s)
    divH, curlH = div_curl(lambda y: fields.field_H(y, p), x, s)
    return divE, np.linalg.norm(curlE, axis=-1), divH, np.linalg.norm(curlH, axis=-1)


# radial equations ----------------------------------------------------------


@dataclass(frozen=True)
class RadialProfile:
    """A radial function with its first two derivatives, all callables of r."""

    f: Callable
    df: Callable
    d2f: Callable

    @classmethod
    def power(cls, a: float, n: float) -> RadialProfile:
        return cls(
            f=lambda r: a * r**n,
            df=lambda r: a * n * r ** (n - 1),
            d2f=lambda r: a * n * (n - 1) * r ** (n - 2),
        )

    @classmethod
    def zero(cls) -> RadialProfile:
        return cls.power(0.0, 0.0)


_ODE_COEFF = {"A0": 2.0, "phi": 4.0}


def closed_profile(which: str, r: float, p: fields.SolitonParams) -> RadialProfile:
    """Closed-form A0 = c1/r or phi = c2/r^3 outside the shell, zero inside."""
    if r < p.r0:
        return RadialProfile.zero()
    if which == "A0":
        return RadialProfile.power(p.c1, -1.0)
    if which == "phi":
        return RadialProfile.power(p.c2, -3.0)
    raise DomainError(f"unknown radial equation {which!r}")


def radial_ode_residual(which: str, r: float, p: fields.SolitonParams, profile: Optional[RadialProfile] = None):
    """Off-shell residual of f'' + (k/r) f' with k = 2 for A0 and k = 4 for phi."""
    if which not in _ODE_COEFF:
        raise DomainError(f"unknown radial equation {which!r}")
    if not r > 0:
        raise DomainError("r must be positive")
    if r == p.r0:
        raise ShellError("radial equations carry a delta source at r = r0")
    prof = profile if profile is not None else closed_profile(which, r, p)
    return prof.d2f(r) + _ODE_COEFF[which] / r * prof.df(r)


# shell discontinuities -------------------------------------------------------


@dataclass(frozen=True)
class Jump:
    inner: float
    outer: float
    numeric_inner: float
    numeric_outer: float

    @property
    def jump(self) -> float:
        return self.outer - self.inner

    @property
    def numeric_jump(self) -> float:
        return self.numeric_outer - self.numeric_inner


@dataclass(frozen=True)
class JumpReport:
    """One-sided limits at r0 of A0, A0', phi, phi'.

    Numeric limits come from quadratic extrapolation of samples at
    r0 +- h, 2h, 3h, so no sample sits closer than h to the shell.
    """

    h: float
    A0: Jump
    dA0: Jump
    phi: Jump
    dphi: Jump

    def as_dict(self) -> dict:
        out = {"h": self.h}
        for name in ("A0", "dA0", "phi", "dphi"):
            j = getattr(self, name)
            out[name] = {
                "inner": j.inner,
                "outer": j.outer,
                "jump": j.jump,
                "numeric_jump": float(j.numeric_jump),
            }
        return out


def _one_sided(f: Callable, r0: float, h: float, side: int):
    t = np.array([1.0, 2.0, 3.0])
    v = np.asarray(f(r0 + side * t * h), dtype=float)
    value = 3.0 * v[0] - 3.0 * v[1] + v[2]
    deriv = side * (-2.5 * v[0] + 4.0 * v[1] - 1.5 * v[2]) / h
    return float(value), float(deriv)


def shell_jump_report(p: fields.SolitonParams, h: Optional[float] = None) -> JumpReport:
    h = p.r0 * 1e-3 if h is None else h
    r0 = p.r0
    a_in, da_in = _one_sided(lambda r: fields.a0_profile(r, p), r0, h, -1)
    a_out, da_out = _one_sided(lambda r: fields.a0_profile(r, p), r0, h, +1)
    f_in, df_in = _one_sided(lambda r: fields.phi_profile(r, p), r0, h, -1)
    f_out, df_out = _one_sided(lambda r: fields.phi_profile(r, p), r0, h, +1)
    return JumpReport(
        h=h,
        A0=Jump(0.0, p.c1 / r0, a_in, a_out),
        dA0=Jump(0.0, -p.c1 / r0**2, da_in, da_out),
        phi=Jump(0.0, p.c2 / r0**3, f_in, f_out),
        dphi=Jump(0.0, -3.0 * p.c2 / r0**4, df_in, df_out),
    )


# sweeps ---------------------------------------------------------------------

SWEEP_COLUMNS = ("r", "theta", "residual", "h", "order", "observed_order")


def observed_order(coarse, fine):
    """log2 of the residual ratio under h -> h/2; NaN when either residual is exactly 0."""
    coarse = np.asarray(coarse, dtype=float)
    fine = np.asarray(fine, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where((coarse > 0) & (fine > 0), np.log2(coarse / fine), np.nan)


def residual_sweep(
    p: fields.SolitonParams,
    radii: Iterable[float],
    thetas: Iterable[float],
    h0: float,
    order: int = 2,
    levels: int = 3,
) -> list[dict]:
    """free_field_residual on an (r, theta) grid for h0, h0/2, ...

    Rows come out in r-major, theta, h order, so the output is deterministic.
    """
    radii = list(radii)
    thetas = list(thetas)
    R, T = np.meshgrid(radii, thetas, indexing="ij")
    pts = fields.point_from_polar(R, T, p)
    rows = []
    res = []
    specs = [StencilSpec(h0 / 2**j, order) for j in range(levels)]
    for s in specs:
        res.append(free_field_residual(p, pts, s))
    for i in range(len(radii)):
        for j in range(len(thetas)):
            for lev, s in enumerate(specs):
                obs = float(observed_order(res[lev - 1][i, j], res[lev][i, j])) if lev else math.nan
                rows.append(
                    {
                        "r": float(radii[i]),
                        "theta": float(thetas[j]),
                        "residual": float(res[lev][i, j]),
                        "h": s.h,
                        "order": order,
                        "observed_order": obs,
                    }
                )
    return rows


def write_sweep_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(row[k]) if isinstance(row[k], float) else row[k] for k in SWEEP_COLUMNS})
