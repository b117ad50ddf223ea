"""Command-line front end.

    spinsoliton verify --preset dimensionless --hbar 2 --out out/
    spinsoliton sample-fields --preset physical --n-r 32 --n-theta 9
    spinsoliton calibrate --preset dimensionless --hbar 2
    spinsoliton residuals --preset dimensionless --order 4

Values may also come from a flat ``key=value`` file (``--config``); flags
given on the command line win over the file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields as dc_fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import differential as diff
from . import fields
from . import observables as obs
from . import verify
from .errors import DomainError

PRESETS = ("dimensionless", "physical")
FIELD_COLUMNS = ("r", "theta", "E_r", "H_r", "H_theta", "U", "l_z")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    preset: Optional[str] = None
    e: Optional[float] = None
    m: Optional[float] = None
    hbar: Optional[float] = None
    c: Optional[float] = None
    r0: Optional[float] = None
    c1: Optional[float] = None
    c2: Optional[float] = None
    axis: Optional[tuple] = None
    theta0: Optional[float] = None
    n_radial: int = 16
    n_polar: int = 16
    h: Optional[float] = None
    order: int = 2
    out: str = "out"
    seed: int = 0

    def constants(self) -> fields.PhysicalConstants:
        if self.preset == "physical":
            base = fields.PhysicalConstants.physical()
        elif self.preset == "dimensionless":
            base = fields.PhysicalConstants.dimensionless()
        elif self.preset is None:
            missing = [n for n in ("e", "m", "hbar", "c") if getattr(self, n) is None]
            if missing:
                raise UsageError(f"no --preset given and constants missing: {', '.join(missing)}")
            base = None
        else:
            raise UsageError(f"unknown preset {self.preset!r}")
        vals = {n: getattr(self, n) if getattr(self, n) is not None else getattr(base, n) for n in ("e", "m", "hbar", "c")}
        return fields.PhysicalConstants(**vals)

    def params(self, k: fields.PhysicalConstants) -> Optional[fields.SolitonParams]:
        """Published parameters with any explicit overrides; None when nothing is overridden."""
        overrides = {n: getattr(self, n) for n in ("r0", "c1", "c2", "theta0") if getattr(self, n) is not None}
        if not overrides and self.axis is None:
            return None
        p = fields.paper_params(k)
        vals = {"c1": p.c1, "c2": p.c2, "r0": p.r0, "theta0": p.theta0, **overrides}
        axis = self.axis if self.axis is not None else p.axis
        a = np.asarray(axis, dtype=float)
        return fields.SolitonParams(axis=tuple(a / np.linalg.norm(a)), **vals)

    def quadrature(self) -> obs.QuadratureSpec:
        return obs.QuadratureSpec(n_radial=self.n_radial, n_polar=self.n_polar)

    def stencil(self, r0: float) -> diff.StencilSpec:
        return diff.StencilSpec(self.h if self.h is not None else r0 / 100.0, self.order)

    def dumps(self) -> str:
        lines = []
        for f in dc_fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if f.name == "axis":
                v = ",".join(repr(float(a)) for a in v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> RunConfig:
        raw = fields.parse_config(text)
        known = {f.name: f for f in dc_fields(cls)}
        kwargs = {}
        for key, value in raw.items():
            if key not in known:
                raise UsageError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(key, value)
        return cls(**kwargs)


def _coerce(key: str, value):
    if key in ("preset", "out"):
        return value
    if key == "axis":
        return tuple(float(a) for a in value.split(","))
    if key in ("n_radial", "n_polar", "order", "seed"):
        return int(value)
    return float(value)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key=value file; flags override it")
    common.add_argument("--preset", choices=PRESETS)
    for name in ("e", "m", "hbar", "c", "r0", "c1", "c2", "theta0", "h"):
        common.add_argument(f"--{name}", type=float)
    common.add_argument("--axis", type=lambda s: tuple(float(a) for a in s.split(",")), help="dipole axis as x,y,z")
    common.add_argument("--n-radial", type=int)
    common.add_argument("--n-polar", type=int)
    common.add_argument("--order", type=int, choices=(2, 4))
    common.add_argument("--out")
    common.add_argument("--seed", type=int)

    parser = argparse.ArgumentParser(prog="spinsoliton", description="Soliton electrodynamics verification")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run all checks, write report.json")
    sf = sub.add_parser("sample-fields", parents=[common], help="write fields.csv on an (r, theta) grid")
    sf.add_argument("--r-min", type=float, default=0.25, help="in units of r0")
    sf.add_argument("--r-max", type=float, default=4.0, help="in units of r0")
    sf.add_argument("--n-r", type=int, default=16)
    sf.add_argument("--theta-min", type=float, default=0.0)
    sf.add_argument("--theta-max", type=float, default=math.pi)
    sf.add_argument("--n-theta", type=int, default=9)
    sub.add_parser("calibrate", parents=[common], help="solve U = mc^2, |Lz| = hbar/2 for r0, c2")
    sub.add_parser("residuals", parents=[common], help="write residuals.csv from a stencil sweep")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    base = RunConfig.loads(args.config.read_text()) if args.config else RunConfig()
    updates = {}
    for f in dc_fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            updates[f.name] = v
    return RunConfig(**{**{f.name: getattr(base, f.name) for f in dc_fields(RunConfig)}, **updates})


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_verify(cfg: RunConfig) -> int:
    k = cfg.constants()
    p = cfg.params(k)
    q = cfg.quadrature()
    s = cfg.stencil((p or fields.paper_params(k)).r0)
    first = verify.dumps_report(verify.run_report(k, q, s, cfg.seed, p))
    second_report = verify.run_report(k, q, s, cfg.seed, p)
    same = verify.dumps_report(second_report) == first
    second_report["checks"].append(
        verify.Check("determinism.identical_reruns", True, same, 0.0, same).as_dict()
    )
    second_report["pass"] = second_report["pass"] and same
    text = verify.dumps_report(second_report)
    (_outdir(cfg) / "report.json").write_text(text)
    for c in second_report["checks"]:
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']}  got={c['got']!r} expected={c['expected']!r} tol={c['tol']!r}")
    cal = second_report["calibration"]
    print(f"energy_ratio_paper={cal['energy_ratio_paper']:.6f} lz_ratio_paper={cal['lz_ratio_paper']:.12f}")
    return 0 if second_report["pass"] else 1


def cmd_sample_fields(cfg: RunConfig, args) -> int:
    k = cfg.constants()
    p = cfg.params(k) or fields.paper_params(k)
    if args.r_min <= 0 or args.r_max < args.r_min:
        raise UsageError("grid must satisfy 0 < r-min <= r-max (units of r0)")
    if args.n_r < 1 or args.n_theta < 1:
        raise UsageError("grid sizes must be positive")
    radii = p.r0 * np.linspace(args.r_min, args.r_max, args.n_r)
    thetas = np.linspace(args.theta_min, args.theta_max, args.n_theta)
    rows = obs.profile_rows(p, k, radii, thetas)
    path = _outdir(cfg) / "fields.csv"
    obs.write_rows_csv(rows, FIELD_COLUMNS, path)
    print(f"wrote {len(rows)} rows to {path}")
    return 0


def cmd_calibrate(cfg: RunConfig) -> int:
    k = cfg.constants()
    closed = verify.calibrate_closed_form(k)
    newton = verify.calibrate_newton(k)
    cal = verify.calibration_result(k)
    out = {
        "constants": verify.constants_dict(k),
        "r0": closed.r0,
        "c2": closed.c2,
        "c1": closed.c1,
        "newton": {"r0": newton.r0, "c2": newton.c2},
        "paper": {"r0": cal.params_paper.r0, "c2": cal.params_paper.c2},
        **cal.as_dict(),
    }
    text = json.dumps(out, indent=2, sort_keys=True) + "\n"
    (_outdir(cfg) / "calibration.json").write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_residuals(cfg: RunConfig) -> int:
    k = cfg.constants()
    p = cfg.params(k) or fields.paper_params(k)
    s = cfg.stencil(p.r0)
    radii = p.r0 * np.array([0.5, 1.5, 2.0, 3.0, 5.0])
    thetas = np.array([math.pi / 6, math.pi / 3, math.pi / 2, 2 * math.pi / 3])
    rows = diff.residual_sweep(p, radii, thetas, s.h, s.order, levels=3)
    path = _outdir(cfg) / "residuals.csv"
    diff.write_sweep_csv(rows, path)
    observed = [r["observed_order"] for r in rows if not math.isnan(r["observed_order"])]
    print(f"wrote {len(rows)} rows to {path}; observed order median {float(np.median(observed)):.3f}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "sample-fields":
            return cmd_sample_fields(cfg, args)
        if args.command == "calibrate":
            return cmd_calibrate(cfg)
        return cmd_residuals(cfg)
    except (UsageError, DomainError, OSError) as exc:
        parser.print_usage(sys.stderr)
        print(f"spinsoliton: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
