"""Clifford-algebra electrodynamics of a charged spinning soliton, with numerical audits.

Modules: ``clifford`` (Cl(1,3) multivectors), ``fields`` (soliton potentials
and fields), ``differential`` (finite-difference Dirac operator and
residuals), ``observables`` (charge, energy and angular momentum integrals),
``verify`` (calibration and the check report) and ``cli``.
"""

from .clifford import GAMMA, GAMMA5, I_HAT, SIGMA, Multivector
from .errors import DomainError, ShellError, SingularPointError, StencilCollisionError, ToleranceError
from .fields import PhysicalConstants, SolitonParams, paper_params
from .observables import QuadratureSpec, observe
from .verify import calibrate, run_report

__all__ = [
    "GAMMA",
    "GAMMA5",
    "I_HAT",
    "SIGMA",
    "Multivector",
    "DomainError",
    "ShellError",
    "SingularPointError",
    "StencilCollisionError",
    "ToleranceError",
    "PhysicalConstants",
    "SolitonParams",
    "paper_params",
    "QuadratureSpec",
    "observe",
    "calibrate",
    "run_report",
]

__version__ = "0.1.0"
