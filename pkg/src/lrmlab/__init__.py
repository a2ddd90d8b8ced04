"""Stabilizer-code tools for certifying long-range magic."""

from .codes import build_gross, build_toric2d, build_toric3d, builtin_code, load_code, save_code
from .epr import CorrelationPoint, construct_povm, feasible, min_epr
from .errors import CapExceeded, LrmError, ValidationError
from .magic import GateSpec, LogicalState, f_support, logical_expectation, transversal_report
from .pauli import LocalConfiguration, PauliOperator, QubitPauli, parse_pauli, render_pauli
from .phase import AnyonModel, GoldenInt, gsd, strong_lrm_verdict
from .stabilizer import StabilizerCode, StabilizerGroup

__version__ = "0.1.0"

__all__ = [
    "AnyonModel",
    "CapExceeded",
    "CorrelationPoint",
    "GateSpec",
    "GoldenInt",
    "LocalConfiguration",
    "LogicalState",
    "LrmError",
    "PauliOperator",
    "QubitPauli",
    "StabilizerCode",
    "StabilizerGroup",
    "ValidationError",
    "build_gross",
    "build_toric2d",
    "build_toric3d",
    "builtin_code",
    "construct_povm",
    "f_support",
    "feasible",
    "gsd",
    "load_code",
    "logical_expectation",
    "min_epr",
    "parse_pauli",
    "render_pauli",
    "save_code",
    "strong_lrm_verdict",
    "transversal_report",
]
