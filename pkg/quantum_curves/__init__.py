"""
quantum-curves - exact topological recursion and quantum curves of rational spectral curves
"""

__version__ = "0.1.0"

# Export the engine and the checks built on it
from .curve import SpectralCurve, load_curve, parse_curve
from .errors import CheckFailure, CurveError, GuardError, QuantumCurveError
from .expansion import belyi_table, x_expansion
from .operators import load_operator, parse_operator_file
from .recursion import Multidifferential, TopologicalRecursion, omega
from .registry import get_oracle_spec, list_oracles, run_oracle
from .wave import s_coefficient, wave_expansion
from .wkb import reconstruct_operator, verify_quantum_curve, wkb_solve

__all__ = [
    "SpectralCurve",
    "load_curve",
    "parse_curve",
    "CheckFailure",
    "CurveError",
    "GuardError",
    "QuantumCurveError",
    "belyi_table",
    "x_expansion",
    "load_operator",
    "parse_operator_file",
    "Multidifferential",
    "TopologicalRecursion",
    "omega",
    "get_oracle_spec",
    "list_oracles",
    "run_oracle",
    "s_coefficient",
    "wave_expansion",
    "reconstruct_operator",
    "verify_quantum_curve",
    "wkb_solve",
]
