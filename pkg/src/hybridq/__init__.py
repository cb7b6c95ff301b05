"""Variational spectral solver for a 2D spin-charge hybrid-qubit quantum dot.

One electron in a quartic double well with a uniform Zeeman field and a
constant-gradient transverse field, solved by the Ritz method in a
Hermite-Gaussian well-pair basis.
"""

from .assembly import AssemblyDiagnostics, SpectralProblem, assemble, validate
from .basis import (BasisIndex, BasisSpec, basis_indices, cross_overlap,
                    hermite, normalization, op_element_y, op_element_z)
from .errors import (ConfigError, DegenerateBasisError, HybridQError,
                     IllConditionedBasisError)
from .model import PhysicalParams, ScaledParams, potential, scale
from .observables import (AvoidedCrossing, QubitReport, StateReport,
                          crossing_scan, qubit_report, state_report)
from .quartic1d import (ContourFit, GapSurface, classify_regimes, contour_fit,
                        gap_surface, solve_1d)
from .solver import (EigenSolution, Plateau, StabilizationTable, solve,
                     stabilize)

__version__ = "0.1.0"

__all__ = [
    "AssemblyDiagnostics", "AvoidedCrossing", "BasisIndex", "BasisSpec",
    "ConfigError", "ContourFit", "DegenerateBasisError", "EigenSolution",
    "GapSurface", "HybridQError", "IllConditionedBasisError",
    "PhysicalParams", "Plateau", "QubitReport", "ScaledParams",
    "SpectralProblem", "StabilizationTable", "StateReport", "assemble",
    "basis_indices", "classify_regimes", "contour_fit", "cross_overlap",
    "crossing_scan", "gap_surface", "hermite", "normalization",
    "op_element_y", "op_element_z", "potential", "qubit_report", "scale",
    "solve", "solve_1d", "stabilize", "state_report", "validate",
]
