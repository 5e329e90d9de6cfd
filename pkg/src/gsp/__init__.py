"""Componentwise perturbation bounds for the generalized Schur decomposition.

Modules
-------
matrixkit         vectorization operators and dense kernels
gqz               ordered QZ factorization and exact perturbations
linear_bounds     first-order componentwise bounds
reference_bounds  classical normwise/componentwise comparison quantities
nonlinear_bounds  fixed-point refinement of the linear bounds
report, cli       problem files, reports, Monte-Carlo checks, sweeps
"""
from .errors import GSPError, InputError, NumericalError
from .gqz import (
    EigenpairSet,
    ExactPerturbation,
    GeneralizedSchur,
    MatrixPair,
    exact_perturbations,
    generalized_eigenpairs,
    generalized_schur,
)
from .linear_bounds import BoundsBundle, build_L, linear_bundle
from .nonlinear_bounds import NonlinearState, nonlinear_iterate
from .problem import ProblemFile, load_problem

__version__ = "0.1.0"

__all__ = [
    "GSPError", "InputError", "NumericalError",
    "MatrixPair", "GeneralizedSchur", "ExactPerturbation", "EigenpairSet",
    "generalized_schur", "exact_perturbations", "generalized_eigenpairs",
    "BoundsBundle", "build_L", "linear_bundle",
    "NonlinearState", "nonlinear_iterate",
    "ProblemFile", "load_problem",
]
