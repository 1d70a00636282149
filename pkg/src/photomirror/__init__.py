"""Photon + movable mirror interferometer simulator with relative-decoherence tooling."""

from .errors import (
    BasisNotOrthonormal,
    CutoffTooSmall,
    DimensionMismatch,
    NotHermitian,
    NotNormalized,
    PacketsInterfere,
    PreconditionFailed,
    Unreachable,
)
from .hilbert import DensityMatrix, Operator, StateVector
from .measurement import BranchOutcome, PointerBasis
from .mirror_model import ModelParams, Verdict, VisibilityCurve

__version__ = "0.1.0"

__all__ = [
    "BasisNotOrthonormal",
    "BranchOutcome",
    "CutoffTooSmall",
    "DensityMatrix",
    "DimensionMismatch",
    "ModelParams",
    "NotHermitian",
    "NotNormalized",
    "Operator",
    "PacketsInterfere",
    "PointerBasis",
    "PreconditionFailed",
    "StateVector",
    "Unreachable",
    "Verdict",
    "VisibilityCurve",
]
