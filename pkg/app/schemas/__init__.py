"""
Pydantic schemas package
"""

from .common import *
from .options import *
from .reports import *
from .run_config import *

__all__ = [
    "ErrorResponse",
    "QuadratureOpts",
    "Decoupled",
    "LocalizedStart",
    "WarmStart",
    "InitialGuess",
    "SolverOpts",
    "TruncationSpec",
    "SolveReport",
    "ReducedDensityMatrix",
    "GroundStateReport",
    "CriticalPoint",
    "ScalingLimitPrediction",
    "ExponentFit",
    "ExponentSamples",
    "ExponentSuite",
    "ExactGround",
    "TruncationSweep",
    "GridSpec",
    "RunConfig",
]
