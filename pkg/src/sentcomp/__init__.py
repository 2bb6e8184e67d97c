"""Extractive sentence compression as a binary program, solved globally by
branch-and-bound with DCA-generated upper bounds."""

from .bnb import SolverConfig, solve
from .dca import DcaConfig, PenaltyKind, dca
from .fscore import EvalReport, compression_rate, fscore
from .ilp import CompressionIndexing, CompressionResult, build, decode, length_bounds
from .pipeline import Compressor, PipelineConfig, compress, evaluate
from .program import BinaryLinearProgram, enumerate_feasible
from .simplex import LpSolution, solve_lp

__all__ = [
    "BinaryLinearProgram", "CompressionIndexing", "CompressionResult", "Compressor", "DcaConfig",
    "EvalReport", "LpSolution", "PenaltyKind", "PipelineConfig", "SolverConfig", "build",
    "compress", "compression_rate", "dca", "decode", "enumerate_feasible", "evaluate", "fscore",
    "length_bounds", "solve", "solve_lp",
]

__version__ = "0.1.0"
